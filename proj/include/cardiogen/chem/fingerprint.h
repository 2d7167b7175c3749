//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CHEM_FINGERPRINT_H_
#define CARDIOGEN_CHEM_FINGERPRINT_H_

#include <cstdint>
#include <vector>

#include "cardiogen/smiles/molecule.h"

namespace cardiogen::chem {

inline constexpr int kFingerprintBits = 1024;
inline constexpr int kFingerprintRadius = 2;

class Fingerprint {
public:
  explicit Fingerprint(int n_bits = kFingerprintBits, int radius = 0)
      : n_bits_(n_bits), radius_(radius), words_((n_bits + 63) / 64, 0) { }

  int size() const noexcept { return n_bits_; }
  int radius() const noexcept { return radius_; }

  void set(int i) { words_.at(i / 64) |= std::uint64_t { 1 } << (i % 64); }
  bool test(int i) const { return (words_.at(i / 64) >> (i % 64)) & 1U; }
  int count() const noexcept;
  std::vector<int> on_bits() const;
  const std::vector<std::uint64_t> &words() const noexcept { return words_; }

  bool operator==(const Fingerprint &o) const = default;

private:
  int n_bits_;
  int radius_;
  std::vector<std::uint64_t> words_;
};

/// Hashed circular fingerprint. Environments whose bond set duplicates an
/// earlier one are dropped before hashing into bits.
Fingerprint morgan_fingerprint(const smiles::Molecule &mol,
                               int radius = kFingerprintRadius,
                               int n_bits = kFingerprintBits);

/// |a & b| / |a | b|; 1 when both are empty. Throws LengthMismatch.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

}  // namespace cardiogen::chem

#endif  // CARDIOGEN_CHEM_FINGERPRINT_H_
