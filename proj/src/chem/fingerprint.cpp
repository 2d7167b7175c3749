//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/chem/fingerprint.h"

#include <algorithm>
#include <bit>
#include <set>
#include <tuple>
#include <utility>

#include "cardiogen/core/error.h"
#include "cardiogen/core/hash.h"

namespace cardiogen::chem {

using smiles::Molecule;
using smiles::Neighbor;

int Fingerprint::count() const noexcept {
  int n = 0;
  for (std::uint64_t w: words_)
    n += std::popcount(w);
  return n;
}

std::vector<int> Fingerprint::on_bits() const {
  std::vector<int> out;
  for (int i = 0; i < n_bits_; ++i)
    if (test(i))
      out.push_back(i);
  return out;
}

namespace {

using BondSet = std::vector<std::uint64_t>;

std::uint64_t atom_invariant(const Molecule &mol, int a) {
  const auto &atom = mol.atom(a);
  return Fnv1a()
      .i64(smiles::atomic_number(atom.element))
      .i64(mol.degree(a))
      .i64(atom.hydrogens)
      .i64(atom.formal_charge)
      .i64(atom.aromatic ? 1 : 0)
      .i64(mol.in_ring(a) ? 1 : 0)
      .digest();
}

}  // namespace

Fingerprint morgan_fingerprint(const Molecule &mol, int radius, int n_bits) {
  Fingerprint fp(n_bits, radius);
  const int n = mol.atom_count();
  if (n == 0)
    return fp;
  const std::size_t words = (mol.bond_count() + 63) / 64;

  std::vector<std::uint64_t> ids(n);
  std::vector<BondSet> env(n, BondSet(words, 0));
  std::set<BondSet> seen;
  for (int a = 0; a < n; ++a) {
    ids[a] = atom_invariant(mol, a);
    fp.set(static_cast<int>(ids[a] % n_bits));
  }
  seen.insert(BondSet(words, 0));

  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(n);
    std::vector<BondSet> next_env(n);
    for (int a = 0; a < n; ++a) {
      std::vector<std::pair<int, std::uint64_t>> nbrs;
      BondSet s = env[a];
      for (const Neighbor &nb: mol.neighbors(a)) {
        nbrs.emplace_back(static_cast<int>(mol.bond(nb.bond).order),
                          ids[nb.atom]);
        s[nb.bond / 64] |= std::uint64_t { 1 } << (nb.bond % 64);
        for (std::size_t w = 0; w < words; ++w)
          s[w] |= env[nb.atom][w];
      }
      std::sort(nbrs.begin(), nbrs.end());
      Fnv1a h;
      h.i64(r).u64(ids[a]);
      for (auto [order, id]: nbrs)
        h.i64(order).u64(id);
      next[a] = h.digest();
      next_env[a] = std::move(s);
    }
    // Among environments covering the same bonds only the smallest
    // identifier survives, and only if no earlier radius produced that set.
    std::vector<std::tuple<BondSet, std::uint64_t>> cand;
    for (int a = 0; a < n; ++a)
      cand.emplace_back(next_env[a], next[a]);
    std::sort(cand.begin(), cand.end());
    for (const auto &[set, id]: cand) {
      if (!seen.insert(set).second)
        continue;
      fp.set(static_cast<int>(id % n_bits));
    }
    ids = std::move(next);
    env = std::move(next_env);
  }
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::kLengthMismatch,
                "fingerprint sizes " + std::to_string(a.size()) + " and "
                    + std::to_string(b.size()));
  int both = 0, any = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) {
    both += std::popcount(a.words()[i] & b.words()[i]);
    any += std::popcount(a.words()[i] | b.words()[i]);
  }
  return any == 0 ? 1.0 : static_cast<double>(both) / any;
}

}  // namespace cardiogen::chem
