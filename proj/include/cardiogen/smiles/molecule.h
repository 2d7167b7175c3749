//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_SMILES_MOLECULE_H_
#define CARDIOGEN_SMILES_MOLECULE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cardiogen::smiles {

enum class Element : std::uint8_t { kB, kC, kN, kO, kP, kS, kF, kCl, kBr, kI, kH };

inline constexpr int kElementCount = 11;

std::string_view element_symbol(Element e) noexcept;
std::optional<Element> element_from_symbol(std::string_view symbol) noexcept;
int atomic_number(Element e) noexcept;
bool is_halogen(Element e) noexcept;

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

/// Valence contribution of a bond; aromatic counts as 1 (the pi share is
/// handled by the aromatic atom rules).
inline int bond_valence(BondOrder order) noexcept {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

enum class StereoMark : std::uint8_t { kNone, kAt, kAtAt };

/// Placeholder in Atom::stereo_refs for the implicit hydrogen of a bracket
/// atom such as [C@H].
inline constexpr int kImplicitHydrogen = -1;

struct Atom {
  Element element = Element::kC;
  int formal_charge = 0;
  bool aromatic = false;
  // H count written inside a bracket atom; empty for organic-subset atoms.
  std::optional<int> explicit_h_count;
  // Total attached hydrogens, explicit or implied by the default valence.
  int hydrogens = 0;
  StereoMark stereo = StereoMark::kNone;
  // Neighbor order the stereo mark refers to (atom indices or
  // kImplicitHydrogen). Empty when stereo == kNone.
  std::vector<int> stereo_refs;
  int index = 0;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const noexcept { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

/// Attributed molecular graph. Hydrogens are never stored as atoms; they are
/// tracked as per-atom counts.
///
/// Atoms and bonds are appended with add_atom()/add_bond(); finalize() must be
/// called afterwards to (re)compute ring information.
class Molecule {
public:
  int add_atom(Atom atom);
  int add_bond(int a, int b, BondOrder order);

  /// Recomputes ring perception (smallest set of smallest rings) and ring
  /// membership. Cheap enough to call after every structural edit.
  void finalize();

  bool empty() const noexcept { return atoms_.empty(); }
  int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  int bond_count() const noexcept { return static_cast<int>(bonds_.size()); }

  const Atom &atom(int i) const { return atoms_[i]; }
  Atom &atom(int i) { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }
  Bond &bond(int i) { return bonds_[i]; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Bond> bonds() const noexcept { return bonds_; }

  std::span<const Neighbor> neighbors(int atom) const { return adj_[atom]; }
  int degree(int atom) const { return static_cast<int>(adj_[atom].size()); }
  /// Bond index joining a and b, or -1.
  int find_bond(int a, int b) const;

  bool in_ring(int atom) const { return atom_in_ring_[atom]; }
  bool bond_in_ring(int bond) const { return bond_in_ring_[bond]; }
  const std::vector<bool> &ring_membership() const noexcept {
    return atom_in_ring_;
  }
  /// SSSR cycles as ordered atom lists.
  const std::vector<std::vector<int>> &rings() const noexcept {
    return rings_;
  }
  /// Bond indices of each SSSR cycle, parallel to rings().
  const std::vector<std::vector<int>> &ring_bonds() const noexcept {
    return ring_bonds_;
  }

  int total_hydrogens() const noexcept;
  int total_charge() const noexcept;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<bool> atom_in_ring_;
  std::vector<bool> bond_in_ring_;
  std::vector<std::vector<int>> rings_;
  std::vector<std::vector<int>> ring_bonds_;
};

/// Returns a copy of `mol` with atom i moved to position new_index[i].
/// Stereo references are remapped; bond order in the bond list follows the
/// new atom numbering.
Molecule renumber_atoms(const Molecule &mol, std::span<const int> new_index);

/// Hydrogen count an organic-subset atom would receive from its bonds alone,
/// i.e. what a SMILES reader infers when no bracket is written.
int default_implicit_hydrogens(const Molecule &mol, int atom);

/// Largest bond-order sum (including hydrogens) accepted for an element in
/// a given charge state; charge shifts the valence isoelectronically.
int max_valence(Element e, int formal_charge);

/// Number of connected components (0 for the empty molecule).
int count_components(const Molecule &mol);

}  // namespace cardiogen::smiles

#endif  // CARDIOGEN_SMILES_MOLECULE_H_
