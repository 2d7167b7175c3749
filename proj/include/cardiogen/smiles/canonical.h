//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_SMILES_CANONICAL_H_
#define CARDIOGEN_SMILES_CANONICAL_H_

#include <span>
#include <string>
#include <vector>

#include "cardiogen/smiles/molecule.h"

namespace cardiogen::smiles {

/// Graph-invariant atom classes from iterative neighbor refinement (Morgan
/// style). Atoms that are symmetry equivalent always share a class; the
/// converse holds for almost all molecules. Classes are dense, starting at 0.
std::vector<int> refined_atom_classes(const Molecule &mol);

/// Writes SMILES by depth-first traversal where `ranks` (a total order over
/// atoms, lower first) selects the root and the neighbor visiting order.
std::string write_smiles(const Molecule &mol, std::span<const int> ranks);

/// Deterministic SMILES independent of atom numbering. Remaining ties after
/// refinement are broken by trying every member of the first tied class and
/// keeping the lexicographically smallest output.
///
/// Stereo marks are written (re-oriented to the output neighbor order) but do
/// not influence ranking.
std::string write_canonical(const Molecule &mol);

/// parse() followed by write_canonical().
std::string canonicalize(std::string_view smiles);

struct CanonicalCorpus {
  std::vector<std::string> smiles;
  std::vector<std::size_t> source;  // input index of each entry
  std::vector<std::size_t> failed;  // input indices that did not parse
};

CanonicalCorpus canonicalize_corpus(std::span<const std::string> input);

}  // namespace cardiogen::smiles

#endif  // CARDIOGEN_SMILES_CANONICAL_H_
