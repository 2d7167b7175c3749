//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_SMILES_PARSER_H_
#define CARDIOGEN_SMILES_PARSER_H_

#include <string_view>

#include "cardiogen/smiles/molecule.h"

namespace cardiogen::smiles {

/// Parses a single-component SMILES string into a finalized Molecule.
///
/// Implicit hydrogens follow the default valences of the organic subset and
/// aromaticity is perceived on Kekulé input with a Hückel 4n+2 count over
/// SSSR rings and fused ring pairs. Lowercase input atoms stay aromatic.
///
/// Errors carry the offending token index: UnclosedRing, UnclosedBranch,
/// ValenceViolation, MultiComponentInput, InvalidSyntax, UnsupportedElement
/// (anything outside B C N O P S F Cl Br I H), UnsupportedFeature (isotopes,
/// wildcards, atom classes) and InvalidAromaticity. Tokenizer errors carry a
/// character offset instead.
Molecule parse(std::string_view smiles);

/// Runs Hückel aromaticity perception in place. parse() already calls this;
/// exposed for graphs assembled by hand.
void perceive_aromaticity(Molecule &mol);

}  // namespace cardiogen::smiles

#endif  // CARDIOGEN_SMILES_PARSER_H_
