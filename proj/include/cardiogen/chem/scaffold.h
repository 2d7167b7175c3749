//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CHEM_SCAFFOLD_H_
#define CARDIOGEN_CHEM_SCAFFOLD_H_

#include <string>
#include <string_view>

#include "cardiogen/smiles/molecule.h"

namespace cardiogen::chem {

/// Ring systems plus the linkers joining them. Atoms double-bonded to a kept
/// atom stay attached; everything else on a side chain is removed and the
/// lost valence becomes hydrogens. Stereo marks are cleared.
smiles::Molecule murcko_scaffold(const smiles::Molecule &mol);

/// Canonical SMILES of the scaffold, or "" for acyclic input.
std::string murcko_scaffold_smiles(std::string_view smiles);

}  // namespace cardiogen::chem

#endif  // CARDIOGEN_CHEM_SCAFFOLD_H_
