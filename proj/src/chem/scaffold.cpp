//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/chem/scaffold.h"

#include <vector>

#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/parser.h"

namespace cardiogen::chem {

using smiles::BondOrder;
using smiles::Molecule;
using smiles::Neighbor;

Molecule murcko_scaffold(const Molecule &mol) {
  const int n = mol.atom_count();
  std::vector<bool> keep(n, true);
  std::vector<int> degree(n);
  for (int a = 0; a < n; ++a)
    degree[a] = mol.degree(a);

  // Peel non-ring leaves until only rings and the paths between them remain.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n; ++a) {
      if (!keep[a] || mol.in_ring(a) || degree[a] > 1)
        continue;
      keep[a] = false;
      changed = true;
      for (const Neighbor &nb: mol.neighbors(a))
        if (keep[nb.atom])
          --degree[nb.atom];
    }
  }
  std::vector<bool> core = keep;
  for (int a = 0; a < n; ++a) {
    if (keep[a] || mol.degree(a) != 1)
      continue;
    const Neighbor &nb = mol.neighbors(a)[0];
    if (core[nb.atom] && mol.bond(nb.bond).order == BondOrder::kDouble)
      keep[a] = true;
  }

  Molecule out;
  std::vector<int> index(n, -1);
  for (int a = 0; a < n; ++a) {
    if (!keep[a])
      continue;
    smiles::Atom atom = mol.atom(a);
    atom.stereo = smiles::StereoMark::kNone;
    atom.stereo_refs.clear();
    for (const Neighbor &nb: mol.neighbors(a))
      if (!keep[nb.atom])
        atom.hydrogens += smiles::bond_valence(mol.bond(nb.bond).order);
    if (atom.explicit_h_count)
      atom.explicit_h_count = atom.hydrogens;
    index[a] = out.add_atom(std::move(atom));
  }
  for (const auto &b: mol.bonds())
    if (keep[b.begin] && keep[b.end])
      out.add_bond(index[b.begin], index[b.end], b.order);
  out.finalize();
  return out;
}

std::string murcko_scaffold_smiles(std::string_view smiles) {
  return smiles::write_canonical(murcko_scaffold(smiles::parse(smiles)));
}

}  // namespace cardiogen::chem
