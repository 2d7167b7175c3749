//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CHEM_PROPERTIES_H_
#define CARDIOGEN_CHEM_PROPERTIES_H_

#include <array>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "cardiogen/smiles/molecule.h"

namespace cardiogen::chem {

inline constexpr int kPropertyCount = 10;

struct PropertyVector {
  double molecular_weight = 0;
  double n_rings = 0;
  double n_rotatable_bonds = 0;
  double n_hbd = 0;
  double n_hba = 0;
  double tpsa = 0;
  double n_heteroatoms = 0;
  double logp = 0;
  double n_stereocenters = 0;
  double formal_charge = 0;

  std::array<double, kPropertyCount> values() const {
    return { molecular_weight, n_rings,       n_rotatable_bonds, n_hbd,
             n_hba,            tpsa,          n_heteroatoms,     logp,
             n_stereocenters,  formal_charge };
  }
};

inline constexpr std::array<std::string_view, kPropertyCount> kPropertyNames {
  "molecular_weight", "n_rings",       "n_rotatable_bonds", "n_hbd",
  "n_hba",            "tpsa",          "n_heteroatoms",     "logp",
  "n_stereocenters",  "formal_charge",
};

double atomic_mass(smiles::Element e) noexcept;

PropertyVector physchem_properties(const smiles::Molecule &mol);

double molecular_weight(const smiles::Molecule &mol);
int rotatable_bond_count(const smiles::Molecule &mol);
double tpsa(const smiles::Molecule &mol);
double crippen_logp(const smiles::Molecule &mol);

/// LogP class id (1-based, see data/logp_classes.tsv) of one heavy atom.
int logp_class(const smiles::Molecule &mol, int atom);

/// Environment key used to look up the polar-surface table.
std::string tpsa_key(const smiles::Molecule &mol, int atom);

// Descriptor layout, version 1. The first kPropertyCount entries are the
// PropertyVector in order.
inline constexpr std::string_view kDescriptorLayoutVersion = "cgdesc-1";
inline constexpr int kDescriptorCount = 40;

std::array<std::string_view, kDescriptorCount> descriptor_names();

struct DescriptorVector {
  Eigen::VectorXd values;
  std::string_view version = kDescriptorLayoutVersion;
};

DescriptorVector compute_descriptors(const smiles::Molecule &mol);

}  // namespace cardiogen::chem

#endif  // CARDIOGEN_CHEM_PROPERTIES_H_
