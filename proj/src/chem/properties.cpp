//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/chem/properties.h"

#include <algorithm>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cardiogen/core/error.h"

namespace cardiogen::chem {

using smiles::Atom;
using smiles::BondOrder;
using smiles::Element;
using smiles::Molecule;
using smiles::Neighbor;

namespace {

constexpr double kHydrogenMass = 1.008;

const char kLogpTable[] =
#include "cardiogen/logp_classes.inc"
    ;

const char kTpsaTable[] =
#include "cardiogen/tpsa_classes.inc"
    ;

// Rows of "<id>\t<key>\t<value>", '#' comments skipped.
std::vector<std::pair<std::string, double>> read_table(const char *text,
                                                       int *max_id) {
  std::vector<std::pair<std::string, double>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream fields(line);
    int id;
    std::string key;
    double value;
    if (!(fields >> id >> key >> value))
      throw Error(ErrorCode::kParseError, "contribution table: " + line);
    rows.emplace_back(key, value);
    if (max_id)
      *max_id = std::max(*max_id, id);
  }
  return rows;
}

const std::vector<double> &logp_values() {
  static const std::vector<double> values = [] {
    int max_id = 0;
    auto rows = read_table(kLogpTable, &max_id);
    std::vector<double> v;
    for (const auto &[name, value]: rows)
      v.push_back(value);
    if (static_cast<int>(v.size()) != max_id)
      throw Error(ErrorCode::kParseError, "LogP table ids not contiguous");
    return v;
  }();
  return values;
}

const std::unordered_map<std::string, double> &tpsa_values() {
  static const std::unordered_map<std::string, double> values = [] {
    std::unordered_map<std::string, double> m;
    for (auto &[key, value]: read_table(kTpsaTable, nullptr))
      m.emplace(key, value);
    return m;
  }();
  return values;
}

bool is_hetero(Element e) {
  return e != Element::kC && e != Element::kH;
}

bool has_double_to(const Molecule &mol, int a,
                   std::initializer_list<Element> partners) {
  for (const Neighbor &nb: mol.neighbors(a)) {
    if (mol.bond(nb.bond).order != BondOrder::kDouble)
      continue;
    const Element e = mol.atom(nb.atom).element;
    if (std::find(partners.begin(), partners.end(), e) != partners.end())
      return true;
  }
  return false;
}

bool is_amide_nitrogen(const Molecule &mol, int n) {
  for (const Neighbor &nb: mol.neighbors(n))
    if (mol.bond(nb.bond).order == BondOrder::kSingle
        && mol.atom(nb.atom).element == Element::kC
        && has_double_to(mol, nb.atom, { Element::kO }))
      return true;
  return false;
}

bool in_three_ring(const Molecule &mol, int a) {
  for (const auto &ring: mol.rings())
    if (ring.size() == 3 && std::find(ring.begin(), ring.end(), a) != ring.end())
      return true;
  return false;
}

std::vector<int> bfs_distances(const Molecule &mol, int from) {
  std::vector<int> dist(mol.atom_count(), -1);
  std::queue<int> q;
  dist[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const int a = q.front();
    q.pop();
    for (const Neighbor &nb: mol.neighbors(a))
      if (dist[nb.atom] < 0) {
        dist[nb.atom] = dist[a] + 1;
        q.push(nb.atom);
      }
  }
  return dist;
}

}  // namespace

double atomic_mass(Element e) noexcept {
  switch (e) {
  case Element::kB:
    return 10.81;
  case Element::kC:
    return 12.011;
  case Element::kN:
    return 14.007;
  case Element::kO:
    return 15.999;
  case Element::kP:
    return 30.974;
  case Element::kS:
    return 32.06;
  case Element::kF:
    return 18.998;
  case Element::kCl:
    return 35.45;
  case Element::kBr:
    return 79.904;
  case Element::kI:
    return 126.904;
  case Element::kH:
    return kHydrogenMass;
  }
  return 0;
}

double molecular_weight(const Molecule &mol) {
  double w = 0;
  for (const Atom &a: mol.atoms())
    w += atomic_mass(a.element) + a.hydrogens * kHydrogenMass;
  return w;
}

int rotatable_bond_count(const Molecule &mol) {
  int n = 0;
  for (int b = 0; b < mol.bond_count(); ++b) {
    const auto &bond = mol.bond(b);
    if (bond.order != BondOrder::kSingle || mol.bond_in_ring(b))
      continue;
    if (mol.degree(bond.begin) < 2 || mol.degree(bond.end) < 2)
      continue;
    const Element x = mol.atom(bond.begin).element;
    const Element y = mol.atom(bond.end).element;
    if (x == Element::kC && y == Element::kN
        && has_double_to(mol, bond.begin, { Element::kO }))
      continue;
    if (y == Element::kC && x == Element::kN
        && has_double_to(mol, bond.end, { Element::kO }))
      continue;
    ++n;
  }
  return n;
}

int logp_class(const Molecule &mol, int a) {
  const Atom &atom = mol.atom(a);
  bool hetero_nbr = false, multiple = false;
  for (const Neighbor &nb: mol.neighbors(a)) {
    hetero_nbr = hetero_nbr || is_hetero(mol.atom(nb.atom).element);
    const BondOrder o = mol.bond(nb.bond).order;
    multiple = multiple || o == BondOrder::kDouble || o == BondOrder::kTriple;
  }
  switch (atom.element) {
  case Element::kC:
    if (atom.aromatic)
      return hetero_nbr ? 7 : 6;
    if (multiple) {
      for (const Neighbor &nb: mol.neighbors(a))
        if (mol.bond(nb.bond).order != BondOrder::kSingle
            && is_hetero(mol.atom(nb.atom).element))
          return 5;
      return 4;
    }
    if (hetero_nbr)
      return 3;
    return atom.hydrogens >= 3 ? 1 : 2;
  case Element::kN:
    if (atom.formal_charge > 0)
      return 13;
    if (atom.aromatic)
      return 11;
    if (multiple)
      return 12;
    if (is_amide_nitrogen(mol, a))
      return 10;
    return atom.hydrogens > 0 ? 8 : 9;
  case Element::kO:
    if (atom.formal_charge < 0)
      return 17;
    if (multiple)
      return 16;
    return atom.hydrogens > 0 ? 14 : 15;
  case Element::kF:
    return 19;
  case Element::kCl:
  case Element::kBr:
  case Element::kI:
    return 20;
  default:
    return 18;
  }
}

double crippen_logp(const Molecule &mol) {
  const auto &values = logp_values();
  double s = 0;
  for (int a = 0; a < mol.atom_count(); ++a)
    s += values[logp_class(mol, a) - 1];
  return s;
}

std::string tpsa_key(const Molecule &mol, int a) {
  const Atom &atom = mol.atom(a);
  int s = 0, d = 0, t = 0, ar = 0;
  for (const Neighbor &nb: mol.neighbors(a)) {
    switch (mol.bond(nb.bond).order) {
    case BondOrder::kSingle:
      ++s;
      break;
    case BondOrder::kDouble:
      ++d;
      break;
    case BondOrder::kTriple:
      ++t;
      break;
    case BondOrder::kAromatic:
      ++ar;
      break;
    }
  }
  std::string sym(smiles::element_symbol(atom.element));
  if (atom.aromatic)
    sym[0] = static_cast<char>(sym[0] - 'A' + 'a');
  std::string key = sym + ";q" + std::to_string(atom.formal_charge) + ";h"
                    + std::to_string(atom.hydrogens) + ";s" + std::to_string(s)
                    + ";d" + std::to_string(d) + ";t" + std::to_string(t)
                    + ";a" + std::to_string(ar);
  if (in_three_ring(mol, a))
    key += ";r3";
  return key;
}

double tpsa(const Molecule &mol) {
  const auto &table = tpsa_values();
  double total = 0;
  for (int a = 0; a < mol.atom_count(); ++a) {
    const Element e = mol.atom(a).element;
    if (e != Element::kN && e != Element::kO)
      continue;
    if (auto it = table.find(tpsa_key(mol, a)); it != table.end())
      total += it->second;
  }
  return total;
}

PropertyVector physchem_properties(const Molecule &mol) {
  PropertyVector p;
  p.molecular_weight = molecular_weight(mol);
  p.n_rings = static_cast<double>(mol.rings().size());
  p.n_rotatable_bonds = rotatable_bond_count(mol);
  for (const Atom &a: mol.atoms()) {
    const bool polar = a.element == Element::kN || a.element == Element::kO;
    if (polar && a.hydrogens > 0)
      p.n_hbd += 1;
    if (polar && a.formal_charge <= 0)
      p.n_hba += 1;
    if (a.element != Element::kC)
      p.n_heteroatoms += 1;
    if (a.stereo != smiles::StereoMark::kNone)
      p.n_stereocenters += 1;
    p.formal_charge += a.formal_charge;
  }
  p.tpsa = tpsa(mol);
  p.logp = crippen_logp(mol);
  return p;
}

std::array<std::string_view, kDescriptorCount> descriptor_names() {
  return {
    "molecular_weight", "n_rings",          "n_rotatable_bonds",
    "n_hbd",            "n_hba",            "tpsa",
    "n_heteroatoms",    "logp",             "n_stereocenters",
    "formal_charge",    "count_C",          "count_N",
    "count_O",          "count_P",          "count_S",
    "count_F",          "count_Cl",         "count_Br",
    "count_I",          "bonds_single",     "bonds_double",
    "bonds_triple",     "bonds_aromatic",   "aromatic_atom_fraction",
    "rings_size3",      "rings_size4",      "rings_size5",
    "rings_size6",      "rings_size7",      "rings_size8",
    "max_ring_size",    "degree1_atoms",    "degree2_atoms",
    "degree3_atoms",    "degree4plus_atoms", "fraction_sp3_carbon",
    "graph_diameter",   "heavy_atom_count", "hydrogen_count",
    "ring_atom_fraction",
  };
}

DescriptorVector compute_descriptors(const Molecule &mol) {
  DescriptorVector out;
  Eigen::VectorXd &v = out.values;
  v.setZero(kDescriptorCount);
  const auto props = physchem_properties(mol).values();
  for (int i = 0; i < kPropertyCount; ++i)
    v[i] = props[i];

  constexpr Element kCounted[] = { Element::kC,  Element::kN, Element::kO,
                                   Element::kP,  Element::kS, Element::kF,
                                   Element::kCl, Element::kBr, Element::kI };
  const int n = mol.atom_count();
  int aromatic = 0, carbons = 0, sp3_carbons = 0, ring_atoms = 0, hydrogens = 0;
  for (int a = 0; a < n; ++a) {
    const Atom &atom = mol.atom(a);
    for (int k = 0; k < 9; ++k)
      if (atom.element == kCounted[k])
        v[10 + k] += 1;
    aromatic += atom.aromatic ? 1 : 0;
    ring_atoms += mol.in_ring(a) ? 1 : 0;
    hydrogens += atom.hydrogens;
    const int deg = mol.degree(a);
    if (deg >= 1)
      v[31 + std::min(deg, 4) - 1] += 1;
    if (atom.element == Element::kC) {
      ++carbons;
      bool saturated = !atom.aromatic;
      for (const Neighbor &nb: mol.neighbors(a))
        saturated = saturated && mol.bond(nb.bond).order == BondOrder::kSingle;
      sp3_carbons += saturated ? 1 : 0;
    }
  }
  for (const auto &b: mol.bonds())
    v[19 + static_cast<int>(b.order) - 1] += 1;
  int max_ring = 0;
  for (const auto &ring: mol.rings()) {
    const int size = static_cast<int>(ring.size());
    if (size >= 3 && size <= 8)
      v[24 + size - 3] += 1;
    max_ring = std::max(max_ring, size);
  }
  int diameter = 0;
  for (int a = 0; a < n; ++a)
    for (int d: bfs_distances(mol, a))
      diameter = std::max(diameter, d);

  v[23] = n ? static_cast<double>(aromatic) / n : 0.0;
  v[30] = max_ring;
  v[35] = carbons ? static_cast<double>(sp3_carbons) / carbons : 0.0;
  v[36] = diameter;
  v[37] = n;
  v[38] = hydrogens;
  v[39] = n ? static_cast<double>(ring_atoms) / n : 0.0;
  return out;
}

}  // namespace cardiogen::chem
