//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/disc/graph.h"

#include <array>
#include <cmath>

#include "cardiogen/chem/properties.h"

namespace cardiogen::disc {

using smiles::BondOrder;
using smiles::Element;
using smiles::Molecule;
using smiles::Neighbor;

namespace {

struct Electronegativity {
  double a, b, c;

  double at(double q) const noexcept { return a + b * q + c * q * q; }
  double cation() const noexcept { return a + b + c; }
};

// Hydrogen's cation electronegativity is fixed at 20.02 rather than a+b+c.
constexpr Electronegativity kHydrogen { 7.17, 6.24, -0.56 };
constexpr double kHydrogenCation = 20.02;

enum class Hybrid { kSp3, kSp2, kSp };

Hybrid hybridization(const Molecule &mol, int a) {
  int doubles = 0;
  for (const Neighbor &nb: mol.neighbors(a)) {
    const BondOrder o = mol.bond(nb.bond).order;
    if (o == BondOrder::kTriple)
      return Hybrid::kSp;
    doubles += o == BondOrder::kDouble ? 1 : 0;
  }
  if (doubles >= 2)
    return Hybrid::kSp;
  if (doubles == 1 || mol.atom(a).aromatic)
    return Hybrid::kSp2;
  return Hybrid::kSp3;
}

Electronegativity parameters(const Molecule &mol, int a) {
  const Hybrid h = hybridization(mol, a);
  switch (mol.atom(a).element) {
  case Element::kC:
    return h == Hybrid::kSp3   ? Electronegativity { 7.98, 9.18, 1.88 }
           : h == Hybrid::kSp2 ? Electronegativity { 8.79, 9.32, 1.51 }
                               : Electronegativity { 10.39, 9.45, 0.73 };
  case Element::kN:
    return h == Hybrid::kSp3   ? Electronegativity { 11.54, 10.82, 1.36 }
           : h == Hybrid::kSp2 ? Electronegativity { 12.87, 11.15, 0.85 }
                               : Electronegativity { 15.68, 11.70, -0.27 };
  case Element::kO:
    return h == Hybrid::kSp3 ? Electronegativity { 14.18, 12.92, 1.39 }
                             : Electronegativity { 17.07, 13.79, 0.47 };
  case Element::kS:
    return h == Hybrid::kSp3 ? Electronegativity { 10.14, 9.13, 1.38 }
                             : Electronegativity { 10.88, 9.485, 1.325 };
  case Element::kP:
    return { 8.90, 8.24, 0.96 };
  case Element::kB:
    return { 5.98, 6.82, 1.605 };
  case Element::kF:
    return { 14.66, 13.85, 2.31 };
  case Element::kCl:
    return { 11.00, 9.69, 1.35 };
  case Element::kBr:
    return { 10.08, 8.47, 1.16 };
  case Element::kI:
    return { 9.90, 7.96, 0.96 };
  case Element::kH:
    return kHydrogen;
  }
  return kHydrogen;
}

int edge_class_of(BondOrder o) {
  switch (o) {
  case BondOrder::kSingle:
    return static_cast<int>(EdgeClass::kSingle);
  case BondOrder::kDouble:
    return static_cast<int>(EdgeClass::kDouble);
  case BondOrder::kTriple:
    return static_cast<int>(EdgeClass::kTriple);
  case BondOrder::kAromatic:
    return static_cast<int>(EdgeClass::kAromatic);
  }
  return static_cast<int>(EdgeClass::kSingle);
}

bool is_hetero(Element e) {
  return e != Element::kC && e != Element::kH;
}

}  // namespace

std::vector<double> partial_charges(const Molecule &mol) {
  const int n = mol.atom_count();
  // Centers: heavy atoms first, then one per implicit hydrogen.
  std::vector<Electronegativity> chi;
  std::vector<double> cation;
  std::vector<double> q;
  std::vector<int> owner;
  std::vector<std::pair<int, int>> links;
  for (int a = 0; a < n; ++a) {
    const Electronegativity p = parameters(mol, a);
    chi.push_back(p);
    cation.push_back(p.cation());
    q.push_back(mol.atom(a).formal_charge);
    owner.push_back(a);
  }
  for (int a = 0; a < n; ++a) {
    for (int h = 0; h < mol.atom(a).hydrogens; ++h) {
      links.emplace_back(a, static_cast<int>(chi.size()));
      chi.push_back(kHydrogen);
      cation.push_back(kHydrogenCation);
      q.push_back(0);
      owner.push_back(a);
    }
  }
  for (const smiles::Bond &b: mol.bonds())
    links.emplace_back(b.begin, b.end);

  std::vector<double> x(chi.size());
  double damping = 1;
  for (int round = 0; round < 8; ++round) {
    damping *= 0.5;
    for (std::size_t i = 0; i < chi.size(); ++i)
      x[i] = chi[i].at(q[i]);
    std::vector<double> dq(chi.size(), 0.0);
    for (auto [i, j]: links) {
      // Electrons flow toward the more electronegative end, scaled by the
      // cation electronegativity of the donor.
      const int donor = x[i] < x[j] ? i : j;
      const double t = (x[j] - x[i]) / cation[donor] * damping;
      dq[i] += t;
      dq[j] -= t;
    }
    for (std::size_t i = 0; i < chi.size(); ++i)
      q[i] += dq[i];
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < q.size(); ++i)
    out[owner[i]] += q[i];
  return out;
}

MolecularGraph featurize_graph(const Molecule &mol) {
  const int n = mol.atom_count();
  MolecularGraph g;
  g.nodes = Eigen::MatrixXf::Zero(n, kAtomFeatureCount);
  const std::vector<double> charges = partial_charges(mol);
  for (int a = 0; a < n; ++a) {
    const smiles::Atom &atom = mol.atom(a);
    const Element e = atom.element;
    auto row = g.nodes.row(a);
    row(kIsCarbon) = e == Element::kC;
    row(kIsNitrogen) = e == Element::kN;
    row(kIsOxygen) = e == Element::kO;
    row(kIsPhosphorus) = e == Element::kP;
    row(kIsSulfur) = e == Element::kS;
    int hetero = 0;
    for (const Neighbor &nb: mol.neighbors(a))
      hetero += is_hetero(mol.atom(nb.atom).element) ? 1 : 0;
    row(kHydrophobic) =
        (e == Element::kC || smiles::is_halogen(e)) && hetero == 0;
    row(kAromatic) = atom.aromatic;
    const bool n_or_o = e == Element::kN || e == Element::kO;
    row(kAcceptor) = n_or_o && atom.formal_charge <= 0;
    row(kDonor) = n_or_o && atom.hydrogens > 0;
    row(kInRing) = mol.in_ring(a);
    row(kHeavyNeighbors) = static_cast<float>(mol.degree(a));
    row(kHeteroNeighbors) = static_cast<float>(hetero);
    row(kPartialCharge) = static_cast<float>(charges[a]);
    row(kAtomicMass) = static_cast<float>(chem::atomic_mass(e));
  }
  for (const smiles::Bond &b: mol.bonds()) {
    const int c = edge_class_of(b.order);
    g.source.push_back(b.begin);
    g.target.push_back(b.end);
    g.edge_class.push_back(c);
    g.source.push_back(b.end);
    g.target.push_back(b.begin);
    g.edge_class.push_back(c);
  }
  for (int a = 0; a < n; ++a) {
    g.source.push_back(a);
    g.target.push_back(a);
    g.edge_class.push_back(static_cast<int>(EdgeClass::kSelf));
  }
  return g;
}

GraphBatch batch_graphs(std::span<const MolecularGraph *const> graphs) {
  GraphBatch b;
  int nodes = 0;
  for (const MolecularGraph *g: graphs)
    nodes += g->node_count();
  b.nodes.resize(nodes, kAtomFeatureCount);
  b.graph_count = static_cast<int>(graphs.size());
  int offset = 0;
  for (int gi = 0; gi < b.graph_count; ++gi) {
    const MolecularGraph &g = *graphs[gi];
    b.nodes.middleRows(offset, g.node_count()) = g.nodes;
    for (int e = 0; e < g.edge_count(); ++e) {
      b.source.push_back(g.source[e] + offset);
      b.target.push_back(g.target[e] + offset);
      b.edge_class.push_back(g.edge_class[e]);
    }
    b.graph_of_node.insert(b.graph_of_node.end(), g.node_count(), gi);
    offset += g.node_count();
  }
  return b;
}

}  // namespace cardiogen::disc
