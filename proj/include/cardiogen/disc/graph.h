//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_DISC_GRAPH_H_
#define CARDIOGEN_DISC_GRAPH_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "cardiogen/smiles/molecule.h"

namespace cardiogen::disc {

inline constexpr int kAtomFeatureCount = 14;

/// Column order of the node feature matrix.
enum AtomFeature : int {
  kIsCarbon,
  kIsNitrogen,
  kIsOxygen,
  kIsPhosphorus,
  kIsSulfur,
  kHydrophobic,
  kAromatic,
  kAcceptor,
  kDonor,
  kInRing,
  kHeavyNeighbors,
  kHeteroNeighbors,
  kPartialCharge,
  kAtomicMass,
};

/// Edge classes: the four bond orders and the added self-loop.
enum class EdgeClass : int { kSingle, kDouble, kTriple, kAromatic, kSelf };
inline constexpr int kEdgeClassCount = 5;

struct MolecularGraph {
  Eigen::MatrixXf nodes;  // atoms x kAtomFeatureCount
  /// Directed edges, both directions per bond plus one self-loop per atom.
  std::vector<int> source;
  std::vector<int> target;
  std::vector<int> edge_class;

  int node_count() const noexcept { return static_cast<int>(nodes.rows()); }
  int edge_count() const noexcept { return static_cast<int>(source.size()); }
};

/// Gasteiger-Marsili charges: 8 rounds of electronegativity equalization,
/// transfer in round k damped by 0.5^k. Implicit hydrogens take part as
/// separate centers and their charge is added to the heavy atom they sit on.
std::vector<double> partial_charges(const smiles::Molecule &mol);

MolecularGraph featurize_graph(const smiles::Molecule &mol);

/// Disjoint union of several graphs, as used for one training batch.
struct GraphBatch {
  Eigen::MatrixXf nodes;
  std::vector<int> source;
  std::vector<int> target;
  std::vector<int> edge_class;
  std::vector<int> graph_of_node;
  int graph_count = 0;
};

GraphBatch batch_graphs(std::span<const MolecularGraph *const> graphs);

}  // namespace cardiogen::disc

#endif  // CARDIOGEN_DISC_GRAPH_H_
