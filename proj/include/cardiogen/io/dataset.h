//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_IO_DATASET_H_
#define CARDIOGEN_IO_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "cardiogen/disc/model.h"
#include "cardiogen/disc/training.h"
#include "cardiogen/smiles/molecule.h"

namespace cardiogen::io {

struct DatasetRow {
  std::size_t line = 0;  // 1-based
  std::string smiles;    // as written
  smiles::Molecule molecule;
  double pic50 = 0;
  /// Blocker label for classification, pIC50 for regression.
  double target = 0;
};

struct SkippedRow {
  std::size_t line = 0;
  std::string reason;
};

struct Dataset {
  std::vector<DatasetRow> rows;
  std::vector<SkippedRow> skipped;
};

/// Reads `smiles<TAB>pIC50` lines. Blank lines, '#' comments and a leading
/// "smiles" header are ignored. A malformed row throws ParseError naming its
/// line when `strict`, otherwise it is skipped and reported. Throws
/// FileNotFound, and EmptyAfterFiltering when no row survives.
Dataset read_dataset(const std::filesystem::path &path, disc::Task task,
                     bool strict,
                     double threshold = disc::kBlockerThreshold);

}  // namespace cardiogen::io

#endif  // CARDIOGEN_IO_DATASET_H_
