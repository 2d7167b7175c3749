//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/io/dataset.h"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "cardiogen/core/error.h"
#include "cardiogen/smiles/parser.h"

namespace cardiogen::io {

namespace {

std::string strip(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string &s, double &out) {
  if (s.empty())
    return false;
  char *end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno == 0 && std::isfinite(out);
}

}  // namespace

Dataset read_dataset(const std::filesystem::path &path, disc::Task task,
                     bool strict, double threshold) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  Dataset ds;
  bool seen_content = false;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#')
      continue;
    const bool first = !seen_content;
    seen_content = true;
    const auto tab = text.find('\t');
    const std::string smi = strip(text.substr(0, tab));
    const std::string value =
        tab == std::string::npos ? std::string() : strip(text.substr(tab + 1));
    if (first && (smi == "smiles" || smi == "SMILES"))
      continue;

    std::string reason;
    DatasetRow row;
    row.line = line_no;
    row.smiles = smi;
    if (tab == std::string::npos || value.find('\t') != std::string::npos) {
      reason = "expected two tab-separated columns";
    } else if (!parse_number(value, row.pic50)) {
      reason = "bad pIC50 '" + value + "'";
    } else {
      try {
        row.molecule = smiles::parse(smi);
      } catch (const Error &e) {
        reason = std::string("bad SMILES: ") + e.what();
      }
    }
    if (!reason.empty()) {
      if (strict)
        throw Error(ErrorCode::kParseError,
                    path.string() + ":" + std::to_string(line_no) + ": "
                        + reason);
      ds.skipped.push_back({ line_no, reason });
      continue;
    }
    row.target = task == disc::Task::kClassification
                     ? disc::blocker_label(row.pic50, threshold)
                     : row.pic50;
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty())
    throw Error(ErrorCode::kEmptyAfterFiltering,
                path.string() + ": no usable rows ("
                    + std::to_string(ds.skipped.size()) + " skipped)");
  return ds;
}

}  // namespace cardiogen::io
