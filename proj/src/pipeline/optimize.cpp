//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/pipeline/optimize.h"

#include <bit>
#include <cstdio>

#include "json.hpp"

#include "cardiogen/chem/properties.h"
#include "cardiogen/core/error.h"
#include "cardiogen/core/hash.h"
#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/parser.h"

namespace cardiogen::pipeline {

namespace {

constexpr std::uint64_t kGenerationStream = 3;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string config_hash(std::string_view input_smiles, const FilterSpec &spec,
                        const OptimizeConfig &config) {
  Fnv1a h;
  h.text(input_smiles).u64(0);
  for (const ChannelFilter &f: spec)
    h.i64(static_cast<int>(f.mode))
        .u64(std::bit_cast<std::uint64_t>(f.lo))
        .u64(std::bit_cast<std::uint64_t>(f.hi));
  const GenerationConfig &g = config.generation;
  h.i64(g.n).i64(g.max_attempts)
      .u64(std::bit_cast<std::uint64_t>(g.sample.temperature))
      .i64(g.sample.top_k);
  h.i64(config.mi.bins).u64(std::bit_cast<std::uint64_t>(config.mi.redundancy));
  h.u64(config.seed);
  h.text(chem::kDescriptorLayoutVersion);
  return hex64(h.digest());
}

OptimizeReport optimize_cardiotoxic_drug(std::string_view input_smiles,
                                         const FilterSpec &spec,
                                         const ModelStack &models,
                                         const OptimizeConfig &config) {
  if (!any_active(spec))
    throw Error(ErrorCode::kInvalidArgument,
                "at least one channel filter must be active");
  OptimizeReport report;
  report.spec = spec;
  report.seed = config.seed;
  report.config_hash = config_hash(input_smiles, spec, config);

  const GenerationResult gen = generate_filtered_candidates(
      input_smiles, spec, models, CounterRng(config.seed, kGenerationStream),
      config.generation);
  const smiles::Molecule input = smiles::parse(input_smiles);
  report.input_smiles = smiles::write_canonical(input);
  report.stats = gen.stats;
  report.budget_exhausted = gen.budget_exhausted;
  if (gen.candidates.empty())
    return report;

  const auto rows = static_cast<Eigen::Index>(gen.candidates.size() + 1);
  Eigen::MatrixXd desc(rows, chem::kDescriptorCount);
  desc.row(0) = chem::compute_descriptors(input).values.transpose();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < gen.candidates.size(); ++i) {
    const Candidate &c = gen.candidates[i];
    desc.row(static_cast<Eigen::Index>(i) + 1) =
        chem::compute_descriptors(smiles::parse(c.smiles)).values.transpose();
    names.push_back(c.smiles);
  }

  report.pruning = prune_descriptors_mi(desc, config.mi);
  const Eigen::MatrixXd reduced = select_columns(desc, report.pruning->kept);
  const std::vector<RankedEntry> order =
      cosine_rank(reduced.row(0).transpose(),
                  reduced.bottomRows(rows - 1), names);

  Eigen::MatrixXd ordered(rows, desc.cols());
  ordered.row(0) = desc.row(0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const Candidate &c = gen.candidates[order[r].index];
    report.ranked.push_back({ c.smiles, order[r].similarity, c.predictions });
    ordered.row(static_cast<Eigen::Index>(r) + 1) = desc.row(order[r].index + 1);
  }
  try {
    report.pca = pca_fit_project(ordered, 2);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kTooFewRows
        && e.code() != ErrorCode::kDegenerateData)
      throw;
  }
  return report;
}

std::string report_tsv(const OptimizeReport &report) {
  std::string out = "# seed=" + std::to_string(report.seed)
                    + " config_hash=" + report.config_hash
                    + " input=" + report.input_smiles + "\n";
  out += "rank\tsmiles\tsimilarity";
  for (int c = 0; c < kChannelCount; ++c)
    if (report.spec[c].active())
      out += "\t" + std::string(channel_name(kChannels[c]));
  out += "\n";
  for (std::size_t r = 0; r < report.ranked.size(); ++r) {
    const RankedCandidate &rc = report.ranked[r];
    out += std::to_string(r + 1) + "\t" + rc.smiles + "\t"
           + fixed(rc.similarity, 6);
    for (int c = 0; c < kChannelCount; ++c)
      if (report.spec[c].active())
        out += "\t" + (rc.predictions[c] ? fixed(*rc.predictions[c], 4) : "");
    out += "\n";
  }
  return out;
}

std::string report_json(const OptimizeReport &report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["input"] = report.input_smiles;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  ordered_json filters = ordered_json::object();
  for (int c = 0; c < kChannelCount; ++c)
    filters[std::string(channel_name(kChannels[c]))] =
        report.spec[c].describe();
  j["filters"] = filters;
  const AttemptStats &s = report.stats;
  j["attempts"] = { { "total", s.attempts },
                    { "invalid", s.invalid },
                    { "duplicates", s.duplicates },
                    { "input_matches", s.input_matches },
                    { "rejected", s.rejected },
                    { "accepted", s.accepted } };
  j["budget_exhausted"] = report.budget_exhausted;
  j["candidates"] = report.ranked.size();
  j["descriptor_layout"] = chem::kDescriptorLayoutVersion;
  if (report.pruning) {
    const auto names = chem::descriptor_names();
    ordered_json kept = ordered_json::array();
    for (int k: report.pruning->kept)
      kept.push_back(names[k]);
    j["descriptors"] = { { "kept", report.pruning->kept },
                         { "kept_names", kept },
                         { "dropped_constant", report.pruning->constant },
                         { "dropped_redundant", report.pruning->redundant } };
  } else {
    j["descriptors"] = nullptr;
  }
  if (report.pca) {
    const Eigen::VectorXd &ratio = report.pca->model.explained_variance_ratio;
    ordered_json points = ordered_json::array();
    for (Eigen::Index r = 0; r < report.pca->projected.rows(); ++r)
      points.push_back({ report.pca->projected(r, 0),
                         report.pca->projected(r, 1) });
    j["pca"] = { { "explained_variance_ratio",
                   std::vector<double>(ratio.data(), ratio.data() + ratio.size()) },
                 { "points", points } };
  } else {
    j["pca"] = nullptr;
  }
  return j.dump(2) + "\n";
}

}  // namespace cardiogen::pipeline
