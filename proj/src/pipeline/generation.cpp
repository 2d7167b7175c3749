//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/pipeline/generation.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <unordered_set>

#include "cardiogen/core/error.h"
#include "cardiogen/disc/training.h"
#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/parser.h"

namespace cardiogen::pipeline {

namespace {

std::string trim_lower(std::string_view text) {
  std::string s;
  for (char c: text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_bound(const std::string &s, std::string_view whole) {
  if (s.empty())
    throw Error(ErrorCode::kParseError,
                "empty bound in filter '" + std::string(whole) + "'");
  const char *begin = s.c_str();
  char *end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size() || errno == ERANGE || std::isnan(v))
    throw Error(ErrorCode::kParseError,
                "bad bound '" + s + "' in filter '" + std::string(whole) + "'");
  return v;
}

std::string format_bound(double v) {
  if (std::isinf(v))
    return v < 0 ? "-inf" : "inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void check_model(const ModelStack &models, const FilterSpec &spec) {
  for (int c = 0; c < kChannelCount; ++c) {
    const ChannelFilter &f = spec[c];
    if (!f.active())
      continue;
    const std::string name(channel_name(kChannels[c]));
    const disc::FusionModel *m = models.channels[c];
    if (m == nullptr)
      throw Error(ErrorCode::kInvalidArgument,
                  "no model loaded for active channel " + name);
    const bool regression = f.mode == FilterMode::kRange;
    if (regression != (m->config().task == disc::Task::kRegression))
      throw Error(ErrorCode::kInvalidArgument,
                  "filter '" + f.describe() + "' does not match the "
                      + std::string(disc::task_name(m->config().task))
                      + " model for " + name);
    if (models.mlm == nullptr)
      throw Error(ErrorCode::kInvalidArgument,
                  "active filters need a feature model");
  }
}

}  // namespace

std::string_view channel_name(Channel c) {
  switch (c) {
  case Channel::kHerg:
    return "herg";
  case Channel::kNav15:
    return "nav1.5";
  case Channel::kCav12:
    return "cav1.2";
  }
  return "?";
}

ChannelFilter ChannelFilter::range(double lo, double hi) {
  if (!(lo < hi))
    throw Error(ErrorCode::kInvalidArgument,
                "filter range needs lo < hi, got " + format_bound(lo) + ", "
                    + format_bound(hi));
  return { FilterMode::kRange, lo, hi };
}

bool ChannelFilter::passes(double prediction, double threshold) const {
  switch (mode) {
  case FilterMode::kOff:
    return true;
  case FilterMode::kBlockers:
    return prediction >= threshold;
  case FilterMode::kNonBlockers:
    return prediction < threshold;
  case FilterMode::kRange:
    return prediction >= lo && prediction < hi;
  }
  return false;
}

std::string ChannelFilter::describe() const {
  switch (mode) {
  case FilterMode::kOff:
    return "off";
  case FilterMode::kBlockers:
    return "blockers";
  case FilterMode::kNonBlockers:
    return "non-blockers";
  case FilterMode::kRange:
    return "(" + format_bound(lo) + "," + format_bound(hi) + ")";
  }
  return "?";
}

ChannelFilter parse_channel_filter(std::string_view text) {
  const std::string s = trim_lower(text);
  if (s == "off" || s == "none")
    return ChannelFilter::off();
  if (s == "blockers")
    return ChannelFilter::blockers();
  if (s == "non-blockers" || s == "nonblockers")
    return ChannelFilter::non_blockers();
  std::string body = s;
  if (body.size() >= 2 && (body.front() == '(' || body.front() == '[')
      && (body.back() == ')' || body.back() == ']'))
    body = body.substr(1, body.size() - 2);
  const auto comma = body.find(',');
  if (comma == std::string::npos || body.find(',', comma + 1) != body.npos)
    throw Error(ErrorCode::kParseError,
                "filter must be off, blockers, non-blockers or (lo,hi): '"
                    + std::string(text) + "'");
  const double lo = parse_bound(body.substr(0, comma), text);
  const double hi = parse_bound(body.substr(comma + 1), text);
  if (!(lo < hi))
    throw Error(ErrorCode::kParseError,
                "filter range needs lo < hi: '" + std::string(text) + "'");
  return ChannelFilter::range(lo, hi);
}

bool any_active(const FilterSpec &spec) {
  return std::any_of(spec.begin(), spec.end(),
                     [](const ChannelFilter &f) { return f.active(); });
}

ChannelPredictions predict_channels(const ModelStack &models,
                                    const FilterSpec &spec,
                                    const smiles::Molecule &mol) {
  check_model(models, spec);
  ChannelPredictions out;
  if (!any_active(spec))
    return out;
  const disc::Example ex = disc::make_example(mol, *models.mlm);
  for (int c = 0; c < kChannelCount; ++c)
    if (spec[c].active())
      out[c] = disc::predict_examples(*models.channels[c],
                                      std::span(&ex, 1))[0];
  return out;
}

bool passes_filters(const FilterSpec &spec, const ChannelPredictions &p,
                    double threshold) {
  for (int c = 0; c < kChannelCount; ++c) {
    if (!spec[c].active())
      continue;
    if (!p[c] || !spec[c].passes(*p[c], threshold))
      return false;
  }
  return true;
}

GenerationResult generate_filtered_candidates(std::string_view input_smiles,
                                              const FilterSpec &spec,
                                              const ModelStack &models,
                                              const CounterRng &rng,
                                              const GenerationConfig &config) {
  smiles::Molecule input;
  try {
    input = smiles::parse(input_smiles);
  } catch (const Error &e) {
    throw Error(ErrorCode::kInvalidInputSmiles,
                "input '" + std::string(input_smiles) + "': " + e.what());
  }
  if (models.generator == nullptr)
    throw Error(ErrorCode::kInvalidArgument, "no generator model");
  if (config.n < 0 || config.max_attempts < 0 || config.chunk < 1)
    throw Error(ErrorCode::kInvalidArgument, "bad generation config");
  check_model(models, spec);

  const lm::LanguageModel &gen = *models.generator;
  const std::string input_canonical = smiles::write_canonical(input);
  const lm::Conditioning cond = lm::make_conditioning(input, gen.vocab,
                                                      gen.stats);

  GenerationResult result;
  AttemptStats &st = result.stats;
  std::unordered_set<std::string> seen;
  while (st.accepted < config.n && st.attempts < config.max_attempts) {
    const auto m = static_cast<std::size_t>(
        std::min<std::int64_t>(config.chunk,
                               config.max_attempts - st.attempts));
    const std::vector<lm::Conditioning> conds(m, cond);
    const std::vector<lm::Sample> samples = lm::sample_sequences(
        gen, conds, rng, static_cast<std::uint64_t>(st.attempts),
        config.sample);
    for (const lm::Sample &s: samples) {
      ++st.attempts;
      if (!s.valid) {
        ++st.invalid;
      } else if (s.canonical == input_canonical) {
        ++st.input_matches;
      } else if (!seen.insert(s.canonical).second) {
        ++st.duplicates;
      } else {
        ChannelPredictions p = predict_channels(
            models, spec, smiles::parse(s.canonical));
        if (passes_filters(spec, p, models.decision_threshold)) {
          result.candidates.push_back({ s.canonical, p });
          ++st.accepted;
        } else {
          ++st.rejected;
        }
      }
      if (st.accepted == config.n)
        break;
    }
  }
  result.budget_exhausted = st.accepted < config.n;
  return result;
}

}  // namespace cardiogen::pipeline
