//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "cardiogen/core/error.h"
#include "cardiogen/disc/training.h"
#include "cardiogen/pipeline/optimize.h"
#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/parser.h"
#include "test_util.h"

using namespace cardiogen;
using pipeline::ChannelFilter;
using pipeline::FilterSpec;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char *kInput = "NC(=O)c1cccnc1";

ErrorCode code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode {};
}

std::vector<std::string> short_molecules() {
  std::vector<std::string> out;
  for (const std::string &s: test::load_corpus())
    if (s.size() <= 14)
      out.push_back(s);
  return out;
}

// Small generator, feature model and one random regression discriminator.
struct Stack {
  lm::LanguageModel generator;
  lm::LanguageModel mlm;
  disc::FusionModel herg;
  disc::FusionModel herg_classifier;
  double median = 0;

  pipeline::ModelStack models(bool classifier = false) const {
    pipeline::ModelStack m;
    m.generator = &generator;
    m.mlm = &mlm;
    m.channels[0] = classifier ? &herg_classifier : &herg;
    return m;
  }
};

const Stack &stack() {
  static const Stack s = [] {
    Stack st;
    const std::vector<std::string> corpus = short_molecules();
    smiles::Vocabulary vocab = lm::build_lm_vocabulary(corpus, 1, true).vocab;
    lm::PropertyStats stats;
    const lm::LmCorpus data = lm::prepare_corpus(corpus, vocab, true, stats);
    lm::TransformerConfig cfg;
    cfg.n_blocks = 1;
    cfg.n_heads = 2;
    cfg.d_model = 32;
    cfg.dropout = 0;
    cfg.vocab_size = vocab.size();
    lm::LmTrainConfig tc;
    tc.epochs = 30;
    tc.batch_size = 16;
    tc.optimizer = "adamw";
    tc.lr = 3e-3;
    tc.weight_decay = 0.01;
    tc.lr_schedule = "cosine";
    tc.seed = 1;
    CounterRng init(5);
    lm::Transformer gen(cfg, init);
    lm::train_language_model(gen, data, tc);
    st.generator = { gen, vocab, stats };

    lm::TransformerConfig mcfg = cfg;
    mcfg.kind = lm::ModelKind::kMasked;
    mcfg.d_model = 16;
    st.mlm = { lm::Transformer(mcfg, init), vocab, {} };

    disc::FusionConfig dc;
    dc.task = disc::Task::kRegression;
    dc.gat_hidden = 8;
    dc.gat_heads = 2;
    dc.encoder_hidden = 16;
    dc.head_hidden = 16;
    dc.feature_dim = 16;
    st.herg = disc::FusionModel(dc, init);
    dc.task = disc::Task::kClassification;
    st.herg_classifier = disc::FusionModel(dc, init);

    std::vector<disc::Example> ex;
    for (const std::string &m: corpus)
      ex.push_back(disc::make_example(m, st.mlm));
    std::vector<double> p = disc::predict_examples(st.herg, ex);
    std::sort(p.begin(), p.end());
    st.median = p[p.size() / 2];
    return st;
  }();
  return s;
}

FilterSpec herg_only(ChannelFilter f) {
  return { f, ChannelFilter::off(), ChannelFilter::off() };
}

}  // namespace

TEST_CASE("channel filter parsing") {
  const ChannelFilter r = pipeline::parse_channel_filter("(-inf, 6.0)");
  CHECK(r.mode == pipeline::FilterMode::kRange);
  CHECK(r.lo == -kInf);
  CHECK(r.hi == 6.0);
  CHECK(r.passes(5.999));
  CHECK_FALSE(r.passes(6.0));
  CHECK(r.describe() == "(-inf,6)");
  const ChannelFilter b = pipeline::parse_channel_filter("[4.5,inf)");
  CHECK(b.passes(4.5));
  CHECK_FALSE(b.passes(4.49));
  CHECK(pipeline::parse_channel_filter("Blockers").mode
        == pipeline::FilterMode::kBlockers);
  CHECK(pipeline::parse_channel_filter("non-blockers").mode
        == pipeline::FilterMode::kNonBlockers);
  CHECK_FALSE(pipeline::parse_channel_filter("off").active());
  CHECK(ChannelFilter::blockers().passes(0.5));
  CHECK_FALSE(ChannelFilter::non_blockers().passes(0.5));
  CHECK(ChannelFilter::non_blockers().passes(0.49));
  for (const char *bad: { "(6,2)", "(1,1)", "(x,2)", "maybe", "(1,2,3)", "(,2)" })
    CHECK(code_of([&] { pipeline::parse_channel_filter(bad); })
          == ErrorCode::kParseError);
  CHECK(code_of([] { ChannelFilter::range(2, 1); })
        == ErrorCode::kInvalidArgument);
}

TEST_CASE("quantile bins and information measures") {
  const std::vector<double> av { 3.1, 0.5, 2.2, 2.2, 9.0, 4.4, 1.0, 0.5, 7.7, 6.1,
                                 5.0, 2.2, 8.8, 3.3, 0.1, 4.9, 6.6, 7.1, 1.9, 5.5 };
  const std::vector<double> bv { 1, 2, 1, 3, 5, 2, 2, 1, 4, 4,
                                 3, 1, 5, 2, 0, 3, 4, 5, 1, 3 };
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(av.data(), 20);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bv.data(), 20);
  const std::vector<int> ba = pipeline::quantile_bins(a, 16);
  const std::vector<int> bb = pipeline::quantile_bins(b, 16);
  // Reference bins and values from an independent rank-based implementation
  // with a library mutual information routine.
  const std::vector<int> ref_a { 6, 0, 4, 4, 15, 8, 2, 0, 13, 11,
                                 9, 4, 14, 7, 0, 8, 12, 12, 3, 10 };
  const std::vector<int> ref_b { 0, 4, 0, 8, 13, 4, 4, 0, 11, 11,
                                 8, 0, 13, 4, 0, 8, 11, 13, 0, 8 };
  CHECK(ba == ref_a);
  CHECK(bb == ref_b);
  CHECK(std::abs(pipeline::mutual_information(ba, bb) - 1.2445193151367526)
        < 1e-12);
  CHECK(std::abs(pipeline::entropy(ba) - 2.5275191508415689) < 1e-12);
  CHECK(std::abs(pipeline::mutual_information(ba, bb)
                 - pipeline::mutual_information(bb, ba))
        < 1e-12);
  CHECK(std::abs(pipeline::mutual_information(ba, ba) - pipeline::entropy(ba))
        < 1e-12);
  const std::vector<int> constant(20, 0);
  CHECK(pipeline::entropy(constant) == 0.0);
  CHECK(pipeline::mutual_information(ba, constant) == 0.0);
}

TEST_CASE("redundancy pruning") {
  CounterRng rng(31);
  const int n = 10000;
  Eigen::MatrixXd m(n, 5);
  for (int i = 0; i < n; ++i) {
    m(i, 0) = rng.uniform();
    m(i, 1) = rng.uniform();
    m(i, 2) = 7.0;
    m(i, 3) = 2 * m(i, 0) + 1;  // monotone copy of column 0
    m(i, 4) = rng.uniform();
  }
  const pipeline::MiPruning p = pipeline::prune_descriptors_mi(m);
  CHECK(p.kept == std::vector<int> { 0, 1, 4 });
  CHECK(p.constant == std::vector<int> { 2 });
  CHECK(p.redundant == std::vector<int> { 3 });

  // Swapping the duplicate pair drops the later one instead.
  Eigen::MatrixXd swapped = m;
  swapped.col(0).swap(swapped.col(3));
  CHECK(pipeline::prune_descriptors_mi(swapped).redundant
        == std::vector<int> { 3 });

  CHECK(code_of([&] { pipeline::prune_descriptors_mi(m.topRows(1)); })
        == ErrorCode::kTooFewRows);
  const auto sel = pipeline::select_columns(m, p.kept);
  CHECK(sel.cols() == 3);
  CHECK(sel.col(2) == m.col(4));
}

TEST_CASE("cosine ranking") {
  Eigen::VectorXd v(3);
  v << 1, -2, 3;
  CHECK(pipeline::cosine_similarity(v, 2 * v) == doctest::Approx(1.0));
  Eigen::VectorXd x(2), y(2), z(2);
  x << 1, 0;
  y << 0, 1;
  z << 1, 1;
  CHECK(pipeline::cosine_similarity(x, y) == 0.0);
  CHECK(std::abs(pipeline::cosine_similarity(x, z) - std::sqrt(0.5)) < 1e-9);
  CHECK(pipeline::cosine_similarity(x, Eigen::VectorXd::Zero(2)) == 0.0);

  Eigen::MatrixXd cand(4, 2);
  cand << 0, 1, 2, 0, 1, 1, 3, 0;
  const std::vector<std::string> names { "D", "C", "B", "A" };
  const auto r = pipeline::cosine_rank(x, cand, names);
  REQUIRE(r.size() == 4u);
  // Rows 1 and 3 tie at 1.0 and are ordered by name.
  CHECK(r[0].index == 3);
  CHECK(r[1].index == 1);
  CHECK(r[2].index == 2);
  CHECK(r[3].index == 0);
  for (std::size_t i = 1; i < r.size(); ++i)
    CHECK(r[i - 1].similarity >= r[i].similarity);

  CHECK(code_of([&] { pipeline::cosine_rank(v, cand, names); })
        == ErrorCode::kLayoutMismatch);
  CHECK(code_of([&] {
          pipeline::cosine_rank(x, cand, std::span(names).first(2));
        })
        == ErrorCode::kLayoutMismatch);
}

TEST_CASE("principal components") {
  Eigen::MatrixXd line(3, 2);
  line << 1, 1, 2, 2, 3, 3;
  const auto r1 = pipeline::pca_fit_project(line, 1);
  CHECK(std::abs(r1.model.explained_variance_ratio[0] - 1.0) < 1e-12);

  Eigen::MatrixXd x(6, 3);
  x << 1, 2, 0.5, 2, 1, 0.1, 3, 5, 0.9, 4, 3, 0.2, 5, 8, 0.7, 6, 4, 0.4;
  const auto r = pipeline::pca_fit_project(x, 2);
  // Reference ratios from a library PCA on the same z-scored matrix.
  CHECK(std::abs(r.model.explained_variance_ratio[0] - 0.66739562772430938)
        < 1e-10);
  CHECK(std::abs(r.model.explained_variance_ratio[1] - 0.29815107861224671)
        < 1e-10);
  CHECK(r.model.explained_variance_ratio.sum() <= 1 + 1e-9);
  CHECK(r.model.explained_variance_ratio[0]
        >= r.model.explained_variance_ratio[1]);
  const Eigen::MatrixXd gram = r.model.components * r.model.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  for (int c = 0; c < 2; ++c) {
    Eigen::Index at = 0;
    r.model.components.row(c).cwiseAbs().maxCoeff(&at);
    CHECK(r.model.components(c, at) > 0);
  }
  CHECK((r.model.project(x) - r.projected).cwiseAbs().maxCoeff() < 1e-12);

  // Rank-2 data in four dimensions: projections keep every pairwise
  // distance of the standardized rows.
  CounterRng rng(12);
  Eigen::MatrixXd basis(2, 4), coef(9, 2);
  for (Eigen::Index i = 0; i < basis.size(); ++i)
    basis.data()[i] = rng.normal();
  for (Eigen::Index i = 0; i < coef.size(); ++i)
    coef.data()[i] = rng.normal();
  const Eigen::MatrixXd low = coef * basis;
  const auto rk = pipeline::pca_fit_project(low, 2);
  const Eigen::MatrixXd z =
      (low.rowwise() - rk.model.mean.transpose()).array().rowwise()
      / rk.model.scale.transpose().array();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      CHECK(std::abs((z.row(i) - z.row(j)).norm()
                     - (rk.projected.row(i) - rk.projected.row(j)).norm())
            < 1e-8);
  CHECK(std::abs(rk.model.explained_variance_ratio.sum() - 1.0) < 1e-9);

  CHECK(code_of([&] { pipeline::pca_fit_project(line.topRows(2), 2); })
        == ErrorCode::kTooFewRows);
  const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(4, 3, 2.5);
  CHECK(code_of([&] { pipeline::pca_fit_project(same, 2); })
        == ErrorCode::kDegenerateData);
}

TEST_CASE("unfiltered generation takes the first distinct valid samples") {
  const Stack &st = stack();
  const CounterRng rng(44, 2);
  pipeline::GenerationConfig gc;
  gc.n = 5;
  gc.max_attempts = 4000;
  const FilterSpec off {};
  const auto res = pipeline::generate_filtered_candidates(kInput, off,
                                                          st.models(), rng, gc);
  REQUIRE(res.candidates.size() == 5u);
  CHECK_FALSE(res.budget_exhausted);

  // Replay the per-attempt streams directly.
  const lm::Conditioning cond = lm::make_conditioning(
      smiles::parse(kInput), st.generator.vocab, st.generator.stats);
  const std::vector<lm::Conditioning> conds(res.stats.attempts, cond);
  const auto samples = lm::sample_sequences(st.generator, conds, rng, 0);
  std::vector<std::string> expect;
  std::set<std::string> seen;
  const std::string input = smiles::canonicalize(kInput);
  for (const lm::Sample &s: samples)
    if (s.valid && s.canonical != input && seen.insert(s.canonical).second)
      expect.push_back(s.canonical);
  REQUIRE(expect.size() == 5u);
  CHECK(samples.back().valid);
  for (int i = 0; i < 5; ++i)
    CHECK(res.candidates[i].smiles == expect[i]);
  const auto &s = res.stats;
  CHECK(s.accepted == 5);
  CHECK(s.rejected == 0);
  CHECK(s.invalid + s.duplicates + s.input_matches + s.accepted == s.attempts);

  gc.chunk = 7;
  const auto again = pipeline::generate_filtered_candidates(
      kInput, off, st.models(), rng, gc);
  CHECK(again.stats.attempts == s.attempts);
  for (int i = 0; i < 5; ++i)
    CHECK(again.candidates[i].smiles == expect[i]);

  gc.max_attempts = 0;
  const auto none = pipeline::generate_filtered_candidates(kInput, off,
                                                           st.models(), rng, gc);
  CHECK(none.budget_exhausted);
  CHECK(none.candidates.empty());
  CHECK(none.stats.attempts == 0);
}

TEST_CASE("filtered generation is sound") {
  const Stack &st = stack();
  pipeline::GenerationConfig gc;
  gc.n = 6;
  gc.max_attempts = 6000;
  const FilterSpec spec = herg_only(ChannelFilter::range(-kInf, st.median));
  const auto res = pipeline::generate_filtered_candidates(
      kInput, spec, st.models(), CounterRng(45), gc);
  REQUIRE(res.candidates.size() == 6u);
  CHECK(res.stats.rejected > 0);
  const std::string input = smiles::canonicalize(kInput);
  std::set<std::string> distinct;
  for (const pipeline::Candidate &c: res.candidates) {
    CHECK(c.smiles != input);
    CHECK(smiles::canonicalize(c.smiles) == c.smiles);
    distinct.insert(c.smiles);
    const disc::Example ex = disc::make_example(c.smiles, st.mlm);
    const double p = disc::predict_examples(st.herg, std::span(&ex, 1))[0];
    CHECK(p < st.median);
    CHECK(c.predictions[0] == p);
    CHECK_FALSE(c.predictions[1].has_value());
  }
  CHECK(distinct.size() == 6u);

  const FilterSpec cls = herg_only(ChannelFilter::non_blockers());
  const auto r2 = pipeline::generate_filtered_candidates(
      kInput, cls, st.models(true), CounterRng(46), gc);
  for (const pipeline::Candidate &c: r2.candidates)
    CHECK(*c.predictions[0] < 0.5);
}

TEST_CASE("generation errors") {
  const Stack &st = stack();
  pipeline::GenerationConfig gc;
  gc.n = 1;
  gc.max_attempts = 10;
  const FilterSpec range = herg_only(ChannelFilter::range(-kInf, 6));
  CHECK(code_of([&] {
          pipeline::generate_filtered_candidates("C1CC", range, st.models(),
                                                 CounterRng(1), gc);
        })
        == ErrorCode::kInvalidInputSmiles);
  // Regression filter on a classifier.
  CHECK(code_of([&] {
          pipeline::generate_filtered_candidates(kInput, range,
                                                 st.models(true), CounterRng(1),
                                                 gc);
        })
        == ErrorCode::kInvalidArgument);
  // Active channel without a model.
  const FilterSpec nav { ChannelFilter::off(), ChannelFilter::blockers(),
                         ChannelFilter::off() };
  CHECK(code_of([&] {
          pipeline::generate_filtered_candidates(kInput, nav, st.models(),
                                                 CounterRng(1), gc);
        })
        == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] {
          pipeline::optimize_cardiotoxic_drug(kInput, FilterSpec {},
                                              st.models(), {});
        })
        == ErrorCode::kInvalidArgument);
}

TEST_CASE("optimize report") {
  const Stack &st = stack();
  pipeline::OptimizeConfig oc;
  oc.generation.n = 6;
  oc.generation.max_attempts = 6000;
  oc.seed = 9;
  const FilterSpec spec = herg_only(ChannelFilter::range(-kInf, st.median));
  const auto rep = pipeline::optimize_cardiotoxic_drug(kInput, spec,
                                                       st.models(), oc);
  REQUIRE(rep.ranked.size() == 6u);
  CHECK(rep.input_smiles == smiles::canonicalize(kInput));
  for (std::size_t i = 0; i < rep.ranked.size(); ++i) {
    CHECK(rep.ranked[i].smiles != rep.input_smiles);
    CHECK(std::isfinite(rep.ranked[i].similarity));
    CHECK(*rep.ranked[i].predictions[0] < st.median);
    if (i > 0)
      CHECK(rep.ranked[i - 1].similarity >= rep.ranked[i].similarity);
  }
  REQUIRE(rep.pruning.has_value());
  CHECK(rep.pruning->kept.size() + rep.pruning->constant.size()
            + rep.pruning->redundant.size()
        == 40u);
  REQUIRE(rep.pca.has_value());
  CHECK(rep.pca->projected.rows() == 7);

  // Ranking recomputed from scratch.
  Eigen::MatrixXd desc(7, 40);
  desc.row(0) = chem::compute_descriptors(smiles::parse(kInput)).values;
  for (int i = 0; i < 6; ++i)
    desc.row(i + 1) =
        chem::compute_descriptors(smiles::parse(rep.ranked[i].smiles)).values;
  const auto pr = pipeline::prune_descriptors_mi(desc);
  CHECK(pr.kept == rep.pruning->kept);
  const Eigen::MatrixXd red = pipeline::select_columns(desc, pr.kept);
  for (int i = 0; i < 6; ++i)
    CHECK(rep.ranked[i].similarity
          == pipeline::cosine_similarity(red.row(0).transpose(),
                                         red.row(i + 1).transpose()));

  const std::string tsv = pipeline::report_tsv(rep);
  const std::string json = pipeline::report_json(rep);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 8);
  CHECK(tsv.rfind("# seed=9 config_hash=" + rep.config_hash, 0) == 0);
  CHECK(tsv.find("rank\tsmiles\tsimilarity\therg\n") != std::string::npos);
  const auto j = nlohmann::json::parse(json);
  CHECK(j["seed"] == 9);
  CHECK(j["config_hash"] == rep.config_hash);
  CHECK(j["attempts"]["accepted"] == 6);
  CHECK(j["filters"]["herg"] == spec[0].describe());
  CHECK(j["pca"]["points"].size() == 7u);

  const auto again = pipeline::optimize_cardiotoxic_drug(kInput, spec,
                                                         st.models(), oc);
  CHECK(pipeline::report_tsv(again) == tsv);
  CHECK(pipeline::report_json(again) == json);
  oc.seed = 10;
  CHECK(pipeline::config_hash(kInput, spec, oc) != rep.config_hash);
}
