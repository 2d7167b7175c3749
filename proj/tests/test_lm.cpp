//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"

#include "cardiogen/core/error.h"
#include "cardiogen/lm/training.h"
#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/parser.h"
#include "cardiogen/tensor/ops.h"
#include "test_util.h"

using namespace cardiogen;
using lm::RealMatrix;

namespace {

const smiles::Vocabulary &corpus_vocab() {
  static const smiles::Vocabulary vocab =
      lm::build_lm_vocabulary(test::load_corpus(), 1, true).vocab;
  return vocab;
}

lm::TransformerConfig small_config(lm::ModelKind kind) {
  lm::TransformerConfig cfg;
  cfg.kind = kind;
  cfg.n_blocks = 2;
  cfg.n_heads = 4;
  cfg.d_model = 32;
  cfg.dropout = 0.1;
  cfg.vocab_size = corpus_vocab().size();
  return cfg;
}

smiles::TokenSequence random_sequence(CounterRng &rng, int vocab_size,
                                      int content_len) {
  smiles::TokenSequence s;
  s.ids.assign(smiles::kBlockSize, smiles::kPadId);
  s.ids[0] = smiles::kClsId;
  for (int t = 1; t <= content_len; ++t)
    s.ids[t] = smiles::kSpecialCount
               + static_cast<int>(rng.uniform_int(vocab_size
                                                  - smiles::kSpecialCount));
  s.ids[content_len + 1] = smiles::kEosId;
  s.content_len = content_len;
  return s;
}

bool bitwise_equal(const RealMatrix &a, const RealMatrix &b) {
  return a.rows() == b.rows() && a.cols() == b.cols()
         && std::memcmp(a.data(), b.data(), sizeof(float) * a.size()) == 0;
}

}  // namespace

TEST_CASE("parameter count matches the layer inventory") {
  const int v = corpus_vocab().size();
  for (auto kind: { lm::ModelKind::kAutoregressive, lm::ModelKind::kMasked }) {
    lm::TransformerConfig cfg;
    cfg.kind = kind;
    cfg.vocab_size = v;
    CounterRng rng(1);
    const lm::Transformer model(cfg, rng);

    // 8 blocks of width 256 with a 1024 feed-forward layer.
    const long block = 2 * 256 + (256 * 768 + 768) + (256 * 256 + 256)
                       + 2 * 256 + (256 * 1024 + 1024) + (1024 * 256 + 256);
    long expected = long(v) * 256 + 135 * 256 + 8 * block + 2 * 256
                    + (256 * long(v) + v);
    if (kind == lm::ModelKind::kAutoregressive)
      expected += long(v) * 256 + 10 * 256;
    CHECK(model.parameter_count() == expected);
    CHECK(lm::expected_parameter_count(cfg) == expected);
  }
}

TEST_CASE("config validation") {
  lm::TransformerConfig cfg = small_config(lm::ModelKind::kMasked);
  cfg.n_heads = 5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config(lm::ModelKind::kMasked);
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(lm::parse_model_kind(lm::model_kind_name(lm::ModelKind::kMasked))
        == lm::ModelKind::kMasked);
}

TEST_CASE("embedding shape and conditioning identities") {
  const auto &vocab = corpus_vocab();
  lm::TransformerConfig cfg;
  cfg.vocab_size = vocab.size();
  cfg.n_blocks = 1;
  CounterRng init(2);
  const lm::Transformer ar(cfg, init);

  const smiles::TokenSequence seq = smiles::encode_smiles("CC(=O)Nc1ccc(O)cc1",
                                                          vocab);
  const lm::Conditioning empty = lm::Conditioning::none(smiles::kBlockSize, 10);
  const lm::Batch batch =
      lm::make_batch(std::span(&seq, 1), std::span(&empty, 1),
                     smiles::kBlockSize);
  CounterRng rng(3);
  const RealMatrix x = ar.embed(batch, false, rng).value();
  CHECK(x.rows() == 135);
  CHECK(x.cols() == 256);

  // Zero properties and an all-pad scaffold add nothing.
  RealMatrix oracle(135, 256);
  const auto params = ar.named_parameters();
  auto find = [&](const std::string &name) {
    for (const auto &[n, t]: params)
      if (n == name)
        return t.value();
    FAIL("missing parameter " << name);
    return RealMatrix();
  };
  const RealMatrix tok = find("token_embedding");
  const RealMatrix pos = find("position_embedding");
  for (int t = 0; t < 135; ++t)
    oracle.row(t) = tok.row(seq.ids[t]) + pos.row(t);
  CHECK(bitwise_equal(x, oracle));

  // A real conditioning does change the autoregressive embedding.
  {
    const smiles::Molecule mol = smiles::parse("CC(=O)Nc1ccc(O)cc1");
    const chem::PropertyVector p = chem::physchem_properties(mol);
    const lm::PropertyStats stats = lm::PropertyStats::fit(std::span(&p, 1));
    const lm::Conditioning cond = lm::make_conditioning(mol, vocab, stats);
    const lm::Batch cb = lm::make_batch(std::span(&seq, 1),
                                        std::span(&cond, 1),
                                        smiles::kBlockSize);
    CHECK_FALSE(bitwise_equal(ar.embed(cb, false, rng).value(), x));
  }

  // The masked model ignores conditioning.
  lm::TransformerConfig mcfg = cfg;
  mcfg.kind = lm::ModelKind::kMasked;
  CounterRng init2(4);
  const lm::Transformer mlm(mcfg, init2);
  lm::Conditioning noisy = empty;
  noisy.properties.setConstant(3.0);
  noisy.scaffold_ids = seq.ids;
  const lm::Batch with = lm::make_batch(std::span(&seq, 1),
                                        std::span(&noisy, 1),
                                        smiles::kBlockSize);
  const lm::Batch without = lm::make_batch(std::span(&seq, 1), {},
                                           smiles::kBlockSize);
  CHECK(bitwise_equal(mlm.embed(with, false, rng).value(),
                      mlm.embed(without, false, rng).value()));
}

TEST_CASE("vocabulary covers canonical molecules and scaffolds") {
  const auto &corpus = test::load_corpus();
  const smiles::VocabularyBuild build = lm::build_lm_vocabulary(corpus, 1, true);
  CHECK(build.flagged.empty());
  CHECK(build.untokenizable.empty());
  lm::PropertyStats stats;
  const lm::LmCorpus data =
      lm::prepare_corpus(corpus, build.vocab, true, stats);
  CHECK(data.skipped.empty());
  CHECK(data.conditioning.size() == corpus.size());
  CHECK(stats.mean.size() == 10);

  // Kekule input still needs aromatic tokens once canonicalized.
  const std::vector<std::string> kekule { "CN1C=NC2=C1C(=O)N(C)C(=O)N2C" };
  const smiles::Vocabulary v = lm::build_lm_vocabulary(kekule, 1, true).vocab;
  CHECK(v.find("n").has_value());
  CHECK(v.find("[nH]").has_value());
  CHECK_FALSE(v.find("N").has_value());

  const std::vector<std::string> broken { "CCO", "C(C", "CCN" };
  const smiles::VocabularyBuild b = lm::build_lm_vocabulary(broken, 1, false);
  CHECK(b.untokenizable == std::vector<std::size_t> { 1 });
}

TEST_CASE("scaffold frame") {
  const auto &vocab = corpus_vocab();
  const std::vector<int> blank = lm::scaffold_frame("", vocab);
  CHECK(blank.size() == 135u);
  for (int id: blank)
    CHECK(id == smiles::kPadId);
  const std::vector<int> ring = lm::scaffold_frame("c1ccccc1", vocab);
  CHECK(ring[0] == smiles::kClsId);
  CHECK(smiles::decode_smiles(ring, vocab) == "c1ccccc1");

  smiles::Vocabulary tiny;
  tiny.add("C");
  ErrorCode code {};
  try {
    lm::scaffold_frame("c1ccccc1", tiny);
  } catch (const Error &e) {
    code = e.code();
  }
  CHECK(code == ErrorCode::kVocabMismatch);
}

TEST_CASE("attention rows sum to one under both masks") {
  CounterRng rng(5);
  for (auto kind: { lm::ModelKind::kAutoregressive, lm::ModelKind::kMasked }) {
    const lm::TransformerConfig cfg = small_config(kind);
    CounterRng init(6);
    const lm::Transformer model(cfg, init);
    std::vector<smiles::TokenSequence> seqs;
    for (int i = 0; i < 3; ++i)
      seqs.push_back(random_sequence(rng, cfg.vocab_size, 5 + 7 * i));
    std::vector<lm::Conditioning> conds(
        seqs.size(), lm::Conditioning::none(smiles::kBlockSize, 10));
    const lm::Batch batch = lm::make_batch(seqs, conds);
    for (int b = 0; b < cfg.n_blocks; ++b) {
      const auto maps = model.attention_maps(b, batch);
      REQUIRE(maps.size() == seqs.size() * cfg.n_heads);
      for (std::size_t m = 0; m < maps.size(); ++m) {
        const int seq = static_cast<int>(m) / cfg.n_heads;
        const int keys = batch.key_lengths[seq];
        const RealMatrix &p = maps[m];
        for (int i = 0; i < p.rows(); ++i) {
          CHECK(std::abs(p.row(i).cast<double>().sum() - 1.0) < 1e-6);
          for (int j = 0; j < p.cols(); ++j) {
            if (kind == lm::ModelKind::kAutoregressive && j > i)
              CHECK(p(i, j) == 0.0f);
            if (kind == lm::ModelKind::kMasked && j >= keys)
              CHECK(p(i, j) == 0.0f);
          }
        }
      }
    }
  }
}

TEST_CASE("suffix perturbation leaves causal prefix logits bitwise unchanged") {
  const lm::TransformerConfig cfg = small_config(lm::ModelKind::kAutoregressive);
  CounterRng init(7);
  const lm::Transformer ar(cfg, init);
  CounterRng rng(8);
  CounterRng unused;
  const lm::Conditioning cond = lm::Conditioning::none(smiles::kBlockSize, 10);
  tensor::NoGradGuard guard;
  for (int trial = 0; trial < 50; ++trial) {
    const int len = 10 + static_cast<int>(rng.uniform_int(100));
    smiles::TokenSequence a = random_sequence(rng, cfg.vocab_size, len);
    const int cut = 1 + static_cast<int>(rng.uniform_int(len));
    smiles::TokenSequence b = a;
    for (int t = cut + 1; t < smiles::kBlockSize; ++t)
      b.ids[t] = static_cast<int>(rng.uniform_int(cfg.vocab_size));
    const RealMatrix la =
        ar.logits(lm::make_batch(std::span(&a, 1), std::span(&cond, 1),
                                 smiles::kBlockSize),
                  false, unused)
            .value();
    const RealMatrix lb =
        ar.logits(lm::make_batch(std::span(&b, 1), std::span(&cond, 1),
                                 smiles::kBlockSize),
                  false, unused)
            .value();
    CHECK(bitwise_equal(la.topRows(cut + 1), lb.topRows(cut + 1)));
  }
}

TEST_CASE("bidirectional model sees later positions") {
  const lm::TransformerConfig cfg = small_config(lm::ModelKind::kMasked);
  CounterRng init(9);
  const lm::Transformer mlm(cfg, init);
  CounterRng rng(10);
  CounterRng unused;
  tensor::NoGradGuard guard;
  for (int trial = 0; trial < 20; ++trial) {
    smiles::TokenSequence a = random_sequence(rng, cfg.vocab_size, 30);
    smiles::TokenSequence b = a;
    const int t = 2 + static_cast<int>(rng.uniform_int(29));
    b.ids[t] = b.ids[t] == smiles::kSpecialCount ? smiles::kSpecialCount + 1
                                                 : smiles::kSpecialCount;
    const RealMatrix la =
        mlm.hidden(lm::make_batch(std::span(&a, 1), {}), false, unused).value();
    const RealMatrix lb =
        mlm.hidden(lm::make_batch(std::span(&b, 1), {}), false, unused).value();
    CHECK((la.row(0) - lb.row(0)).cwiseAbs().maxCoeff() > 0.0f);
  }
}

TEST_CASE("next-token loss limits") {
  const auto &vocab = corpus_vocab();
  const int v = vocab.size();
  const smiles::TokenSequence seq = smiles::encode_smiles("CCOc1ccccc1", vocab);
  const lm::Batch batch = lm::make_batch(std::span(&seq, 1), {});
  const std::vector<int> targets = lm::next_token_targets(batch);
  int predicted = 0;
  for (int t = 0; t < batch.len; ++t) {
    if (t <= seq.content_len) {
      CHECK(targets[t] == seq.ids[t + 1]);
      ++predicted;
    } else {
      CHECK(targets[t] == -1);
    }
  }
  CHECK(predicted == seq.content_len + 1);

  using tensor::Tensor;
  const Tensor<float> uniform(RealMatrix::Zero(batch.len, v));
  CHECK(tensor::cross_entropy(uniform, targets).item()
        == doctest::Approx(std::log(double(v))).epsilon(1e-6));

  RealMatrix onehot = RealMatrix::Zero(batch.len, v);
  for (int t = 0; t < batch.len; ++t)
    if (targets[t] >= 0)
      onehot(t, targets[t]) = 60.0f;
  CHECK(tensor::cross_entropy(Tensor<float>(onehot), targets).item() < 1e-6);
}

TEST_CASE("masked loss only reads selected positions") {
  const lm::TransformerConfig cfg = small_config(lm::ModelKind::kMasked);
  CounterRng init(11);
  const lm::Transformer mlm(cfg, init);
  CounterRng rng(12);
  std::vector<smiles::TokenSequence> seqs;
  std::vector<int> targets;
  for (int i = 0; i < 4; ++i) {
    const lm::MlmSample s =
        lm::mlm_corrupt(random_sequence(rng, cfg.vocab_size, 40), cfg.vocab_size,
                        rng);
    seqs.push_back(s.corrupted);
  }
  const lm::Batch batch = lm::make_batch(seqs, {});
  targets.assign(batch.ids.size(), -1);
  for (int b = 0; b < batch.size; ++b)
    for (int t = 1; t < batch.len; t += 3)
      targets[std::size_t(b) * batch.len + t] = 5 + t % 7;

  CounterRng unused;
  const RealMatrix logits = mlm.logits(batch, false, unused).value();
  RealMatrix zeroed = logits;
  for (std::size_t r = 0; r < targets.size(); ++r)
    if (targets[r] < 0)
      zeroed.row(r).setZero();
  const float a =
      tensor::cross_entropy(tensor::Tensor<float>(logits), targets).item();
  const float b =
      tensor::cross_entropy(tensor::Tensor<float>(zeroed), targets).item();
  CHECK(a == b);
  CHECK(lm::mlm_loss(mlm, batch, targets, false, unused).item() == a);
}

TEST_CASE("masked corruption statistics") {
  const int v = corpus_vocab().size();
  CounterRng rng(13);
  long content = 0, selected = 0, masked = 0, random = 0, unchanged = 0;
  while (content < 200000) {
    const smiles::TokenSequence seq = random_sequence(rng, v, 60);
    const lm::MlmSample s = lm::mlm_corrupt(seq, v, rng);
    for (std::size_t t = 0; t < seq.ids.size(); ++t) {
      const bool is_content =
          t >= 1 && static_cast<int>(t) <= seq.content_len;
      if (!is_content) {
        CHECK(s.targets[t] == -1);
        CHECK(s.corrupted.ids[t] == seq.ids[t]);
        continue;
      }
      ++content;
      if (s.targets[t] < 0) {
        CHECK(s.corrupted.ids[t] == seq.ids[t]);
        continue;
      }
      CHECK(s.targets[t] == seq.ids[t]);
      ++selected;
      if (s.corrupted.ids[t] == smiles::kMaskId)
        ++masked;
      else if (s.corrupted.ids[t] != seq.ids[t])
        ++random;
      else
        ++unchanged;
    }
  }
  // A random replacement that redraws the original token reads as
  // unchanged; with this vocabulary that shifts under 0.5% between bins.
  const double rate = double(selected) / content;
  CHECK(std::abs(rate - 0.15) < 0.01);
  CHECK(std::abs(double(masked) / selected - 0.8) < 0.02);
  CHECK(std::abs(double(random) / selected - 0.1) < 0.02);
  CHECK(std::abs(double(unchanged) / selected - 0.1) < 0.02);

  lm::MlmCorruptionConfig off;
  off.select_rate = 0;
  const smiles::TokenSequence seq = random_sequence(rng, v, 50);
  const lm::MlmSample s = lm::mlm_corrupt(seq, v, rng, off);
  CHECK(s.corrupted.ids == seq.ids);
  for (int t: s.targets)
    CHECK(t == -1);
}

TEST_CASE("feature vector") {
  const auto &vocab = corpus_vocab();
  lm::TransformerConfig cfg;
  cfg.kind = lm::ModelKind::kMasked;
  cfg.n_blocks = 2;
  cfg.vocab_size = vocab.size();
  CounterRng init(14);
  const lm::LanguageModel mlm { lm::Transformer(cfg, init), vocab, {} };
  const Eigen::VectorXf a = lm::extract_feature_vector(mlm, "CCO");
  const Eigen::VectorXf b = lm::extract_feature_vector(mlm, "OCC");
  const Eigen::VectorXf c = lm::extract_feature_vector(mlm, "CCN");
  CHECK(a.size() == 256);
  CHECK(std::memcmp(a.data(), b.data(), sizeof(float) * 256) == 0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0f);
  CHECK_THROWS_AS(lm::extract_feature_vector(mlm, "C(C"), Error);

  lm::TransformerConfig acfg = cfg;
  acfg.kind = lm::ModelKind::kAutoregressive;
  const lm::LanguageModel ar { lm::Transformer(acfg, init), vocab, {} };
  CHECK_THROWS_AS(lm::extract_feature_vector(ar, "CCO"), Error);
}

TEST_CASE("sampling limits") {
  const auto &vocab = corpus_vocab();
  lm::TransformerConfig cfg = small_config(lm::ModelKind::kAutoregressive);
  CounterRng init(15);
  const lm::LanguageModel ar { lm::Transformer(cfg, init), vocab, {} };
  const std::vector<lm::Conditioning> conds(
      6, lm::Conditioning::none(smiles::kBlockSize, 10));
  const CounterRng rng(16);

  lm::SampleConfig greedy;
  greedy.temperature = 0;
  lm::SampleConfig cold;
  cold.temperature = 1e-4;
  const auto g = lm::sample_sequences(ar, conds, rng, 0, greedy);
  const auto c = lm::sample_sequences(ar, conds, rng, 0, cold);
  REQUIRE(g.size() == conds.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g[i].text == c[i].text);
    CHECK(g[i].text == g[0].text);
  }

  // Same stream indices give the same samples; every accepted sample is a
  // fixed point of canonicalization.
  const auto s1 = lm::sample_sequences(ar, conds, rng, 100);
  const auto s2 = lm::sample_sequences(ar, conds, rng, 100);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].text == s2[i].text);
    if (s1[i].valid)
      CHECK(smiles::canonicalize(s1[i].canonical) == s1[i].canonical);
  }

  lm::SampleConfig top1;
  top1.top_k = 1;
  const auto t = lm::sample_sequences(ar, conds, rng, 7, top1);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(t[i].text == g[0].text);
}

TEST_CASE("short training run lowers the loss deterministically") {
  const std::vector<std::string> corpus(test::load_corpus().begin(),
                                        test::load_corpus().begin() + 24);
  const smiles::Vocabulary vocab =
      lm::build_lm_vocabulary(corpus, 1, true).vocab;
  lm::PropertyStats stats;
  const lm::LmCorpus data = lm::prepare_corpus(corpus, vocab, true, stats);
  CHECK(data.skipped.empty());
  CHECK(data.sequences.size() == corpus.size());

  lm::TransformerConfig cfg;
  cfg.n_blocks = 1;
  cfg.n_heads = 2;
  cfg.d_model = 16;
  cfg.vocab_size = vocab.size();
  lm::LmTrainConfig tc;
  tc.epochs = 6;
  tc.batch_size = 8;
  tc.lr = 3e-3;
  tc.seed = 3;
  auto run = [&] {
    CounterRng init(17);
    lm::Transformer model(cfg, init);
    return lm::train_language_model(model, data, tc);
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == 6u);
  CHECK(a.back().loss < a.front().loss);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].loss == b[i].loss);
}
