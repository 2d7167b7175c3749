//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/io/models.h"

#include <bit>
#include <cstdio>
#include <set>

#include "cardiogen/core/error.h"
#include "cardiogen/core/hash.h"

namespace cardiogen::io {

namespace {

using nlohmann::json;
using RealMatrix = tensor::Matrix<float>;

TensorEntry entry(const std::string &name, const RealMatrix &m) {
  TensorEntry t { name, { m.rows(), m.cols() }, {} };
  t.data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      t.data.push_back(m(r, c));
  return t;
}

void assign(const TensorEntry &t, RealMatrix &m) {
  if (t.shape.size() != 2 || t.shape[0] != m.rows() || t.shape[1] != m.cols())
    throw Error(ErrorCode::kCorruptCheckpoint,
                "tensor " + t.name + " has the wrong shape");
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = t.data[static_cast<std::size_t>(r * m.cols() + c)];
}

// Every checkpoint tensor must be consumed exactly once.
class Loader {
public:
  explicit Loader(const Checkpoint &ckpt) : ckpt_(ckpt) { }

  void load(const std::string &name, RealMatrix &m) {
    const TensorEntry *t = ckpt_.find(name);
    if (t == nullptr)
      throw Error(ErrorCode::kCorruptCheckpoint, "missing tensor " + name);
    assign(*t, m);
    used_.insert(name);
  }

  void finish() const {
    for (const TensorEntry &t: ckpt_.tensors)
      if (!used_.count(t.name))
        throw Error(ErrorCode::kCorruptCheckpoint,
                    "unexpected tensor " + t.name);
  }

private:
  const Checkpoint &ckpt_;
  std::set<std::string> used_;
};

void expect_module(const Checkpoint &ckpt, std::string_view module) {
  const std::string got = ckpt.metadata.value("module", "");
  if (got != module)
    throw Error(ErrorCode::kInvalidArgument,
                "checkpoint holds a '" + got + "' model, expected '"
                    + std::string(module) + "'");
}

template <class T>
T field(const json &j, const char *key) {
  if (!j.contains(key))
    throw Error(ErrorCode::kCorruptCheckpoint,
                std::string("metadata lacks '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                std::string("metadata field '") + key + "': " + e.what());
  }
}

json vector_json(const Eigen::VectorXd &v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from(const json &j) {
  const std::vector<double> v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json vocabulary_json(const smiles::Vocabulary &vocab) {
  return std::vector<std::string>(vocab.tokens().begin(), vocab.tokens().end());
}

smiles::Vocabulary vocabulary_from(const json &j) {
  std::vector<std::string> tokens;
  try {
    tokens = j.get<std::vector<std::string>>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                std::string("vocabulary: ") + e.what());
  }
  smiles::Vocabulary vocab;
  if (tokens.size() < smiles::kSpecialCount)
    throw Error(ErrorCode::kCorruptCheckpoint, "vocabulary lacks specials");
  for (std::size_t i = 0; i < smiles::kSpecialCount; ++i)
    if (tokens[i] != vocab.token(static_cast<int>(i)))
      throw Error(ErrorCode::kCorruptCheckpoint, "vocabulary specials differ");
  for (std::size_t i = smiles::kSpecialCount; i < tokens.size(); ++i)
    vocab.add(tokens[i]);
  return vocab;
}

json stats_json(const lm::PropertyStats &stats) {
  if (stats.empty())
    return nullptr;
  return { { "mean", vector_json(stats.mean) },
           { "stddev", vector_json(stats.stddev) } };
}

lm::PropertyStats stats_from(const json &j) {
  lm::PropertyStats stats;
  if (!j.is_null()) {
    stats.mean = vector_from(field<json>(j, "mean"));
    stats.stddev = vector_from(field<json>(j, "stddev"));
  }
  return stats;
}

json to_json(const lm::TransformerConfig &c) {
  return { { "kind", lm::model_kind_name(c.kind) },
           { "n_blocks", c.n_blocks },
           { "n_heads", c.n_heads },
           { "d_model", c.d_model },
           { "block_size", c.block_size },
           { "dropout", c.dropout },
           { "vocab_size", c.vocab_size },
           { "n_properties", c.n_properties },
           { "ffn_multiplier", c.ffn_multiplier } };
}

lm::TransformerConfig transformer_config_from(const json &j) {
  lm::TransformerConfig c;
  c.kind = lm::parse_model_kind(field<std::string>(j, "kind"));
  c.n_blocks = field<int>(j, "n_blocks");
  c.n_heads = field<int>(j, "n_heads");
  c.d_model = field<int>(j, "d_model");
  c.block_size = field<int>(j, "block_size");
  c.dropout = field<double>(j, "dropout");
  c.vocab_size = field<int>(j, "vocab_size");
  c.n_properties = field<int>(j, "n_properties");
  c.ffn_multiplier = field<int>(j, "ffn_multiplier");
  c.validate();
  return c;
}

json to_json(const disc::FusionConfig &c) {
  return { { "task", disc::task_name(c.task) },
           { "gat_hidden", c.gat_hidden },
           { "gat_heads", c.gat_heads },
           { "encoder_hidden", c.encoder_hidden },
           { "head_hidden", c.head_hidden },
           { "dropout", c.dropout },
           { "bond_attention", c.bond_attention },
           { "feature_dim", c.feature_dim },
           { "fingerprint_bits", c.fingerprint_bits } };
}

disc::FusionConfig fusion_config_from(const json &j) {
  disc::FusionConfig c;
  c.task = disc::parse_task(field<std::string>(j, "task"));
  c.gat_hidden = field<int>(j, "gat_hidden");
  c.gat_heads = field<int>(j, "gat_heads");
  c.encoder_hidden = field<int>(j, "encoder_hidden");
  c.head_hidden = field<int>(j, "head_hidden");
  c.dropout = field<double>(j, "dropout");
  c.bond_attention = field<bool>(j, "bond_attention");
  c.feature_dim = field<int>(j, "feature_dim");
  c.fingerprint_bits = field<int>(j, "fingerprint_bits");
  c.validate();
  return c;
}

std::string model_fingerprint(const lm::LanguageModel &lm) {
  Fnv1a h;
  for (const std::string &t: lm.vocab.tokens())
    h.text(t).u64(0);
  for (const auto &[name, t]: lm.model.named_parameters()) {
    h.text(name).i64(t.value().rows()).i64(t.value().cols());
    const RealMatrix &m = t.value();
    for (Eigen::Index i = 0; i < m.size(); ++i)
      h.u64(std::bit_cast<std::uint32_t>(m.data()[i]));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h.digest()));
  return buf;
}

Checkpoint to_checkpoint(const lm::LanguageModel &lm, const json &extra) {
  Checkpoint ckpt;
  json &meta = ckpt.metadata;
  meta = extra;
  meta["module"] = kLanguageModelModule;
  meta["config"] = to_json(lm.model.config());
  meta["vocabulary"] = vocabulary_json(lm.vocab);
  meta["property_stats"] = stats_json(lm.stats);
  meta["fingerprint"] = model_fingerprint(lm);
  for (const auto &[name, t]: lm.model.named_parameters())
    ckpt.tensors.push_back(entry(name, t.value()));
  return ckpt;
}

lm::LanguageModel language_model_from(const Checkpoint &ckpt) {
  expect_module(ckpt, kLanguageModelModule);
  const json &meta = ckpt.metadata;
  lm::LanguageModel out;
  out.vocab = vocabulary_from(field<json>(meta, "vocabulary"));
  const lm::TransformerConfig config =
      transformer_config_from(field<json>(meta, "config"));
  if (config.vocab_size != out.vocab.size())
    throw Error(ErrorCode::kVocabMismatch,
                "configured vocabulary size differs from the stored tokens");
  out.stats = stats_from(field<json>(meta, "property_stats"));
  CounterRng rng(0);
  out.model = lm::Transformer(config, rng);
  Loader loader(ckpt);
  for (auto [name, t]: out.model.named_parameters())
    loader.load(name, t.value());
  loader.finish();
  return out;
}

Checkpoint to_checkpoint(const disc::FusionModel &model,
                         const std::string &feature_model, const json &extra) {
  Checkpoint ckpt;
  json &meta = ckpt.metadata;
  meta = extra;
  meta["module"] = kDiscriminatorModule;
  meta["config"] = to_json(model.config());
  meta["feature_model"] = feature_model;
  for (const auto &[name, t]: model.named_parameters())
    ckpt.tensors.push_back(entry(name, t.value()));
  disc::FusionModel copy = model;
  for (const auto &[name, m]: copy.named_buffers())
    ckpt.tensors.push_back(entry(name, *m));
  return ckpt;
}

disc::FusionModel fusion_model_from(const Checkpoint &ckpt) {
  expect_module(ckpt, kDiscriminatorModule);
  const disc::FusionConfig config =
      fusion_config_from(field<json>(ckpt.metadata, "config"));
  CounterRng rng(0);
  disc::FusionModel model(config, rng);
  Loader loader(ckpt);
  for (auto [name, t]: model.named_parameters())
    loader.load(name, t.value());
  for (auto [name, m]: model.named_buffers())
    loader.load(name, *m);
  loader.finish();
  return model;
}

void check_feature_model(const Checkpoint &ckpt, const lm::LanguageModel &mlm) {
  const std::string want = ckpt.metadata.value("feature_model", "");
  const std::string got = model_fingerprint(mlm);
  if (want != got)
    throw Error(ErrorCode::kVocabMismatch,
                "discriminator was trained with feature model " + want
                    + ", got " + got);
}

}  // namespace cardiogen::io

namespace cardiogen::io {

namespace {

using nlohmann::json;

TensorEntry id_table(const std::string &name,
                     const std::vector<std::vector<int>> &rows, int width) {
  TensorEntry t { name, { static_cast<std::int64_t>(rows.size()), width }, {} };
  t.data.reserve(rows.size() * static_cast<std::size_t>(width));
  for (const auto &r: rows) {
    if (static_cast<int>(r.size()) != width)
      throw Error(ErrorCode::kShapeMismatch, name + " row has the wrong width");
    for (int id: r)
      t.data.push_back(static_cast<float>(id));
  }
  return t;
}

std::vector<std::vector<int>> id_rows(const Checkpoint &ckpt,
                                      const std::string &name,
                                      std::int64_t rows) {
  const TensorEntry *t = ckpt.find(name);
  if (t == nullptr || t->shape.size() != 2 || t->shape[0] != rows)
    throw Error(ErrorCode::kCorruptCheckpoint, "bad or missing tensor " + name);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(rows));
  const auto width = static_cast<std::size_t>(t->shape[1]);
  for (std::size_t r = 0; r < out.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      out[r].push_back(static_cast<int>(t->data[r * width + c]));
  return out;
}

chem::PropertyVector property_vector_from(const std::vector<double> &v) {
  if (v.size() != chem::kPropertyCount)
    throw Error(ErrorCode::kCorruptCheckpoint, "property row has the wrong length");
  chem::PropertyVector p;
  p.molecular_weight = v[0];
  p.n_rings = v[1];
  p.n_rotatable_bonds = v[2];
  p.n_hbd = v[3];
  p.n_hba = v[4];
  p.tpsa = v[5];
  p.n_heteroatoms = v[6];
  p.logp = v[7];
  p.n_stereocenters = v[8];
  p.formal_charge = v[9];
  return p;
}

}  // namespace

Checkpoint to_checkpoint(const PreparedCorpus &p) {
  const lm::LmCorpus &c = p.corpus;
  Checkpoint ckpt;
  json &meta = ckpt.metadata;
  meta["module"] = kPreparedCorpusModule;
  meta["key"] = p.key;
  meta["conditioned"] = p.conditioned;
  meta["vocabulary"] = vocabulary_json(p.vocab);
  meta["property_stats"] = stats_json(p.stats);
  meta["smiles"] = c.smiles;
  meta["skipped"] = c.skipped;
  json props = json::array();
  for (const chem::PropertyVector &v: c.properties) {
    const auto a = v.values();
    props.push_back(std::vector<double>(a.begin(), a.end()));
  }
  meta["properties"] = props;

  const int width = c.sequences.empty()
                        ? 0
                        : static_cast<int>(c.sequences.front().ids.size());
  std::vector<std::vector<int>> ids, lengths, frames;
  for (const smiles::TokenSequence &s: c.sequences) {
    ids.push_back(s.ids);
    lengths.push_back({ s.content_len });
  }
  ckpt.tensors.push_back(id_table("token_ids", ids, width));
  ckpt.tensors.push_back(id_table("content_length", lengths, 1));
  if (p.conditioned) {
    for (const lm::Conditioning &k: c.conditioning)
      frames.push_back(k.scaffold_ids);
    ckpt.tensors.push_back(id_table("scaffold_ids", frames, width));
  }
  return ckpt;
}

PreparedCorpus prepared_corpus_from(const Checkpoint &ckpt) {
  expect_module(ckpt, kPreparedCorpusModule);
  const json &meta = ckpt.metadata;
  PreparedCorpus p;
  p.key = field<std::string>(meta, "key");
  p.conditioned = field<bool>(meta, "conditioned");
  p.vocab = vocabulary_from(field<json>(meta, "vocabulary"));
  p.stats = stats_from(field<json>(meta, "property_stats"));
  lm::LmCorpus &c = p.corpus;
  c.smiles = field<std::vector<std::string>>(meta, "smiles");
  c.skipped = field<std::vector<std::size_t>>(meta, "skipped");
  for (const auto &row: field<std::vector<std::vector<double>>>(meta, "properties"))
    c.properties.push_back(property_vector_from(row));

  const auto n = static_cast<std::int64_t>(c.smiles.size());
  const auto ids = id_rows(ckpt, "token_ids", n);
  const auto lengths = id_rows(ckpt, "content_length", n);
  for (std::size_t i = 0; i < ids.size(); ++i)
    c.sequences.push_back({ ids[i], lengths[i].at(0) });
  if (p.conditioned) {
    if (c.properties.size() != c.smiles.size() || p.stats.empty())
      throw Error(ErrorCode::kCorruptCheckpoint, "conditioning data incomplete");
    const auto frames = id_rows(ckpt, "scaffold_ids", n);
    for (std::size_t i = 0; i < frames.size(); ++i)
      c.conditioning.push_back({ frames[i], p.stats.normalize(c.properties[i]) });
  }
  const std::size_t expected = p.conditioned ? 3 : 2;
  if (ckpt.tensors.size() != expected)
    throw Error(ErrorCode::kCorruptCheckpoint, "unexpected tensors in prepared corpus");
  return p;
}

}  // namespace cardiogen::io
