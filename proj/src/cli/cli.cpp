//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/cli/cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"

#include "cardiogen/chem/fingerprint.h"
#include "cardiogen/chem/properties.h"
#include "cardiogen/core/error.h"
#include "cardiogen/core/hash.h"
#include "cardiogen/disc/metrics.h"
#include "cardiogen/disc/training.h"
#include "cardiogen/io/checkpoint.h"
#include "cardiogen/io/dataset.h"
#include "cardiogen/io/models.h"
#include "cardiogen/lm/training.h"
#include "cardiogen/pipeline/optimize.h"
#include "cardiogen/smiles/parser.h"
#include "cardiogen/smiles/vocabulary.h"

namespace cardiogen::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class UsageError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Defaults from the configuration file: the subcommand's section wins over
// top-level keys.
class Settings {
public:
  Settings(const json &file, const std::string &section) : file_(file) {
    if (file_.is_object() && file_.contains(section)
        && file_.at(section).is_object())
      section_ = &file_.at(section);
  }

  template <class T>
  T get(const std::string &key, T fallback) const {
    for (const json *scope: { section_, &file_ }) {
      if (scope == nullptr || !scope->is_object() || !scope->contains(key))
        continue;
      try {
        return scope->at(key).get<T>();
      } catch (const json::exception &) {
        throw UsageError("config value '" + key + "' has the wrong type");
      }
    }
    return fallback;
  }

private:
  const json &file_;
  const json *section_ = nullptr;
};

// Registers options and remembers how to read their final values back.
class Fields {
public:
  template <class T>
  CLI::Option *option(CLI::App *app, const Settings &s, const std::string &name,
                      T &var, const std::string &desc,
                      const std::string &alias = {}) {
    var = s.get<T>(name, var);
    readers_.emplace_back(name, [&var] { return json(var); });
    const std::string names = alias.empty() ? "--" + name
                                            : "--" + name + ",--" + alias;
    return app->add_option(names, var, desc)->capture_default_str();
  }

  CLI::Option *flag(CLI::App *app, const Settings &s, const std::string &name,
                    bool &var, const std::string &desc) {
    var = s.get<bool>(name, var);
    readers_.emplace_back(name, [&var] { return json(var); });
    return app->add_flag("--" + name + ",!--no-" + name, var, desc);
  }

  json values() const {
    json j = json::object();
    for (const auto &[name, read]: readers_)
      j[name] = read();
    return j;
  }

private:
  std::vector<std::pair<std::string, std::function<json()>>> readers_;
};

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
  bool strict = false;
  int threads = 1;
  std::string device = "cpu";
};

struct VocabOptions {
  std::string input;
  std::int64_t min_count = 1;
  bool scaffolds = true;
};

struct LmOptions {
  std::string input;
  std::string vocab;
  std::string prepared;
  std::int64_t min_count = 1;
  int epochs = 10;
  int batch_size = 64;
  std::string optimizer = "sophia";
  double lr = 3e-4;
  double weight_decay = 0.1;
  double clip = 0;
  std::string schedule = "constant";
  int hessian_interval = 10;
  int d_model = 256;
  int blocks = 8;
  int heads = 8;
  double dropout = 0.1;
  double target_accuracy = 0;
  int eval_every = 1;
  double mask_rate = 0.15;
};

struct DiscOptions {
  std::string train;
  std::string valid;
  std::string test;
  std::string mlm;
  std::string mode = "classification";
  std::string channel = "herg";
  int epochs = 200;
  int batch_size = 32;
  double lr = 3e-4;
  double weight_decay = 1e-4;
  double l1 = 1e-4;
  double clip = 5;
  int patience = 10;
  double lr_factor = 0.5;
  int gat_hidden = 64;
  int gat_heads = 4;
  int encoder_hidden = 256;
  int head_hidden = 256;
  double dropout = 0.5;
  double threshold = disc::kBlockerThreshold;
  int y_randomization = 0;
};

struct ModelPaths {
  std::string mlm;
  std::string herg_model;
  std::string nav_model;
  std::string cav_model;
  std::string model_dir;
};

struct PredictOptions {
  std::vector<std::string> smiles;
  std::string input;
  bool herg = false;
  bool nav = false;
  bool cav = false;
  std::string mode = "classification";
  ModelPaths models;
};

struct OptimizeOptions {
  std::string input;
  std::string herg = "off";
  std::string nav = "off";
  std::string cav = "off";
  int n = 100;
  std::int64_t max_attempts = 10000;
  double temperature = 1.0;
  int top_k = 0;
  int mi_bins = 16;
  double mi_ratio = 0.9;
  std::string generator;
  ModelPaths models;
};

struct EvalOptions {
  std::string model;
  std::string mlm;
  std::string data;
  double threshold = disc::kBlockerThreshold;
};

struct AuditOptions {
  std::string train;
  std::string valid;
  std::string test;
  double similarity = 0.70;
};

struct PcaOptions {
  std::string input;
  int k = 2;
};

struct Context {
  Common common;
  std::string command;
  json run = json::object();
  std::string hash;
  std::ostream &out;
  std::ostream &err;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

json optional_json(const std::optional<double> &v) {
  return v ? json(*v) : json(nullptr);
}

std::string header_line(const Context &ctx) {
  return "# seed=" + std::to_string(ctx.common.seed)
         + " config_hash=" + ctx.hash + "\n";
}

void make_parent(const fs::path &path) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
}

void write_text(const fs::path &path, const std::string &text) {
  make_parent(path);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw Error(ErrorCode::kFileNotFound, "cannot write " + path.string());
  f << text;
}

// Result text goes to --out when given, else to the output stream.
void emit(const Context &ctx, const std::string &text,
          const std::string &default_suffix = "") {
  if (ctx.common.out.empty())
    ctx.out << text;
  else
    write_text(ctx.common.out + default_suffix, text);
}

json run_record(const Context &ctx) {
  return { { "command", ctx.command },
           { "config", ctx.run },
           { "config_hash", ctx.hash },
           { "seed", ctx.common.seed } };
}

struct LoadedLm {
  lm::LanguageModel model;
  json meta;
};

LoadedLm load_language_model(const std::string &path, lm::ModelKind kind) {
  if (path.empty())
    throw UsageError(std::string("a ") + std::string(lm::model_kind_name(kind))
                     + " checkpoint is required");
  io::Checkpoint ckpt = io::load_checkpoint(path);
  LoadedLm out { io::language_model_from(ckpt), std::move(ckpt.metadata) };
  if (out.model.model.config().kind != kind)
    throw Error(ErrorCode::kInvalidArgument,
                path + " holds a "
                    + std::string(lm::model_kind_name(
                        out.model.model.config().kind))
                    + " model, expected "
                    + std::string(lm::model_kind_name(kind)));
  return out;
}

struct LoadedDisc {
  disc::FusionModel model;
  json meta;
  std::string path;
};

std::string channel_path(const ModelPaths &paths, pipeline::Channel c,
                         disc::Task task) {
  const std::string &explicit_path =
      c == pipeline::Channel::kHerg    ? paths.herg_model
      : c == pipeline::Channel::kNav15 ? paths.nav_model
                                       : paths.cav_model;
  if (!explicit_path.empty())
    return explicit_path;
  if (paths.model_dir.empty())
    throw UsageError("no model for " + std::string(pipeline::channel_name(c))
                     + ": pass --" + std::string(pipeline::channel_name(c)).substr(0, 3)
                     + "-model or --model-dir");
  return (fs::path(paths.model_dir)
          / (std::string(pipeline::channel_name(c)) + "_"
             + std::string(disc::task_name(task)) + ".cgai"))
      .string();
}

LoadedDisc load_discriminator(const std::string &path, disc::Task task,
                              const lm::LanguageModel &mlm) {
  io::Checkpoint ckpt = io::load_checkpoint(path);
  LoadedDisc out { io::fusion_model_from(ckpt), std::move(ckpt.metadata),
                   path };
  if (out.model.config().task != task)
    throw Error(ErrorCode::kInvalidArgument,
                path + " holds a "
                    + std::string(disc::task_name(out.model.config().task))
                    + " model, expected " + std::string(disc::task_name(task)));
  io::Checkpoint probe;
  probe.metadata = out.meta;
  io::check_feature_model(probe, mlm);
  return out;
}

json model_echo(const std::string &path, const json &meta) {
  json j = { { "path", path } };
  if (meta.contains("run")) {
    j["seed"] = meta["run"].value("seed", json(nullptr));
    j["config_hash"] = meta["run"].value("config_hash", json(nullptr));
  }
  return j;
}

std::vector<std::string> read_smiles_file(const std::string &path) {
  if (path.empty())
    return {};
  return smiles::read_corpus(path);
}

// Parses each SMILES; failures abort in strict mode, else are reported and
// dropped.
std::vector<std::pair<std::string, smiles::Molecule>>
parse_all(const Context &ctx, const std::vector<std::string> &items,
          const std::string &what) {
  std::vector<std::pair<std::string, smiles::Molecule>> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    try {
      out.emplace_back(items[i], smiles::parse(items[i]));
    } catch (const Error &e) {
      if (ctx.common.strict)
        throw Error(ErrorCode::kParseError, what + " entry "
                                                + std::to_string(i + 1) + " '"
                                                + items[i] + "': " + e.what());
      ctx.err << "warning: skipping " << what << " entry " << i + 1 << " '"
              << items[i] << "': " << e.what() << "\n";
    }
  }
  return out;
}

std::vector<disc::Example> dataset_examples(const Context &ctx,
                                            const std::string &path,
                                            disc::Task task, double threshold,
                                            const lm::LanguageModel &mlm,
                                            json &report) {
  std::vector<disc::Example> out;
  if (path.empty())
    return out;
  std::size_t unusable = 0;
  const io::Dataset ds = io::read_dataset(path, task, ctx.common.strict,
                                          threshold);
  for (const io::SkippedRow &s: ds.skipped)
    ctx.err << "warning: " << path << ":" << s.line << ": " << s.reason
            << "\n";
  for (const io::DatasetRow &row: ds.rows) {
    try {
      disc::Example ex = disc::make_example(row.molecule, mlm, row.target);
      ex.smiles = row.smiles;
      out.push_back(std::move(ex));
    } catch (const Error &e) {
      const std::string where = path + ":" + std::to_string(row.line) + ": ";
      if (ctx.common.strict)
        throw Error(e.code(), where + e.what());
      ctx.err << "warning: " << where << e.what() << "\n";
      ++unusable;
    }
  }
  report.push_back({ { "path", path },
                     { "rows", ds.rows.size() + ds.skipped.size() },
                     { "kept", out.size() },
                     { "skipped", ds.skipped.size() + unusable } });
  if (out.empty())
    throw Error(ErrorCode::kEmptyAfterFiltering, path + ": no usable rows");
  return out;
}

json evaluation_json(const disc::FusionModel &model,
                     std::span<const disc::Example> examples) {
  const std::vector<double> pred = disc::predict_examples(model, examples);
  json j = { { "n", examples.size() } };
  if (model.config().task == disc::Task::kClassification) {
    std::vector<int> labels;
    for (const disc::Example &e: examples)
      labels.push_back(e.target >= 0.5 ? 1 : 0);
    const disc::ConfusionCounts c = disc::confusion_counts(pred, labels, 0.5);
    const disc::ClassificationMetrics m = disc::evaluate_metrics(c);
    j["tp"] = c.tp;
    j["tn"] = c.tn;
    j["fp"] = c.fp;
    j["fn"] = c.fn;
    j["accuracy"] = optional_json(m.accuracy);
    j["sensitivity"] = optional_json(m.sensitivity);
    j["specificity"] = optional_json(m.specificity);
    j["f1"] = optional_json(m.f1);
    j["ccr"] = optional_json(m.ccr);
    j["mcc"] = optional_json(m.mcc);
    try {
      j["auc"] = disc::roc_auc(pred, labels);
    } catch (const Error &) {
      j["auc"] = nullptr;
    }
  } else {
    std::vector<double> truth;
    double se = 0, ae = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      truth.push_back(examples[i].target);
      se += (pred[i] - truth[i]) * (pred[i] - truth[i]);
      ae += std::abs(pred[i] - truth[i]);
    }
    const double n = static_cast<double>(examples.size());
    j["pearson"] = optional_json(disc::pearson(pred, truth));
    j["rmse"] = n > 0 ? json(std::sqrt(se / n)) : json(nullptr);
    j["mae"] = n > 0 ? json(ae / n) : json(nullptr);
  }
  return j;
}

int cmd_vocab(Context &ctx, const VocabOptions &o) {
  const std::vector<std::string> corpus = smiles::read_corpus(o.input);
  if (corpus.empty())
    throw Error(ErrorCode::kEmptyCorpus, o.input + " holds no SMILES");
  const smiles::VocabularyBuild b =
      lm::build_lm_vocabulary(corpus, o.min_count, o.scaffolds);
  if (ctx.common.strict && !b.untokenizable.empty())
    throw Error(ErrorCode::kParseError,
                o.input + ": entry " + std::to_string(b.untokenizable[0] + 1)
                    + " does not tokenize");
  for (std::size_t i: b.untokenizable)
    ctx.err << "warning: entry " << i + 1 << " '" << corpus[i]
            << "' does not tokenize\n";
  const std::string path = ctx.common.out.empty() ? "vocab.txt"
                                                  : ctx.common.out;
  make_parent(path);
  smiles::save_vocabulary(b.vocab, path);
  ctx.out << header_line(ctx) << "vocabulary\t" << path << "\n"
          << "tokens\t" << b.vocab.size() << "\n"
          << "molecules\t" << corpus.size() << "\n"
          << "flagged\t" << b.flagged.size() << "\n"
          << "untokenizable\t" << b.untokenizable.size() << "\n";
  return kExitOk;
}

// Digest of everything that determines the encoded corpus.
std::string corpus_key(const LmOptions &o, std::span<const std::string> corpus,
                       bool conditioned) {
  Fnv1a h;
  h.text("prepared-corpus-1").u64(corpus.size());
  for (const std::string &line: corpus)
    h.u64(line.size()).text(line);
  h.i64(o.min_count).u64(conditioned ? 1 : 0);
  if (!o.vocab.empty()) {
    const smiles::Vocabulary vocab = smiles::load_vocabulary(o.vocab);
    h.u64(vocab.tokens().size());
    for (const std::string &t: vocab.tokens())
      h.u64(t.size()).text(t);
  }
  return hex64(h.digest());
}

io::PreparedCorpus prepared_corpus(Context &ctx, const LmOptions &o,
                                   std::span<const std::string> corpus,
                                   bool conditioned) {
  const std::string key = corpus_key(o, corpus, conditioned);
  if (!o.prepared.empty() && std::filesystem::exists(o.prepared)) {
    io::PreparedCorpus cached =
        io::prepared_corpus_from(io::load_checkpoint(o.prepared));
    if (cached.key == key && cached.conditioned == conditioned) {
      ctx.err << "using prepared corpus " << o.prepared << "\n";
      return cached;
    }
    ctx.err << "prepared corpus " << o.prepared << " is stale, rebuilding\n";
  }
  io::PreparedCorpus p;
  p.key = key;
  p.conditioned = conditioned;
  p.vocab = o.vocab.empty()
                ? lm::build_lm_vocabulary(corpus, o.min_count, conditioned).vocab
                : smiles::load_vocabulary(o.vocab);
  p.corpus = lm::prepare_corpus(corpus, p.vocab, conditioned, p.stats);
  if (!o.prepared.empty()) {
    make_parent(o.prepared);
    io::save_checkpoint(io::to_checkpoint(p), o.prepared);
  }
  return p;
}

int cmd_train_lm(Context &ctx, const LmOptions &o, lm::ModelKind kind) {
  const bool conditioned = kind == lm::ModelKind::kAutoregressive;
  const std::vector<std::string> corpus = smiles::read_corpus(o.input);
  if (corpus.empty())
    throw Error(ErrorCode::kEmptyCorpus, o.input + " holds no SMILES");
  const io::PreparedCorpus prepared =
      prepared_corpus(ctx, o, corpus, conditioned);
  const smiles::Vocabulary &vocab = prepared.vocab;
  const lm::PropertyStats &stats = prepared.stats;
  const lm::LmCorpus &data = prepared.corpus;
  if (!data.skipped.empty()) {
    if (ctx.common.strict)
      throw Error(ErrorCode::kParseError,
                  o.input + ": entry " + std::to_string(data.skipped[0] + 1)
                      + " cannot be encoded");
    ctx.err << "warning: skipped " << data.skipped.size() << " of "
            << corpus.size() << " molecules\n";
  }
  if (data.sequences.empty())
    throw Error(ErrorCode::kEmptyAfterFiltering, o.input + ": nothing to train on");

  lm::TransformerConfig cfg;
  cfg.kind = kind;
  cfg.n_blocks = o.blocks;
  cfg.n_heads = o.heads;
  cfg.d_model = o.d_model;
  cfg.dropout = o.dropout;
  cfg.vocab_size = vocab.size();
  cfg.validate();

  lm::LmTrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch_size;
  tc.optimizer = o.optimizer;
  tc.lr = o.lr;
  tc.weight_decay = o.weight_decay;
  tc.hessian_interval = o.hessian_interval;
  tc.grad_clip = o.clip;
  tc.lr_schedule = o.schedule;
  tc.corruption.select_rate = o.mask_rate;
  tc.seed = ctx.common.seed;
  if (o.target_accuracy > 0)
    tc.target_accuracy = o.target_accuracy;
  tc.eval_every = o.eval_every;

  CounterRng init(ctx.common.seed, 1);
  lm::Transformer model(cfg, init);
  const auto history = lm::train_language_model(
      model, data, tc, [&](const lm::LmEpoch &e) {
        ctx.err << "epoch " << e.epoch << " loss " << fixed(e.loss, 5);
        if (e.accuracy)
          ctx.err << " accuracy " << fixed(*e.accuracy, 4);
        ctx.err << "\n";
      });
  const lm::LanguageModel trained { model, vocab,
                                    conditioned ? stats : lm::PropertyStats {} };

  json hist = json::array();
  for (const lm::LmEpoch &e: history)
    hist.push_back({ { "epoch", e.epoch },
                     { "loss", e.loss },
                     { "accuracy", optional_json(e.accuracy) } });
  json extra = { { "run", run_record(ctx) },
                 { "history", hist },
                 { "corpus",
                   { { "path", o.input },
                     { "molecules", corpus.size() },
                     { "kept", data.sequences.size() },
                     { "skipped", data.skipped.size() } } } };
  const std::string path =
      ctx.common.out.empty() ? (conditioned ? "ar.cgai" : "mlm.cgai")
                             : ctx.common.out;
  make_parent(path);
  io::save_checkpoint(io::to_checkpoint(trained, extra), path);

  json summary = { { "checkpoint", path },
                   { "kind", lm::model_kind_name(kind) },
                   { "parameters", model.parameter_count() },
                   { "epochs", history.size() },
                   { "final_loss", history.empty() ? json(nullptr)
                                                   : json(history.back().loss) },
                   { "seed", ctx.common.seed },
                   { "config_hash", ctx.hash } };
  ctx.out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_train_disc(Context &ctx, const DiscOptions &o) {
  const disc::Task task = disc::parse_task(o.mode);
  const LoadedLm mlm = load_language_model(o.mlm, lm::ModelKind::kMasked);
  json datasets = json::array();
  const auto train = dataset_examples(ctx, o.train, task, o.threshold,
                                      mlm.model, datasets);
  const auto valid = dataset_examples(ctx, o.valid, task, o.threshold,
                                      mlm.model, datasets);
  const auto test = dataset_examples(ctx, o.test, task, o.threshold,
                                     mlm.model, datasets);

  disc::FusionConfig cfg;
  cfg.task = task;
  cfg.gat_hidden = o.gat_hidden;
  cfg.gat_heads = o.gat_heads;
  cfg.encoder_hidden = o.encoder_hidden;
  cfg.head_hidden = o.head_hidden;
  cfg.dropout = o.dropout;
  cfg.feature_dim = mlm.model.model.config().d_model;
  cfg.validate();

  disc::DiscTrainConfig tc;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch_size;
  tc.lr = o.lr;
  tc.weight_decay = o.weight_decay;
  tc.l1 = o.l1;
  tc.grad_clip = o.clip;
  tc.patience = o.patience;
  tc.lr_factor = o.lr_factor;
  tc.seed = ctx.common.seed;

  const disc::DiscTrainResult res = disc::train_discriminator(
      cfg, train, valid, tc, [&](const disc::DiscEpoch &e) {
        ctx.err << "epoch " << e.epoch << " loss " << fixed(e.train_loss, 5);
        if (e.validation_metric)
          ctx.err << " validation " << fixed(*e.validation_metric, 4);
        ctx.err << "\n";
      });

  json hist = json::array();
  for (const disc::DiscEpoch &e: res.history)
    hist.push_back({ { "epoch", e.epoch },
                     { "train_loss", e.train_loss },
                     { "validation_metric", optional_json(e.validation_metric) },
                     { "lr", e.lr } });
  json summary = { { "channel", o.channel },
                   { "task", disc::task_name(task) },
                   { "train", train.size() },
                   { "validation", valid.size() },
                   { "datasets", datasets },
                   { "best_epoch", res.best_epoch },
                   { "best_metric", res.best_metric },
                   { "test", test.empty() ? json(nullptr)
                                          : evaluation_json(res.model, test) } };
  if (o.y_randomization > 0) {
    if (test.empty())
      throw UsageError("--y-randomization needs --test");
    const disc::YRandomizationResult y = disc::y_randomization_test(
        cfg, train, valid, test, tc, o.y_randomization);
    summary["y_randomization"] = { { "true_metric", optional_json(y.true_metric) },
                                   { "shuffled", y.shuffled_metrics },
                                   { "mean", y.mean },
                                   { "stddev", y.stddev } };
  }
  json extra = { { "run", run_record(ctx) },
                 { "channel", o.channel },
                 { "threshold", o.threshold },
                 { "history", hist },
                 { "summary", summary } };
  const std::string path = ctx.common.out.empty()
                               ? o.channel + "_" + o.mode + ".cgai"
                               : ctx.common.out;
  make_parent(path);
  io::save_checkpoint(
      io::to_checkpoint(res.model, io::model_fingerprint(mlm.model), extra),
      path);
  summary["checkpoint"] = path;
  summary["seed"] = ctx.common.seed;
  summary["config_hash"] = ctx.hash;
  ctx.out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_predict(Context &ctx, const PredictOptions &o) {
  const disc::Task task = disc::parse_task(o.mode);
  std::vector<std::string> items = o.smiles;
  for (const std::string &s: read_smiles_file(o.input))
    items.push_back(s);
  if (items.empty())
    throw UsageError("pass --smiles or --input");
  const bool selected[] = { o.herg, o.nav, o.cav };
  if (!o.herg && !o.nav && !o.cav)
    throw UsageError("select at least one of --herg, --nav, --cav");
  const LoadedLm mlm = load_language_model(o.models.mlm, lm::ModelKind::kMasked);
  std::vector<std::pair<pipeline::Channel, LoadedDisc>> models;
  for (int c = 0; c < pipeline::kChannelCount; ++c)
    if (selected[c])
      models.emplace_back(
          pipeline::kChannels[c],
          load_discriminator(channel_path(o.models, pipeline::kChannels[c], task),
                             task, mlm.model));

  std::string text = header_line(ctx) + "smiles";
  for (const auto &[c, m]: models)
    text += "\t" + std::string(pipeline::channel_name(c));
  text += "\n";
  for (const auto &[smi, mol]: parse_all(ctx, items, "input")) {
    disc::Example ex;
    try {
      ex = disc::make_example(mol, mlm.model);
    } catch (const Error &e) {
      if (ctx.common.strict)
        throw Error(e.code(), "'" + smi + "': " + e.what());
      ctx.err << "warning: skipping '" << smi << "': " << e.what() << "\n";
      continue;
    }
    text += smi;
    for (const auto &[c, m]: models)
      text += "\t"
              + fixed(disc::predict_examples(m.model, std::span(&ex, 1))[0], 6);
    text += "\n";
  }
  emit(ctx, text);
  return kExitOk;
}

int cmd_optimize(Context &ctx, const OptimizeOptions &o) {
  pipeline::FilterSpec spec;
  const std::string *texts[] = { &o.herg, &o.nav, &o.cav };
  for (int c = 0; c < pipeline::kChannelCount; ++c) {
    try {
      spec[c] = pipeline::parse_channel_filter(*texts[c]);
    } catch (const Error &e) {
      throw UsageError(e.what());
    }
  }
  if (!pipeline::any_active(spec))
    throw UsageError("at least one of --herg, --nav, --cav must filter");

  const LoadedLm gen = load_language_model(o.generator,
                                           lm::ModelKind::kAutoregressive);
  const LoadedLm mlm = load_language_model(o.models.mlm, lm::ModelKind::kMasked);
  std::vector<LoadedDisc> discs;
  discs.reserve(pipeline::kChannelCount);
  pipeline::ModelStack stack;
  stack.generator = &gen.model;
  stack.mlm = &mlm.model;
  json echo = { { "generator", model_echo(o.generator, gen.meta) },
                { "mlm", model_echo(o.models.mlm, mlm.meta) } };
  for (int c = 0; c < pipeline::kChannelCount; ++c) {
    if (!spec[c].active())
      continue;
    const disc::Task task = spec[c].mode == pipeline::FilterMode::kRange
                                ? disc::Task::kRegression
                                : disc::Task::kClassification;
    const std::string path = channel_path(o.models, pipeline::kChannels[c], task);
    discs.push_back(load_discriminator(path, task, mlm.model));
    stack.channels[c] = &discs.back().model;
    echo[std::string(pipeline::channel_name(pipeline::kChannels[c]))] =
        model_echo(path, discs.back().meta);
  }

  pipeline::OptimizeConfig oc;
  oc.generation.n = o.n;
  oc.generation.max_attempts = o.max_attempts;
  oc.generation.sample.temperature = o.temperature;
  oc.generation.sample.top_k = o.top_k;
  oc.mi.bins = o.mi_bins;
  oc.mi.redundancy = o.mi_ratio;
  oc.seed = ctx.common.seed;
  const pipeline::OptimizeReport report =
      pipeline::optimize_cardiotoxic_drug(o.input, spec, stack, oc);

  nlohmann::ordered_json summary =
      nlohmann::ordered_json::parse(pipeline::report_json(report));
  summary["run"] = nlohmann::ordered_json::parse(run_record(ctx).dump());
  summary["models"] = nlohmann::ordered_json::parse(echo.dump());
  const std::string tsv = pipeline::report_tsv(report);
  if (ctx.common.out.empty()) {
    ctx.out << tsv;
  } else {
    write_text(ctx.common.out + ".tsv", tsv);
    write_text(ctx.common.out + ".json", summary.dump(2) + "\n");
  }
  const pipeline::AttemptStats &s = report.stats;
  ctx.err << "accepted " << s.accepted << " of " << o.n << " after "
          << s.attempts << " attempts (invalid " << s.invalid
          << ", duplicates " << s.duplicates << ", input " << s.input_matches
          << ", rejected " << s.rejected << ")\n";
  if (report.budget_exhausted) {
    ctx.err << "error: attempt budget exhausted before " << o.n
            << " candidates were accepted\n";
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_eval(Context &ctx, const EvalOptions &o) {
  const io::Checkpoint ckpt = io::load_checkpoint(o.model);
  const disc::FusionModel model = io::fusion_model_from(ckpt);
  const LoadedLm mlm = load_language_model(o.mlm, lm::ModelKind::kMasked);
  io::check_feature_model(ckpt, mlm.model);
  json datasets = json::array();
  const auto examples = dataset_examples(ctx, o.data, model.config().task,
                                         o.threshold, mlm.model, datasets);
  json j = evaluation_json(model, examples);
  j["dataset"] = datasets.at(0);
  j["task"] = disc::task_name(model.config().task);
  j["model"] = model_echo(o.model, ckpt.metadata);
  j["seed"] = ctx.common.seed;
  j["config_hash"] = ctx.hash;
  emit(ctx, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_audit(Context &ctx, const AuditOptions &o) {
  std::vector<std::string> reference = smiles::read_corpus(o.train);
  for (const std::string &s: read_smiles_file(o.valid))
    reference.push_back(s);
  const auto ref = parse_all(ctx, reference, "reference");
  const auto test = parse_all(ctx, smiles::read_corpus(o.test), "test");
  if (ref.empty() || test.empty())
    throw Error(ErrorCode::kEmptyAfterFiltering, "nothing to compare");
  std::vector<chem::Fingerprint> ref_fp;
  for (const auto &[smi, mol]: ref)
    ref_fp.push_back(chem::morgan_fingerprint(mol));

  std::string text = header_line(ctx)
                     + "index\tsmiles\tmax_similarity\tnearest\tflagged\n";
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const chem::Fingerprint fp = chem::morgan_fingerprint(test[i].second);
    double best = -1;
    std::size_t at = 0;
    for (std::size_t r = 0; r < ref_fp.size(); ++r) {
      const double t = chem::tanimoto(fp, ref_fp[r]);
      if (t > best) {
        best = t;
        at = r;
      }
    }
    const bool flag = best > o.similarity;
    flagged += flag ? 1 : 0;
    text += std::to_string(i + 1) + "\t" + test[i].first + "\t" + fixed(best, 4)
            + "\t" + ref[at].first + "\t" + (flag ? "1" : "0") + "\n";
  }
  emit(ctx, text);
  ctx.err << flagged << " of " << test.size()
          << " test molecules exceed similarity " << fixed(o.similarity, 2)
          << "\n";
  return kExitOk;
}

int cmd_pca(Context &ctx, const PcaOptions &o) {
  const auto mols = parse_all(ctx, smiles::read_corpus(o.input), "input");
  Eigen::MatrixXd desc(static_cast<Eigen::Index>(mols.size()),
                       chem::kDescriptorCount);
  for (std::size_t i = 0; i < mols.size(); ++i)
    desc.row(static_cast<Eigen::Index>(i)) =
        chem::compute_descriptors(mols[i].second).values.transpose();
  const pipeline::PcaResult pca = pipeline::pca_fit_project(desc, o.k);
  const Eigen::VectorXd &ratio = pca.model.explained_variance_ratio;

  std::string text = header_line(ctx) + "# explained_variance_ratio=";
  for (Eigen::Index c = 0; c < ratio.size(); ++c)
    text += (c ? "," : "") + fixed(ratio[c], 6);
  text += "\nsmiles";
  for (int c = 0; c < o.k; ++c)
    text += "\tpc" + std::to_string(c + 1);
  text += "\n";
  for (std::size_t i = 0; i < mols.size(); ++i) {
    text += mols[i].first;
    for (int c = 0; c < o.k; ++c)
      text += "\t" + fixed(pca.projected(static_cast<Eigen::Index>(i), c), 6);
    text += "\n";
  }
  if (ctx.common.out.empty()) {
    ctx.out << text;
    return kExitOk;
  }
  write_text(ctx.common.out + ".tsv", text);
  json comps = json::array();
  for (Eigen::Index c = 0; c < pca.model.components.rows(); ++c)
    comps.push_back(std::vector<double>(pca.model.components.row(c).begin(),
                                        pca.model.components.row(c).end()));
  const auto names = chem::descriptor_names();
  json j = { { "run", run_record(ctx) },
             { "descriptor_layout", chem::kDescriptorLayoutVersion },
             { "descriptors", std::vector<std::string>(names.begin(), names.end()) },
             { "explained_variance_ratio",
               std::vector<double>(ratio.data(), ratio.data() + ratio.size()) },
             { "components", comps },
             { "mean", std::vector<double>(pca.model.mean.data(),
                                           pca.model.mean.data()
                                               + pca.model.mean.size()) },
             { "scale", std::vector<double>(pca.model.scale.data(),
                                            pca.model.scale.data()
                                                + pca.model.scale.size()) } };
  write_text(ctx.common.out + ".json", j.dump(2) + "\n");
  return kExitOk;
}

std::string config_path(const std::vector<std::string> &args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0)
      return args[i].substr(9);
  }
  const char *env = std::getenv(kConfigEnv);
  return env ? env : "";
}

json load_config(const std::string &path) {
  if (path.empty())
    return json::object();
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot open config " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object())
      throw UsageError("config " + path + " must hold a JSON object");
    return j;
  } catch (const json::exception &e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

void add_model_paths(CLI::App *sub, Fields &f, const Settings &s,
                     ModelPaths &m) {
  f.option(sub, s, "mlm", m.mlm, "masked language model checkpoint");
  f.option(sub, s, "herg-model", m.herg_model, "hERG discriminator checkpoint");
  f.option(sub, s, "nav-model", m.nav_model, "Nav1.5 discriminator checkpoint");
  f.option(sub, s, "cav-model", m.cav_model, "Cav1.2 discriminator checkpoint");
  f.option(sub, s, "model-dir", m.model_dir,
           "directory holding <channel>_<task>.cgai checkpoints");
}

void add_lm_options(CLI::App *sub, Fields &f, const Settings &s, LmOptions &o,
                    bool masked) {
  if (masked) {
    o.optimizer = "adamw";
    o.weight_decay = 0.01;
  }
  f.option(sub, s, "input", o.input, "SMILES file, one per line")->required();
  f.option(sub, s, "vocab", o.vocab, "vocabulary file (built when absent)");
  f.option(sub, s, "min-count", o.min_count, "minimum token count");
  f.option(sub, s, "prepared", o.prepared,
           "encoded corpus cache, reused when its inputs match");
  f.option(sub, s, "epochs", o.epochs, "training epochs");
  f.option(sub, s, "batch-size", o.batch_size, "sequences per step");
  f.option(sub, s, "optimizer", o.optimizer, "sophia or adamw")
      ->check(CLI::IsMember({ "sophia", "adamw" }));
  f.option(sub, s, "lr", o.lr, "learning rate");
  f.option(sub, s, "weight-decay", o.weight_decay, "decoupled weight decay");
  f.option(sub, s, "clip", o.clip, "gradient norm clip, 0 disables");
  f.option(sub, s, "schedule", o.schedule, "constant or cosine")
      ->check(CLI::IsMember({ "constant", "cosine" }));
  f.option(sub, s, "hessian-interval", o.hessian_interval,
           "steps between curvature estimates");
  f.option(sub, s, "d-model", o.d_model, "embedding width");
  f.option(sub, s, "blocks", o.blocks, "transformer blocks");
  f.option(sub, s, "heads", o.heads, "attention heads");
  f.option(sub, s, "dropout", o.dropout, "dropout rate");
  f.option(sub, s, "target-accuracy", o.target_accuracy,
           "stop at this training accuracy, 0 disables");
  f.option(sub, s, "eval-every", o.eval_every, "epochs between accuracy checks");
  if (masked)
    f.option(sub, s, "mask-rate", o.mask_rate, "fraction of tokens selected");
}

}  // namespace

int run_command(const std::vector<std::string> &args, std::ostream &out,
                std::ostream &err) {
  CLI::App app { "Cardiac ion-channel aware molecule generation and "
                 "prediction.",
                 "cardiogen" };
  app.require_subcommand(1);
  app.fallthrough();
  app.footer("Exit status: 0 success, 1 data error, 2 usage error. "
             "Default config: $" + std::string(kConfigEnv) + ".");

  Context ctx { {}, {}, {}, {}, out, err };
  json file;
  try {
    file = load_config(config_path(args));
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  VocabOptions vocab;
  LmOptions ar, mlm;
  DiscOptions dsc;
  PredictOptions pred;
  OptimizeOptions opt;
  EvalOptions ev;
  AuditOptions audit;
  PcaOptions pca;
  std::map<std::string, Fields> fields;
  Fields common_fields;

  try {
    // Common options also honour the chosen subcommand's section.
    static const char *const kCommands[] = { "vocab",    "train-ar",
                                             "train-mlm", "train-disc",
                                             "predict",  "optimize",
                                             "eval",     "audit-split",
                                             "project-pca" };
    std::string section;
    for (const std::string &a: args)
      if (std::find(std::begin(kCommands), std::end(kCommands), a)
          != std::end(kCommands)) {
        section = a;
        break;
      }
    const Settings top(file, section);
    Common &c = ctx.common;
    common_fields.option(&app, top, "seed", c.seed, "random seed");
    app.add_option("--config", c.config, "JSON configuration file");
    common_fields.option(&app, top, "out", c.out, "output path or prefix");
    common_fields.flag(&app, top, "strict", c.strict,
                       "abort on the first malformed input row");
    common_fields.option(&app, top, "threads", c.threads, "worker cap")
        ->check(CLI::PositiveNumber);
    common_fields.option(&app, top, "device", c.device,
                         "compute device; only cpu exists");

    auto sub = [&](const std::string &name, const std::string &desc) {
      return std::pair { app.add_subcommand(name, desc), Settings(file, name) };
    };

    {
      auto [s, cfg] = sub("vocab", "build a token vocabulary");
      Fields &f = fields[s->get_name()];
      f.option(s, cfg, "input", vocab.input, "SMILES file")->required();
      f.option(s, cfg, "min-count", vocab.min_count, "minimum token count");
      f.flag(s, cfg, "scaffolds", vocab.scaffolds,
             "include scaffold spellings");
    }
    {
      auto [s, cfg] = sub("train-ar", "train the conditioned generator");
      add_lm_options(s, fields[s->get_name()], cfg, ar, false);
    }
    {
      auto [s, cfg] = sub("train-mlm", "train the masked feature model");
      add_lm_options(s, fields[s->get_name()], cfg, mlm, true);
    }
    {
      auto [s, cfg] = sub("train-disc", "train an ion-channel discriminator");
      Fields &f = fields[s->get_name()];
      f.option(s, cfg, "train", dsc.train, "training TSV (smiles, pIC50)")
          ->required();
      f.option(s, cfg, "valid", dsc.valid, "validation TSV");
      f.option(s, cfg, "test", dsc.test, "test TSV");
      f.option(s, cfg, "mlm", dsc.mlm, "masked language model checkpoint")
          ->required();
      f.option(s, cfg, "mode", dsc.mode, "classification or regression")
          ->check(CLI::IsMember({ "classification", "regression" }));
      f.option(s, cfg, "channel", dsc.channel, "herg, nav1.5 or cav1.2")
          ->check(CLI::IsMember({ "herg", "nav1.5", "cav1.2" }));
      f.option(s, cfg, "epochs", dsc.epochs, "training epochs");
      f.option(s, cfg, "batch-size", dsc.batch_size, "molecules per step");
      f.option(s, cfg, "lr", dsc.lr, "learning rate");
      f.option(s, cfg, "weight-decay", dsc.weight_decay, "AdamW weight decay");
      f.option(s, cfg, "l1", dsc.l1, "L1 penalty weight");
      f.option(s, cfg, "clip", dsc.clip, "gradient norm clip");
      f.option(s, cfg, "patience", dsc.patience, "plateau patience (epochs)");
      f.option(s, cfg, "lr-factor", dsc.lr_factor, "plateau decay factor");
      f.option(s, cfg, "gat-hidden", dsc.gat_hidden, "GAT output width");
      f.option(s, cfg, "gat-heads", dsc.gat_heads, "GAT attention heads");
      f.option(s, cfg, "encoder-hidden", dsc.encoder_hidden,
               "fingerprint and feature encoder width");
      f.option(s, cfg, "head-hidden", dsc.head_hidden, "fusion head width");
      f.option(s, cfg, "dropout", dsc.dropout, "dropout rate");
      f.option(s, cfg, "threshold", dsc.threshold, "blocker pIC50 threshold");
      f.option(s, cfg, "y-randomization", dsc.y_randomization,
               "randomization trials, 0 skips");
    }
    {
      auto [s, cfg] = sub("predict", "predict ion-channel activity");
      Fields &f = fields[s->get_name()];
      f.option(s, cfg, "smiles", pred.smiles, "molecule(s)");
      f.option(s, cfg, "input", pred.input, "SMILES file");
      f.flag(s, cfg, "herg", pred.herg, "predict hERG");
      f.flag(s, cfg, "nav", pred.nav, "predict Nav1.5");
      f.flag(s, cfg, "cav", pred.cav, "predict Cav1.2");
      f.option(s, cfg, "mode", pred.mode, "classification or regression")
          ->check(CLI::IsMember({ "classification", "regression" }));
      add_model_paths(s, f, cfg, pred.models);
    }
    {
      auto [s, cfg] = sub("optimize", "generate analogs with target activity");
      Fields &f = fields[s->get_name()];
      f.option(s, cfg, "input", opt.input, "input drug SMILES")->required();
      f.option(s, cfg, "herg", opt.herg,
               "off, blockers, non-blockers or (lo,hi) pIC50 range");
      f.option(s, cfg, "nav", opt.nav, "Nav1.5 filter, same forms");
      f.option(s, cfg, "cav", opt.cav, "Cav1.2 filter, same forms");
      f.option(s, cfg, "n", opt.n, "candidates to accept", "n-generations");
      f.option(s, cfg, "max-attempts", opt.max_attempts, "sampling budget");
      f.option(s, cfg, "temperature", opt.temperature, "sampling temperature");
      f.option(s, cfg, "top-k", opt.top_k, "top-k truncation, 0 disables");
      f.option(s, cfg, "mi-bins", opt.mi_bins, "quantile bins for pruning");
      f.option(s, cfg, "mi-ratio", opt.mi_ratio, "redundancy threshold");
      f.option(s, cfg, "generator", opt.generator, "generator checkpoint")
          ->required();
      add_model_paths(s, f, cfg, opt.models);
    }
    {
      auto [s, cfg] = sub("eval", "score a discriminator on a labeled set");
      Fields &f = fields[s->get_name()];
      f.option(s, cfg, "model", ev.model, "discriminator checkpoint")->required();
      f.option(s, cfg, "mlm", ev.mlm, "masked language model checkpoint")
          ->required();
      f.option(s, cfg, "data", ev.data, "TSV (smiles, pIC50)")->required();
      f.option(s, cfg, "threshold", ev.threshold, "blocker pIC50 threshold");
    }
    {
      auto [s, cfg] = sub("audit-split",
                          "flag test molecules similar to training ones");
      Fields &f = fields[s->get_name()];
      f.option(s, cfg, "train", audit.train, "training set")->required();
      f.option(s, cfg, "valid", audit.valid, "validation set");
      f.option(s, cfg, "test", audit.test, "test set")->required();
      f.option(s, cfg, "similarity", audit.similarity,
               "flag above this Tanimoto similarity");
    }
    {
      auto [s, cfg] = sub("project-pca", "project molecules onto descriptor PCs");
      Fields &f = fields[s->get_name()];
      f.option(s, cfg, "input", pca.input, "SMILES file")->required();
      f.option(s, cfg, "k", pca.k, "components")->check(CLI::PositiveNumber);
    }
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App *chosen = app.get_subcommands().front();
  ctx.command = chosen->get_name();
  ctx.run = { { "command", ctx.command },
              { "common", common_fields.values() },
              { "options", fields[ctx.command].values() } };
  ctx.hash = hex64(fnv1a(ctx.run.dump()));
  if (ctx.common.device != "cpu")
    err << "warning: device '" << ctx.common.device
        << "' is not available; running on cpu\n";

  try {
    if (ctx.command == "vocab")
      return cmd_vocab(ctx, vocab);
    if (ctx.command == "train-ar")
      return cmd_train_lm(ctx, ar, lm::ModelKind::kAutoregressive);
    if (ctx.command == "train-mlm")
      return cmd_train_lm(ctx, mlm, lm::ModelKind::kMasked);
    if (ctx.command == "train-disc")
      return cmd_train_disc(ctx, dsc);
    if (ctx.command == "predict")
      return cmd_predict(ctx, pred);
    if (ctx.command == "optimize")
      return cmd_optimize(ctx, opt);
    if (ctx.command == "eval")
      return cmd_eval(ctx, ev);
    if (ctx.command == "audit-split")
      return cmd_audit(ctx, audit);
    if (ctx.command == "project-pca")
      return cmd_pca(ctx, pca);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n" << chosen->help();
    return kExitUsage;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace cardiogen::cli
