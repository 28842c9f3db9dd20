#include "brd/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "brd/corpus.hpp"
#include "brd/error.hpp"

namespace brd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw Error(ErrorKind::Io, what + " not found: " + path.string());
}

template <typename T>
T get_as(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "config " + where + "." + key + ": " + e.what());
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::Config, "config " + where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      throw Error(ErrorKind::Config, "unknown config key " + where + "." + k);
    }
  }
}

void apply_model_keys(ModelConfig& m, const json& j, const std::string& where) {
  if (j.contains("sequence_length")) m.sequence_length = get_as<int>(j, "sequence_length", where);
  if (j.contains("hidden_units")) m.hidden_units = get_as<int>(j, "hidden_units", where);
  if (j.contains("conv_filters")) m.conv_filters = get_as<int>(j, "conv_filters", where);
  if (j.contains("pool_size")) m.pool_size = get_as<int>(j, "pool_size", where);
  if (j.contains("kernel_sizes")) m.kernel_sizes = get_as<std::array<int, 3>>(j, "kernel_sizes", where);
}

void apply_train_keys(TrainConfig& t, const json& j, const std::string& where) {
  if (j.contains("epochs")) t.epochs = get_as<int>(j, "epochs", where);
  if (j.contains("batch_size")) t.batch_size = get_as<int>(j, "batch_size", where);
  if (j.contains("learning_rate")) t.learning_rate = get_as<double>(j, "learning_rate", where);
  if (j.contains("optimizer")) t.optimizer = get_as<std::string>(j, "optimizer", where);
  if (j.contains("loss")) t.loss = get_as<std::string>(j, "loss", where);
  if (j.contains("seed")) t.seed = get_as<std::uint64_t>(j, "seed", where);
  if (j.contains("beta1")) t.beta1 = get_as<double>(j, "beta1", where);
  if (j.contains("beta2")) t.beta2 = get_as<double>(j, "beta2", where);
  if (j.contains("epsilon")) t.epsilon = get_as<double>(j, "epsilon", where);
}

std::unique_ptr<PosSource> lexicon_for(const PipelineConfig& cfg) {
  if (cfg.lexicon.empty()) return nullptr;
  return std::make_unique<StopPosLexicon>(StopPosLexicon::load(cfg.lexicon));
}

PreprocessConfig effective_preprocess(const PipelineConfig& cfg) {
  PreprocessConfig p = cfg.preprocess;
  if (!p.pos_source) {
    if (auto lex = lexicon_for(cfg)) p.pos_source = std::shared_ptr<const PosSource>(std::move(lex));
  }
  return p;
}

std::vector<std::string> texts_of(const std::vector<LabeledRecord>& records) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.text);
  return out;
}

/// Cleaned dataset plus its cache, validated against each other.
struct Aligned {
  std::vector<LabeledRecord> records;
  EmbeddingCache cache;
  std::unordered_map<std::size_t, std::size_t> position_of_id;
};

Aligned load_aligned(const fs::path& cleaned, const fs::path& cache_path, std::optional<std::uint32_t> dim) {
  require_file(cleaned, "cleaned dataset (run `brd preprocess` first)");
  require_file(cache_path, "embedding cache (run `brd embed` first)");
  Aligned a;
  a.records = load_dataset(cleaned).records;
  a.cache = read_cache(cache_path, dim);
  validate_cache(a.cache, texts_of(a.records));
  for (std::size_t i = 0; i < a.records.size(); ++i) a.position_of_id[a.records[i].id] = i;
  return a;
}

std::size_t position(const Aligned& a, std::size_t id) {
  auto it = a.position_of_id.find(id);
  if (it == a.position_of_id.end()) {
    throw Error(ErrorKind::Schema, "split manifest references id " + std::to_string(id) +
                                       " missing from the cleaned dataset");
  }
  return it->second;
}

FeatureTable table_for(const std::vector<const EmbeddingCache*>& caches, const std::vector<std::size_t>& positions,
                       const std::vector<LabeledRecord>* records) {
  FeatureTable t;
  t.dim = caches.front()->spec.dimension;
  t.channels.resize(caches.size());
  for (std::size_t c = 0; c < caches.size(); ++c) {
    if (caches[c]->spec.dimension != t.dim) {
      throw Error(ErrorKind::Config, "MCNN-LSTM branch caches must share one dimension");
    }
    t.channels[c].reserve(positions.size() * t.dim);
    for (auto p : positions) {
      const auto& v = caches[c]->rows.at(p).values;
      t.channels[c].insert(t.channels[c].end(), v.begin(), v.end());
    }
  }
  if (records) {
    for (auto p : positions) t.labels.push_back(static_cast<std::uint8_t>((*records)[p].binary_label));
  }
  return t;
}

std::vector<EmbeddingCache> load_branch_caches(const PipelineConfig& cfg, const Aligned& a) {
  std::vector<EmbeddingCache> out;
  if (cfg.mcnn_caches.empty()) return out;
  if (cfg.mcnn_caches.size() != 3) {
    throw Error(ErrorKind::Config, "mcnn_caches needs exactly three cache files");
  }
  for (const auto& p : cfg.mcnn_caches) {
    out.push_back(read_cache(p, a.cache.spec.dimension));
    validate_cache(out.back(), texts_of(a.records));
  }
  return out;
}

std::vector<const EmbeddingCache*> caches_for(Architecture arch, const Aligned& a,
                                              const std::vector<EmbeddingCache>& branch) {
  if (arch == Architecture::McnnLstm && !branch.empty()) return {&branch[0], &branch[1], &branch[2]};
  return {&a.cache};
}

void write_history(const fs::path& path, const std::vector<EpochStats>& history) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "epoch\ttrain_loss\ttrain_accuracy\tval_loss\tval_accuracy\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    const auto& h = history[e];
    out << e + 1 << '\t' << full(h.train_loss) << '\t' << full(h.train_accuracy) << '\t' << full(h.val_loss)
        << '\t' << full(h.val_accuracy) << '\n';
  }
}

std::map<std::string, std::string> echo(const TrainedModel& m) {
  std::map<std::string, std::string> e = m.metadata;
  const auto& c = m.config();
  e["architecture"] = std::string(to_string(c.architecture));
  e["input_dim"] = std::to_string(c.input_dim);
  e["sequence_length"] = std::to_string(c.sequence_length);
  e["hidden_units"] = std::to_string(c.hidden_units);
  if (c.architecture == Architecture::McnnLstm) {
    e["kernel_sizes"] = std::to_string(c.kernel_sizes[0]) + "," + std::to_string(c.kernel_sizes[1]) + "," +
                        std::to_string(c.kernel_sizes[2]);
    e["conv_filters"] = std::to_string(c.conv_filters);
    e["pool_size"] = std::to_string(c.pool_size);
  }
  e["epochs"] = std::to_string(m.train_config.epochs);
  e["batch_size"] = std::to_string(m.train_config.batch_size);
  e["learning_rate"] = full(m.train_config.learning_rate);
  e["optimizer"] = m.train_config.optimizer;
  e["seed"] = std::to_string(m.train_config.seed);
  return e;
}

std::string slug(std::string s) {
  for (auto& c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '-' || c == '_' || u >= 0x80)) c = '_';
  }
  return s;
}

}  // namespace

std::string PipelineConfig::display_embedding() const {
  if (!embedding_name.empty()) return embedding_name;
  if (provider == "stub" && dimension) return "stub-" + std::to_string(*dimension);
  return provider;
}

fs::path PipelineConfig::checkpoint_path(Architecture a) const {
  return out_dir / (std::string(to_string(a)) + ".ckpt");
}

void PipelineConfig::emit(const std::string& message) const {
  if (log) {
    log(message);
  } else {
    std::cerr << message << '\n';
  }
}

void set_input_dim(PipelineConfig& cfg, int dim) {
  for (auto& m : cfg.models) {
    if (m.sequence_length == m.input_dim) m.sequence_length = dim;
    m.input_dim = dim;
  }
}

PipelineConfig apply_config_json(PipelineConfig cfg, const json& doc) {
  check_keys(doc,
             {"dataset", "out", "seed", "preprocess", "embedding", "split", "model", "train", "models",
              "mcnn_caches", "ensemble"},
             "");
  if (doc.contains("dataset")) cfg.dataset = get_as<std::string>(doc, "dataset", "");
  if (doc.contains("out")) cfg.out_dir = get_as<std::string>(doc, "out", "");
  if (doc.contains("seed")) {
    cfg.seed = get_as<std::uint64_t>(doc, "seed", "");
    for (auto& t : cfg.training) t.seed = cfg.seed;
  }
  if (doc.contains("preprocess")) {
    const auto& p = doc["preprocess"];
    check_keys(p, {"numbers", "punctuation", "emoji", "pos", "drop_tags", "lexicon", "drop_empty",
                   "punctuation_to_space"},
               "preprocess");
    if (p.contains("numbers")) cfg.preprocess.remove_numbers = get_as<bool>(p, "numbers", "preprocess");
    if (p.contains("punctuation")) cfg.preprocess.remove_punctuation = get_as<bool>(p, "punctuation", "preprocess");
    if (p.contains("emoji")) cfg.preprocess.remove_emoji = get_as<bool>(p, "emoji", "preprocess");
    if (p.contains("pos")) cfg.preprocess.remove_pos = get_as<bool>(p, "pos", "preprocess");
    if (p.contains("punctuation_to_space")) {
      cfg.preprocess.punctuation_to_space = get_as<bool>(p, "punctuation_to_space", "preprocess");
    }
    if (p.contains("drop_tags")) {
      cfg.preprocess.drop_tags.clear();
      for (const auto& name : get_as<std::vector<std::string>>(p, "drop_tags", "preprocess")) {
        const auto tag = parse_pos_tag(name);
        if (!tag) throw Error(ErrorKind::Config, "unknown POS tag '" + name + "'");
        cfg.preprocess.drop_tags.insert(*tag);
      }
    }
    if (p.contains("lexicon")) cfg.lexicon = get_as<std::string>(p, "lexicon", "preprocess");
    if (p.contains("drop_empty")) cfg.drop_empty = get_as<bool>(p, "drop_empty", "preprocess");
  }
  if (doc.contains("embedding")) {
    const auto& e = doc["embedding"];
    check_keys(e, {"provider", "dim", "batch_size", "name"}, "embedding");
    if (e.contains("provider")) cfg.provider = get_as<std::string>(e, "provider", "embedding");
    if (e.contains("dim")) cfg.dimension = get_as<std::uint32_t>(e, "dim", "embedding");
    if (e.contains("batch_size")) cfg.embed_batch_size = get_as<std::size_t>(e, "batch_size", "embedding");
    if (e.contains("name")) cfg.embedding_name = get_as<std::string>(e, "name", "embedding");
  }
  if (doc.contains("split")) {
    const auto& s = doc["split"];
    check_keys(s, {"ratio", "stratify"}, "split");
    if (s.contains("ratio")) cfg.split_ratio = get_as<double>(s, "ratio", "split");
    if (s.contains("stratify")) cfg.stratify = get_as<bool>(s, "stratify", "split");
  }
  const auto model_keys = {"sequence_length", "hidden_units", "conv_filters", "pool_size", "kernel_sizes"};
  const auto train_keys = {"epochs", "batch_size", "learning_rate", "optimizer", "loss",
                           "seed",   "beta1",      "beta2",         "epsilon"};
  if (doc.contains("model")) {
    check_keys(doc["model"], model_keys, "model");
    for (auto& m : cfg.models) apply_model_keys(m, doc["model"], "model");
  }
  if (doc.contains("train")) {
    check_keys(doc["train"], train_keys, "train");
    for (auto& t : cfg.training) apply_train_keys(t, doc["train"], "train");
  }
  if (doc.contains("models")) {
    for (const auto& [name, body] : doc["models"].items()) {
      const Architecture a = parse_architecture(name);
      const std::string where = "models." + name;
      check_keys(body,
                 {"sequence_length", "hidden_units", "conv_filters", "pool_size", "kernel_sizes", "epochs",
                  "batch_size", "learning_rate", "optimizer", "loss", "seed", "beta1", "beta2", "epsilon"},
                 where);
      apply_model_keys(cfg.model(a), body, where);
      apply_train_keys(cfg.train_config(a), body, where);
    }
  }
  if (doc.contains("mcnn_caches")) {
    cfg.mcnn_caches.clear();
    for (const auto& p : get_as<std::vector<std::string>>(doc, "mcnn_caches", "")) cfg.mcnn_caches.emplace_back(p);
  }
  if (doc.contains("ensemble")) {
    check_keys(doc["ensemble"], {"hard_vote"}, "ensemble");
    cfg.vote = get_as<bool>(doc["ensemble"], "hard_vote", "ensemble") ? VoteMode::Hard : VoteMode::Soft;
  }
  if (cfg.dimension) set_input_dim(cfg, static_cast<int>(*cfg.dimension));
  return cfg;
}

PipelineConfig load_config_file(const fs::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return apply_config_json(std::move(base), doc);
}

// ---------------------------------------------------------------- preprocess

PreprocessSummary cmd_preprocess(const PipelineConfig& cfg) {
  if (cfg.dataset.empty()) throw Error(ErrorKind::Config, "no dataset given (--dataset or config `dataset`)");
  const auto loaded = load_dataset(cfg.dataset);
  const auto pre = effective_preprocess(cfg);
  ensure_dir(cfg.out_dir);

  PreprocessSummary s;
  s.rows_in = loaded.records.size();
  s.duplicate_texts = loaded.duplicate_texts;
  if (loaded.duplicate_texts > 0) {
    cfg.emit("warning: " + std::to_string(loaded.duplicate_texts) + " duplicate text(s) in " + cfg.dataset.string());
  }
  for (const auto& stage : {"numbers", "punctuation", "emoji", "pos", "whitespace"}) s.rows_changed_by_stage[stage] = 0;

  std::vector<LabeledRecord> kept;
  kept.reserve(loaded.records.size());
  for (const auto& r : loaded.records) {
    auto c = clean(r.text, pre);
    for (const auto& st : c.stages_changed) ++s.rows_changed_by_stage[st];
    if (c.empty() && cfg.drop_empty) {
      s.dropped_ids.push_back(r.id);
      cfg.emit("dropped row id " + std::to_string(r.id) + ": empty after cleaning");
      continue;
    }
    LabeledRecord out = r;
    out.text = std::move(c.cleaned);
    kept.push_back(std::move(out));
  }
  s.rows_out = kept.size();
  write_dataset(cfg.cleaned_path(), kept);

  std::ofstream stats(cfg.out_dir / "preprocess_stats.txt", std::ios::binary | std::ios::trunc);
  stats << "rows_in = " << s.rows_in << '\n' << "rows_out = " << s.rows_out << '\n';
  stats << "rows_dropped_empty = " << s.dropped_ids.size() << '\n';
  stats << "duplicate_texts = " << s.duplicate_texts << '\n';
  for (const auto& [stage, n] : s.rows_changed_by_stage) stats << "rows_changed." << stage << " = " << n << '\n';
  std::string applied;
  for (const auto& st : clean("", pre).stages_applied) applied += (applied.empty() ? "" : ",") + st;
  stats << "stages_applied = " << applied << '\n';
  return s;
}

// ---------------------------------------------------------------- embed

EmbedSummary cmd_embed(const PipelineConfig& cfg, bool force) {
  require_file(cfg.cleaned_path(), "cleaned dataset (run `brd preprocess` first)");
  const auto records = load_dataset(cfg.cleaned_path()).records;
  if (records.empty()) throw Error(ErrorKind::Input, "cleaned dataset is empty");
  const auto texts = texts_of(records);
  const auto provider = make_provider(cfg.provider, cfg.dimension, cfg.seed);
  const auto dim = provider->spec().dimension;

  EmbedSummary s{records.size(), dim, false};
  const auto path = cfg.cache_path();
  if (fs::exists(path) && !force) {
    const auto existing = read_cache(path);
    if (existing.spec.dimension == dim) {
      validate_cache(existing, texts);  // throws naming the first stale row
      s.reused = true;
      cfg.emit("embedding cache " + path.string() + " is up to date");
      return s;
    }
    throw Error(ErrorKind::Stale, "existing cache " + path.string() + " has dimension " +
                                      std::to_string(existing.spec.dimension) + ", provider gives " +
                                      std::to_string(dim) + " (use --force to rebuild)");
  }
  EmbeddingCache cache;
  cache.spec = provider->spec();
  cache.rows = embed_batch(texts, *provider, cfg.embed_batch_size, cfg.backend);
  ensure_dir(cfg.out_dir);
  write_cache(cache, path);
  validate_cache(read_cache(path, dim), texts);
  return s;
}

// ---------------------------------------------------------------- train

TrainSummary cmd_train(const PipelineConfig& cfg_in, Architecture arch) {
  PipelineConfig cfg = cfg_in;
  const auto aligned = load_aligned(cfg.cleaned_path(), cfg.cache_path(), std::nullopt);
  const auto dim = aligned.cache.spec.dimension;
  if (cfg.dimension && *cfg.dimension != dim) {
    throw Error(ErrorKind::Config, "embedding cache has dimension " + std::to_string(dim) + " but the config says " +
                                       std::to_string(*cfg.dimension));
  }
  set_input_dim(cfg, static_cast<int>(dim));
  const ModelConfig mcfg = cfg.model(arch);
  mcfg.validate();
  const TrainConfig tcfg = cfg.train_config(arch);
  tcfg.validate();
  const auto branch = load_branch_caches(cfg, aligned);

  const auto split = split_train_test(aligned.records, cfg.split_ratio, cfg.seed, cfg.stratify);
  ensure_dir(cfg.out_dir);
  write_split_manifest(cfg.split_path(), split);

  std::vector<std::size_t> train_pos, test_pos;
  for (const auto& r : split.train) train_pos.push_back(position(aligned, r.id));
  for (const auto& r : split.test) test_pos.push_back(position(aligned, r.id));
  const auto caches = caches_for(arch, aligned, branch);
  const auto train_table = table_for(caches, train_pos, &aligned.records);
  const auto val_table = table_for(caches, test_pos, &aligned.records);

  cfg.emit("training " + std::string(display_name(arch)) + " on " + std::to_string(train_pos.size()) +
           " rows, validating on " + std::to_string(test_pos.size()));
  TrainCallbacks cb;
  cb.on_epoch = [&](int epoch, const EpochStats& s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  epoch %d/%d  loss %.4f  acc %.4f  val_loss %.4f  val_acc %.4f", epoch,
                  tcfg.epochs, s.train_loss, s.train_accuracy, s.val_loss, s.val_accuracy);
    cfg.emit(buf);
  };
  auto model = train(build_model(mcfg, tcfg.seed), train_table, &val_table, tcfg, cfg.backend, cb);
  model.metadata["provider"] = cfg.provider;
  model.metadata["dimension"] = std::to_string(dim);
  model.metadata["embedding_name"] = cfg.display_embedding();
  model.metadata["stub_seed"] = std::to_string(cfg.seed);
  model.metadata["split_seed"] = std::to_string(cfg.seed);
  model.metadata["split_ratio"] = full(cfg.split_ratio);

  TrainSummary s;
  s.checkpoint = cfg.checkpoint_path(arch);
  s.history = cfg.out_dir / (std::string(to_string(arch)) + "_history.tsv");
  s.train_rows = train_pos.size();
  s.val_rows = test_pos.size();
  s.last = model.history.back();
  save_checkpoint(model, s.checkpoint);
  write_history(s.history, model.history);
  return s;
}

// ---------------------------------------------------------------- evaluate

EvaluateSummary cmd_evaluate(const PipelineConfig& cfg, const std::vector<fs::path>& checkpoints) {
  if (checkpoints.empty()) throw Error(ErrorKind::Config, "--checkpoints: at least one checkpoint is required");
  for (const auto& c : checkpoints) {
    if (!fs::exists(c)) throw Error(ErrorKind::Io, "--checkpoints: no such checkpoint " + c.string());
  }
  std::vector<TrainedModel> models;
  for (const auto& c : checkpoints) models.push_back(load_checkpoint(c));
  const auto dim = static_cast<std::uint32_t>(models.front().config().input_dim);
  for (const auto& m : models) {
    if (m.config().input_dim != static_cast<int>(dim)) {
      throw Error(ErrorKind::Config, "--checkpoints: models disagree on the embedding dimension");
    }
  }
  const auto aligned = load_aligned(cfg.cleaned_path(), cfg.cache_path(), dim);
  const auto branch = load_branch_caches(cfg, aligned);
  require_file(cfg.split_path(), "split manifest (written by `brd train`)");
  const auto manifest = read_split_manifest(cfg.split_path());
  std::vector<std::size_t> test_pos;
  for (auto id : manifest.test_ids) test_pos.push_back(position(aligned, id));
  if (test_pos.empty()) throw Error(ErrorKind::Input, "split manifest has no test rows");

  std::vector<std::uint8_t> truth;
  for (auto p : test_pos) truth.push_back(static_cast<std::uint8_t>(aligned.records[p].binary_label));

  ensure_dir(cfg.out_dir);
  EvaluateSummary s;
  std::string embedding = cfg.embedding_name;
  if (embedding.empty()) {
    const auto it = models.front().metadata.find("embedding_name");
    embedding = it != models.front().metadata.end() ? it->second : cfg.display_embedding();
  }

  std::vector<std::vector<Prediction>> member_preds;
  for (const auto& m : models) {
    const auto arch = m.config().architecture;
    const auto table = table_for(caches_for(arch, aligned, branch), test_pos, nullptr);
    auto preds = predict_batch(m.network, table, cfg.backend);
    std::vector<std::uint8_t> predicted;
    for (const auto& p : preds) predicted.push_back(static_cast<std::uint8_t>(p.label));
    const std::string name(display_name(arch));
    auto report = make_report(name, embedding, confusion_matrix(truth, predicted), echo(m));
    const std::string key(to_string(arch));
    s.report_files.push_back(cfg.out_dir / ("report_" + key + ".txt"));
    write_report(report, s.report_files.back());
    s.images.push_back(cfg.out_dir / ("cm_" + key + ".svg"));
    render_confusion_heatmap(report.confusion, name + " (" + embedding + ")", s.images.back());
    s.images.push_back(cfg.out_dir / ("history_" + key + ".svg"));
    render_history_plot(m.history, m.has_validation, name + " accuracy / loss (" + embedding + ")",
                        s.images.back());
    s.reports.push_back(std::move(report));
    member_preds.push_back(std::move(preds));
  }

  if (models.size() == 3) {
    std::vector<std::uint8_t> predicted;
    std::ofstream out(cfg.out_dir / "predictions_ensemble.csv", std::ios::binary | std::ios::trunc);
    out << "id,probability,label\n";
    for (std::size_t i = 0; i < test_pos.size(); ++i) {
      const auto e = ensemble_proba(member_preds[0][i], member_preds[1][i], member_preds[2][i], cfg.vote);
      predicted.push_back(static_cast<std::uint8_t>(e.label));
      out << aligned.records[test_pos[i]].id << ',' << full(e.mean_probability) << ','
          << class_index(e.label) << '\n';
    }
    std::map<std::string, std::string> ens_echo = {
        {"members", std::string(display_name(models[0].config().architecture)) + "," +
                        std::string(display_name(models[1].config().architecture)) + "," +
                        std::string(display_name(models[2].config().architecture))},
        {"vote", cfg.vote == VoteMode::Hard ? "hard" : "soft"}};
    auto report = make_report("Ensemble", embedding, confusion_matrix(truth, predicted), ens_echo);
    s.report_files.push_back(cfg.out_dir / "report_ensemble.txt");
    write_report(report, s.report_files.back());
    s.images.push_back(cfg.out_dir / "cm_ensemble.svg");
    render_confusion_heatmap(report.confusion, "Ensemble (" + embedding + ")", s.images.back());
    s.reports.push_back(std::move(report));
  }

  s.table = cfg.out_dir / "table.txt";
  std::ofstream(s.table, std::ios::binary | std::ios::trunc) << format_table(s.reports);
  std::ofstream(cfg.out_dir / "table.tsv", std::ios::binary | std::ios::trunc) << format_table_tsv(s.reports);
  return s;
}

// ---------------------------------------------------------------- ensemble

std::size_t cmd_ensemble(const std::vector<fs::path>& checkpoints, const fs::path& cache_path, const fs::path& output,
                         VoteMode vote, const std::optional<fs::path>& split, const std::optional<fs::path>& cleaned,
                         Backend backend) {
  if (checkpoints.size() != 3) {
    throw Error(ErrorKind::Config, "--checkpoints: the ensemble takes exactly three checkpoints, got " +
                                       std::to_string(checkpoints.size()));
  }
  std::vector<TrainedModel> models;
  for (const auto& c : checkpoints) models.push_back(load_checkpoint(c));
  const auto cache = read_cache(cache_path, static_cast<std::uint32_t>(models[0].config().input_dim));

  std::vector<std::size_t> positions;
  std::vector<std::size_t> ids;
  if (split) {
    if (!cleaned) throw Error(ErrorKind::Config, "--split needs --data (the cleaned dataset) to map ids");
    const auto records = load_dataset(*cleaned).records;
    validate_cache(cache, texts_of(records));
    std::unordered_map<std::size_t, std::size_t> pos_of;
    for (std::size_t i = 0; i < records.size(); ++i) pos_of[records[i].id] = i;
    for (auto id : read_split_manifest(*split).test_ids) {
      auto it = pos_of.find(id);
      if (it == pos_of.end()) throw Error(ErrorKind::Schema, "split id " + std::to_string(id) + " not in dataset");
      positions.push_back(it->second);
      ids.push_back(id);
    }
  } else {
    for (std::size_t i = 0; i < cache.rows.size(); ++i) {
      positions.push_back(i);
      ids.push_back(i);
    }
  }
  const auto table = table_for({&cache}, positions, nullptr);
  const std::array<const TrainedModel*, 3> members{&models[0], &models[1], &models[2]};
  const auto preds = ensemble_dataset(members, table, vote, backend);

  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + output.string());
  out << "id,probability,label\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out << ids[i] << ',' << full(preds[i].mean_probability) << ',' << class_index(preds[i].label) << '\n';
  }
  return preds.size();
}

// ---------------------------------------------------------------- predict

PredictOutcome cmd_predict(const PipelineConfig& cfg, const std::vector<fs::path>& checkpoints,
                           const std::string& text, const std::optional<std::string>& provider_override) {
  if (checkpoints.size() != 1 && checkpoints.size() != 3) {
    throw Error(ErrorKind::Config, "--checkpoints: give one checkpoint or three (ensemble)");
  }
  if (text.empty()) throw Error(ErrorKind::Input, "--text is empty");
  std::vector<TrainedModel> models;
  for (const auto& c : checkpoints) models.push_back(load_checkpoint(c));

  PredictOutcome out;
  out.cleaned = clean(text, effective_preprocess(cfg));
  if (out.cleaned.empty()) {
    throw Error(ErrorKind::Refused, "text is empty after cleaning (stages: " +
                                        std::to_string(out.cleaned.stages_applied.size()) +
                                        "); nothing to classify");
  }

  const auto& meta = models.front().metadata;
  const auto lookup = [&](const char* key, const std::string& fallback) {
    auto it = meta.find(key);
    return it != meta.end() ? it->second : fallback;
  };
  const std::string provider_name = provider_override.value_or(lookup("provider", cfg.provider));
  const auto dim = static_cast<std::uint32_t>(models.front().config().input_dim);
  const std::uint64_t seed = std::stoull(lookup("stub_seed", std::to_string(cfg.seed)));
  const auto provider = make_provider(provider_name, provider_name == "stub" ? std::optional(dim) : std::nullopt, seed);
  if (provider->spec().dimension != dim) {
    throw Error(ErrorKind::Config, "provider " + provider_name + " gives " + std::to_string(provider->spec().dimension) +
                                       "-dim vectors; checkpoint expects " + std::to_string(dim));
  }
  const auto vec = embed_text(out.cleaned.cleaned, *provider);
  const auto input = ModelInput::single(vec.values);
  for (const auto& m : models) {
    if (m.config().input_dim != static_cast<int>(dim)) {
      throw Error(ErrorKind::Config, "--checkpoints: models disagree on the embedding dimension");
    }
    out.members.push_back(predict_proba(m, input));
  }
  if (models.size() == 3) out.ensemble = ensemble_proba(out.members[0], out.members[1], out.members[2], cfg.vote);
  return out;
}

// ---------------------------------------------------------------- report

std::string cmd_report(const std::vector<fs::path>& reports, const fs::path& out_dir) {
  if (reports.empty()) throw Error(ErrorKind::Config, "--reports: at least one report file is required");
  std::vector<MetricsReport> loaded;
  for (const auto& r : reports) loaded.push_back(read_report(r));
  const auto table = format_table(loaded);
  ensure_dir(out_dir);
  std::ofstream(out_dir / "table.txt", std::ios::binary | std::ios::trunc) << table;
  std::ofstream(out_dir / "table.tsv", std::ios::binary | std::ios::trunc) << format_table_tsv(loaded);
  return table;
}

std::string run_manifest(const fs::path& manifest_path, PipelineConfig base) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + manifest_path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, manifest_path.string() + ": " + e.what());
  }
  check_keys(doc, {"config", "embeddings"}, "manifest");
  if (doc.contains("config")) base = apply_config_json(std::move(base), doc["config"]);
  if (!doc.contains("embeddings") || !doc["embeddings"].is_array() || doc["embeddings"].empty()) {
    throw Error(ErrorKind::Config, "manifest needs a non-empty `embeddings` list");
  }

  const fs::path root = base.out_dir;
  std::vector<PipelineConfig> runs;
  for (const auto& entry : doc["embeddings"]) {
    check_keys(entry, {"provider", "name", "dim"}, "embeddings[]");
    PipelineConfig cfg = base;
    cfg.provider = get_as<std::string>(entry, "provider", "embeddings[]");
    cfg.dimension = entry.contains("dim") ? std::optional(get_as<std::uint32_t>(entry, "dim", "embeddings[]"))
                                          : std::nullopt;
    cfg.embedding_name = entry.value("name", "");
    cfg.out_dir = root / slug(cfg.display_embedding());
    // Fail on a bad grid entry before any training starts.
    const auto dim = make_provider(cfg.provider, cfg.dimension, cfg.seed)->spec().dimension;
    set_input_dim(cfg, static_cast<int>(dim));
    for (auto a : kAllArchitectures) {
      try {
        cfg.model(a).validate();
        cfg.train_config(a).validate();
      } catch (const Error& e) {
        throw Error(e.kind(), "manifest entry " + cfg.display_embedding() + ": " + e.what());
      }
    }
    runs.push_back(std::move(cfg));
  }

  PipelineConfig shared = base;
  shared.out_dir = root / "preprocessed";
  cmd_preprocess(shared);

  std::vector<fs::path> report_files;
  for (const auto& cfg : runs) {
    ensure_dir(cfg.out_dir);
    fs::copy_file(shared.cleaned_path(), cfg.cleaned_path(), fs::copy_options::overwrite_existing);
    cmd_embed(cfg);
    std::vector<fs::path> ckpts;
    for (auto arch : kAllArchitectures) ckpts.push_back(cmd_train(cfg, arch).checkpoint);
    const auto eval = cmd_evaluate(cfg, ckpts);
    report_files.insert(report_files.end(), eval.report_files.begin(), eval.report_files.end());
  }
  return cmd_report(report_files, root);
}

}  // namespace brd
