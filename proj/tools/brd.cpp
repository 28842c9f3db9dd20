// brd: Bengali racism detection pipeline driver.
//
//   brd [--config FILE] [--out DIR] [--seed N] <subcommand> [options]
//
// Flags override config keys, which override built-in defaults.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "brd/error.hpp"
#include "brd/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 42;
  std::string backend;
  bool quiet = false;

  std::string dataset;
  std::string lexicon;
  std::string drop_tags;
  bool no_numbers = false, no_punct = false, no_emoji = false, no_pos = false;
  bool keep_empty = false;

  std::string provider;
  std::uint32_t dim = 0;
  std::size_t embed_batch = 32;
  std::string name;
  bool force = false;

  std::string model = "all";
  int epochs = 0;
  int batch_size = 0;
  double lr = 0;
  int sequence_length = 0;
  int hidden = 0;
  std::vector<std::string> mcnn_caches;

  std::vector<std::string> checkpoints;
  bool hard_vote = false;
  std::string cache;
  std::string output = "predictions.csv";
  std::string split;
  std::string text;
  std::vector<std::string> reports;
  std::string manifest;
};

void add_preprocess_flags(CLI::App* sub, Flags& f) {
  sub->add_flag("--no-numbers", f.no_numbers, "Keep digits");
  sub->add_flag("--no-punct", f.no_punct, "Keep punctuation");
  sub->add_flag("--no-emoji", f.no_emoji, "Keep emoji");
  sub->add_flag("--no-pos", f.no_pos, "Skip POS-based stopword removal");
  sub->add_option("--drop-tags", f.drop_tags, "Comma-separated POS tags to drop (pronoun,conjunction,...)");
  sub->add_option("--lexicon", f.lexicon, "word<TAB>tag lexicon file (default: bundled)");
}

bool given(const CLI::App& app, const char* name) {
  for (const auto* o : app.get_options()) {
    if (o->check_name(name) && o->count() > 0) return true;
  }
  for (const auto* sub : app.get_subcommands()) {
    if (given(*sub, name)) return true;
  }
  return false;
}

brd::PipelineConfig resolve(const CLI::App& app, const Flags& f) {
  brd::PipelineConfig cfg;
  if (!f.config.empty()) cfg = brd::load_config_file(f.config, cfg);
  if (given(app, "--out")) cfg.out_dir = f.out;
  if (given(app, "--seed")) {
    cfg.seed = f.seed;
    for (auto& t : cfg.training) t.seed = f.seed;
  }
  if (given(app, "--backend")) {
    if (f.backend == "serial") {
      cfg.backend = brd::Backend::Serial;
    } else if (f.backend == "openmp") {
      if (!brd::openmp_available()) throw brd::Error(brd::ErrorKind::Config, "--backend: built without OpenMP");
      cfg.backend = brd::Backend::OpenMP;
    } else {
      throw brd::Error(brd::ErrorKind::Config, "--backend must be serial or openmp");
    }
  }
  if (given(app, "--data")) cfg.dataset = f.dataset;
  if (given(app, "--lexicon")) cfg.lexicon = f.lexicon;
  if (f.no_numbers) cfg.preprocess.remove_numbers = false;
  if (f.no_punct) cfg.preprocess.remove_punctuation = false;
  if (f.no_emoji) cfg.preprocess.remove_emoji = false;
  if (f.no_pos) cfg.preprocess.remove_pos = false;
  if (f.keep_empty) cfg.drop_empty = false;
  if (given(app, "--drop-tags")) {
    cfg.preprocess.drop_tags.clear();
    std::stringstream ss(f.drop_tags);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto tag = brd::parse_pos_tag(item);
      if (!tag) throw brd::Error(brd::ErrorKind::Config, "--drop-tags: unknown POS tag '" + item + "'");
      cfg.preprocess.drop_tags.insert(*tag);
    }
  }
  if (given(app, "--provider")) cfg.provider = f.provider;
  if (given(app, "--dim")) {
    cfg.dimension = f.dim;
    brd::set_input_dim(cfg, static_cast<int>(f.dim));
  }
  if (given(app, "--embed-batch")) cfg.embed_batch_size = f.embed_batch;
  if (given(app, "--name")) cfg.embedding_name = f.name;
  for (auto& m : cfg.models) {
    if (given(app, "--sequence-length")) m.sequence_length = f.sequence_length;
    if (given(app, "--hidden")) m.hidden_units = f.hidden;
  }
  for (auto& t : cfg.training) {
    if (given(app, "--epochs")) t.epochs = f.epochs;
    if (given(app, "--batch-size")) t.batch_size = f.batch_size;
    if (given(app, "--lr")) t.learning_rate = f.lr;
  }
  if (given(app, "--mcnn-caches")) cfg.mcnn_caches.assign(f.mcnn_caches.begin(), f.mcnn_caches.end());
  if (f.hard_vote) cfg.vote = brd::VoteMode::Hard;
  if (f.quiet) cfg.log = [](const std::string&) {};
  return cfg;
}

std::vector<fs::path> paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void print_prediction(const std::string& who, const brd::Prediction& p) {
  std::printf("%-10s probability=%.6f label=%s\n", who.c_str(), p.probability,
              std::string(brd::to_string(p.label)).c_str());
}

int run(CLI::App& app, const Flags& f) {
  auto cfg = resolve(app, f);
  const auto sub = app.get_subcommands().front()->get_name();

  if (sub == "preprocess") {
    const auto s = brd::cmd_preprocess(cfg);
    std::printf("cleaned %zu rows -> %zu (%zu dropped as empty) : %s\n", s.rows_in, s.rows_out,
                s.dropped_ids.size(), cfg.cleaned_path().string().c_str());
    for (const auto& [stage, n] : s.rows_changed_by_stage) std::printf("  %-12s %zu rows changed\n", stage.c_str(), n);
  } else if (sub == "embed") {
    const auto s = brd::cmd_embed(cfg, f.force);
    std::printf("%s %zu x %u : %s\n", s.reused ? "reused" : "wrote", s.rows, s.dimension,
                cfg.cache_path().string().c_str());
  } else if (sub == "train") {
    std::vector<brd::Architecture> archs;
    if (f.model == "all") {
      archs.assign(brd::kAllArchitectures.begin(), brd::kAllArchitectures.end());
    } else {
      archs.push_back(brd::parse_architecture(f.model));
    }
    for (auto a : archs) {
      const auto s = brd::cmd_train(cfg, a);
      std::printf("%s: train_acc=%.4f val_acc=%.4f -> %s\n", std::string(brd::display_name(a)).c_str(),
                  s.last.train_accuracy, s.last.val_accuracy, s.checkpoint.string().c_str());
    }
  } else if (sub == "evaluate") {
    std::vector<fs::path> ckpts = paths(f.checkpoints);
    if (ckpts.empty()) {
      for (auto a : brd::kAllArchitectures) ckpts.push_back(cfg.checkpoint_path(a));
    }
    const auto s = brd::cmd_evaluate(cfg, ckpts);
    std::ifstream in(s.table);
    std::cout << in.rdbuf();
  } else if (sub == "ensemble") {
    std::optional<fs::path> split, cleaned;
    if (!f.split.empty()) split = f.split;
    if (given(app, "--data")) cleaned = f.dataset;
    const auto n = brd::cmd_ensemble(paths(f.checkpoints), f.cache, f.output, cfg.vote, split, cleaned, cfg.backend);
    std::printf("wrote %zu predictions : %s\n", n, f.output.c_str());
  } else if (sub == "predict") {
    std::optional<std::string> provider;
    if (given(app, "--provider")) provider = f.provider;
    const auto r = brd::cmd_predict(cfg, paths(f.checkpoints), f.text, provider);
    std::printf("cleaned: %s\n", r.cleaned.cleaned.c_str());
    for (std::size_t i = 0; i < r.members.size(); ++i) print_prediction(f.checkpoints[i], r.members[i]);
    if (r.ensemble) {
      std::printf("%-10s probability=%.6f label=%s\n", "ensemble", r.ensemble->mean_probability,
                  std::string(brd::to_string(r.ensemble->label)).c_str());
    }
  } else if (sub == "report") {
    if (!f.manifest.empty()) {
      std::cout << brd::run_manifest(f.manifest, cfg);
    } else {
      std::cout << brd::cmd_report(paths(f.reports), cfg.out_dir);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bengali racism detection: preprocess, embed, train, evaluate"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "Output directory (default: out)");
  app.add_option("--seed", f.seed, "Seed for split, stub embedder and training");
  app.add_option("--backend", f.backend, "serial or openmp");
  app.add_flag("-q,--quiet", f.quiet, "Suppress progress messages");

  auto* pre = app.add_subcommand("preprocess", "Clean a labeled corpus");
  pre->add_option("--data", f.dataset, "Input CSV (text,label or id,text,label)");
  add_preprocess_flags(pre, f);
  pre->add_flag("--keep-empty", f.keep_empty, "Keep rows that clean to nothing");

  auto* emb = app.add_subcommand("embed", "Embed the cleaned corpus into a cache");
  emb->add_option("--provider", f.provider, "stub, bangla-bert, bangla-bert-base, sahaj-bert");
  emb->add_option("--dim", f.dim, "Embedding dimension (required for stub)");
  emb->add_option("--embed-batch", f.embed_batch, "Texts per provider request");
  emb->add_option("--name", f.name, "Embedding label used in reports");
  emb->add_flag("--force", f.force, "Rebuild a stale cache");

  auto* tr = app.add_subcommand("train", "Train one architecture or all three");
  tr->add_option("--model", f.model, "bi-rnn, bi-lstm, mcnn-lstm or all");
  tr->add_option("--dim", f.dim, "Expected embedding dimension");
  tr->add_option("--epochs", f.epochs);
  tr->add_option("--batch-size", f.batch_size);
  tr->add_option("--lr", f.lr, "Adam learning rate");
  tr->add_option("--sequence-length", f.sequence_length);
  tr->add_option("--hidden", f.hidden, "Recurrent hidden units");
  tr->add_option("--mcnn-caches", f.mcnn_caches, "Three caches for the MCNN-LSTM branches")->expected(3);

  auto* ev = app.add_subcommand("evaluate", "Score checkpoints on the test split and render reports");
  ev->add_option("--checkpoints", f.checkpoints, "Checkpoint files (default: the three in --out)");
  ev->add_option("--name", f.name, "Embedding label used in reports");
  ev->add_option("--mcnn-caches", f.mcnn_caches, "Three caches for the MCNN-LSTM branches")->expected(3);
  ev->add_flag("--hard-vote", f.hard_vote, "Majority vote instead of mean probability");

  auto* en = app.add_subcommand("ensemble", "Ensemble predictions over a cache");
  en->add_option("--checkpoints", f.checkpoints)->required()->expected(3);
  en->add_option("--cache", f.cache, "Embedding cache")->required()->check(CLI::ExistingFile);
  en->add_option("--output", f.output, "Predictions CSV");
  en->add_option("--split", f.split, "Split manifest; predict its test rows only")->check(CLI::ExistingFile);
  en->add_option("--data", f.dataset, "Cleaned dataset matching the cache")->check(CLI::ExistingFile);
  en->add_flag("--hard-vote", f.hard_vote);

  auto* pr = app.add_subcommand("predict", "Classify one text");
  pr->add_option("--checkpoints", f.checkpoints, "One checkpoint, or three for the ensemble")->required();
  pr->add_option("--text", f.text)->required();
  pr->add_option("--provider", f.provider, "Override the provider recorded in the checkpoint");
  add_preprocess_flags(pr, f);
  pr->add_flag("--hard-vote", f.hard_vote);

  auto* rp = app.add_subcommand("report", "Combine report files, or run a whole experiment grid");
  auto* reports = rp->add_option("--reports", f.reports, "report_*.txt files");
  auto* manifest = rp->add_option("--manifest", f.manifest, "Grid manifest (JSON)")->check(CLI::ExistingFile);
  reports->excludes(manifest);
  rp->add_option("--data", f.dataset, "Corpus for --manifest");
  add_preprocess_flags(rp, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    return run(app, f);
  } catch (const brd::Error& e) {
    std::cerr << "brd: " << brd::to_string(e.kind()) << ": " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "brd: internal error: " << e.what() << '\n';
    return 12;
  }
}
