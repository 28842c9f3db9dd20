#pragma once

// End-to-end orchestration behind the `brd` command-line tool. Every stage reads
// its declared inputs and writes only into PipelineConfig::out_dir.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "brd/embeddings.hpp"
#include "brd/ensemble.hpp"
#include "brd/metrics.hpp"
#include "brd/models.hpp"
#include "brd/preprocess.hpp"

namespace brd {

struct PipelineConfig {
  std::filesystem::path dataset;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;

  PreprocessConfig preprocess;
  std::filesystem::path lexicon;  // empty -> bundled lexicon
  bool drop_empty = true;

  std::string provider = "stub";
  std::optional<std::uint32_t> dimension;
  std::size_t embed_batch_size = 32;
  std::string embedding_name;  // report label; defaults to the provider name

  double split_ratio = 0.8;
  bool stratify = true;

  /// Indexed by Architecture.
  std::array<ModelConfig, 3> models = {ModelConfig::defaults(Architecture::BiRnn),
                                       ModelConfig::defaults(Architecture::BiLstm),
                                       ModelConfig::defaults(Architecture::McnnLstm)};
  std::array<TrainConfig, 3> training = {TrainConfig::defaults(Architecture::BiRnn),
                                         TrainConfig::defaults(Architecture::BiLstm),
                                         TrainConfig::defaults(Architecture::McnnLstm)};
  /// Three caches (same dimension, row-aligned with the cleaned dataset) fed to
  /// the three MCNN-LSTM branches instead of copies of one embedding.
  std::vector<std::filesystem::path> mcnn_caches;
  VoteMode vote = VoteMode::Soft;
  Backend backend = default_backend();

  std::function<void(const std::string&)> log;

  ModelConfig& model(Architecture a) { return models[static_cast<std::size_t>(a)]; }
  const ModelConfig& model(Architecture a) const { return models[static_cast<std::size_t>(a)]; }
  TrainConfig& train_config(Architecture a) { return training[static_cast<std::size_t>(a)]; }
  const TrainConfig& train_config(Architecture a) const { return training[static_cast<std::size_t>(a)]; }

  std::string display_embedding() const;
  std::filesystem::path cleaned_path() const { return out_dir / "cleaned.csv"; }
  std::filesystem::path cache_path() const { return out_dir / "embeddings.emb"; }
  std::filesystem::path split_path() const { return out_dir / "split.csv"; }
  std::filesystem::path checkpoint_path(Architecture a) const;
  void emit(const std::string& message) const;
};

/// Applies a JSON config document on top of `base` (unknown keys are errors).
PipelineConfig apply_config_json(PipelineConfig base, const nlohmann::json& doc);
PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base = {});

/// Sets the input dimension of every model config (sequence length follows when
/// it still equals the previous dimension).
void set_input_dim(PipelineConfig& cfg, int dim);

struct PreprocessSummary {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::vector<std::size_t> dropped_ids;
  std::map<std::string, std::size_t> rows_changed_by_stage;
  std::size_t duplicate_texts = 0;
};
PreprocessSummary cmd_preprocess(const PipelineConfig& cfg);

struct EmbedSummary {
  std::size_t rows = 0;
  std::uint32_t dimension = 0;
  bool reused = false;  // existing cache already matched every row
};
/// Refuses to overwrite a stale cache unless `force`.
EmbedSummary cmd_embed(const PipelineConfig& cfg, bool force = false);

struct TrainSummary {
  std::filesystem::path checkpoint;
  std::filesystem::path history;
  std::size_t train_rows = 0;
  std::size_t val_rows = 0;
  EpochStats last;
};
TrainSummary cmd_train(const PipelineConfig& cfg, Architecture architecture);

struct EvaluateSummary {
  std::vector<MetricsReport> reports;  // members in the given order, then the ensemble
  std::vector<std::filesystem::path> report_files;
  std::vector<std::filesystem::path> images;
  std::filesystem::path table;
};
EvaluateSummary cmd_evaluate(const PipelineConfig& cfg, const std::vector<std::filesystem::path>& checkpoints);

/// Writes `id,probability,label` rows. With a split manifest only its test rows
/// are predicted and ids come from the cleaned dataset; otherwise ids are cache
/// row positions.
std::size_t cmd_ensemble(const std::vector<std::filesystem::path>& checkpoints,
                         const std::filesystem::path& cache, const std::filesystem::path& output,
                         VoteMode vote, const std::optional<std::filesystem::path>& split = std::nullopt,
                         const std::optional<std::filesystem::path>& cleaned = std::nullopt,
                         Backend backend = default_backend());

struct PredictOutcome {
  CleanText cleaned;
  std::vector<Prediction> members;
  std::optional<EnsemblePrediction> ensemble;
  double probability() const { return ensemble ? ensemble->mean_probability : members.front().probability; }
  BinaryLabel label() const { return ensemble ? ensemble->label : members.front().label; }
};
/// One checkpoint or three. Throws Error(Refused) when the text cleans to nothing.
PredictOutcome cmd_predict(const PipelineConfig& cfg, const std::vector<std::filesystem::path>& checkpoints,
                           const std::string& text, const std::optional<std::string>& provider_override = {});

/// Combined table from report files; writes table.txt / table.tsv into `out_dir`.
std::string cmd_report(const std::vector<std::filesystem::path>& reports, const std::filesystem::path& out_dir);

/// Runs preprocess -> embed -> train x3 -> evaluate for each embedding listed in a
/// manifest and writes the combined table. Manifest:
/// {"config": {...pipeline config...}, "embeddings": [{"provider": "...", "name": "...", "dim": n}, ...]}
std::string run_manifest(const std::filesystem::path& manifest, PipelineConfig base = {});

}  // namespace brd
