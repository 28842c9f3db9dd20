#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brd/backend.hpp"
#include "brd/corpus.hpp"

namespace brd {

enum class Architecture : std::uint8_t { BiRnn, BiLstm, McnnLstm };

inline constexpr std::array<Architecture, 3> kAllArchitectures = {
    Architecture::BiRnn, Architecture::BiLstm, Architecture::McnnLstm};

/// "bi-rnn", "bi-lstm", "mcnn-lstm".
std::string_view to_string(Architecture a) noexcept;
/// Display names used in reports: "Bi-RNN", "Bi-LSTM", "MCNN-LSTM".
std::string_view display_name(Architecture a) noexcept;
/// Accepts the to_string / display names, case-insensitive, '-' and '_' optional.
Architecture parse_architecture(std::string_view s);

struct ModelConfig {
  Architecture architecture = Architecture::BiLstm;
  int input_dim = 768;
  std::array<int, 3> kernel_sizes{4, 6, 8};  // MCNN-LSTM only
  int conv_filters = 64;
  int pool_size = 2;
  int hidden_units = 64;
  /// The flat embedding is viewed as sequence_length steps of
  /// input_dim / sequence_length features each.
  int sequence_length = 768;

  int feature_width() const noexcept { return sequence_length > 0 ? input_dim / sequence_length : 0; }
  int input_channels() const noexcept { return architecture == Architecture::McnnLstm ? 3 : 1; }
  /// Throws Error(Config).
  void validate() const;

  static ModelConfig defaults(Architecture a, int input_dim = 768);
};

bool operator==(const ModelConfig& a, const ModelConfig& b) noexcept;

struct TrainConfig {
  int epochs = 10;
  int batch_size = 10;
  double learning_rate = 1e-4;
  std::string optimizer = "adam";
  std::string loss = "binary_cross_entropy";
  std::uint64_t seed = 42;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;

  /// 10 epochs for the recurrent heads, 18 for MCNN-LSTM.
  static TrainConfig defaults(Architecture a);
  void validate() const;
};

struct EpochStats {
  double train_loss = 0;
  double train_accuracy = 0;
  double val_loss = 0;
  double val_accuracy = 0;
};

/// Views a flat vector as sequence_length steps; throws Error(Config) when the
/// sequence length does not divide the vector length.
std::vector<std::vector<float>> reshape_embedding(std::span<const float> v, const ModelConfig& config);

/// One model input: one channel for the recurrent heads, three for MCNN-LSTM.
/// A single channel given to MCNN-LSTM is fed to all three branches.
struct ModelInput {
  std::array<std::span<const float>, 3> channel{};
  int count = 1;

  static ModelInput single(std::span<const float> v) { return ModelInput{{v, {}, {}}, 1}; }
  std::span<const float> at(int c) const noexcept { return channel[count == 1 ? 0 : c]; }
};

/// Row-major float features for a set of examples, one matrix per input channel.
struct FeatureTable {
  std::size_t dim = 0;
  std::vector<std::vector<float>> channels;  // each rows * dim
  std::vector<std::uint8_t> labels;          // 0 / 1; may be empty for inference

  std::size_t rows() const noexcept { return channels.empty() || dim == 0 ? 0 : channels[0].size() / dim; }
  ModelInput input(std::size_t row) const;
  void append(std::span<const float> v, std::uint8_t label);
  FeatureTable subset(std::span<const std::size_t> rows) const;
};

class Workspace;

/// Parameters plus the forward/backward passes of one architecture. Parameters
/// live in a single flat vector so optimiser, gradient checks and checkpoints
/// treat them uniformly.
class Network {
 public:
  explicit Network(ModelConfig config);
  Network(const Network&);
  Network(Network&&) noexcept;
  Network& operator=(const Network&);
  Network& operator=(Network&&) noexcept;
  ~Network();

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  /// Seeded uniform fan-in initialisation.
  void initialize(std::uint64_t seed);

  std::unique_ptr<Workspace> make_workspace() const;

  /// Pre-sigmoid output. Throws Error(Config) on an input dimension mismatch.
  double forward(const ModelInput& input, Workspace& ws) const;
  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(logit), using the
  /// activations recorded by the last forward() on `ws`.
  void backward(Workspace& ws, double dlogit, std::span<double> grad) const;

  double probability(const ModelInput& input) const;

  /// Concatenated encoder features fed to the output layer (2H or 3H values).
  std::vector<double> features(const ModelInput& input) const;
  /// [offset, size) of MCNN branch `c`'s parameters (conv + pooling + LSTM).
  std::pair<std::size_t, std::size_t> branch_parameters(int c) const;

  struct Layout;

 private:
  ModelConfig config_;
  std::vector<double> params_;
  std::unique_ptr<Layout> layout_;
};

Network build_model(const ModelConfig& config, std::uint64_t seed = 42);

struct TrainedModel {
  Network network;
  TrainConfig train_config;
  std::vector<EpochStats> history;
  bool has_validation = false;
  /// Free-form provenance (embedding provider, dimension, stub seed, ...).
  std::map<std::string, std::string> metadata;

  const ModelConfig& config() const noexcept { return network.config(); }
};

struct Prediction {
  double probability = 0;
  BinaryLabel label = BinaryLabel::NonRacism;
};

inline constexpr double kDecisionThreshold = 0.5;

constexpr BinaryLabel label_for(double probability, double threshold = kDecisionThreshold) noexcept {
  return probability >= threshold ? BinaryLabel::Racism : BinaryLabel::NonRacism;
}

struct TrainCallbacks {
  std::function<void(int epoch, const EpochStats&)> on_epoch;
};

/// Mini-batch Adam on binary cross-entropy. Throws Error(Divergence) naming the
/// epoch on a non-finite loss and Error(Config) on dimension mismatches.
TrainedModel train(Network model, const FeatureTable& train_set, const FeatureTable* val_set,
                   const TrainConfig& config, Backend backend = default_backend(),
                   const TrainCallbacks& callbacks = {});

struct LossAndAccuracy {
  double loss = 0;
  double accuracy = 0;
};
LossAndAccuracy evaluate_loss(const Network& net, const FeatureTable& table,
                              Backend backend = default_backend());

Prediction predict_proba(const Network& net, const ModelInput& input,
                         double threshold = kDecisionThreshold);
inline Prediction predict_proba(const TrainedModel& m, const ModelInput& input,
                                double threshold = kDecisionThreshold) {
  return predict_proba(m.network, input, threshold);
}
std::vector<Prediction> predict_batch(const Network& net, const FeatureTable& table,
                                      Backend backend = default_backend(),
                                      double threshold = kDecisionThreshold);

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path);
/// Throws Error(Checkpoint) on a format/version mismatch or when the stored
/// architecture differs from `expected`.
TrainedModel load_checkpoint(const std::filesystem::path& path,
                             std::optional<Architecture> expected = std::nullopt);

}  // namespace brd
