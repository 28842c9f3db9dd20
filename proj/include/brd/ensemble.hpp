#pragma once

#include <array>
#include <span>
#include <vector>

#include "brd/models.hpp"

namespace brd {

/// Soft averages member probabilities; Hard averages the members' 0/1 labels.
enum class VoteMode { Soft, Hard };

struct EnsemblePrediction {
  /// Member probabilities (Soft) or member votes as 0.0 / 1.0 (Hard).
  std::array<double, 3> member_probabilities{};
  double mean_probability = 0;
  BinaryLabel label = BinaryLabel::NonRacism;
};

/// Throws Error(Input) when a probability is outside [0, 1] or NaN.
EnsemblePrediction ensemble_proba(double p_rnn, double p_lstm, double p_mcnn,
                                  VoteMode mode = VoteMode::Soft);
EnsemblePrediction ensemble_proba(const Prediction& rnn, const Prediction& lstm,
                                  const Prediction& mcnn, VoteMode mode = VoteMode::Soft);

/// Exactly three members; throws Error(Config) otherwise or on a dimension mismatch.
std::vector<EnsemblePrediction> ensemble_dataset(std::span<const TrainedModel* const> members,
                                                 const FeatureTable& table,
                                                 VoteMode mode = VoteMode::Soft,
                                                 Backend backend = default_backend());

}  // namespace brd
