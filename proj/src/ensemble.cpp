#include "brd/ensemble.hpp"

#include <cmath>

#include "brd/error.hpp"

namespace brd {

EnsemblePrediction ensemble_proba(double p_rnn, double p_lstm, double p_mcnn, VoteMode mode) {
  const std::array<double, 3> probs{p_rnn, p_lstm, p_mcnn};
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::Input, "ensemble member probability " + std::to_string(p) + " is outside [0, 1]");
    }
  }
  EnsemblePrediction e;
  for (int i = 0; i < 3; ++i) {
    e.member_probabilities[i] =
        mode == VoteMode::Hard ? (label_for(probs[i]) == BinaryLabel::Racism ? 1.0 : 0.0) : probs[i];
  }
  e.mean_probability = (e.member_probabilities[0] + e.member_probabilities[1] + e.member_probabilities[2]) / 3.0;
  e.label = label_for(e.mean_probability);
  return e;
}

EnsemblePrediction ensemble_proba(const Prediction& rnn, const Prediction& lstm, const Prediction& mcnn,
                                  VoteMode mode) {
  return ensemble_proba(rnn.probability, lstm.probability, mcnn.probability, mode);
}

std::vector<EnsemblePrediction> ensemble_dataset(std::span<const TrainedModel* const> members,
                                                 const FeatureTable& table, VoteMode mode,
                                                 Backend backend) {
  if (members.size() != 3) {
    throw Error(ErrorKind::Config, "the ensemble takes exactly three models, got " +
                                       std::to_string(members.size()));
  }
  std::array<std::vector<Prediction>, 3> per_model;
  for (int i = 0; i < 3; ++i) {
    if (!members[i]) throw Error(ErrorKind::Config, "null ensemble member");
    if (members[i]->config().input_dim != static_cast<int>(table.dim)) {
      throw Error(ErrorKind::Config, "ensemble member " + std::to_string(i) + " expects dimension " +
                                         std::to_string(members[i]->config().input_dim) +
                                         ", embeddings have " + std::to_string(table.dim));
    }
    per_model[i] = predict_batch(members[i]->network, table, backend);
  }
  std::vector<EnsemblePrediction> out;
  out.reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out.push_back(ensemble_proba(per_model[0][r], per_model[1][r], per_model[2][r], mode));
  }
  return out;
}

}  // namespace brd
