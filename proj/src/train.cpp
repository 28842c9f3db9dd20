#include <cmath>
#include <numeric>
#include <random>

#include "brd/error.hpp"
#include "brd/kernels.hpp"
#include "brd/models.hpp"
#include "brd/random.hpp"

namespace brd {

TrainConfig TrainConfig::defaults(Architecture a) {
  TrainConfig c;
  c.epochs = a == Architecture::McnnLstm ? 18 : 10;
  return c;
}

void TrainConfig::validate() const {
  const auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (optimizer != "adam") fail("unsupported optimizer '" + optimizer + "' (only adam)");
  if (loss != "binary_cross_entropy" && loss != "cross_entropy") {
    fail("unsupported loss '" + loss + "' (only binary_cross_entropy)");
  }
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1) || !(epsilon > 0)) {
    fail("invalid Adam moment parameters");
  }
}

namespace {

void check_table(const Network& net, const FeatureTable& t, const char* what) {
  const auto& cfg = net.config();
  if (t.rows() == 0) throw Error(ErrorKind::Input, std::string(what) + " set is empty");
  if (t.dim != static_cast<std::size_t>(cfg.input_dim)) {
    throw Error(ErrorKind::Config, std::string(what) + " embeddings have dimension " +
                                       std::to_string(t.dim) + ", model expects " +
                                       std::to_string(cfg.input_dim));
  }
  if (t.channels.size() != 1 && t.channels.size() != static_cast<std::size_t>(cfg.input_channels())) {
    throw Error(ErrorKind::Config, std::string(what) + " set has " + std::to_string(t.channels.size()) +
                                       " input channels; " +
                                       std::string(display_name(cfg.architecture)) + " takes " +
                                       std::to_string(cfg.input_channels()));
  }
  for (const auto& ch : t.channels) {
    if (ch.size() != t.rows() * t.dim) throw Error(ErrorKind::Config, "ragged feature channels");
  }
  if (t.labels.size() != t.rows()) {
    throw Error(ErrorKind::Input, std::string(what) + " set has " + std::to_string(t.labels.size()) +
                                      " labels for " + std::to_string(t.rows()) + " rows");
  }
  for (auto l : t.labels) {
    if (l > 1) throw Error(ErrorKind::Input, std::string(what) + " labels must be 0 or 1");
  }
}

}  // namespace

LossAndAccuracy evaluate_loss(const Network& net, const FeatureTable& table, Backend backend) {
  const auto res = backend == Backend::OpenMP ? kernels::omp::evaluate(net, table)
                                              : kernels::serial::evaluate(net, table);
  const double n = static_cast<double>(table.rows());
  return {res.loss_sum / n, static_cast<double>(res.correct) / n};
}

TrainedModel train(Network model, const FeatureTable& train_set, const FeatureTable* val_set,
                   const TrainConfig& config, Backend backend, const TrainCallbacks& callbacks) {
  config.validate();
  check_table(model, train_set, "training");
  if (val_set) check_table(model, *val_set, "validation");

  const std::size_t P = model.parameter_count();
  const std::size_t n = train_set.rows();
  std::vector<double> grad(P), m(P, 0.0), v(P, 0.0);
  std::vector<std::size_t> order(n);
  std::mt19937_64 rng(config.seed ^ 0x5EED5EED5EED5EEDULL);
  double beta1_t = 1.0;
  double beta2_t = 1.0;

  TrainedModel out{std::move(model), config, {}, val_set != nullptr, {}};
  Network& net = out.network;
  auto params = net.parameters();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    double loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t count = std::min<std::size_t>(config.batch_size, n - start);
      const auto rows = std::span<const std::size_t>(order).subspan(start, count);
      const auto res = kernels::batch_gradient(backend, net, train_set, rows, grad);
      if (!std::isfinite(res.loss_sum)) {
        throw Error(ErrorKind::Divergence, "training diverged: non-finite loss in epoch " + std::to_string(epoch));
      }
      loss_sum += res.loss_sum;
      correct += res.correct;

      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      const double scale = 1.0 / static_cast<double>(count);
      const double step = config.learning_rate / (1.0 - beta1_t);
      const double bias2 = 1.0 - beta2_t;
      for (std::size_t k = 0; k < P; ++k) {
        const double g = grad[k] * scale;
        m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g;
        v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g * g;
        params[k] -= step * m[k] / (std::sqrt(v[k] / bias2) + config.epsilon);
      }
    }

    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    if (val_set) {
      const auto val = evaluate_loss(net, *val_set, backend);
      stats.val_loss = val.loss;
      stats.val_accuracy = val.accuracy;
    }
    if (!std::isfinite(stats.train_loss) || !std::isfinite(stats.val_loss)) {
      throw Error(ErrorKind::Divergence, "training diverged: non-finite loss in epoch " + std::to_string(epoch));
    }
    out.history.push_back(stats);
    if (callbacks.on_epoch) callbacks.on_epoch(epoch, stats);
  }
  return out;
}

Prediction predict_proba(const Network& net, const ModelInput& input, double threshold) {
  const double p = net.probability(input);
  return {p, label_for(p, threshold)};
}

std::vector<Prediction> predict_batch(const Network& net, const FeatureTable& table, Backend backend,
                                      double threshold) {
  if (table.rows() > 0 && table.dim != static_cast<std::size_t>(net.config().input_dim)) {
    throw Error(ErrorKind::Config, "embeddings have dimension " + std::to_string(table.dim) +
                                       ", model expects " + std::to_string(net.config().input_dim));
  }
  std::vector<double> probs(table.rows());
  if (backend == Backend::OpenMP) {
    kernels::omp::predict(net, table, probs);
  } else {
    kernels::serial::predict(net, table, probs);
  }
  std::vector<Prediction> out;
  out.reserve(probs.size());
  for (double p : probs) out.push_back({p, label_for(p, threshold)});
  return out;
}

}  // namespace brd
