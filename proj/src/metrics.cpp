#include "brd/metrics.hpp"

#include "brd/error.hpp"

namespace brd {

ConfusionMatrix confusion_matrix(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorKind::Input, "confusion matrix: " + std::to_string(truth.size()) + " truths vs " +
                                      std::to_string(predicted.size()) + " predictions");
  }
  if (truth.empty()) throw Error(ErrorKind::Input, "confusion matrix: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] > 1 || predicted[i] > 1) {
      throw Error(ErrorKind::Input, "confusion matrix: label at index " + std::to_string(i) + " is not 0/1");
    }
    ++cm.counts[truth[i]][predicted[i]];
  }
  return cm;
}

ConfusionMatrix confusion_matrix(std::span<const BinaryLabel> truth, std::span<const BinaryLabel> predicted) {
  std::vector<std::uint8_t> t(truth.size()), p(predicted.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<std::uint8_t>(truth[i]);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<std::uint8_t>(predicted[i]);
  return confusion_matrix(std::span<const std::uint8_t>(t), std::span<const std::uint8_t>(p));
}

ClassMetrics precision_recall_f1(const ConfusionMatrix& cm, BinaryLabel positive) {
  const int c = class_index(positive);
  const int o = 1 - c;
  const double tp = static_cast<double>(cm.counts[c][c]);
  const double fp = static_cast<double>(cm.counts[o][c]);
  const double fn = static_cast<double>(cm.counts[c][o]);
  ClassMetrics m;
  if (tp + fp > 0) {
    m.precision = tp / (tp + fp);
  } else {
    m.precision_undefined = true;
  }
  if (tp + fn > 0) {
    m.recall = tp / (tp + fn);
  } else {
    m.recall_undefined = true;
  }
  if (m.precision + m.recall > 0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1_undefined = true;
  }
  return m;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) return 0.0;
  return static_cast<double>(cm.counts[0][0] + cm.counts[1][1]) / static_cast<double>(total);
}

MetricsReport make_report(std::string model_name, std::string embedding_name, const ConfusionMatrix& cm,
                          std::map<std::string, std::string> config_echo) {
  MetricsReport r;
  r.model_name = std::move(model_name);
  r.embedding_name = std::move(embedding_name);
  r.per_class[0] = precision_recall_f1(cm, BinaryLabel::NonRacism);
  r.per_class[1] = precision_recall_f1(cm, BinaryLabel::Racism);
  r.accuracy = accuracy(cm);
  r.confusion = cm;
  r.config_echo = std::move(config_echo);
  return r;
}

}  // namespace brd
