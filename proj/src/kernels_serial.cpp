#include <algorithm>
#include <cmath>

#include "brd/error.hpp"
#include "brd/kernels.hpp"
#include "kernel_common.hpp"
#include "workspace.hpp"

namespace brd::kernels {

double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_with_logit(double logit, double target) noexcept {
  return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

namespace detail {

std::vector<EmbeddingVector> embed_range(std::span<const std::string> texts,
                                         const EmbeddingProvider& provider, std::size_t start,
                                         std::size_t n) {
  std::vector<EmbeddingVector> part;
  try {
    part = provider.embed_chunk(texts.subspan(start, n));
  } catch (const ProviderError& e) {
    const long at = static_cast<long>(start) + std::max(0L, e.index());
    throw ProviderError(std::string(e.what()) + " (input index " + std::to_string(at) + ")", at,
                        e.retryable());
  }
  const auto dim = provider.spec().dimension;
  if (part.size() != n) {
    throw ProviderError(provider.spec().provider_name + " returned " + std::to_string(part.size()) +
                            " vectors for " + std::to_string(n) + " texts",
                        static_cast<long>(start), false);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (part[i].values.size() != dim) {
      throw ProviderError(provider.spec().provider_name + " returned a vector of the wrong dimension",
                          static_cast<long>(start + i), false);
    }
  }
  return part;
}

}  // namespace detail

namespace serial {

BatchResult batch_gradient(const Network& net, const FeatureTable& table,
                           std::span<const std::size_t> rows, std::span<double> grad_sum) {
  Workspace ws;
  std::vector<double> g(net.parameter_count());
  std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
  BatchResult res;
  for (std::size_t r : rows) {
    const double y = table.labels[r];
    const double z = net.forward(table.input(r), ws);
    const double p = sigmoid(z);
    res.loss_sum += bce_with_logit(z, y);
    if ((p >= 0.5 ? 1.0 : 0.0) == y) ++res.correct;
    std::fill(g.begin(), g.end(), 0.0);
    net.backward(ws, p - y, g);
    for (std::size_t k = 0; k < g.size(); ++k) grad_sum[k] += g[k];
  }
  return res;
}

void predict(const Network& net, const FeatureTable& table, std::span<double> probabilities) {
  Workspace ws;
  for (std::size_t r = 0; r < table.rows(); ++r) probabilities[r] = sigmoid(net.forward(table.input(r), ws));
}

BatchResult evaluate(const Network& net, const FeatureTable& table) {
  Workspace ws;
  BatchResult res;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double y = table.labels[r];
    const double z = net.forward(table.input(r), ws);
    res.loss_sum += bce_with_logit(z, y);
    if ((sigmoid(z) >= 0.5 ? 1.0 : 0.0) == y) ++res.correct;
  }
  return res;
}

std::vector<EmbeddingVector> embed(std::span<const std::string> texts,
                                   const EmbeddingProvider& provider, std::size_t chunk) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += chunk) {
    auto part = detail::embed_range(texts, provider, start, std::min(chunk, texts.size() - start));
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace serial
}  // namespace brd::kernels
