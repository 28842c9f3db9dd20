#pragma once

// Data-parallel hot loops, each in a serial reference form and an OpenMP form.
// The OpenMP forms reduce per-item partial results in item order, so both
// produce bitwise-identical output for any thread count.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "brd/embeddings.hpp"
#include "brd/models.hpp"

namespace brd::kernels {

struct BatchResult {
  double loss_sum = 0;      // summed binary cross-entropy over the rows
  std::size_t correct = 0;  // rows classified correctly at threshold 0.5
};

/// Numerically stable binary cross-entropy on a logit.
double bce_with_logit(double logit, double target) noexcept;
double sigmoid(double x) noexcept;

namespace serial {
/// `grad_sum` is overwritten with the sum of per-row gradients.
BatchResult batch_gradient(const Network& net, const FeatureTable& table,
                           std::span<const std::size_t> rows, std::span<double> grad_sum);
/// Probabilities of class 1 for every row of `table`.
void predict(const Network& net, const FeatureTable& table, std::span<double> probabilities);
BatchResult evaluate(const Network& net, const FeatureTable& table);
std::vector<EmbeddingVector> embed(std::span<const std::string> texts,
                                   const EmbeddingProvider& provider, std::size_t chunk);
}  // namespace serial

namespace omp {
BatchResult batch_gradient(const Network& net, const FeatureTable& table,
                           std::span<const std::size_t> rows, std::span<double> grad_sum);
void predict(const Network& net, const FeatureTable& table, std::span<double> probabilities);
BatchResult evaluate(const Network& net, const FeatureTable& table);
std::vector<EmbeddingVector> embed(std::span<const std::string> texts,
                                   const EmbeddingProvider& provider, std::size_t chunk);
}  // namespace omp

inline BatchResult batch_gradient(Backend b, const Network& net, const FeatureTable& table,
                                  std::span<const std::size_t> rows, std::span<double> grad_sum) {
  return b == Backend::OpenMP ? omp::batch_gradient(net, table, rows, grad_sum)
                              : serial::batch_gradient(net, table, rows, grad_sum);
}

}  // namespace brd::kernels
