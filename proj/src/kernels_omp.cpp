#include <algorithm>
#include <exception>

#include "brd/error.hpp"
#include "brd/kernels.hpp"
#include "kernel_common.hpp"
#include "workspace.hpp"

#ifdef BRD_HAVE_OPENMP
#include <omp.h>
#endif

namespace brd::kernels::omp {

namespace {

// Runs body(i) for i in [0, n) in parallel and rethrows the exception of the
// lowest failing index, matching what the serial loop would have thrown first.
template <typename Body>
void parallel_for(std::size_t n, Body body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

BatchResult batch_gradient(const Network& net, const FeatureTable& table,
                           std::span<const std::size_t> rows, std::span<double> grad_sum) {
  const std::size_t n = rows.size();
  const std::size_t P = net.parameter_count();
  std::vector<double> grads(n * P, 0.0);
  std::vector<double> losses(n);
  std::vector<unsigned char> correct(n);
  parallel_for(n, [&](std::size_t i) {
    thread_local Workspace ws;
    const std::size_t r = rows[i];
    const double y = table.labels[r];
    const double z = net.forward(table.input(r), ws);
    const double p = sigmoid(z);
    losses[i] = bce_with_logit(z, y);
    correct[i] = (p >= 0.5 ? 1.0 : 0.0) == y;
    net.backward(ws, p - y, std::span<double>(grads.data() + i * P, P));
  });

  std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
  BatchResult res;
  for (std::size_t i = 0; i < n; ++i) {
    res.loss_sum += losses[i];
    res.correct += correct[i];
    const double* g = grads.data() + i * P;
    for (std::size_t k = 0; k < P; ++k) grad_sum[k] += g[k];
  }
  return res;
}

void predict(const Network& net, const FeatureTable& table, std::span<double> probabilities) {
  parallel_for(table.rows(), [&](std::size_t r) {
    thread_local Workspace ws;
    probabilities[r] = sigmoid(net.forward(table.input(r), ws));
  });
}

BatchResult evaluate(const Network& net, const FeatureTable& table) {
  const std::size_t n = table.rows();
  std::vector<double> losses(n);
  std::vector<unsigned char> correct(n);
  parallel_for(n, [&](std::size_t r) {
    thread_local Workspace ws;
    const double y = table.labels[r];
    const double z = net.forward(table.input(r), ws);
    losses[r] = bce_with_logit(z, y);
    correct[r] = (sigmoid(z) >= 0.5 ? 1.0 : 0.0) == y;
  });
  BatchResult res;
  for (std::size_t i = 0; i < n; ++i) {
    res.loss_sum += losses[i];
    res.correct += correct[i];
  }
  return res;
}

std::vector<EmbeddingVector> embed(std::span<const std::string> texts,
                                   const EmbeddingProvider& provider, std::size_t chunk) {
  if (!provider.concurrent()) return serial::embed(texts, provider, chunk);
  const std::size_t chunks = (texts.size() + chunk - 1) / chunk;
  std::vector<std::vector<EmbeddingVector>> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t start = c * chunk;
    parts[c] = kernels::detail::embed_range(texts, provider, start, std::min(chunk, texts.size() - start));
  });
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& p : parts) {
    for (auto& v : p) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace brd::kernels::omp
