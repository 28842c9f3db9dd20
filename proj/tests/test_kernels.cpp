#include <doctest.h>

#include <cstring>
#include <random>

#include "brd/backend.hpp"
#include "brd/kernels.hpp"
#include "brd/random.hpp"

#ifdef BRD_HAVE_OPENMP
#include <omp.h>
#endif

using namespace brd;

namespace {

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

FeatureTable random_table(std::size_t n, std::size_t dim, int channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FeatureTable t;
  t.dim = dim;
  t.channels.resize(channels);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& ch : t.channels) {
      for (std::size_t j = 0; j < dim; ++j) ch.push_back(static_cast<float>(uniform(rng, -1, 1)));
    }
    t.labels.push_back(static_cast<std::uint8_t>(bounded(rng, 2)));
  }
  return t;
}

ModelConfig cfg(Architecture a) {
  auto c = ModelConfig::defaults(a, 48);
  c.sequence_length = 16;
  c.hidden_units = 6;
  c.conv_filters = 4;
  c.kernel_sizes = {2, 3, 4};
  return c;
}

}  // namespace

TEST_CASE("loss helpers") {
  CHECK(kernels::sigmoid(0) == 0.5);
  CHECK(kernels::bce_with_logit(0, 1) == doctest::Approx(std::log(2.0)));
  CHECK(kernels::bce_with_logit(800, 1) == doctest::Approx(0.0));
  CHECK(kernels::bce_with_logit(-800, 1) == doctest::Approx(800.0));
  CHECK(std::isfinite(kernels::bce_with_logit(-800, 0)));
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  for (auto a : kAllArchitectures) {
    CAPTURE(to_string(a));
    const auto net = build_model(cfg(a), 4);
    const auto table = random_table(37, 48, a == Architecture::McnnLstm ? 3 : 1, 9);
    std::vector<std::size_t> rows = {3, 1, 4, 1, 5, 9, 2, 6, 5, 35, 8, 9, 7, 9, 3, 2, 3, 8, 4, 6};

    std::vector<double> gs(net.parameter_count()), go(net.parameter_count());
    for (int threads : {1, 2, 3, 8}) {
#ifdef BRD_HAVE_OPENMP
      omp_set_num_threads(threads);
#endif
      CAPTURE(threads);
      const auto rs = kernels::serial::batch_gradient(net, table, rows, gs);
      const auto ro = kernels::omp::batch_gradient(net, table, rows, go);
      CHECK(same_bits(gs, go));
      CHECK(rs.loss_sum == ro.loss_sum);
      CHECK(rs.correct == ro.correct);

      std::vector<double> ps(table.rows()), po(table.rows());
      kernels::serial::predict(net, table, ps);
      kernels::omp::predict(net, table, po);
      CHECK(same_bits(ps, po));

      const auto es = kernels::serial::evaluate(net, table);
      const auto eo = kernels::omp::evaluate(net, table);
      CHECK(es.loss_sum == eo.loss_sum);
      CHECK(es.correct == eo.correct);
    }
#ifdef BRD_HAVE_OPENMP
    omp_set_num_threads(max_threads());
#endif
  }
}

TEST_CASE("batch gradient overwrites its output") {
  const auto net = build_model(cfg(Architecture::BiRnn), 4);
  const auto table = random_table(5, 48, 1, 1);
  std::vector<std::size_t> rows = {0, 1, 2};
  std::vector<double> a(net.parameter_count(), 0.0), b(net.parameter_count(), 123.0);
  kernels::serial::batch_gradient(net, table, rows, a);
  kernels::serial::batch_gradient(net, table, rows, b);
  CHECK(same_bits(a, b));
}

TEST_CASE("batch gradient is the sum of single-row gradients") {
  const auto net = build_model(cfg(Architecture::BiLstm), 4);
  const auto table = random_table(4, 48, 1, 2);
  std::vector<std::size_t> all = {0, 1, 2, 3};
  std::vector<double> sum(net.parameter_count()), one(net.parameter_count()), manual(net.parameter_count(), 0.0);
  const auto r = kernels::serial::batch_gradient(net, table, all, sum);
  double loss = 0;
  for (std::size_t i : all) {
    std::size_t row[] = {i};
    loss += kernels::serial::batch_gradient(net, table, row, one).loss_sum;
    for (std::size_t k = 0; k < one.size(); ++k) manual[k] += one[k];
  }
  CHECK(r.loss_sum == doctest::Approx(loss));
  for (std::size_t k = 0; k < sum.size(); ++k) REQUIRE(sum[k] == doctest::Approx(manual[k]).epsilon(1e-12));
}

TEST_CASE("backend helpers") {
  CHECK(max_threads() >= 1);
#ifdef BRD_HAVE_OPENMP
  CHECK(openmp_available());
  CHECK(default_backend() == Backend::OpenMP);
#else
  CHECK(default_backend() == Backend::Serial);
#endif
}
