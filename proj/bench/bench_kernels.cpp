// Serial reference kernels against their OpenMP counterparts.
//   ./brd_bench --benchmark_filter=Gradient

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "brd/embeddings.hpp"
#include "brd/kernels.hpp"
#include "brd/random.hpp"

using namespace brd;

namespace {

ModelConfig config(Architecture a) {
  auto c = ModelConfig::defaults(a, 768);
  c.sequence_length = 48;
  return c;
}

const FeatureTable& table(int channels) {
  static FeatureTable t[2];
  auto& out = t[channels == 3];
  if (out.rows() == 0) {
    std::mt19937_64 rng(1);
    out.dim = 768;
    out.channels.resize(channels);
    for (int i = 0; i < 64; ++i) {
      for (auto& ch : out.channels) {
        for (int j = 0; j < 768; ++j) ch.push_back(static_cast<float>(uniform(rng, -0.1, 0.1)));
      }
      out.labels.push_back(static_cast<std::uint8_t>(i % 2));
    }
  }
  return out;
}

template <bool Parallel>
void Gradient(benchmark::State& state) {
  const auto arch = static_cast<Architecture>(state.range(0));
  const auto net = build_model(config(arch), 1);
  const auto& t = table(arch == Architecture::McnnLstm ? 3 : 1);
  std::vector<std::size_t> rows(static_cast<std::size_t>(state.range(1)));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<double> grad(net.parameter_count());
  for (auto _ : state) {
    auto r = Parallel ? kernels::omp::batch_gradient(net, t, rows, grad)
                      : kernels::serial::batch_gradient(net, t, rows, grad);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(std::string(to_string(arch)));
}

template <bool Parallel>
void Predict(benchmark::State& state) {
  const auto arch = static_cast<Architecture>(state.range(0));
  const auto net = build_model(config(arch), 1);
  const auto& t = table(arch == Architecture::McnnLstm ? 3 : 1);
  std::vector<double> p(t.rows());
  for (auto _ : state) {
    if (Parallel) {
      kernels::omp::predict(net, t, p);
    } else {
      kernels::serial::predict(net, t, p);
    }
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(t.rows()));
  state.SetLabel(std::string(to_string(arch)));
}

template <bool Parallel>
void Embed(benchmark::State& state) {
  StubProvider provider(768, 42);
  std::vector<std::string> texts;
  for (int i = 0; i < state.range(0); ++i) {
    texts.push_back("আজ মাঠে খেলা দেখলাম " + std::to_string(i) + " সবাই খুব খুশি");
  }
  for (auto _ : state) {
    auto rows = Parallel ? kernels::omp::embed(texts, provider, 32) : kernels::serial::embed(texts, provider, 32);
    benchmark::DoNotOptimize(rows.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void arch_args(benchmark::internal::Benchmark* b) {
  for (int a = 0; a < 3; ++a) b->Args({a, 10})->Args({a, 64});
}

}  // namespace

BENCHMARK(Gradient<false>)->Name("Gradient/serial")->Apply(arch_args)->Unit(benchmark::kMillisecond);
BENCHMARK(Gradient<true>)->Name("Gradient/openmp")->Apply(arch_args)->Unit(benchmark::kMillisecond);
BENCHMARK(Predict<false>)->Name("Predict/serial")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(Predict<true>)->Name("Predict/openmp")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(Embed<false>)->Name("Embed/serial")->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(Embed<true>)->Name("Embed/openmp")->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
