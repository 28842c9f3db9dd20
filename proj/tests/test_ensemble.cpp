#include <doctest.h>

#include <algorithm>
#include <random>

#include "brd/ensemble.hpp"
#include "brd/error.hpp"
#include "brd/random.hpp"

using namespace brd;

TEST_CASE("soft vote") {
  const auto e = ensemble_proba(0.9, 0.6, 0.3);
  CHECK(e.mean_probability == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(e.label == BinaryLabel::Racism);
  CHECK(e.member_probabilities == std::array<double, 3>{0.9, 0.6, 0.3});
  CHECK(ensemble_proba(0.2, 0.2, 0.2).mean_probability == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ensemble_proba(0.2, 0.2, 0.2).label == BinaryLabel::NonRacism);
  CHECK(ensemble_proba(0.5, 0.5, 0.5).label == BinaryLabel::Racism);
  CHECK(ensemble_proba(0.0, 1.0, 0.5).mean_probability == 0.5);
}

TEST_CASE("hard vote") {
  auto e = ensemble_proba(0.9, 0.6, 0.3, VoteMode::Hard);
  CHECK(e.member_probabilities == std::array<double, 3>{1, 1, 0});
  CHECK(e.label == BinaryLabel::Racism);
  CHECK(ensemble_proba(0.9, 0.1, 0.3, VoteMode::Hard).label == BinaryLabel::NonRacism);
  // Soft and hard can disagree.
  CHECK(ensemble_proba(0.99, 0.4, 0.4).label == BinaryLabel::Racism);
  CHECK(ensemble_proba(0.99, 0.4, 0.4, VoteMode::Hard).label == BinaryLabel::NonRacism);
}

TEST_CASE("invalid probabilities") {
  CHECK_THROWS_AS(ensemble_proba(1.2, 0.5, 0.5), Error);
  CHECK_THROWS_AS(ensemble_proba(0.5, -0.01, 0.5), Error);
  CHECK_THROWS_AS(ensemble_proba(0.5, 0.5, std::nan("")), Error);
  try {
    ensemble_proba(0.5, 0.5, 2.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Input);
  }
}

TEST_CASE("prediction overload") {
  const Prediction a{0.7, BinaryLabel::Racism}, b{0.1, BinaryLabel::NonRacism}, c{0.4, BinaryLabel::NonRacism};
  CHECK(ensemble_proba(a, b, c).mean_probability == ensemble_proba(0.7, 0.1, 0.4).mean_probability);
}

TEST_CASE("random triples") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    std::array<double, 3> p{unit_double(rng()), unit_double(rng()), unit_double(rng())};
    const auto e = ensemble_proba(p[0], p[1], p[2]);
    REQUIRE(e.mean_probability >= *std::min_element(p.begin(), p.end()));
    REQUIRE(e.mean_probability <= *std::max_element(p.begin(), p.end()));
    REQUIRE(std::abs(e.mean_probability - (p[0] + p[1] + p[2]) / 3.0) <= 1e-12);
    std::sort(p.begin(), p.end());
    do {
      REQUIRE(ensemble_proba(p[0], p[1], p[2]).mean_probability == doctest::Approx(e.mean_probability).epsilon(1e-15));
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

TEST_CASE("ensemble over a dataset") {
  auto cfg = ModelConfig::defaults(Architecture::BiRnn, 8);
  cfg.sequence_length = 4;
  cfg.hidden_units = 2;
  TrainedModel a{build_model(cfg, 1), {}, {}, false, {}};
  TrainedModel b{build_model(cfg, 2), {}, {}, false, {}};
  TrainedModel c{build_model(cfg, 3), {}, {}, false, {}};
  FeatureTable t;
  t.dim = 8;
  t.channels.resize(1);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 6; ++i) {
    std::vector<float> v(8);
    for (auto& x : v) x = static_cast<float>(uniform(rng, -1, 1));
    t.append(v, 0);
  }
  const std::array<const TrainedModel*, 3> members{&a, &b, &c};
  for (auto backend : {Backend::Serial, Backend::OpenMP}) {
    const auto out = ensemble_dataset(members, t, VoteMode::Soft, backend);
    REQUIRE(out.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto in = t.input(i);
      const auto ref = ensemble_proba(a.network.probability(in), b.network.probability(in), c.network.probability(in));
      CHECK(out[i].mean_probability == ref.mean_probability);
    }
  }
  const std::array<const TrainedModel*, 2> two{&a, &b};
  CHECK_THROWS_AS(ensemble_dataset(two, t), Error);
  auto wide = ModelConfig::defaults(Architecture::BiRnn, 16);
  wide.sequence_length = 4;
  TrainedModel d{build_model(wide, 1), {}, {}, false, {}};
  const std::array<const TrainedModel*, 3> mixed{&a, &b, &d};
  CHECK_THROWS_AS(ensemble_dataset(mixed, t), Error);
}
