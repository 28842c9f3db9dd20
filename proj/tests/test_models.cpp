#include <doctest.h>

#include <cmath>
#include <random>

#include "brd/error.hpp"
#include "brd/kernels.hpp"
#include "brd/models.hpp"
#include "brd/random.hpp"
#include "support.hpp"
#include "workspace.hpp"

using namespace brd;

namespace {

ModelConfig small(Architecture a) {
  ModelConfig c = ModelConfig::defaults(a, 24);
  c.sequence_length = a == Architecture::McnnLstm ? 12 : 6;
  c.hidden_units = 3;
  c.conv_filters = 2;
  c.kernel_sizes = {2, 3, 4};
  c.pool_size = 2;
  return c;
}

std::vector<float> random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(uniform(rng, -scale, scale));
  return v;
}

/// Expected parameter count, counted layer by layer.
std::size_t expected_params(const ModelConfig& c) {
  const std::size_t H = c.hidden_units, D = c.feature_width();
  const auto rec = [&](std::size_t in, std::size_t gates) { return gates * (H * in + H * H + H); };
  switch (c.architecture) {
    case Architecture::BiRnn: return 2 * rec(D, 1) + 2 * H + 1;
    case Architecture::BiLstm: return 2 * rec(D, 4) + 2 * H + 1;
    case Architecture::McnnLstm: {
      std::size_t n = 3 * H + 1;
      for (int k : c.kernel_sizes) n += k * D * c.conv_filters + c.conv_filters + rec(c.conv_filters, 4);
      return n;
    }
  }
  return 0;
}

double loss_at(const Network& net, const ModelInput& in, double y) {
  auto ws = net.make_workspace();
  return kernels::bce_with_logit(net.forward(in, *ws), y);
}

}  // namespace

TEST_CASE("architecture names") {
  for (auto a : kAllArchitectures) {
    CHECK(parse_architecture(to_string(a)) == a);
    CHECK(parse_architecture(display_name(a)) == a);
  }
  CHECK(parse_architecture("MCNN_LSTM") == Architecture::McnnLstm);
  CHECK(parse_architecture("birnn") == Architecture::BiRnn);
  CHECK_THROWS_AS(parse_architecture("gru"), Error);
}

TEST_CASE("configuration defaults") {
  const auto m = ModelConfig::defaults(Architecture::McnnLstm);
  CHECK(m.kernel_sizes == std::array<int, 3>{4, 6, 8});
  CHECK(m.input_dim == 768);
  CHECK(m.input_channels() == 3);
  CHECK(TrainConfig::defaults(Architecture::BiRnn).epochs == 10);
  CHECK(TrainConfig::defaults(Architecture::McnnLstm).epochs == 18);
  const auto t = TrainConfig::defaults(Architecture::BiLstm);
  CHECK(t.batch_size == 10);
  CHECK(t.learning_rate == 1e-4);
  CHECK(t.optimizer == "adam");
  CHECK(ModelConfig::defaults(Architecture::BiLstm, 1024).input_dim == 1024);
}

TEST_CASE("configuration validation") {
  auto c = small(Architecture::BiLstm);
  c.sequence_length = 5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small(Architecture::McnnLstm);
  c.kernel_sizes = {2, 3, 12};
  CHECK_THROWS_AS(c.validate(), Error);
  c = small(Architecture::McnnLstm);
  c.pool_size = 20;
  CHECK_THROWS_AS(c.validate(), Error);
  auto t = TrainConfig::defaults(Architecture::BiRnn);
  t.learning_rate = 0;
  CHECK_THROWS_AS(t.validate(), Error);
  t = TrainConfig::defaults(Architecture::BiRnn);
  t.optimizer = "sgd";
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("reshape") {
  std::vector<float> v(12);
  for (int i = 0; i < 12; ++i) v[i] = static_cast<float>(i);
  auto c = small(Architecture::BiRnn);
  c.input_dim = 12;
  c.sequence_length = 4;
  auto steps = reshape_embedding(v, c);
  REQUIRE(steps.size() == 4);
  CHECK(steps[1] == std::vector<float>{3, 4, 5});
  c.sequence_length = 5;
  CHECK_THROWS_AS(reshape_embedding(v, c), Error);
}

TEST_CASE("parameter count") {
  for (auto a : kAllArchitectures) {
    CAPTURE(to_string(a));
    CHECK(build_model(small(a)).parameter_count() == expected_params(small(a)));
    CHECK(build_model(ModelConfig::defaults(a)).parameter_count() == expected_params(ModelConfig::defaults(a)));
  }
}

TEST_CASE("initialisation") {
  for (auto a : kAllArchitectures) {
    const auto x = build_model(small(a), 3);
    const auto y = build_model(small(a), 3);
    const auto z = build_model(small(a), 4);
    CHECK(std::equal(x.parameters().begin(), x.parameters().end(), y.parameters().begin()));
    CHECK_FALSE(std::equal(x.parameters().begin(), x.parameters().end(), z.parameters().begin()));
  }
}

TEST_CASE("forward checks dimensions") {
  const auto net = build_model(small(Architecture::BiLstm));
  std::vector<float> wrong(10, 0.f);
  CHECK_THROWS_AS(net.probability(ModelInput::single(wrong)), Error);
  std::vector<float> ok(24, 0.1f);
  const double p = net.probability(ModelInput::single(ok));
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  CHECK(net.features(ModelInput::single(ok)).size() == 6);
  CHECK(build_model(small(Architecture::McnnLstm)).features(ModelInput::single(ok)).size() == 9);
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(77);
  for (auto a : kAllArchitectures) {
    CAPTURE(to_string(a));
    auto net = build_model(small(a), 11);
    // Spread parameters out so gates and ReLUs leave their flat regions.
    for (auto& w : net.parameters()) w += uniform(rng, -0.3, 0.3);
    for (int sample = 0; sample < 3; ++sample) {
      const auto x0 = random_vec(rng, 24), x1 = random_vec(rng, 24), x2 = random_vec(rng, 24);
      const ModelInput in = a == Architecture::McnnLstm ? ModelInput{{x0, x1, x2}, 3} : ModelInput::single(x0);
      const double y = sample % 2;
      auto ws = net.make_workspace();
      const double logit = net.forward(in, *ws);
      std::vector<double> grad(net.parameter_count(), 0.0);
      net.backward(*ws, kernels::sigmoid(logit) - y, grad);

      auto params = net.parameters();
      std::size_t checked = 0, bad = 0;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        const double h = 1e-5;
        params[i] = keep + h;
        const double up = loss_at(net, in, y);
        params[i] = keep - h;
        const double down = loss_at(net, in, y);
        params[i] = keep;
        const double numeric = (up - down) / (2 * h);
        const double err = std::abs(numeric - grad[i]) / std::max(1e-3, std::abs(numeric) + std::abs(grad[i]));
        ++checked;
        if (err > 1e-4) {
          ++bad;
          MESSAGE("param " << i << " analytic " << grad[i] << " numeric " << numeric);
        }
      }
      CHECK(checked == net.parameter_count());
      // Max-pool and ReLU kinks can flip under a 1e-5 nudge; tolerate a stray one.
      CHECK(bad <= (a == Architecture::McnnLstm ? 1u : 0u));
    }
  }
}

TEST_CASE("backward accumulates") {
  std::mt19937_64 rng(5);
  const auto net = build_model(small(Architecture::BiRnn), 2);
  const auto x = random_vec(rng, 24);
  auto ws = net.make_workspace();
  net.forward(ModelInput::single(x), *ws);
  std::vector<double> once(net.parameter_count(), 0.0), twice(net.parameter_count(), 0.0);
  net.backward(*ws, 0.3, once);
  net.backward(*ws, 0.3, twice);
  net.backward(*ws, 0.3, twice);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i] == doctest::Approx(2 * once[i]));
}

TEST_CASE("MCNN branches") {
  const auto cfg = small(Architecture::McnnLstm);
  const auto net = build_model(cfg, 1);
  std::size_t covered = 0, expect_offset = 0;
  for (int c = 0; c < 3; ++c) {
    const auto [off, size] = net.branch_parameters(c);
    CHECK(off == expect_offset);
    expect_offset = off + size;
    covered += size;
  }
  CHECK(covered + 3 * cfg.hidden_units + 1 == net.parameter_count());

  SUBCASE("one channel feeds all three branches") {
    std::mt19937_64 rng(8);
    const auto x = random_vec(rng, 24);
    CHECK(net.probability(ModelInput::single(x)) == net.probability(ModelInput{{x, x, x}, 3}));
  }
  SUBCASE("each branch only sees its own channel") {
    std::mt19937_64 rng(9);
    const auto a = random_vec(rng, 24), b = random_vec(rng, 24), c = random_vec(rng, 24);
    const auto base = net.features(ModelInput{{a, b, c}, 3});
    const auto changed = net.features(ModelInput{{a, random_vec(rng, 24), c}, 3});
    const int H = cfg.hidden_units;
    for (int i = 0; i < H; ++i) CHECK(base[i] == changed[i]);
    for (int i = 2 * H; i < 3 * H; ++i) CHECK(base[i] == changed[i]);
    bool middle_moved = false;
    for (int i = H; i < 2 * H; ++i) middle_moved = middle_moved || base[i] != changed[i];
    CHECK(middle_moved);
  }
  SUBCASE("other architectures reject branch queries") {
    CHECK_THROWS_AS(build_model(small(Architecture::BiRnn)).branch_parameters(0), Error);
  }
}

namespace {

FeatureTable separable(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FeatureTable t;
  t.dim = dim;
  t.channels.resize(1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t y = i % 2;
    auto v = random_vec(rng, dim, 0.5);
    for (std::size_t j = 0; j < dim; j += 2) v[j] += y ? 0.6f : -0.6f;
    t.append(v, y);
  }
  return t;
}

}  // namespace

TEST_CASE("training") {
  const auto table = separable(40, 24, 3);
  TrainConfig tc;
  tc.epochs = 15;
  tc.batch_size = 8;
  tc.learning_rate = 0.01;
  for (auto a : kAllArchitectures) {
    CAPTURE(to_string(a));
    auto m = train(build_model(small(a), 1), table, &table, tc, Backend::Serial);
    REQUIRE(m.history.size() == 15);
    CHECK(m.has_validation);
    CHECK(m.history.back().train_loss < m.history.front().train_loss);
    CHECK(m.history.back().val_accuracy >= 0.9);

    SUBCASE("deterministic and backend independent") {
      auto again = train(build_model(small(a), 1), table, &table, tc, Backend::OpenMP);
      CHECK(std::equal(m.network.parameters().begin(), m.network.parameters().end(),
                       again.network.parameters().begin()));
      CHECK(again.history.back().train_loss == m.history.back().train_loss);
    }
  }
  SUBCASE("no validation set") {
    auto m = train(build_model(small(Architecture::BiRnn), 1), table, nullptr, tc);
    CHECK_FALSE(m.has_validation);
  }
  SUBCASE("divergence") {
    auto bad = table;
    bad.channels[0][5] = std::numeric_limits<float>::quiet_NaN();
    try {
      train(build_model(small(Architecture::BiRnn), 1), bad, nullptr, tc);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Divergence);
      CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
    }
  }
  SUBCASE("dimension mismatch") {
    auto cfg = small(Architecture::BiRnn);
    cfg.input_dim = 48;
    cfg.sequence_length = 6;
    CHECK_THROWS_AS(train(build_model(cfg), table, nullptr, tc), Error);
  }
  SUBCASE("callbacks see every epoch") {
    int seen = 0;
    TrainCallbacks cb;
    cb.on_epoch = [&](int e, const EpochStats&) { CHECK(e == ++seen); };
    train(build_model(small(Architecture::BiRnn), 1), table, nullptr, tc, Backend::Serial, cb);
    CHECK(seen == 15);
  }
}

TEST_CASE("prediction helpers") {
  CHECK(label_for(0.5) == BinaryLabel::Racism);
  CHECK(label_for(0.4999) == BinaryLabel::NonRacism);
  const auto table = separable(10, 24, 4);
  const auto net = build_model(small(Architecture::BiLstm), 2);
  const auto preds = predict_batch(net, table);
  REQUIRE(preds.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(preds[i].probability == net.probability(table.input(i)));
    CHECK(preds[i].label == label_for(preds[i].probability));
  }
  const auto el = evaluate_loss(net, table);
  CHECK(el.loss > 0);
}

TEST_CASE("checkpoint round trip") {
  test::TempDir dir("ckpt");
  std::mt19937_64 rng(12);
  const auto table = separable(20, 24, 5);
  TrainConfig tc;
  tc.epochs = 2;
  for (auto a : kAllArchitectures) {
    auto m = train(build_model(small(a), 3), table, &table, tc);
    m.metadata["provider"] = "stub";
    const auto path = dir / (std::string(to_string(a)) + ".ckpt");
    save_checkpoint(m, path);
    const auto back = load_checkpoint(path, a);
    CHECK(back.config() == m.config());
    CHECK(back.train_config.learning_rate == m.train_config.learning_rate);
    CHECK(back.history.size() == 2);
    CHECK(back.history[1].val_loss == m.history[1].val_loss);
    CHECK(back.metadata.at("provider") == "stub");
    CHECK(std::equal(back.network.parameters().begin(), back.network.parameters().end(),
                     m.network.parameters().begin()));
    for (int i = 0; i < 20; ++i) {
      const auto x = random_vec(rng, 24);
      CHECK(back.network.probability(ModelInput::single(x)) == m.network.probability(ModelInput::single(x)));
    }
    const auto other = a == Architecture::BiRnn ? Architecture::BiLstm : Architecture::BiRnn;
    try {
      load_checkpoint(path, other);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Checkpoint);
    }
  }
  SUBCASE("corrupt files") {
    test::spit(dir / "bad.ckpt", "{\"format\": \"something\"}");
    CHECK_THROWS_AS(load_checkpoint(dir / "bad.ckpt"), Error);
    test::spit(dir / "garbage.ckpt", "not json");
    CHECK_THROWS_AS(load_checkpoint(dir / "garbage.ckpt"), Error);
    CHECK_THROWS_AS(load_checkpoint(dir / "absent.ckpt"), Error);
  }
}
