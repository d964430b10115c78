#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vendor/doctest.h"

#include <cmath>
#include <sstream>

#include "sentry/mlp.hpp"
#include "sentry/rng.hpp"

using namespace sentry;

namespace {

LabeledExample random_example(Rng& rng, std::size_t in, std::size_t out, bool mask_all = false) {
  LabeledExample ex;
  for (std::size_t i = 0; i < in; ++i) ex.input.push_back(rng.uniform(-1.0, 1.0));
  for (std::size_t o = 0; o < out; ++o) {
    ex.target.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
    ex.mask.push_back(mask_all || rng.uniform() < 0.7 ? 1 : 0);
  }
  if (!mask_all) ex.mask[rng.below(out)] = 1;  // keep at least one slot active
  return ex;
}

// Central finite differences over every parameter.
double max_relative_gradient_error(Mlp& m, const std::vector<LabeledExample>& batch, double h) {
  // Analytic gradient from a single backprop step with lr=1 on a copy.
  Mlp stepped = m;
  stepped.backprop_step(batch, 1.0);
  std::vector<double> analytic(m.params().size());
  for (std::size_t i = 0; i < analytic.size(); ++i) analytic[i] = m.params()[i] - stepped.params()[i];

  double worst = 0.0;
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    const double saved = m.params()[i];
    auto batch_loss = [&] {
      double total = 0.0;
      for (const auto& ex : batch) total += m.loss(ex);
      return total / batch.size();
    };
    m.params()[i] = saved + h;
    const double up = batch_loss();
    m.params()[i] = saved - h;
    const double down = batch_loss();
    m.params()[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::fabs(numeric), std::fabs(analytic[i]), 1e-8});
    worst = std::max(worst, std::fabs(numeric - analytic[i]) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("logistic: exact values and symmetry") {
  CHECK(logistic(0.0) == 0.5);
  CHECK(logistic(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-12));

  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(-30.0, 30.0);
    CHECK(logistic(x) + logistic(-x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("logistic: no overflow at |x| = 1000, output stays in (0,1)") {
  const double hi = logistic(1000.0);
  const double lo = logistic(-1000.0);
  CHECK(std::isfinite(hi));
  CHECK(std::isfinite(lo));
  CHECK(hi > 0.0);
  CHECK(hi < 1.0);
  CHECK(lo > 0.0);
  CHECK(lo < 1.0);
}

TEST_CASE("forward: zero parameters give 0.5 everywhere") {
  Mlp m(4, 3, 2);
  const std::vector<double> input{0.1, -0.2, 0.3, 0.9};
  for (double p : m.forward(input)) CHECK(p == 0.5);
}

TEST_CASE("forward: hand-computed 1-1-1 network") {
  Mlp m(1, 1, 1);
  m.params() = {1.0, 0.0, 1.0, 0.0};  // W1, b1, W2, b2
  const std::vector<double> input{0.0};
  // logistic(logistic(0)) = logistic(0.5)
  CHECK(m.forward(input)[0] == doctest::Approx(logistic(0.5)).epsilon(1e-15));
}

TEST_CASE("forward: outputs strictly inside (0,1) for random nets") {
  Rng rng(9);
  for (int rep = 0; rep < 1000; ++rep) {
    auto m = Mlp::random(5, 4, 3, rng.fork());
    std::vector<double> input;
    for (int i = 0; i < 5; ++i) input.push_back(rng.uniform(-10.0, 10.0));
    for (double p : m.forward(input)) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
}

TEST_CASE("forward: dimension mismatch is an error") {
  Mlp m(4, 3, 2);
  const std::vector<double> bad{1.0, 2.0};
  CHECK_THROWS_AS(m.forward(bad), std::invalid_argument);
}

TEST_CASE("loss: known values and slot-by-slot oracle") {
  Mlp m(2, 2, 2);  // zero params -> p = 0.5 everywhere

  SUBCASE("p = 0.5 everywhere costs ln 2 per active slot") {
    LabeledExample ex{{0, 0}, {1, 0}, {1, 1}};
    CHECK(m.loss(ex) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("all-masked example is an error") {
    LabeledExample ex{{0, 0}, {1, 0}, {0, 0}};
    CHECK_THROWS_AS(m.loss(ex), std::invalid_argument);
  }
  SUBCASE("random case matches scalar recomputation") {
    Rng rng(3);
    auto net = Mlp::random(6, 5, 4, 77);
    for (int rep = 0; rep < 100; ++rep) {
      const auto ex = random_example(rng, 6, 4);
      const auto p = net.forward(ex.input);
      double total = 0.0;
      std::size_t active = 0;
      for (std::size_t o = 0; o < 4; ++o) {
        if (!ex.mask[o]) continue;
        double pc = std::min(std::max(p[o], 1e-12), 1.0 - 1e-12);
        total += ex.target[o] > 0.5 ? -std::log(pc) : -std::log(1.0 - pc);
        ++active;
      }
      CHECK(net.loss(ex) == doctest::Approx(total / active).epsilon(1e-12));
    }
  }
}

TEST_CASE("backprop: lr = 0 leaves the network unchanged") {
  Rng rng(4);
  auto m = Mlp::random(6, 4, 2, 11);
  const auto before = m.params();
  const std::vector<LabeledExample> batch{random_example(rng, 6, 2)};
  m.backprop_step(batch, 0.0);
  CHECK(m.params() == before);
}

TEST_CASE("backprop: analytic gradient matches central differences") {
  // 6-4-2 network per the gradient-check contract, several seeds.
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    Rng rng(seed * 100 + 7);
    auto m = Mlp::random(6, 4, 2, seed);
    std::vector<LabeledExample> batch;
    for (int i = 0; i < 3; ++i) batch.push_back(random_example(rng, 6, 2));
    CHECK(max_relative_gradient_error(m, batch, 1e-5) < 1e-4);
  }
}

TEST_CASE("backprop: masked slots contribute zero gradient") {
  auto m = Mlp::random(4, 3, 2, 5);
  Rng rng(6);
  LabeledExample ex = random_example(rng, 4, 2, true);
  ex.mask = {1, 0};

  // Flipping the target of a masked slot must not change the step.
  Mlp a = m, b = m;
  LabeledExample flipped = ex;
  flipped.target[1] = 1.0 - flipped.target[1];
  const std::vector<LabeledExample> batch_a{ex}, batch_b{flipped};
  a.backprop_step(batch_a, 0.1);
  b.backprop_step(batch_b, 0.1);
  CHECK(a.params() == b.params());
}

TEST_CASE("backprop: loss decreases on a separable toy set") {
  Rng rng(8);
  std::vector<LabeledExample> data;
  for (int i = 0; i < 40; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    LabeledExample ex;
    ex.input = {x, rng.uniform(-0.1, 0.1)};
    ex.target = {x > 0.0 ? 1.0 : 0.0};
    ex.mask = {1};
    data.push_back(ex);
  }
  auto m = Mlp::random(2, 4, 1, 21);
  std::vector<double> losses;
  for (int step = 0; step < 200; ++step) {
    m.backprop_step(data, 0.5);
    losses.push_back(m.mean_loss(data));
  }
  for (std::size_t i = 10; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-12);
  CHECK(losses.back() < losses.front());
}

TEST_CASE("train: epochs = 0 leaves parameters unchanged; same seed is bit-identical") {
  Rng rng(10);
  std::vector<LabeledExample> data;
  for (int i = 0; i < 50; ++i) data.push_back(random_example(rng, 6, 2));

  auto m = Mlp::random(6, 4, 2, 33);
  const auto before = m.params();
  TrainConfig cfg;
  cfg.epochs = 0;
  m.train(data, cfg);
  CHECK(m.params() == before);

  cfg.epochs = 5;
  cfg.seed = 99;
  auto a = Mlp::random(6, 4, 2, 33);
  auto b = Mlp::random(6, 4, 2, 33);
  a.train(data, cfg);
  b.train(data, cfg);
  CHECK(a.params() == b.params());
}

TEST_CASE("retrain_online: already below target takes zero steps") {
  Rng rng(12);
  auto m = Mlp::random(4, 3, 2, 1);
  LabeledExample ex;
  ex.input = {0.5, -0.5, 0.2, 0.1};
  ex.target = {m.forward(ex.input)[0] > 0.5 ? 1.0 : 0.0, 0.0};
  ex.mask = {1, 0};
  const std::vector<LabeledExample> missed{ex};
  const std::vector<LabeledExample> replay;
  const auto before = m.params();
  const auto steps = m.retrain_online(missed, replay, TrainConfig{}, 1e6, 100);
  CHECK(steps == 0);
  CHECK(m.params() == before);
}

TEST_CASE("retrain_online: halves the loss on a single missed example") {
  auto m = Mlp::random(6, 4, 2, 42);
  LabeledExample ex;
  ex.input = {0.9, 0.1, -0.3, 0.7, 0.0, 0.4};
  ex.target = {1.0, 0.0};
  ex.mask = {1, 0};
  const std::vector<LabeledExample> missed{ex};

  Rng rng(13);
  std::vector<LabeledExample> replay;
  for (int i = 0; i < 20; ++i) replay.push_back(random_example(rng, 6, 2));

  const double before = m.mean_loss(missed);
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  m.retrain_online(missed, replay, cfg, before * 0.5, 1000);
  CHECK(m.mean_loss(missed) <= before * 0.5);
}

TEST_CASE("checkpoint round-trips exactly") {
  auto m = Mlp::random(6, 4, 3, 1234);
  std::stringstream buf;
  m.save(buf);
  const auto loaded = Mlp::load(buf);
  CHECK(loaded.input_dim() == 6);
  CHECK(loaded.hidden_dim() == 4);
  CHECK(loaded.output_dim() == 3);
  CHECK(loaded.params() == m.params());
}
