#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vendor/doctest.h"

#include <cmath>
#include <sstream>

#include "sentry/rng.hpp"
#include "sentry/som.hpp"

using namespace sentry;

namespace {

// Exhaustive scan oracle, independent of SomGrid::bmu.
std::size_t scan_bmu(const std::vector<Position>& protos, const Position& p) {
  std::size_t best = 0;
  double best_d2 = 1e300;
  for (std::size_t i = 0; i < protos.size(); ++i) {
    const double dx = protos[i].x - p.x, dy = protos[i].y - p.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) { best_d2 = d2; best = i; }
  }
  return best;
}

}  // namespace

TEST_CASE("bmu: degenerate and simple grids") {
  SomGrid one(1, 1, {{5, 5}});
  CHECK(one.bmu({-100, 40}) == 0);
  CHECK(one.bmu({0, 0}) == 0);

  SomGrid two(2, 1, {{0, 0}, {10, 0}});
  CHECK(two.bmu({1, 1}) == 0);
  CHECK(two.bmu({9, 1}) == 1);
  CHECK(two.bmu({5, 0}) == 0);  // tie breaks to the lower index
}

TEST_CASE("bmu: 8x8 random grid matches exhaustive scan on 500 points") {
  auto grid = SomGrid::random(8, 8, 100.0, 100.0, 12345);
  Rng rng(777);
  for (int i = 0; i < 500; ++i) {
    const Position p{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    CHECK(grid.bmu(p) == scan_bmu(grid.prototypes(), p));
  }
}

TEST_CASE("bmu: argmin invariant under matched rigid motion") {
  auto grid = SomGrid::random(6, 6, 100.0, 100.0, 9);
  Rng rng(10);
  const double angle = 0.7, tx = 31.0, ty = -12.0;
  auto move = [&](const Position& p) {
    return Position{p.x * std::cos(angle) - p.y * std::sin(angle) + tx,
                    p.x * std::sin(angle) + p.y * std::cos(angle) + ty};
  };
  std::vector<Position> moved;
  for (const auto& p : grid.prototypes()) moved.push_back(move(p));
  SomGrid moved_grid(6, 6, moved);
  for (int i = 0; i < 200; ++i) {
    const Position p{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    CHECK(grid.bmu(p) == moved_grid.bmu(move(p)));
  }
}

TEST_CASE("train_step: 1x1 grid with alpha 1 lands on the input") {
  SomGrid grid(1, 1, {{10, 10}});
  SomParams params;
  params.alpha0 = 1.0;
  params.alpha_tau = 1e18;  // effectively no decay at t=0
  grid.train_step({3, 4}, params);
  CHECK(grid.prototypes()[0].x == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(grid.prototypes()[0].y == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(grid.step_counter() == 1);
}

TEST_CASE("train_step: alpha 0 leaves the grid unchanged") {
  auto grid = SomGrid::random(4, 4, 50.0, 50.0, 1);
  const auto before = grid.prototypes();
  SomParams params;
  params.alpha0 = 0.0;
  grid.train_step({25, 25}, params);
  CHECK(grid.prototypes() == before);
  CHECK(grid.step_counter() == 1);
}

TEST_CASE("train_step: contraction toward the input") {
  auto grid = SomGrid::random(5, 5, 100.0, 100.0, 4);
  SomParams params;  // alpha0 0.3 <= 1
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const Position p{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    std::vector<double> before;
    for (const auto& w : grid.prototypes()) before.push_back(distance(w, p));
    grid.train_step(p, params);
    const auto& protos = grid.prototypes();
    for (std::size_t i = 0; i < protos.size(); ++i)
      CHECK(distance(protos[i], p) <= before[i] + 1e-12);
  }
}

TEST_CASE("quantization error: exact grid and trivial cases") {
  SomGrid grid(2, 1, {{0, 0}, {10, 0}});
  const std::vector<Position> pts{{0, 0}, {10, 0}};
  CHECK(grid.quantization_error(pts) == 0.0);

  SomGrid one(1, 1, {{0, 0}});
  const std::vector<Position> p345{{3, 4}};
  CHECK(one.quantization_error(p345) == doctest::Approx(5.0).epsilon(1e-12));

  const std::vector<Position> empty;
  CHECK_THROWS_AS(one.quantization_error(empty), std::invalid_argument);
}

TEST_CASE("quantization error: matches brute-force recomputation") {
  auto grid = SomGrid::random(6, 6, 100.0, 100.0, 77);
  Rng rng(78);
  std::vector<Position> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)});
  double total = 0.0;
  for (const auto& p : pts) total += distance(grid.prototypes()[scan_bmu(grid.prototypes(), p)], p);
  CHECK(grid.quantization_error(pts) == doctest::Approx(total / pts.size()).epsilon(1e-12));
}

TEST_CASE("training strictly decreases quantization error on a fixed set") {
  Rng rng(2024);
  std::vector<Position> pts;
  // Two clusters keeps the lattice init clearly suboptimal.
  for (int i = 0; i < 100; ++i) pts.push_back({20.0 + 5.0 * rng.gaussian(), 20.0 + 5.0 * rng.gaussian()});
  for (int i = 0; i < 100; ++i) pts.push_back({80.0 + 5.0 * rng.gaussian(), 80.0 + 5.0 * rng.gaussian()});

  auto grid = SomGrid::random(6, 6, 100.0, 100.0, 55);
  const double before = grid.quantization_error(pts);
  SomParams params;
  params.alpha0 = 0.5;
  params.alpha_tau = 500.0;
  params.sigma0 = 2.0;
  params.sigma_tau = 200.0;
  Rng pick(1);
  for (int step = 0; step < 500; ++step) grid.train_step(pts[pick.below(pts.size())], params);
  CHECK(grid.quantization_error(pts) < before);
}

TEST_CASE("checkpoint round-trips exactly") {
  auto grid = SomGrid::random(3, 4, 100.0, 100.0, 31);
  SomParams params;
  for (int i = 0; i < 7; ++i) grid.train_step({50, 50}, params);

  std::stringstream buf;
  grid.save(buf);
  const auto loaded = SomGrid::load(buf);
  CHECK(loaded.width() == 3);
  CHECK(loaded.height() == 4);
  CHECK(loaded.step_counter() == 7);
  CHECK(loaded.prototypes() == grid.prototypes());
}
