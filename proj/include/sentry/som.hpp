#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sentry/geometry.hpp"

namespace sentry {

// Kohonen schedule: alpha(t) = alpha0 * exp(-t/alpha_tau),
// sigma(t) = sigma0 * exp(-t/sigma_tau), t = step counter.
struct SomParams {
  double alpha0 = 0.3;
  double alpha_tau = 1000.0;
  double sigma0 = 2.0;       // grid units
  double sigma_tau = 1000.0;
  std::size_t steps = 2000;
};

// 2-D lattice of prototype vectors in position space.
class SomGrid {
 public:
  SomGrid(std::size_t width, std::size_t height, std::vector<Position> prototypes,
          std::uint64_t step_counter = 0);

  // Prototypes on a regular lattice spanning [0,width_m] x [0,height_m].
  static SomGrid lattice(std::size_t width, std::size_t height, double width_m, double height_m);
  static SomGrid random(std::size_t width, std::size_t height, double width_m, double height_m,
                        std::uint64_t seed);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::uint64_t step_counter() const { return step_counter_; }
  const std::vector<Position>& prototypes() const { return prototypes_; }

  // Best-matching unit: row-major index of the nearest prototype,
  // ties broken toward the lowest index.
  std::size_t bmu(const Position& p) const;

  // One Kohonen update toward p; neighborhood weight uses Manhattan
  // distance on the lattice. Increments the step counter.
  void train_step(const Position& p, const SomParams& params);

  // Mean distance from each point to its BMU prototype.
  // Throws std::invalid_argument on an empty point set.
  double quantization_error(std::span<const Position> points) const;

  // Checkpoint format: "som <width> <height> <step_counter>" then one
  // "x y" line per node in row-major order.
  void save(std::ostream& out) const;
  static SomGrid load(std::istream& in);

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<Position> prototypes_;  // row-major
  std::uint64_t step_counter_;
};

}  // namespace sentry
