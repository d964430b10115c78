#include "sentry/som.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sentry/rng.hpp"
#include "sentry/textio.hpp"

namespace sentry {

SomGrid::SomGrid(std::size_t width, std::size_t height, std::vector<Position> prototypes,
                 std::uint64_t step_counter)
    : width_(width), height_(height), prototypes_(std::move(prototypes)),
      step_counter_(step_counter) {
  if (width_ < 1 || height_ < 1) throw std::invalid_argument("som: grid must be >= 1x1");
  if (prototypes_.size() != width_ * height_)
    throw std::invalid_argument("som: prototype count must equal width*height");
  for (const auto& p : prototypes_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("som: prototypes must be finite");
}

SomGrid SomGrid::lattice(std::size_t width, std::size_t height, double width_m, double height_m) {
  std::vector<Position> protos;
  protos.reserve(width * height);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c)
      protos.push_back({width_m * (c + 0.5) / width, height_m * (r + 0.5) / height});
  return SomGrid(width, height, std::move(protos));
}

SomGrid SomGrid::random(std::size_t width, std::size_t height, double width_m, double height_m,
                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Position> protos;
  protos.reserve(width * height);
  for (std::size_t i = 0; i < width * height; ++i)
    protos.push_back({rng.uniform(0.0, width_m), rng.uniform(0.0, height_m)});
  return SomGrid(width, height, std::move(protos));
}

std::size_t SomGrid::bmu(const Position& p) const {
  std::size_t best = 0;
  double best_d = distance(prototypes_[0], p);
  for (std::size_t i = 1; i < prototypes_.size(); ++i) {
    const double d = distance(prototypes_[i], p);
    if (d < best_d) { best_d = d; best = i; }
  }
  return best;
}

void SomGrid::train_step(const Position& p, const SomParams& params) {
  const double t = static_cast<double>(step_counter_);
  const double alpha = params.alpha0 * std::exp(-t / params.alpha_tau);
  const double sigma = params.sigma0 * std::exp(-t / params.sigma_tau);
  const std::size_t winner = bmu(p);
  const long wr = static_cast<long>(winner / width_);
  const long wc = static_cast<long>(winner % width_);
  for (std::size_t i = 0; i < prototypes_.size(); ++i) {
    const long r = static_cast<long>(i / width_);
    const long c = static_cast<long>(i % width_);
    const double grid_d = static_cast<double>(std::labs(r - wr) + std::labs(c - wc));
    const double h = std::exp(-(grid_d * grid_d) / (2.0 * sigma * sigma));
    prototypes_[i].x += alpha * h * (p.x - prototypes_[i].x);
    prototypes_[i].y += alpha * h * (p.y - prototypes_[i].y);
  }
  ++step_counter_;
}

double SomGrid::quantization_error(std::span<const Position> points) const {
  if (points.empty()) throw std::invalid_argument("quantization_error: empty point set");
  double total = 0.0;
  for (const auto& p : points) total += distance(prototypes_[bmu(p)], p);
  return total / static_cast<double>(points.size());
}

void SomGrid::save(std::ostream& out) const {
  out << "som " << width_ << " " << height_ << " " << step_counter_ << "\n";
  for (const auto& p : prototypes_)
    out << format_double(p.x) << " " << format_double(p.y) << "\n";
}

SomGrid SomGrid::load(std::istream& in) {
  std::string tag;
  std::size_t w = 0, h = 0;
  std::uint64_t steps = 0;
  if (!(in >> tag >> w >> h >> steps) || tag != "som")
    throw std::runtime_error("som checkpoint: bad header");
  std::vector<Position> protos;
  protos.reserve(w * h);
  for (std::size_t i = 0; i < w * h; ++i) {
    std::string xs, ys;
    if (!(in >> xs >> ys)) throw std::runtime_error("som checkpoint: truncated");
    protos.push_back({parse_double(xs), parse_double(ys)});
  }
  return SomGrid(w, h, std::move(protos), steps);
}

}  // namespace sentry
