#include "sentry/mlp.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sentry/rng.hpp"
#include "sentry/textio.hpp"

namespace sentry {

namespace {
constexpr double kProbClamp = 1e-12;
}

Mlp::Mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), output_dim_(output_dim),
      params_(hidden_dim * input_dim + hidden_dim + output_dim * hidden_dim + output_dim, 0.0) {
  if (input_dim == 0 || hidden_dim == 0 || output_dim == 0)
    throw std::invalid_argument("mlp: dimensions must be positive");
}

Mlp Mlp::random(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                std::uint64_t seed) {
  Mlp m(input_dim, hidden_dim, output_dim);
  Rng rng(seed);
  const std::size_t n_w1 = hidden_dim * input_dim;
  for (std::size_t i = 0; i < n_w1; ++i) m.params_[i] = rng.uniform(-0.5, 0.5);
  const std::size_t w2 = m.w2_off();
  for (std::size_t i = 0; i < output_dim * hidden_dim; ++i) m.params_[w2 + i] = rng.uniform(-0.5, 0.5);
  return m;
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  if (input.size() != input_dim_) throw std::invalid_argument("mlp forward: input length mismatch");
  std::vector<double> hidden(hidden_dim_);
  const double* w1 = params_.data() + w1_off();
  const double* b1 = params_.data() + b1_off();
  for (std::size_t h = 0; h < hidden_dim_; ++h) {
    double net = b1[h];
    const double* row = w1 + h * input_dim_;
    for (std::size_t i = 0; i < input_dim_; ++i) net += row[i] * input[i];
    hidden[h] = logistic(net);
  }
  std::vector<double> out(output_dim_);
  const double* w2 = params_.data() + w2_off();
  const double* b2 = params_.data() + b2_off();
  for (std::size_t o = 0; o < output_dim_; ++o) {
    double net = b2[o];
    const double* row = w2 + o * hidden_dim_;
    for (std::size_t h = 0; h < hidden_dim_; ++h) net += row[h] * hidden[h];
    out[o] = logistic(net);
  }
  return out;
}

double Mlp::loss(const LabeledExample& ex) const {
  if (ex.target.size() != output_dim_ || ex.mask.size() != output_dim_)
    throw std::invalid_argument("mlp loss: target/mask length mismatch");
  const auto p = forward(ex.input);
  double total = 0.0;
  std::size_t active = 0;
  for (std::size_t o = 0; o < output_dim_; ++o) {
    if (!ex.mask[o]) continue;
    const double pc = std::clamp(p[o], kProbClamp, 1.0 - kProbClamp);
    total += -(ex.target[o] * std::log(pc) + (1.0 - ex.target[o]) * std::log(1.0 - pc));
    ++active;
  }
  if (active == 0) throw std::invalid_argument("mlp loss: all output slots masked");
  return total / static_cast<double>(active);
}

double Mlp::mean_loss(std::span<const LabeledExample> batch) const {
  if (batch.empty()) throw std::invalid_argument("mlp mean_loss: empty batch");
  double total = 0.0;
  for (const auto& ex : batch) total += loss(ex);
  return total / static_cast<double>(batch.size());
}

void Mlp::accumulate_gradient(const LabeledExample& ex, std::vector<double>& grad) const {
  // Forward pass, keeping activations.
  std::vector<double> hidden(hidden_dim_);
  const double* w1 = params_.data() + w1_off();
  const double* b1 = params_.data() + b1_off();
  for (std::size_t h = 0; h < hidden_dim_; ++h) {
    double net = b1[h];
    const double* row = w1 + h * input_dim_;
    for (std::size_t i = 0; i < input_dim_; ++i) net += row[i] * ex.input[i];
    hidden[h] = logistic(net);
  }
  std::vector<double> out(output_dim_);
  const double* w2 = params_.data() + w2_off();
  const double* b2 = params_.data() + b2_off();
  for (std::size_t o = 0; o < output_dim_; ++o) {
    double net = b2[o];
    const double* row = w2 + o * hidden_dim_;
    for (std::size_t h = 0; h < hidden_dim_; ++h) net += row[h] * hidden[h];
    out[o] = logistic(net);
  }

  std::size_t active = 0;
  for (std::size_t o = 0; o < output_dim_; ++o)
    if (ex.mask[o]) ++active;
  if (active == 0) throw std::invalid_argument("mlp gradient: all output slots masked");
  const double inv_active = 1.0 / static_cast<double>(active);

  // dL/dnet2 for BCE with logistic output is (p - y) / active, but the loss
  // clamps p; the clamp only binds at saturation where the gradient is
  // already negligible, so the unclamped form is used.
  std::vector<double> delta_out(output_dim_, 0.0);
  for (std::size_t o = 0; o < output_dim_; ++o)
    if (ex.mask[o]) delta_out[o] = (out[o] - ex.target[o]) * inv_active;

  double* g_w2 = grad.data() + w2_off();
  double* g_b2 = grad.data() + b2_off();
  for (std::size_t o = 0; o < output_dim_; ++o) {
    g_b2[o] += delta_out[o];
    for (std::size_t h = 0; h < hidden_dim_; ++h) g_w2[o * hidden_dim_ + h] += delta_out[o] * hidden[h];
  }

  std::vector<double> delta_hidden(hidden_dim_, 0.0);
  for (std::size_t h = 0; h < hidden_dim_; ++h) {
    double back = 0.0;
    for (std::size_t o = 0; o < output_dim_; ++o) back += delta_out[o] * w2[o * hidden_dim_ + h];
    delta_hidden[h] = back * hidden[h] * (1.0 - hidden[h]);
  }

  double* g_w1 = grad.data() + w1_off();
  double* g_b1 = grad.data() + b1_off();
  for (std::size_t h = 0; h < hidden_dim_; ++h) {
    g_b1[h] += delta_hidden[h];
    for (std::size_t i = 0; i < input_dim_; ++i) g_w1[h * input_dim_ + i] += delta_hidden[h] * ex.input[i];
  }
}

void Mlp::backprop_step(std::span<const LabeledExample> batch, double lr) {
  if (batch.empty()) throw std::invalid_argument("mlp backprop_step: empty batch");
  std::vector<double> grad(params_.size(), 0.0);
  for (const auto& ex : batch) {
    if (ex.input.size() != input_dim_)
      throw std::invalid_argument("mlp backprop_step: input length mismatch");
    accumulate_gradient(ex, grad);
  }
  const double scale = lr / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= scale * grad[i];
}

void Mlp::train(std::span<const LabeledExample> data, const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("mlp train: empty data");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("mlp train: learning_rate must be > 0");
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t batch_size = std::max<std::size_t>(1, cfg.batch_size);
  std::vector<LabeledExample> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates on the portable generator.
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      batch.clear();
      const std::size_t end = std::min(start + batch_size, order.size());
      for (std::size_t k = start; k < end; ++k) batch.push_back(data[order[k]]);
      backprop_step(batch, cfg.learning_rate);
    }
  }
}

std::size_t Mlp::retrain_online(std::span<const LabeledExample> missed,
                                std::span<const LabeledExample> replay, const TrainConfig& cfg,
                                double target_loss, std::size_t max_steps) {
  if (missed.empty()) throw std::invalid_argument("mlp retrain_online: empty missed set");
  Rng rng(cfg.seed);
  std::size_t steps = 0;
  while (steps < max_steps && mean_loss(missed) >= target_loss) {
    std::vector<LabeledExample> batch(missed.begin(), missed.end());
    // 1:1 replay mixing to guard against forgetting.
    for (std::size_t i = 0; i < missed.size() && !replay.empty(); ++i)
      batch.push_back(replay[rng.below(replay.size())]);
    backprop_step(batch, cfg.learning_rate);
    ++steps;
  }
  return steps;
}

void Mlp::save(std::ostream& out) const {
  out << "mlp " << input_dim_ << " " << hidden_dim_ << " " << output_dim_ << "\n";
  for (double v : params_) out << format_double(v) << "\n";
}

Mlp Mlp::load(std::istream& in) {
  std::string tag;
  std::size_t i = 0, h = 0, o = 0;
  if (!(in >> tag >> i >> h >> o) || tag != "mlp")
    throw std::runtime_error("mlp checkpoint: bad header");
  Mlp m(i, h, o);
  for (auto& v : m.params_) {
    std::string token;
    if (!(in >> token)) throw std::runtime_error("mlp checkpoint: truncated");
    v = parse_double(token);
  }
  return m;
}

}  // namespace sentry
