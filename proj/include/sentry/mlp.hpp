#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sentry {

// Numerically stable logistic; output clamped into the open interval (0,1).
inline double logistic(double net) {
  double p;
  if (net >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-net));
  } else {
    const double e = std::exp(net);
    p = e / (1.0 + e);
  }
  if (p <= 0.0) p = 5e-324;
  if (p >= 1.0) p = 1.0 - 1.1102230246251565e-16;
  return p;
}

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  std::size_t batch_size = 16;
};

// One supervised example: stacked object attributes, {0,1} targets, and a
// per-output-slot presence mask (absent objects contribute no loss).
struct LabeledExample {
  std::vector<double> input;
  std::vector<double> target;
  std::vector<std::uint8_t> mask;
};

// Two-layer feed-forward network with logistic activations on both layers.
// input_dim = attributes-per-object * max-objects, output_dim = max-objects.
class Mlp {
 public:
  Mlp(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim);

  // Weights uniform in [-0.5, 0.5] from the seed; biases zero.
  static Mlp random(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                    std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t output_dim() const { return output_dim_; }

  // Throws std::invalid_argument on input length mismatch.
  std::vector<double> forward(std::span<const double> input) const;

  // Masked binary cross-entropy, mean over active slots.
  // Throws std::invalid_argument when every slot is masked off.
  double loss(const LabeledExample& ex) const;

  double mean_loss(std::span<const LabeledExample> batch) const;

  // One gradient-descent step on the mean batch loss.
  void backprop_step(std::span<const LabeledExample> batch, double lr);

  // Epochs of seed-shuffled mini-batch descent; deterministic given cfg.seed.
  void train(std::span<const LabeledExample> data, const TrainConfig& cfg);

  // Retrain on missed examples mixed 1:1 with replay samples until the mean
  // loss on the missed set drops below target_loss or max_steps is reached.
  // Returns the number of steps taken.
  std::size_t retrain_online(std::span<const LabeledExample> missed,
                             std::span<const LabeledExample> replay, const TrainConfig& cfg,
                             double target_loss, std::size_t max_steps);

  // Checkpoint: "mlp <in> <hidden> <out>" then row-major W1, b1, W2, b2,
  // one value per line, round-tripping exactly.
  void save(std::ostream& out) const;
  static Mlp load(std::istream& in);

  // Raw parameter access (gradient checks, tests).
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::size_t input_dim_;
  std::size_t hidden_dim_;
  std::size_t output_dim_;
  // Layout: W1 (hidden x input, row-major), b1, W2 (output x hidden), b2.
  std::vector<double> params_;

  std::size_t w1_off() const { return 0; }
  std::size_t b1_off() const { return hidden_dim_ * input_dim_; }
  std::size_t w2_off() const { return b1_off() + hidden_dim_; }
  std::size_t b2_off() const { return w2_off() + output_dim_ * hidden_dim_; }

  void accumulate_gradient(const LabeledExample& ex, std::vector<double>& grad) const;
};

}  // namespace sentry
