#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qgrom/fields.hpp"
#include "qgrom/trajectory.hpp"

namespace qgrom::lstm {

/// Per-mode min/max scaling onto [-1, 1].
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  /// Fits on an r x N series. Throws ConfigError naming the first constant mode.
  static Scaler fit(const Matrix& series);

  std::size_t r() const noexcept { return min.size(); }
  double apply(std::size_t k, double v) const noexcept {
    return 2.0 * (v - min[k]) / (max[k] - min[k]) - 1.0;
  }
  double invert(std::size_t k, double v) const noexcept {
    return min[k] + 0.5 * (v + 1.0) * (max[k] - min[k]);
  }
  /// Column-wise over an r x T matrix.
  Matrix apply(const Matrix& series) const;
  Matrix invert(const Matrix& series) const;

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Sliding windows over an r x N series: sample m has inputs a(m .. m+sigma-1)
/// and target a(m+sigma).
struct WindowSet {
  std::size_t r = 0;
  std::size_t sigma = 0;
  std::size_t count = 0;
  std::vector<double> inputs;   // count x sigma x r
  std::vector<double> targets;  // count x r

  std::span<const double> input(std::size_t m) const {
    return {inputs.data() + m * sigma * r, sigma * r};
  }
  std::span<const double> target(std::size_t m) const { return {targets.data() + m * r, r}; }
};

WindowSet make_windows(const Matrix& a, std::size_t sigma);

/// Read-only view of one LSTM layer. Gate blocks are stacked in the order
/// input, forget, candidate, output; w is 4H x in, u is 4H x H, both row-major.
struct LayerView {
  std::size_t in = 0;
  std::size_t hidden = 0;
  std::span<const double> w;
  std::span<const double> u;
  std::span<const double> b;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// Stacked LSTM with a linear head. All trainable values live in one flat
/// vector; layer(l), head_w() and head_b() are views into it.
struct LstmModel {
  std::size_t r = 0;
  std::size_t sigma = 0;
  std::size_t hidden = 40;
  std::size_t n_layers = 6;
  std::uint64_t seed = 0;
  std::vector<double> params;
  Scaler scaler;
  AdamState adam;

  /// Uniform Glorot weights, zero biases, forget-gate bias +1.
  static LstmModel initialize(std::size_t r, std::size_t sigma, std::uint64_t seed,
                              std::size_t hidden = 40, std::size_t n_layers = 6);

  std::size_t layer_input(std::size_t l) const noexcept { return l == 0 ? r : hidden; }
  std::size_t layer_offset(std::size_t l) const noexcept;
  std::size_t layer_size(std::size_t l) const noexcept;
  std::size_t head_offset() const noexcept { return layer_offset(n_layers); }
  std::size_t parameter_count() const noexcept { return head_offset() + r * hidden + r; }

  LayerView layer(std::size_t l) const;
  std::span<const double> head_w() const { return {params.data() + head_offset(), r * hidden}; }
  std::span<const double> head_b() const {
    return {params.data() + head_offset() + r * hidden, r};
  }
  std::span<double> head_b_mut() { return {params.data() + head_offset() + r * hidden, r}; }

  /// Throws DimensionError if any stored shape is inconsistent.
  void validate() const;

  friend bool operator==(const LstmModel&, const LstmModel&) = default;
};

struct CellState {
  std::vector<double> h;
  std::vector<double> c;
};

/// One gated update: i,f,o = logistic(z), g = tanh(z), c = f*c_prev + i*g, h = o*tanh(c).
CellState cell_forward(std::span<const double> x, std::span<const double> h_prev,
                       std::span<const double> c_prev, const LayerView& layer);

/// Raw network output (normalized space) for one sigma x r window, states reset per window.
std::vector<double> network_forward(std::span<const double> window, const LstmModel& model);

struct LossGradient {
  double mse = 0.0;
  std::vector<double> grads;  // same layout as LstmModel::params
};

/// Mean squared error over the selected samples and all modes, plus its exact
/// gradient by backpropagation through time.
LossGradient loss_and_gradients(const WindowSet& data, std::span<const std::size_t> samples,
                                const LstmModel& model);
/// Loss only.
double evaluate_loss(const WindowSet& data, std::span<const std::size_t> samples,
                     const LstmModel& model);

struct TrainConfig {
  std::size_t epochs = 500;
  std::size_t batch_size = 16;
  double validation_fraction = 0.2;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle = true;
  std::size_t hidden = 40;
  std::size_t n_layers = 6;

  void validate() const;
};

/// Bias-corrected Adam update of model.params in place.
void adam_step(LstmModel& model, std::span<const double> grads, const TrainConfig& cfg);

struct TrainResult {
  LstmModel model;
  std::vector<double> train_loss;       // per epoch, mean over training samples
  std::vector<double> validation_loss;  // per epoch
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
};

/// Fits the scaler, windows the normalized series, holds out the final
/// validation_fraction of windows, and runs minibatch Adam.
TrainResult train(const Matrix& a_train, std::size_t sigma, const TrainConfig& cfg);

/// Closed-loop rollout. `seed_states` is r x sigma (true states, physical units).
/// Returns exactly n_steps predicted states at t_last_seed + k*dt, k = 1..n_steps,
/// unless a state exceeds 1e8 in magnitude, which stops the rollout.
RomTrajectory predict_recursive(const LstmModel& model, const Matrix& seed_states,
                                std::size_t n_steps, double t_last_seed = 0.0, double dt = 1.0);

}  // namespace qgrom::lstm
