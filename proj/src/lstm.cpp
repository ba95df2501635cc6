#include "qgrom/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "qgrom/errors.hpp"

namespace qgrom::lstm {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Activations of one layer over a window. Row t of h and c is the state
// after t steps; row 0 is the zero initial state.
struct LayerTrace {
  std::vector<double> gates;   // sigma x 4H, activated (i, f, g, o)
  std::vector<double> c;       // (sigma+1) x H
  std::vector<double> h;       // (sigma+1) x H
  std::vector<double> tanh_c;  // sigma x H
};

void layer_step(const LayerView& L, const double* x, const double* h_prev, const double* c_prev,
                double* gates, double* c, double* tanh_c, double* h) {
  const std::size_t H = L.hidden, in = L.in;
  for (std::size_t g = 0; g < 4 * H; ++g) {
    double z = L.b[g];
    const double* wr = L.w.data() + g * in;
    for (std::size_t k = 0; k < in; ++k) z += wr[k] * x[k];
    const double* ur = L.u.data() + g * H;
    for (std::size_t k = 0; k < H; ++k) z += ur[k] * h_prev[k];
    gates[g] = z;
  }
  for (std::size_t k = 0; k < H; ++k) {
    const double i = logistic(gates[k]);
    const double f = logistic(gates[H + k]);
    const double g = std::tanh(gates[2 * H + k]);
    const double o = logistic(gates[3 * H + k]);
    gates[k] = i;
    gates[H + k] = f;
    gates[2 * H + k] = g;
    gates[3 * H + k] = o;
    c[k] = f * c_prev[k] + i * g;
    tanh_c[k] = std::tanh(c[k]);
    h[k] = o * tanh_c[k];
  }
}

std::vector<LayerTrace> forward_trace(std::span<const double> window, const LstmModel& model) {
  const std::size_t S = model.sigma, H = model.hidden;
  std::vector<LayerTrace> traces(model.n_layers);
  for (std::size_t l = 0; l < model.n_layers; ++l) {
    const LayerView L = model.layer(l);
    LayerTrace& tr = traces[l];
    tr.gates.assign(S * 4 * H, 0.0);
    tr.c.assign((S + 1) * H, 0.0);
    tr.h.assign((S + 1) * H, 0.0);
    tr.tanh_c.assign(S * H, 0.0);
    for (std::size_t t = 0; t < S; ++t) {
      const double* x = l == 0 ? window.data() + t * model.r : traces[l - 1].h.data() + (t + 1) * H;
      layer_step(L, x, tr.h.data() + t * H, tr.c.data() + t * H, tr.gates.data() + t * 4 * H,
                 tr.c.data() + (t + 1) * H, tr.tanh_c.data() + t * H, tr.h.data() + (t + 1) * H);
    }
  }
  return traces;
}

std::vector<double> head_forward(const LstmModel& model, const double* h_last) {
  const std::size_t H = model.hidden;
  const auto w = model.head_w();
  const auto b = model.head_b();
  std::vector<double> y(model.r);
  for (std::size_t k = 0; k < model.r; ++k) {
    double acc = b[k];
    for (std::size_t j = 0; j < H; ++j) acc += w[k * H + j] * h_last[j];
    y[k] = acc;
  }
  return y;
}

void check_window(std::span<const double> window, const LstmModel& model) {
  if (window.size() != model.sigma * model.r)
    throw DimensionError("window has " + std::to_string(window.size()) + " values, expected " +
                         std::to_string(model.sigma * model.r));
}

// Accumulates d(loss)/d(params) for one sample given dL/dy.
void backward_sample(std::span<const double> window, const LstmModel& model,
                     const std::vector<LayerTrace>& traces, const std::vector<double>& dy,
                     std::vector<double>& grads) {
  const std::size_t S = model.sigma, H = model.hidden, R = model.r;
  const std::size_t head = model.head_offset();
  const auto hw = model.head_w();
  const double* h_last = traces.back().h.data() + S * H;

  // dh_ext[t] is the gradient arriving at layer output h(t+1) from above.
  std::vector<double> dh_ext(S * H, 0.0);
  for (std::size_t k = 0; k < R; ++k) {
    grads[head + R * H + k] += dy[k];
    for (std::size_t j = 0; j < H; ++j) {
      grads[head + k * H + j] += dy[k] * h_last[j];
      dh_ext[(S - 1) * H + j] += dy[k] * hw[k * H + j];
    }
  }

  std::vector<double> dh(H), dc(H), dz(4 * H), dh_next(H), dc_next(H);
  std::vector<double> dx_below;
  for (std::size_t l = model.n_layers; l-- > 0;) {
    const LayerView L = model.layer(l);
    const LayerTrace& tr = traces[l];
    const std::size_t in = L.in;
    const std::size_t off = model.layer_offset(l);
    double* gw = grads.data() + off;
    double* gu = gw + 4 * H * in;
    double* gb = gu + 4 * H * H;
    if (l > 0) dx_below.assign(S * H, 0.0);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    std::fill(dc_next.begin(), dc_next.end(), 0.0);

    for (std::size_t t = S; t-- > 0;) {
      const double* gates = tr.gates.data() + t * 4 * H;
      const double* c_prev = tr.c.data() + t * H;
      const double* h_prev = tr.h.data() + t * H;
      const double* tc = tr.tanh_c.data() + t * H;
      const double* x = l == 0 ? window.data() + t * R : traces[l - 1].h.data() + (t + 1) * H;
      for (std::size_t k = 0; k < H; ++k) {
        const double i = gates[k], f = gates[H + k], g = gates[2 * H + k], o = gates[3 * H + k];
        dh[k] = dh_ext[t * H + k] + dh_next[k];
        dc[k] = dc_next[k] + dh[k] * o * (1.0 - tc[k] * tc[k]);
        dz[k] = dc[k] * g * i * (1.0 - i);
        dz[H + k] = dc[k] * c_prev[k] * f * (1.0 - f);
        dz[2 * H + k] = dc[k] * i * (1.0 - g * g);
        dz[3 * H + k] = dh[k] * tc[k] * o * (1.0 - o);
        dc_next[k] = dc[k] * f;
      }
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      double* dx = l > 0 ? dx_below.data() + t * H : nullptr;
      for (std::size_t g = 0; g < 4 * H; ++g) {
        const double d = dz[g];
        gb[g] += d;
        if (d == 0.0) continue;
        double* gwr = gw + g * in;
        const double* wr = L.w.data() + g * in;
        for (std::size_t k = 0; k < in; ++k) gwr[k] += d * x[k];
        if (dx)
          for (std::size_t k = 0; k < in; ++k) dx[k] += d * wr[k];
        double* gur = gu + g * H;
        const double* ur = L.u.data() + g * H;
        for (std::size_t k = 0; k < H; ++k) {
          gur[k] += d * h_prev[k];
          dh_next[k] += d * ur[k];
        }
      }
    }
    if (l > 0) dh_ext.swap(dx_below);
  }
}

}  // namespace

Scaler Scaler::fit(const Matrix& series) {
  if (series.cols() == 0) throw ConfigError("scaler: empty series");
  Scaler s;
  s.min.resize(series.rows());
  s.max.resize(series.rows());
  for (std::size_t k = 0; k < series.rows(); ++k) {
    const auto row = series.row(k);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    if (!(*hi > *lo))
      throw ConfigError("scaler: mode " + std::to_string(k + 1) + " is constant (degenerate scale)");
    s.min[k] = *lo;
    s.max[k] = *hi;
  }
  return s;
}

Matrix Scaler::apply(const Matrix& series) const {
  if (series.rows() != r()) throw DimensionError("scaler: mode count mismatch");
  Matrix out(series.rows(), series.cols());
  for (std::size_t k = 0; k < series.rows(); ++k)
    for (std::size_t t = 0; t < series.cols(); ++t) out(k, t) = apply(k, series(k, t));
  return out;
}

Matrix Scaler::invert(const Matrix& series) const {
  if (series.rows() != r()) throw DimensionError("scaler: mode count mismatch");
  Matrix out(series.rows(), series.cols());
  for (std::size_t k = 0; k < series.rows(); ++k)
    for (std::size_t t = 0; t < series.cols(); ++t) out(k, t) = invert(k, series(k, t));
  return out;
}

WindowSet make_windows(const Matrix& a, std::size_t sigma) {
  const std::size_t r = a.rows(), n = a.cols();
  if (sigma == 0) throw ConfigError("make_windows: sigma must be >= 1");
  if (n <= sigma)
    throw ConfigError("make_windows: series length " + std::to_string(n) +
                      " must exceed sigma " + std::to_string(sigma));
  WindowSet w;
  w.r = r;
  w.sigma = sigma;
  w.count = n - sigma;
  w.inputs.resize(w.count * sigma * r);
  w.targets.resize(w.count * r);
  for (std::size_t m = 0; m < w.count; ++m) {
    for (std::size_t t = 0; t < sigma; ++t)
      for (std::size_t k = 0; k < r; ++k) w.inputs[(m * sigma + t) * r + k] = a(k, m + t);
    for (std::size_t k = 0; k < r; ++k) w.targets[m * r + k] = a(k, m + sigma);
  }
  return w;
}

std::size_t LstmModel::layer_size(std::size_t l) const noexcept {
  const std::size_t in = layer_input(l);
  return 4 * hidden * (in + hidden + 1);
}

std::size_t LstmModel::layer_offset(std::size_t l) const noexcept {
  std::size_t off = 0;
  for (std::size_t k = 0; k < l; ++k) off += layer_size(k);
  return off;
}

LayerView LstmModel::layer(std::size_t l) const {
  const std::size_t in = layer_input(l);
  const double* base = params.data() + layer_offset(l);
  LayerView v;
  v.in = in;
  v.hidden = hidden;
  v.w = {base, 4 * hidden * in};
  v.u = {base + 4 * hidden * in, 4 * hidden * hidden};
  v.b = {base + 4 * hidden * (in + hidden), 4 * hidden};
  return v;
}

void LstmModel::validate() const {
  if (r == 0 || sigma == 0 || hidden == 0 || n_layers == 0)
    throw DimensionError("lstm model: zero dimension");
  if (params.size() != parameter_count())
    throw DimensionError("lstm model: parameter count " + std::to_string(params.size()) +
                         " does not match layout " + std::to_string(parameter_count()));
  if (adam.m.size() != params.size() || adam.v.size() != params.size())
    throw DimensionError("lstm model: optimizer state does not mirror parameters");
  if (scaler.min.size() != r || scaler.max.size() != r)
    throw DimensionError("lstm model: scaler width does not match r");
}

LstmModel LstmModel::initialize(std::size_t r, std::size_t sigma, std::uint64_t seed,
                                std::size_t hidden, std::size_t n_layers) {
  if (r == 0 || sigma == 0 || hidden == 0 || n_layers == 0)
    throw ConfigError("lstm model: r, sigma, hidden and layer count must be >= 1");
  LstmModel m;
  m.r = r;
  m.sigma = sigma;
  m.hidden = hidden;
  m.n_layers = n_layers;
  m.seed = seed;
  m.params.assign(m.parameter_count(), 0.0);
  m.adam.m.assign(m.params.size(), 0.0);
  m.adam.v.assign(m.params.size(), 0.0);
  m.scaler.min.assign(r, -1.0);
  m.scaler.max.assign(r, 1.0);

  std::mt19937_64 rng(seed);
  auto fill_uniform = [&](double* p, std::size_t count, double fan_in, double fan_out) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t k = 0; k < count; ++k) p[k] = limit * dist(rng);
  };
  const auto H = static_cast<double>(hidden);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = m.layer_input(l);
    double* base = m.params.data() + m.layer_offset(l);
    fill_uniform(base, 4 * hidden * in, static_cast<double>(in), 4.0 * H);
    fill_uniform(base + 4 * hidden * in, 4 * hidden * hidden, H, 4.0 * H);
    double* b = base + 4 * hidden * (in + hidden);
    for (std::size_t k = 0; k < hidden; ++k) b[hidden + k] = 1.0;
  }
  fill_uniform(m.params.data() + m.head_offset(), r * hidden, H, static_cast<double>(r));
  return m;
}

CellState cell_forward(std::span<const double> x, std::span<const double> h_prev,
                       std::span<const double> c_prev, const LayerView& layer) {
  const std::size_t H = layer.hidden;
  if (x.size() != layer.in || h_prev.size() != H || c_prev.size() != H)
    throw DimensionError("cell_forward: shape mismatch");
  if (layer.w.size() != 4 * H * layer.in || layer.u.size() != 4 * H * H || layer.b.size() != 4 * H)
    throw DimensionError("cell_forward: weight shapes do not match the layer");
  std::vector<double> gates(4 * H), tanh_c(H);
  CellState out{std::vector<double>(H), std::vector<double>(H)};
  layer_step(layer, x.data(), h_prev.data(), c_prev.data(), gates.data(), out.c.data(),
             tanh_c.data(), out.h.data());
  return out;
}

std::vector<double> network_forward(std::span<const double> window, const LstmModel& model) {
  check_window(window, model);
  const auto traces = forward_trace(window, model);
  return head_forward(model, traces.back().h.data() + model.sigma * model.hidden);
}

LossGradient loss_and_gradients(const WindowSet& data, std::span<const std::size_t> samples,
                                const LstmModel& model) {
  if (samples.empty()) throw ConfigError("loss_and_gradients: empty batch");
  if (data.r != model.r || data.sigma != model.sigma)
    throw DimensionError("loss_and_gradients: data shape does not match model");
  LossGradient out;
  out.grads.assign(model.params.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(samples.size() * model.r);
  std::vector<double> dy(model.r);
  for (std::size_t m : samples) {
    const auto window = data.input(m);
    const auto target = data.target(m);
    const auto traces = forward_trace(window, model);
    const auto y = head_forward(model, traces.back().h.data() + model.sigma * model.hidden);
    for (std::size_t k = 0; k < model.r; ++k) {
      const double e = y[k] - target[k];
      out.mse += e * e * scale;
      dy[k] = 2.0 * e * scale;
    }
    backward_sample(window, model, traces, dy, out.grads);
  }
  return out;
}

double evaluate_loss(const WindowSet& data, std::span<const std::size_t> samples,
                     const LstmModel& model) {
  if (samples.empty()) throw ConfigError("evaluate_loss: empty sample set");
  double mse = 0.0;
  const double scale = 1.0 / static_cast<double>(samples.size() * model.r);
  for (std::size_t m : samples) {
    const auto y = network_forward(data.input(m), model);
    const auto target = data.target(m);
    for (std::size_t k = 0; k < model.r; ++k) mse += (y[k] - target[k]) * (y[k] - target[k]) * scale;
  }
  return mse;
}

void TrainConfig::validate() const {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw ConfigError("validation_fraction must lie in (0, 1)");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be > 0");
  if (hidden == 0 || n_layers == 0) throw ConfigError("hidden width and layer count must be >= 1");
}

void adam_step(LstmModel& model, std::span<const double> grads, const TrainConfig& cfg) {
  const std::size_t n = model.params.size();
  if (grads.size() != n) throw DimensionError("adam_step: gradient size mismatch");
  AdamState& s = model.adam;
  s.m.resize(n, 0.0);
  s.v.resize(n, 0.0);
  ++s.step;
  const double t = static_cast<double>(s.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < n; ++k) {
    const double g = grads[k];
    s.m[k] = cfg.beta1 * s.m[k] + (1.0 - cfg.beta1) * g;
    s.v[k] = cfg.beta2 * s.v[k] + (1.0 - cfg.beta2) * g * g;
    const double mhat = s.m[k] / c1;
    const double vhat = s.v[k] / c2;
    model.params[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

TrainResult train(const Matrix& a_train, std::size_t sigma, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  result.model = LstmModel::initialize(a_train.rows(), sigma, cfg.seed, cfg.hidden, cfg.n_layers);
  result.model.scaler = Scaler::fit(a_train);
  const WindowSet data = make_windows(result.model.scaler.apply(a_train), sigma);

  const auto n_train = static_cast<std::size_t>(
      std::floor(static_cast<double>(data.count) * (1.0 - cfg.validation_fraction)));
  if (n_train == 0 || n_train == data.count)
    throw ConfigError("train: " + std::to_string(data.count) +
                      " windows are too few for a training/validation split");
  result.n_train = n_train;
  result.n_validation = data.count - n_train;

  std::vector<std::size_t> train_idx(n_train), val_idx(data.count - n_train);
  std::iota(train_idx.begin(), train_idx.end(), 0);
  std::iota(val_idx.begin(), val_idx.end(), n_train);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, n_train - start);
      const std::span<const std::size_t> batch(train_idx.data() + start, count);
      const LossGradient lg = loss_and_gradients(data, batch, result.model);
      epoch_loss += lg.mse * static_cast<double>(count);
      adam_step(result.model, lg.grads, cfg);
    }
    result.train_loss.push_back(epoch_loss / static_cast<double>(n_train));
    result.validation_loss.push_back(evaluate_loss(data, val_idx, result.model));
  }
  return result;
}

RomTrajectory predict_recursive(const LstmModel& model, const Matrix& seed_states,
                                std::size_t n_steps, double t_last_seed, double dt) {
  model.validate();
  if (seed_states.rows() != model.r || seed_states.cols() != model.sigma)
    throw DimensionError("predict_recursive: seed must be r x sigma");
  const std::size_t R = model.r, S = model.sigma;
  std::vector<double> window(S * R);
  for (std::size_t t = 0; t < S; ++t)
    for (std::size_t k = 0; k < R; ++k) window[t * R + k] = model.scaler.apply(k, seed_states(k, t));

  std::vector<std::vector<double>> states;
  states.reserve(n_steps);
  std::optional<double> diverged;
  for (std::size_t step = 0; step < n_steps; ++step) {
    const std::vector<double> y = network_forward(window, model);
    std::vector<double> physical(R);
    bool blown = false;
    for (std::size_t k = 0; k < R; ++k) {
      physical[k] = model.scaler.invert(k, y[k]);
      if (!(std::abs(physical[k]) <= 1e8)) blown = true;
    }
    if (blown) {
      diverged = t_last_seed + static_cast<double>(step + 1) * dt;
      break;
    }
    states.push_back(std::move(physical));
    std::copy(window.begin() + static_cast<std::ptrdiff_t>(R), window.end(), window.begin());
    std::copy(y.begin(), y.end(), window.end() - static_cast<std::ptrdiff_t>(R));
  }

  RomTrajectory traj;
  traj.provenance = Provenance::lstm;
  traj.sigma = S;
  traj.a = Matrix(R, states.size());
  for (std::size_t c = 0; c < states.size(); ++c) {
    traj.times.push_back(t_last_seed + static_cast<double>(c + 1) * dt);
    for (std::size_t k = 0; k < R; ++k) traj.a(k, c) = states[c][k];
  }
  traj.diverged_at = diverged;
  return traj;
}

}  // namespace qgrom::lstm
