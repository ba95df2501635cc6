#include "qgrom/pipeline.hpp"

#include <cmath>
#include <string>

#include "qgrom/errors.hpp"

namespace qgrom::pipeline {

double sample_interval(const PodBasis& basis) {
  if (basis.times.size() < 2) throw ConfigError("basis stores fewer than 2 snapshot times");
  return (basis.times.back() - basis.times.front()) / static_cast<double>(basis.times.size() - 1);
}

std::size_t states_in_window(double t0, double t_end, double dt) {
  if (!(dt > 0.0) || t_end < t0) throw ConfigError("invalid time window");
  return static_cast<std::size_t>(std::floor((t_end - t0) / dt + 1e-9)) + 1;
}

RomTrajectory run_gp(const PodBasis& basis, const GalerkinTensors& tensors, double gp_dt,
                     double t_end) {
  if (tensors.r != basis.r) throw DimensionError("tensors and basis have different mode counts");
  const double interval = sample_interval(basis);
  const double t0 = basis.times.front();
  const std::size_t n = states_in_window(t0, t_end, interval);
  GpIntegration plan;
  plan.dt = gp_dt;
  plan.t0 = t0;
  plan.t1 = t0 + static_cast<double>(n - 1) * interval;
  plan.output_interval = interval;
  const std::vector<double> a0 = basis.a_train.column(0);
  if (n == 1) {
    RomTrajectory t;
    t.times = {t0};
    t.a = Matrix(basis.r, 1);
    for (std::size_t k = 0; k < basis.r; ++k) t.a(k, 0) = a0[k];
    return t;
  }
  return integrate_gp(a0, tensors, plan);
}

RomTrajectory run_predict(const lstm::LstmModel& model, const PodBasis& basis, double t_end,
                          double dt) {
  if (model.r != basis.r)
    throw DimensionError("model has " + std::to_string(model.r) + " modes, basis has " +
                         std::to_string(basis.r));
  const std::size_t sigma = model.sigma;
  if (basis.a_train.cols() < sigma) throw ConfigError("fewer training states than sigma");
  const double t0 = basis.times.front();
  const std::size_t n_total = states_in_window(t0, t_end, dt);
  if (n_total < sigma) throw ConfigError("prediction window shorter than the seed window");

  Matrix seed(basis.r, sigma);
  for (std::size_t k = 0; k < basis.r; ++k)
    for (std::size_t t = 0; t < sigma; ++t) seed(k, t) = basis.a_train(k, t);
  const RomTrajectory pred = lstm::predict_recursive(
      model, seed, n_total - sigma, t0 + static_cast<double>(sigma - 1) * dt, dt);

  RomTrajectory out;
  out.provenance = Provenance::lstm;
  out.sigma = sigma;
  out.diverged_at = pred.diverged_at;
  out.a = Matrix(basis.r, sigma + pred.length());
  for (std::size_t t = 0; t < sigma; ++t) {
    out.times.push_back(t0 + static_cast<double>(t) * dt);
    for (std::size_t k = 0; k < basis.r; ++k) out.a(k, t) = seed(k, t);
  }
  for (std::size_t t = 0; t < pred.length(); ++t) {
    out.times.push_back(pred.times[t]);
    for (std::size_t k = 0; k < basis.r; ++k) out.a(k, sigma + t) = pred.a(k, t);
  }
  return out;
}

}  // namespace qgrom::pipeline
