#include "qgrom/rom_gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qgrom/errors.hpp"
#include "qgrom/fom.hpp"

namespace qgrom {

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::gp: return "ROM-GP";
    case Provenance::lstm: return "ROM-LSTM";
    case Provenance::true_projection: return "true-projection";
  }
  return "unknown";
}

double RomTrajectory::max_abs(std::size_t k) const {
  double m = 0.0;
  for (double v : a.row(k)) m = std::max(m, std::abs(v));
  return m;
}

GalerkinTensors assemble_tensors(const PodBasis& basis, double re, double ro) {
  if (!(re > 0.0) || !(ro > 0.0)) throw ConfigError("assemble_tensors: re and ro must be > 0");
  const std::size_t r = basis.r;
  if (r == 0 || basis.phi.size() != r || basis.theta.size() != r)
    throw DimensionError("assemble_tensors: basis has inconsistent mode counts");
  const Grid& grid = basis.grid();
  const double inv_re = 1.0 / re;
  const double inv_ro = 1.0 / ro;
  const Field2D& wbar = basis.omega_mean;
  const Field2D& pbar = basis.psi_mean;

  GalerkinTensors t;
  t.r = r;
  t.re = re;
  t.ro = ro;
  t.b.assign(r, 0.0);
  t.l = Matrix(r, r);
  t.n.assign(r * r * r, 0.0);

  Field2D constant = arakawa_jacobian(wbar, pbar);
  constant *= -1.0;
  constant += inv_ro * (Field2D::from_function(grid, [](double, double y) {
                return std::sin(std::numbers::pi * y);
              }) + ddx(pbar));
  constant.axpy(inv_re, laplacian(wbar));
  for (std::size_t k = 0; k < r; ++k) t.b[k] = inner_product(constant, basis.phi[k]);

  for (std::size_t i = 0; i < r; ++i) {
    Field2D linear = arakawa_jacobian(wbar, basis.theta[i]);
    linear += arakawa_jacobian(basis.phi[i], pbar);
    linear *= -1.0;
    linear.axpy(inv_ro, ddx(basis.theta[i]));
    linear.axpy(inv_re, laplacian(basis.phi[i]));
    for (std::size_t k = 0; k < r; ++k) t.l(k, i) = inner_product(linear, basis.phi[k]);
  }

  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      const Field2D jac = arakawa_jacobian(basis.phi[i], basis.theta[j]);
      for (std::size_t k = 0; k < r; ++k) t.nl(k, i, j) = -inner_product(jac, basis.phi[k]);
    }
  return t;
}

std::vector<double> gp_rhs(std::span<const double> a, const GalerkinTensors& t) {
  const std::size_t r = t.r;
  if (a.size() != r)
    throw DimensionError("gp_rhs: state has length " + std::to_string(a.size()) + ", expected " +
                         std::to_string(r));
  std::vector<double> out(t.b);
  for (std::size_t k = 0; k < r; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      double inner = t.l(k, i);
      const double* nk = &t.n[(k * r + i) * r];
      for (std::size_t j = 0; j < r; ++j) inner += nk[j] * a[j];
      acc += inner * a[i];
    }
    out[k] += acc;
  }
  return out;
}

RomTrajectory integrate_gp(std::span<const double> a0, const GalerkinTensors& t,
                           const GpIntegration& plan) {
  const std::size_t r = t.r;
  if (a0.size() != r) throw DimensionError("integrate_gp: initial state length mismatch");
  if (!(plan.dt > 0.0) || !(plan.t1 > plan.t0)) throw ConfigError("integrate_gp: invalid time plan");
  const double interval = plan.output_interval > 0.0 ? plan.output_interval : plan.dt;
  const auto n_out = static_cast<std::size_t>(std::floor((plan.t1 - plan.t0) / interval + 1e-9));
  const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(interval / plan.dt - 1e-9)));
  const double h = interval / static_cast<double>(sub);

  std::vector<std::vector<double>> states{std::vector<double>(a0.begin(), a0.end())};
  std::vector<double> times{plan.t0};
  std::optional<double> diverged;
  std::vector<double> a(a0.begin(), a0.end()), a1(r), a2(r);

  auto blown = [](const std::vector<double>& v) {
    for (double x : v)
      if (!(std::abs(x) <= GpIntegration::kBlowUp)) return true;
    return false;
  };

  for (std::size_t m = 1; m <= n_out && !diverged; ++m) {
    for (std::size_t s = 0; s < sub; ++s) {
      const std::vector<double> k1 = gp_rhs(a, t);
      for (std::size_t k = 0; k < r; ++k) a1[k] = a[k] + h * k1[k];
      const std::vector<double> k2 = gp_rhs(a1, t);
      for (std::size_t k = 0; k < r; ++k) a2[k] = 0.75 * a[k] + 0.25 * a1[k] + 0.25 * h * k2[k];
      const std::vector<double> k3 = gp_rhs(a2, t);
      for (std::size_t k = 0; k < r; ++k)
        a[k] = a[k] / 3.0 + 2.0 / 3.0 * a2[k] + 2.0 / 3.0 * h * k3[k];
      if (blown(a)) {
        diverged = plan.t0 + (static_cast<double>(m - 1) * static_cast<double>(sub) +
                              static_cast<double>(s + 1)) * h;
        break;
      }
    }
    if (diverged) break;
    states.push_back(a);
    times.push_back(plan.t0 + static_cast<double>(m) * interval);
  }

  RomTrajectory traj;
  traj.provenance = Provenance::gp;
  traj.times = std::move(times);
  traj.a = Matrix(r, states.size());
  for (std::size_t c = 0; c < states.size(); ++c)
    for (std::size_t k = 0; k < r; ++k) traj.a(k, c) = states[c][k];
  traj.diverged_at = diverged;
  return traj;
}

}  // namespace qgrom
