#pragma once

#include <span>
#include <vector>

#include "qgrom/pod.hpp"
#include "qgrom/trajectory.hpp"

namespace qgrom {

/// Coefficients of da_k/dt = b_k + sum_i l(k,i) a_i + sum_ij n(k,i,j) a_i a_j.
struct GalerkinTensors {
  std::size_t r = 0;
  double re = 0.0;
  double ro = 0.0;
  std::vector<double> b;  // r
  Matrix l;               // r x r, l(k, i)
  std::vector<double> n;  // r^3, index (k*r + i)*r + j; i: vorticity mode, j: streamfunction mode

  double nl(std::size_t k, std::size_t i, std::size_t j) const noexcept { return n[(k * r + i) * r + j]; }
  double& nl(std::size_t k, std::size_t i, std::size_t j) noexcept { return n[(k * r + i) * r + j]; }

  friend bool operator==(const GalerkinTensors&, const GalerkinTensors&) = default;
};

/// Offline Galerkin projection of the vorticity equation onto the basis.
GalerkinTensors assemble_tensors(const PodBasis& basis, double re, double ro);

/// Right-hand side of the reduced system.
std::vector<double> gp_rhs(std::span<const double> a, const GalerkinTensors& t);

struct GpIntegration {
  double dt = 1e-3;  // largest step
  double t0 = 0.0;
  double t1 = 1.0;
  /// Spacing of recorded states; 0 records every step of size dt.
  double output_interval = 0.0;

  static constexpr double kBlowUp = 1e8;
};

/// Fixed-step TVD-RK3 integration. Divergence (|a|_inf > 1e8 or non-finite)
/// stops the run and is reported through RomTrajectory::diverged_at.
RomTrajectory integrate_gp(std::span<const double> a0, const GalerkinTensors& t,
                           const GpIntegration& plan);

}  // namespace qgrom
