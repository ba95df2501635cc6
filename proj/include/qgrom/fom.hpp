#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "qgrom/fields.hpp"

namespace qgrom {

/// Parameters of a full-order barotropic vorticity run.
///
/// `dt` is the largest step the integrator may take. Each sampling interval
/// (and the spin-up interval before the first sample) is split into the
/// smallest number of equal steps not exceeding `dt`, so samples land exactly
/// on the planned times.
struct FomConfig {
  Grid grid{65, 129};
  double re = 450.0;
  double ro = 3.6e-3;
  double dt = 7.5e-5;
  double t_start = 0.0;
  double t_end = 50.0;
  double snapshot_t0 = 10.0;
  double snapshot_t1 = 50.0;
  std::size_t n_snapshots = 200;
  /// Amplitude of seeded interior noise added to the rest initial state (0 = pure rest).
  double seed_perturbation_amplitude = 0.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  double sample_interval() const;
  /// Number of samples on the uniform plan extended from snapshot_t0 up to t_end.
  std::size_t n_samples_to_end() const;
};

/// Ordered vorticity snapshots together with their time-mean fields.
struct SnapshotSet {
  Grid grid;
  std::vector<double> times;
  std::vector<Field2D> omega;
  Field2D omega_mean;
  Field2D psi_mean;

  std::size_t size() const noexcept { return omega.size(); }
  /// Recomputes omega_mean as the sample average and psi_mean from it.
  void compute_means();
  /// Snapshots [first, first+count) with freshly computed means.
  SnapshotSet slice(std::size_t first, std::size_t count) const;
};

/// Arakawa (energy- and enstrophy-conserving) Jacobian J(a, b) = a_x b_y - a_y b_x.
/// Boundary nodes are zero.
Field2D arakawa_jacobian(const Field2D& a, const Field2D& b);

/// Direct solver for lap(psi) = -omega with psi = 0 on all walls, by a
/// two-dimensional discrete sine transform of the interior nodes.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Grid& grid);
  ~PoissonSolver();
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;

  const Grid& grid() const noexcept;
  /// Throws NumericalError on non-finite input, DimensionError on grid mismatch.
  Field2D solve(const Field2D& omega) const;
  /// Same solve without the finiteness scan, writing into an existing field.
  void solve_into(const Field2D& omega, Field2D& psi) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Field2D solve_poisson(const Field2D& omega);

/// -J(omega, psi) + (1/Ro) psi_x + (1/Re) lap(omega) + (1/Ro) sin(pi y); boundary zero.
Field2D bve_rhs(const Field2D& omega, const Field2D& psi, const FomConfig& cfg);

/// Stateful stepping helper that owns the Poisson solver for one grid.
/// Holds scratch fields, so one instance must not be shared between threads.
class BveIntegrator {
 public:
  explicit BveIntegrator(const FomConfig& cfg);

  /// rhs evaluated at omega with psi recovered by the Poisson solve.
  Field2D rhs(const Field2D& omega) const;
  /// One TVD-RK3 step of size dt starting at time t. Throws DivergenceError
  /// if max|omega| exceeds the blow-up guard.
  Field2D step(const Field2D& omega, double dt, double t = 0.0) const;
  const PoissonSolver& poisson() const noexcept { return poisson_; }

  static constexpr double kBlowUp = 1e8;

 private:
  void rhs_into(const Field2D& omega, Field2D& out) const;

  FomConfig cfg_;
  PoissonSolver poisson_;
  std::vector<double> forcing_;
  mutable Field2D psi_, rhs_, w1_, w2_;
};

/// One TVD-RK3 step of size cfg.dt.
Field2D step_rk3(const Field2D& omega, const FomConfig& cfg);

/// Called for each sample on the plan extended to t_end: (sample index, time, omega).
using SampleObserver = std::function<void(std::size_t, double, const Field2D&)>;

/// Integrates from rest, returns the snapshots in [snapshot_t0, snapshot_t1].
/// If an observer is supplied it sees every sample of the same uniform plan up to t_end.
SnapshotSet run_fom(const FomConfig& cfg, const SampleObserver& observer = {});

}  // namespace qgrom
