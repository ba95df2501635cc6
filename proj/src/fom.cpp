#include "qgrom/fom.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "qgrom/errors.hpp"

namespace qgrom {

namespace {

std::size_t steps_for(double span, double max_dt) {
  const double n = std::ceil(span / max_dt - 1e-9);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

}  // namespace

void FomConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(re > 0.0)) fail("re must be > 0");
  if (!(ro > 0.0)) fail("ro must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be finite and > 0");
  if (!(t_start < snapshot_t0)) fail("t_start must be < snapshot_t0");
  if (!(snapshot_t0 < snapshot_t1)) fail("snapshot_t0 must be < snapshot_t1");
  if (!(snapshot_t1 <= t_end)) fail("snapshot_t1 must be <= t_end");
  if (n_snapshots < 2) fail("n_snapshots must be >= 2");
  if (!(seed_perturbation_amplitude >= 0.0) || !std::isfinite(seed_perturbation_amplitude))
    fail("seed_perturbation_amplitude must be finite and >= 0");
  if (grid.nx() < 8 || grid.ny() < 8) fail("grid needs at least 8 nodes per direction");
}

double FomConfig::sample_interval() const {
  return (snapshot_t1 - snapshot_t0) / static_cast<double>(n_snapshots - 1);
}

std::size_t FomConfig::n_samples_to_end() const {
  const double span = (t_end - snapshot_t0) / sample_interval();
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  return std::max(n, n_snapshots);
}

void SnapshotSet::compute_means() {
  if (omega.empty()) throw ConfigError("snapshot set is empty");
  omega_mean = Field2D(grid);
  for (const Field2D& w : omega) omega_mean += w;
  omega_mean *= 1.0 / static_cast<double>(omega.size());
  psi_mean = solve_poisson(omega_mean);
}

SnapshotSet SnapshotSet::slice(std::size_t first, std::size_t count) const {
  if (first + count > omega.size() || count == 0)
    throw DimensionError("snapshot slice out of range");
  SnapshotSet out;
  out.grid = grid;
  out.times.assign(times.begin() + first, times.begin() + first + count);
  out.omega.assign(omega.begin() + first, omega.begin() + first + count);
  out.compute_means();
  return out;
}

namespace {

// Arakawa stencil at interior node c; caller applies 1/(12 dx dy).
inline double arakawa_sum(const double* A, const double* B, std::size_t c, std::size_t ny) {
  const std::size_t e = c + ny, w = c - ny, n = c + 1, s = c - 1;
  const std::size_t ne = e + 1, se = e - 1, nw = w + 1, sw = w - 1;
  const double j1 = (A[e] - A[w]) * (B[n] - B[s]) - (A[n] - A[s]) * (B[e] - B[w]);
  const double j2 = A[e] * (B[ne] - B[se]) - A[w] * (B[nw] - B[sw]) - A[n] * (B[ne] - B[nw]) +
                    A[s] * (B[se] - B[sw]);
  const double j3 = A[ne] * (B[n] - B[e]) - A[sw] * (B[w] - B[s]) - A[nw] * (B[n] - B[w]) +
                    A[se] * (B[e] - B[s]);
  return j1 + j2 + j3;
}

std::vector<double> forcing_profile(const Grid& grid, double ro) {
  std::vector<double> f(grid.ny(), 0.0);
  for (std::size_t j = 1; j + 1 < grid.ny(); ++j)
    f[j] = (1.0 / ro) * std::sin(std::numbers::pi * grid.y(j));
  return f;
}

void rhs_kernel(const Field2D& omega, const Field2D& psi, const FomConfig& cfg,
                const std::vector<double>& forcing, Field2D& out) {
  const Grid& grid = omega.grid();
  const std::size_t nx = grid.nx(), ny = grid.ny();
  const double jscale = 1.0 / (12.0 * grid.dx() * grid.dy());
  const double inv_ro = 1.0 / cfg.ro;
  const double inv_re = 1.0 / cfg.re;
  const double rdx2 = 1.0 / (grid.dx() * grid.dx());
  const double rdy2 = 1.0 / (grid.dy() * grid.dy());
  const double r2dx = 1.0 / (2.0 * grid.dx());
  const double* A = omega.values().data();
  const double* B = psi.values().data();
  double* o = out.values().data();
  for (std::size_t j = 0; j < ny; ++j) {
    o[j] = 0.0;
    o[(nx - 1) * ny + j] = 0.0;
  }
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    o[i * ny] = 0.0;
    o[i * ny + ny - 1] = 0.0;
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const std::size_t c = i * ny + j;
      const double jac = arakawa_sum(A, B, c, ny) * jscale;
      const double psi_x = (B[c + ny] - B[c - ny]) * r2dx;
      const double lap = (A[c + ny] - 2.0 * A[c] + A[c - ny]) * rdx2 +
                         (A[c + 1] - 2.0 * A[c] + A[c - 1]) * rdy2;
      o[c] = -jac + inv_ro * psi_x + inv_re * lap + forcing[j];
    }
  }
}

}  // namespace

Field2D arakawa_jacobian(const Field2D& a, const Field2D& b) {
  require_same_grid(a, b, "arakawa_jacobian");
  const Grid& grid = a.grid();
  const std::size_t nx = grid.nx(), ny = grid.ny();
  const double scale = 1.0 / (12.0 * grid.dx() * grid.dy());
  const double* A = a.values().data();
  const double* B = b.values().data();
  Field2D out(grid);
  auto o = out.values();
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 1; j + 1 < ny; ++j) o[i * ny + j] = arakawa_sum(A, B, i * ny + j, ny) * scale;
  return out;
}

// Sine transform along y decouples the five-point system into one tridiagonal
// system in x per wavenumber; the Thomas factors are precomputed. Each row's
// sine transform comes from a real FFT of length my+1 (folded input, then a
// running sum over the odd outputs), about half the cost of a RODFT00 plan.
struct PoissonSolver::Impl {
  Grid grid;
  std::size_t mx = 0, my = 0;  // interior sizes
  std::size_t fft_n = 0;       // my + 1
  double* buffer = nullptr;    // mx rows of my contiguous values
  double* folded = nullptr;    // mx rows of fft_n values
  fftw_complex* spectrum = nullptr;  // mx rows of fft_n/2+1 values
  fftw_plan plan = nullptr;
  std::vector<double> fold_sin;  // sin(pi j / fft_n)
  double norm = 1.0;
  double off = 0.0;  // -1/dx^2 coupling between neighbouring x rows
  std::vector<double> inv_pivot;  // [p * my + q]
  std::vector<double> upper;      // [p * my + q], eliminated super-diagonal

  explicit Impl(const Grid& g) : grid(g), mx(g.nx() - 2), my(g.ny() - 2), fft_n(g.ny() - 1) {
    const std::size_t half = fft_n / 2 + 1;
    buffer = fftw_alloc_real(mx * my);
    folded = fftw_alloc_real(mx * fft_n);
    spectrum = fftw_alloc_complex(mx * half);
    if (buffer == nullptr || folded == nullptr || spectrum == nullptr) {
      release();
      throw NumericalError("fftw allocation failed");
    }
    const int n = static_cast<int>(fft_n);
    // FFTW_ESTIMATE keeps the plan (and so the rounding) identical across runs.
    plan = fftw_plan_many_dft_r2c(1, &n, static_cast<int>(mx), folded, nullptr, 1, n, spectrum,
                                  nullptr, 1, static_cast<int>(half), FFTW_ESTIMATE);
    if (plan == nullptr) {
      release();
      throw NumericalError("fftw plan creation failed");
    }
    const double pi = std::numbers::pi;
    fold_sin.resize(fft_n);
    for (std::size_t j = 0; j < fft_n; ++j)
      fold_sin[j] = std::sin(pi * static_cast<double>(j) / static_cast<double>(fft_n));
    const double rdx2 = 1.0 / (grid.dx() * grid.dx());
    const double rdy2 = 1.0 / (grid.dy() * grid.dy());
    // Round trip of the unnormalized transform multiplies by 2(my+1).
    norm = 1.0 / (2.0 * static_cast<double>(my + 1));
    // Solve -(d2/dx2 + lambda_q) psi_hat = omega_hat * norm.
    off = -rdx2;
    inv_pivot.resize(mx * my);
    upper.resize(mx * my);
    for (std::size_t q = 0; q < my; ++q) {
      const double lambda =
          (2.0 * std::cos(pi * static_cast<double>(q + 1) / static_cast<double>(my + 1)) - 2.0) * rdy2;
      const double diag = 2.0 * rdx2 - lambda;
      double prev_upper = 0.0;
      for (std::size_t p = 0; p < mx; ++p) {
        const double pivot = diag - off * prev_upper;
        inv_pivot[p * my + q] = 1.0 / pivot;
        prev_upper = off / pivot;
        upper[p * my + q] = prev_upper;
      }
    }
  }
  ~Impl() { release(); }

  void release() noexcept {
    if (plan != nullptr) fftw_destroy_plan(plan);
    fftw_free(buffer);
    fftw_free(folded);
    fftw_free(spectrum);
  }

  // Unnormalized DST-I of mx rows of my values, row p read from src + p * src_stride
  // and written to dst + p * dst_stride:
  // X_q = 2 sum_j x_j sin(pi (j+1)(q+1) / (my+1)).
  void sine_transform(const double* src, std::size_t src_stride, double* dst,
                      std::size_t dst_stride) const {
    const std::size_t n = fft_n, half = fft_n / 2 + 1;
    for (std::size_t p = 0; p < mx; ++p) {
      const double* x = src + p * src_stride;
      double* y = folded + p * n;
      y[0] = 0.0;
      for (std::size_t j = 1; j < n; ++j) {
        const double a = x[j - 1], b = x[n - j - 1];
        y[j] = fold_sin[j] * (a + b) + 0.5 * (a - b);
      }
    }
    fftw_execute(plan);
    // Even outputs are imaginary parts; odd outputs accumulate the real parts.
    for (std::size_t p = 0; p < mx; ++p) {
      const fftw_complex* y = spectrum + p * half;
      double* x = dst + p * dst_stride;
      for (std::size_t k = 1; 2 * k < n; ++k) x[2 * k - 1] = -2.0 * y[k][1];
      double odd = 0.5 * y[0][0];
      x[0] = 2.0 * odd;
      for (std::size_t k = 1; 2 * k + 1 < n; ++k) {
        odd += y[k][0];
        x[2 * k] = 2.0 * odd;
      }
    }
  }

  // Tridiagonal solves along x on the transformed rows in buffer.
  void thomas() const {
    double* d = buffer;
    for (std::size_t q = 0; q < my; ++q) d[q] = d[q] * norm * inv_pivot[q];
    for (std::size_t p = 1; p < mx; ++p) {
      double* row = d + p * my;
      const double* prev = row - my;
      const double* ip = inv_pivot.data() + p * my;
      for (std::size_t q = 0; q < my; ++q) row[q] = (row[q] * norm - off * prev[q]) * ip[q];
    }
    for (std::size_t p = mx - 1; p-- > 0;) {
      double* row = d + p * my;
      const double* next = row + my;
      const double* up = upper.data() + p * my;
      for (std::size_t q = 0; q < my; ++q) row[q] -= up[q] * next[q];
    }
  }
};

PoissonSolver::PoissonSolver(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {}
PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

const Grid& PoissonSolver::grid() const noexcept { return impl_->grid; }

Field2D PoissonSolver::solve(const Field2D& omega) const {
  if (!(omega.grid() == impl_->grid)) throw DimensionError("poisson solve: grid mismatch");
  if (!omega.all_finite()) throw NumericalError("poisson solve: non-finite vorticity");
  Field2D psi(impl_->grid);
  solve_into(omega, psi);
  return psi;
}

void PoissonSolver::solve_into(const Field2D& omega, Field2D& psi) const {
  const Impl& s = *impl_;
  if (!(omega.grid() == s.grid) || !(psi.grid() == s.grid))
    throw DimensionError("poisson solve: grid mismatch");
  const std::size_t ny = s.grid.ny();
  s.sine_transform(omega.values().data() + ny + 1, ny, s.buffer, s.my);
  s.thomas();
  psi.zero_boundary();
  s.sine_transform(s.buffer, s.my, psi.values().data() + ny + 1, ny);
}

Field2D solve_poisson(const Field2D& omega) { return PoissonSolver(omega.grid()).solve(omega); }

Field2D bve_rhs(const Field2D& omega, const Field2D& psi, const FomConfig& cfg) {
  require_same_grid(omega, psi, "bve_rhs");
  Field2D out(omega.grid());
  rhs_kernel(omega, psi, cfg, forcing_profile(omega.grid(), cfg.ro), out);
  return out;
}

BveIntegrator::BveIntegrator(const FomConfig& cfg)
    : cfg_(cfg),
      poisson_(cfg.grid),
      forcing_(forcing_profile(cfg.grid, cfg.ro)),
      psi_(cfg.grid),
      rhs_(cfg.grid),
      w1_(cfg.grid),
      w2_(cfg.grid) {}

void BveIntegrator::rhs_into(const Field2D& omega, Field2D& out) const {
  poisson_.solve_into(omega, psi_);
  rhs_kernel(omega, psi_, cfg_, forcing_, out);
}

Field2D BveIntegrator::rhs(const Field2D& omega) const {
  require_same_grid(omega, psi_, "BveIntegrator::rhs");
  Field2D out(cfg_.grid);
  rhs_into(omega, out);
  return out;
}

Field2D BveIntegrator::step(const Field2D& omega, double dt, double t) const {
  require_same_grid(omega, psi_, "BveIntegrator::step");
  const std::size_t size = omega.grid().size();
  const double* w0 = omega.values().data();
  const double* r = rhs_.values().data();
  double* w1 = w1_.values().data();
  double* w2 = w2_.values().data();

  // TVD-RK3 (Shu-Osher form).
  rhs_into(omega, rhs_);
  for (std::size_t k = 0; k < size; ++k) w1[k] = w0[k] + dt * r[k];
  w1_.zero_boundary();

  rhs_into(w1_, rhs_);
  for (std::size_t k = 0; k < size; ++k) w2[k] = 0.75 * w0[k] + 0.25 * w1[k] + 0.25 * dt * r[k];
  w2_.zero_boundary();

  rhs_into(w2_, rhs_);
  Field2D out(cfg_.grid);
  double* o = out.values().data();
  const double third = 1.0 / 3.0, two_thirds = 2.0 / 3.0;
  bool blown = false;
  for (std::size_t k = 0; k < size; ++k) {
    o[k] = third * w0[k] + two_thirds * w2[k] + two_thirds * dt * r[k];
    blown |= !(std::abs(o[k]) <= kBlowUp);  // also catches NaN
  }
  out.zero_boundary();

  if (blown) {
    std::ostringstream msg;
    msg << "vorticity diverged (";
    if (out.all_finite())
      msg << "max|omega| = " << out.max_abs();
    else
      msg << "non-finite values";
    msg << ") at t = " << t + dt;
    throw DivergenceError(msg.str(), t + dt);
  }
  return out;
}

Field2D step_rk3(const Field2D& omega, const FomConfig& cfg) {
  return BveIntegrator(cfg).step(omega, cfg.dt);
}

SnapshotSet run_fom(const FomConfig& cfg, const SampleObserver& observer) {
  cfg.validate();
  const BveIntegrator integrator(cfg);
  const Grid& grid = cfg.grid;

  Field2D omega(grid);
  if (cfg.seed_perturbation_amplitude > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t i = 1; i + 1 < grid.nx(); ++i)
      for (std::size_t j = 1; j + 1 < grid.ny(); ++j)
        omega(i, j) = cfg.seed_perturbation_amplitude * unit(rng);
  }

  auto advance = [&](double from, double to) {
    const std::size_t n = steps_for(to - from, cfg.dt);
    const double h = (to - from) / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s)
      omega = integrator.step(omega, h, from + static_cast<double>(s) * h);
  };

  SnapshotSet set;
  set.grid = grid;
  const double interval = cfg.sample_interval();
  const std::size_t n_total = observer ? cfg.n_samples_to_end() : cfg.n_snapshots;

  advance(cfg.t_start, cfg.snapshot_t0);
  double t = cfg.snapshot_t0;
  for (std::size_t k = 0; k < n_total; ++k) {
    const double target = cfg.snapshot_t0 + static_cast<double>(k) * interval;
    if (k > 0) advance(t, target);
    t = target;
    if (k < cfg.n_snapshots) {
      set.times.push_back(k + 1 == cfg.n_snapshots ? cfg.snapshot_t1 : target);
      set.omega.push_back(omega);
    }
    if (observer) observer(k, target, omega);
  }
  set.compute_means();
  return set;
}

}  // namespace qgrom
