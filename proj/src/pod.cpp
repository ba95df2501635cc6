#include "qgrom/pod.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qgrom/errors.hpp"

namespace qgrom {

namespace {

std::vector<Field2D> fluctuations(const SnapshotSet& snapshots) {
  std::vector<Field2D> out;
  out.reserve(snapshots.size());
  for (const Field2D& w : snapshots.omega) out.push_back(w - snapshots.omega_mean);
  return out;
}

}  // namespace

Matrix correlation_matrix(const SnapshotSet& snapshots) {
  const std::size_t n = snapshots.size();
  if (n < 2) throw ConfigError("correlation matrix needs at least 2 snapshots");
  const std::vector<Field2D> fluct = fluctuations(snapshots);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = inner_product(fluct[i], fluct[j]);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

EigenDecomposition jacobi_eigendecomposition(const Matrix& input) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw DimensionError("jacobi: matrix is not square");
  const double norm = input.frobenius_norm();
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(input(i, j) - input(j, i)));
  if (asym > 1e-9 * norm) throw NumericalError("jacobi: matrix is not symmetric");

  Matrix a = input;
  Matrix v = Matrix::identity(n);
  const double target = 1e-12 * norm;
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  // Once the off-diagonal norm meets the target, sweeping continues until every
  // remaining a_pq is negligible against sqrt(|a_pp a_qq|); this keeps the
  // eigenvectors of the smallest eigenvalues accurate, which the 1/sqrt(lambda)
  // mode scaling would otherwise amplify.
  constexpr double kRelative = 1e-15;
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    const double off = off_norm();
    if (off == 0.0) break;
    const bool converged = off <= target;
    // Threshold pivoting for the first sweeps, then rotate everything non-negligible.
    const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0 || std::abs(apq) <= threshold) continue;
        if (converged && std::abs(apq) <= kRelative * std::sqrt(std::abs(a(p, p) * a(q, q)))) continue;
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p), akq = a(k, q);
          const double np = akp - s * (akq + tau * akp);
          const double nq = akq + s * (akp - tau * akq);
          a(k, p) = np;
          a(p, k) = np;
          a(k, q) = nq;
          a(q, k) = nq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
    if (converged && !rotated) break;
  }
  if (sweep == kMaxSweeps) throw NumericalError("jacobi: no convergence after 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

std::size_t usable_mode_count(const std::vector<double>& lambdas) {
  if (lambdas.empty() || !(lambdas.front() > 0.0)) return 0;
  const double cutoff = 1e-12 * lambdas.front();
  std::size_t count = 0;
  while (count < lambdas.size() && lambdas[count] > cutoff) ++count;
  return count;
}

std::vector<Field2D> build_vorticity_modes(const SnapshotSet& snapshots,
                                           const EigenDecomposition& eig, std::size_t r) {
  const std::size_t usable = usable_mode_count(eig.values);
  if (r == 0 || r > usable)
    throw RankError("requested " + std::to_string(r) + " modes but only " + std::to_string(usable) +
                        " are numerically usable",
                    usable);
  const std::size_t n = snapshots.size();
  if (eig.vectors.rows() != n) throw DimensionError("eigenvector length does not match snapshot count");
  const std::vector<Field2D> fluct = fluctuations(snapshots);
  std::vector<Field2D> phi;
  phi.reserve(r);
  for (std::size_t k = 0; k < r; ++k) {
    Field2D mode(snapshots.grid);
    for (std::size_t m = 0; m < n; ++m) mode.axpy(eig.vectors(m, k), fluct[m]);
    mode *= 1.0 / std::sqrt(eig.values[k]);
    // Sign convention: largest-magnitude node positive.
    double peak = 0.0;
    for (double x : mode.values())
      if (std::abs(x) > std::abs(peak)) peak = x;
    if (peak < 0.0) mode *= -1.0;
    phi.push_back(std::move(mode));
  }
  return phi;
}

std::vector<Field2D> build_streamfunction_modes(const std::vector<Field2D>& phi) {
  std::vector<Field2D> theta;
  if (phi.empty()) return theta;
  const PoissonSolver solver(phi.front().grid());
  theta.reserve(phi.size());
  for (const Field2D& mode : phi) theta.push_back(solver.solve(mode));
  return theta;
}

Matrix project_coefficients(const std::vector<Field2D>& omega, const Field2D& omega_mean,
                            const std::vector<Field2D>& phi) {
  Matrix a(phi.size(), omega.size());
  for (std::size_t n = 0; n < omega.size(); ++n) {
    const Field2D fluct = omega[n] - omega_mean;
    for (std::size_t k = 0; k < phi.size(); ++k) a(k, n) = inner_product(fluct, phi[k]);
  }
  return a;
}

Matrix project_coefficients(const SnapshotSet& snapshots, const std::vector<Field2D>& phi) {
  return project_coefficients(snapshots.omega, snapshots.omega_mean, phi);
}

Field2D reconstruct_field(std::span<const double> a, const PodBasis& basis, FieldKind which) {
  if (a.size() != basis.r)
    throw DimensionError("coefficient vector has length " + std::to_string(a.size()) +
                         ", basis has " + std::to_string(basis.r) + " modes");
  const bool vort = which == FieldKind::omega;
  Field2D out = vort ? basis.omega_mean : basis.psi_mean;
  const std::vector<Field2D>& modes = vort ? basis.phi : basis.theta;
  for (std::size_t k = 0; k < basis.r; ++k) out.axpy(a[k], modes[k]);
  return out;
}

PodBasis build_pod(const SnapshotSet& snapshots, std::size_t r) {
  const Matrix a = correlation_matrix(snapshots);
  const EigenDecomposition eig = jacobi_eigendecomposition(a);
  PodBasis basis;
  basis.r = r;
  basis.lambdas = eig.values;
  basis.phi = build_vorticity_modes(snapshots, eig, r);
  basis.theta = build_streamfunction_modes(basis.phi);
  basis.omega_mean = snapshots.omega_mean;
  basis.psi_mean = solve_poisson(snapshots.omega_mean);
  basis.a_train = project_coefficients(snapshots, basis.phi);
  basis.times = snapshots.times;
  return basis;
}

}  // namespace qgrom
