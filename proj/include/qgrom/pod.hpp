#pragma once

#include <vector>

#include "qgrom/fields.hpp"
#include "qgrom/fom.hpp"

namespace qgrom {

/// Eigenvalues in descending order and the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};

/// Proper orthogonal decomposition of a snapshot set.
struct PodBasis {
  std::size_t r = 0;
  std::vector<double> lambdas;  // all N eigenvalues, descending
  std::vector<Field2D> phi;     // vorticity modes
  std::vector<Field2D> theta;   // streamfunction modes, lap(theta_k) = -phi_k
  Matrix a_train;               // r x N modal coefficients of the training snapshots
  std::vector<double> times;    // training snapshot times
  Field2D omega_mean;
  Field2D psi_mean;

  const Grid& grid() const { return omega_mean.grid(); }
};

/// Temporal correlation matrix of the mean-subtracted snapshots.
Matrix correlation_matrix(const SnapshotSet& snapshots);

/// Cyclic-by-row Jacobi eigensolver for a symmetric matrix.
/// Throws NumericalError if `a` is not symmetric or the sweeps do not converge.
EigenDecomposition jacobi_eigendecomposition(const Matrix& a);

/// Number of eigenvalues above the usable cutoff (lambda_k > 1e-12 * lambda_1).
std::size_t usable_mode_count(const std::vector<double>& lambdas);

/// phi_k = (1/sqrt(lambda_k)) sum_n v_k^n omega'(t_n), sign-normalised so the
/// largest-magnitude node is positive. Throws RankError if r is too large.
std::vector<Field2D> build_vorticity_modes(const SnapshotSet& snapshots,
                                           const EigenDecomposition& eig, std::size_t r);

/// theta_k solving lap(theta_k) = -phi_k with homogeneous Dirichlet walls.
std::vector<Field2D> build_streamfunction_modes(const std::vector<Field2D>& phi);

/// a_k(t_n) = <omega(t_n) - mean, phi_k>, returned as an r x N matrix.
Matrix project_coefficients(const SnapshotSet& snapshots, const std::vector<Field2D>& phi);
/// Same, against an explicit mean (used when projecting data outside the training window).
Matrix project_coefficients(const std::vector<Field2D>& omega, const Field2D& omega_mean,
                            const std::vector<Field2D>& phi);

enum class FieldKind { omega, psi };

/// mean + sum_k a_k * mode_k. Throws DimensionError on length mismatch.
Field2D reconstruct_field(std::span<const double> a, const PodBasis& basis, FieldKind which);

/// Full method-of-snapshots pipeline with r retained modes.
PodBasis build_pod(const SnapshotSet& snapshots, std::size_t r);

}  // namespace qgrom
