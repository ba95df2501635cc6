#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgrom/pod.hpp"
#include "qgrom/trajectory.hpp"

namespace qgrom {

struct HurstResult {
  double h = 0.0;
  std::vector<double> n_values;   // chunk sizes actually used
  std::vector<double> rs_values;  // mean R/S per chunk size
  double fit_r2 = 0.0;
  /// True when h falls outside [0, 1].
  bool out_of_range() const noexcept { return h < 0.0 || h > 1.0; }
};

/// Rescaled-range estimate over disjoint chunks of size 8, 16, ..., <= length/2.
/// Throws ConfigError for series shorter than 64, NumericalError if every chunk
/// has zero variance.
HurstResult hurst_exponent(std::span<const double> series);

/// Grid L2 norm of the difference between two mean fields.
double mean_field_error(const Field2D& rom_mean, const Field2D& fom_mean);

struct MeanFields {
  Field2D omega;
  Field2D psi;
};

/// Time average of the reconstructed fields, computed via the mean coefficients.
MeanFields trajectory_mean_fields(const RomTrajectory& traj, const PodBasis& basis);

struct ErrorReport {
  std::string model;
  std::size_t r = 0;
  std::size_t sigma = 0;
  double vort_l2 = 0.0;
  double psi_l2 = 0.0;
};

/// Errors of a trajectory's mean fields against FOM means. A diverged
/// trajectory has no mean field and reports +inf for both errors.
ErrorReport evaluate_trajectory(const RomTrajectory& traj, const PodBasis& basis,
                                const Field2D& fom_omega_mean, const Field2D& fom_psi_mean);

/// Writes `model,R,sigma,vort_l2,psi_l2` rows.
void write_error_report(const std::filesystem::path& path, const std::vector<ErrorReport>& rows);
std::vector<ErrorReport> read_error_report(const std::filesystem::path& path);

/// CSV with columns t, a1_pred, a1_true, ... . A single `#boundary,<t>` line
/// is emitted before the first row whose time exceeds train_end.
void export_timeseries(const RomTrajectory& pred, const RomTrajectory& truth, double train_end,
                       const std::filesystem::path& path);

struct TimeseriesTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::optional<double> boundary;
  std::size_t boundary_row = 0;  // index of the first row after the marker
};
TimeseriesTable read_timeseries(const std::filesystem::path& path);

}  // namespace qgrom

namespace qgrom {

/// Projection of every snapshot of `reference` onto the basis (against the
/// basis mean), as a trajectory over the reference times.
RomTrajectory true_projection(const SnapshotSet& reference, const PodBasis& basis);

}  // namespace qgrom
