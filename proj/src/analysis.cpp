#include "qgrom/analysis.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "qgrom/errors.hpp"

namespace qgrom {

namespace {

std::string format17(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("csv: cannot parse number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

HurstResult hurst_exponent(std::span<const double> series) {
  const std::size_t len = series.size();
  if (len < 64) throw ConfigError("hurst_exponent: series needs at least 64 values");
  HurstResult res;
  for (std::size_t n = 8; n <= len / 2; n *= 2) {
    const std::size_t chunks = len / n;
    double rs_sum = 0.0;
    std::size_t used = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
      const double* x = series.data() + c * n;
      double mean = 0.0;
      for (std::size_t k = 0; k < n; ++k) mean += x[k];
      mean /= static_cast<double>(n);
      double cum = 0.0, lo = 0.0, hi = 0.0, var = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = x[k] - mean;
        cum += d;
        lo = std::min(lo, cum);
        hi = std::max(hi, cum);
        var += d * d;
      }
      const double sd = std::sqrt(var / static_cast<double>(n));
      if (!(sd > 0.0)) continue;
      rs_sum += (hi - lo) / sd;
      ++used;
    }
    if (used == 0) continue;
    res.n_values.push_back(static_cast<double>(n));
    res.rs_values.push_back(rs_sum / static_cast<double>(used));
  }
  if (res.n_values.size() < 2) throw NumericalError("hurst_exponent: too few chunk sizes with nonzero variance");

  const std::size_t m = res.n_values.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sx += std::log(res.n_values[k]);
    sy += std::log(res.rs_values[k]);
  }
  const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = std::log(res.n_values[k]) - mx;
    const double dy = std::log(res.rs_values[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  res.h = sxy / sxx;
  res.fit_r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return res;
}

double mean_field_error(const Field2D& rom_mean, const Field2D& fom_mean) {
  require_same_grid(rom_mean, fom_mean, "mean_field_error");
  return l2_grid_norm(rom_mean - fom_mean);
}

MeanFields trajectory_mean_fields(const RomTrajectory& traj, const PodBasis& basis) {
  if (traj.length() == 0) throw ConfigError("trajectory_mean_fields: empty trajectory");
  if (traj.r() != basis.r) throw DimensionError("trajectory_mean_fields: mode count mismatch");
  std::vector<double> mean(traj.r(), 0.0);
  for (std::size_t k = 0; k < traj.r(); ++k) {
    double s = 0.0;
    for (double v : traj.a.row(k)) s += v;
    mean[k] = s / static_cast<double>(traj.length());
  }
  return {reconstruct_field(mean, basis, FieldKind::omega), reconstruct_field(mean, basis, FieldKind::psi)};
}

ErrorReport evaluate_trajectory(const RomTrajectory& traj, const PodBasis& basis,
                                const Field2D& fom_omega_mean, const Field2D& fom_psi_mean) {
  ErrorReport row;
  row.model = to_string(traj.provenance);
  row.r = traj.r();
  row.sigma = traj.sigma;
  if (traj.diverged_at) {
    row.vort_l2 = row.psi_l2 = std::numeric_limits<double>::infinity();
    return row;
  }
  const MeanFields m = trajectory_mean_fields(traj, basis);
  row.vort_l2 = mean_field_error(m.omega, fom_omega_mean);
  row.psi_l2 = mean_field_error(m.psi, fom_psi_mean);
  return row;
}

void write_error_report(const std::filesystem::path& path, const std::vector<ErrorReport>& rows) {
  auto out = open_out(path);
  out << "model,R,sigma,vort_l2,psi_l2\n";
  for (const ErrorReport& r : rows)
    out << r.model << ',' << r.r << ',' << r.sigma << ',' << format17(r.vort_l2) << ','
        << format17(r.psi_l2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<ErrorReport> read_error_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "model,R,sigma,vort_l2,psi_l2") throw IoError("unexpected error-report header");
  std::vector<ErrorReport> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 5) throw IoError("error report: malformed row");
    rows.push_back({cells[0], static_cast<std::size_t>(std::stoull(cells[1])),
                    static_cast<std::size_t>(std::stoull(cells[2])), parse_double(cells[3]),
                    parse_double(cells[4])});
  }
  return rows;
}

void export_timeseries(const RomTrajectory& pred, const RomTrajectory& truth, double train_end,
                       const std::filesystem::path& path) {
  if (pred.length() != truth.length() || pred.r() != truth.r())
    throw DimensionError("export_timeseries: trajectories have different shapes");
  for (std::size_t t = 0; t < pred.length(); ++t)
    if (std::abs(pred.times[t] - truth.times[t]) > 1e-9 * std::max(1.0, std::abs(truth.times[t])))
      throw DimensionError("export_timeseries: time grids are not aligned");
  auto out = open_out(path);
  out << 't';
  for (std::size_t k = 1; k <= pred.r(); ++k) out << ",a" << k << "_pred,a" << k << "_true";
  out << '\n';
  bool marked = false;
  for (std::size_t t = 0; t < pred.length(); ++t) {
    if (!marked && pred.times[t] > train_end) {
      out << "#boundary," << format17(train_end) << '\n';
      marked = true;
    }
    out << format17(pred.times[t]);
    for (std::size_t k = 0; k < pred.r(); ++k)
      out << ',' << format17(pred.a(k, t)) << ',' << format17(truth.a(k, t));
    out << '\n';
  }
  if (!marked) out << "#boundary," << format17(train_end) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

TimeseriesTable read_timeseries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  TimeseriesTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("timeseries: missing header");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("#boundary,", 0) == 0) {
      if (table.boundary) throw IoError("timeseries: duplicate boundary marker");
      table.boundary = parse_double(line.substr(10));
      table.boundary_row = table.rows.size();
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_double(cell));
    if (row.size() != table.header.size()) throw IoError("timeseries: ragged row");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace qgrom

namespace qgrom {

RomTrajectory true_projection(const SnapshotSet& reference, const PodBasis& basis) {
  RomTrajectory t;
  t.provenance = Provenance::true_projection;
  t.times = reference.times;
  t.a = project_coefficients(reference.omega, basis.omega_mean, basis.phi);
  return t;
}

}  // namespace qgrom
