#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "qgrom/fields.hpp"
#include "qgrom/fom.hpp"

namespace qgrom::test {

/// Uniform noise on interior nodes, zero on the walls.
/// Uniform random values on nodes at least `margin` cells from every wall.
inline Field2D random_interior(const Grid& g, std::uint64_t seed, double amp = 1.0,
                               std::size_t margin = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  Field2D f(g);
  for (std::size_t i = margin; i + margin < g.nx(); ++i)
    for (std::size_t j = margin; j + margin < g.ny(); ++j) f(i, j) = u(rng);
  return f;
}

inline double max_abs_diff(const Field2D& a, const Field2D& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double interior_max_abs(const Field2D& f) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < g.nx(); ++i)
    for (std::size_t j = 1; j + 1 < g.ny(); ++j) m = std::max(m, std::abs(f(i, j)));
  return m;
}

/// Synthetic snapshot set: mean plus a few travelling sine patterns.
inline SnapshotSet synthetic_snapshots(const Grid& g, std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  SnapshotSet s;
  s.grid = g;
  const double pi = 3.14159265358979323846;
  for (std::size_t m = 0; m < n; ++m) {
    const double t = 0.1 * static_cast<double>(m);
    Field2D w = Field2D::from_function(g, [&](double x, double y) {
      const double yy = 0.5 * (y + 1.0);
      return 2.0 * std::sin(pi * x) * std::sin(pi * yy) +
             std::cos(1.3 * t) * std::sin(2 * pi * x) * std::sin(pi * yy) +
             0.6 * std::sin(0.7 * t) * std::sin(pi * x) * std::sin(3 * pi * yy) +
             0.3 * std::cos(2.1 * t + 0.4) * std::sin(3 * pi * x) * std::sin(2 * pi * yy);
    });
    for (std::size_t i = 1; i + 1 < g.nx(); ++i)
      for (std::size_t j = 1; j + 1 < g.ny(); ++j) w(i, j) += noise(rng);
    w.zero_boundary();
    s.times.push_back(t);
    s.omega.push_back(std::move(w));
  }
  s.compute_means();
  return s;
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qgrom_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace qgrom::test
