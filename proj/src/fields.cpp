#include "qgrom/fields.hpp"

#include <cmath>
#include <string>

#include "qgrom/errors.hpp"

namespace qgrom {

Grid::Grid(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
  if (nx < 8 || ny < 8)
    throw ConfigError("grid needs at least 8 nodes per direction, got " + std::to_string(nx) +
                      "x" + std::to_string(ny));
  dx_ = (kXMax - kXMin) / static_cast<double>(nx - 1);
  dy_ = (kYMax - kYMin) / static_cast<double>(ny - 1);
}

Field2D::Field2D(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field2D::Field2D(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DimensionError("field value count " + std::to_string(values_.size()) +
                         " does not match grid size " + std::to_string(grid_.size()));
}

Field2D& Field2D::operator+=(const Field2D& other) {
  require_same_grid(*this, other, "field addition");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field2D& Field2D::operator-=(const Field2D& other) {
  require_same_grid(*this, other, "field subtraction");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field2D& Field2D::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field2D& Field2D::axpy(double s, const Field2D& other) {
  require_same_grid(*this, other, "axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
  return *this;
}

void Field2D::zero_boundary() noexcept {
  const std::size_t nx = grid_.nx(), ny = grid_.ny();
  for (std::size_t j = 0; j < ny; ++j) {
    (*this)(0, j) = 0.0;
    (*this)(nx - 1, j) = 0.0;
  }
  for (std::size_t i = 0; i < nx; ++i) {
    (*this)(i, 0) = 0.0;
    (*this)(i, ny - 1) = 0.0;
  }
}

bool Field2D::all_finite() const noexcept {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Field2D::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
Field2D operator*(double s, Field2D a) { return a *= s; }

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

double Matrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

void require_same_grid(const Field2D& f, const Field2D& g, const char* what) {
  if (!(f.grid() == g.grid()))
    throw DimensionError(std::string(what) + ": grid mismatch (" + std::to_string(f.grid().nx()) +
                         "x" + std::to_string(f.grid().ny()) + " vs " +
                         std::to_string(g.grid().nx()) + "x" + std::to_string(g.grid().ny()) +
                         ")");
}

double inner_product(const Field2D& f, const Field2D& g) {
  require_same_grid(f, g, "inner_product");
  const Grid& grid = f.grid();
  const std::size_t nx = grid.nx(), ny = grid.ny();
  const auto fv = f.values();
  const auto gv = g.values();
  double total = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double wx = (i == 0 || i + 1 == nx) ? 0.5 : 1.0;
    const std::size_t base = i * ny;
    // Half weights at the two ends of each y-line.
    double line = 0.5 * (fv[base] * gv[base] + fv[base + ny - 1] * gv[base + ny - 1]);
    for (std::size_t j = 1; j + 1 < ny; ++j) line += fv[base + j] * gv[base + j];
    total += wx * line;
  }
  return total * grid.dx() * grid.dy();
}

Field2D laplacian(const Field2D& f) {
  const Grid& grid = f.grid();
  const std::size_t nx = grid.nx(), ny = grid.ny();
  const double rdx2 = 1.0 / (grid.dx() * grid.dx());
  const double rdy2 = 1.0 / (grid.dy() * grid.dy());
  Field2D out(grid);
  const auto v = f.values();
  auto o = out.values();
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const std::size_t k = i * ny + j;
      o[k] = (v[k + ny] - 2.0 * v[k] + v[k - ny]) * rdx2 + (v[k + 1] - 2.0 * v[k] + v[k - 1]) * rdy2;
    }
  }
  return out;
}

Field2D ddx(const Field2D& f) {
  const Grid& grid = f.grid();
  const std::size_t nx = grid.nx(), ny = grid.ny();
  const double r2dx = 0.5 / grid.dx();
  Field2D out(grid);
  const auto v = f.values();
  auto o = out.values();
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const std::size_t k = i * ny + j;
      o[k] = (v[k + ny] - v[k - ny]) * r2dx;
    }
  return out;
}

double l2_grid_norm(const Field2D& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s / static_cast<double>(f.size()));
}

}  // namespace qgrom
