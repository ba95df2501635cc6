#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qgrom {

/// Node-centred rectangular grid on [0,1] x [-1,1], boundary nodes included.
class Grid {
 public:
  static constexpr double kXMin = 0.0;
  static constexpr double kXMax = 1.0;
  static constexpr double kYMin = -1.0;
  static constexpr double kYMax = 1.0;

  Grid() = default;
  /// Throws ConfigError unless nx >= 8 and ny >= 8.
  Grid(std::size_t nx, std::size_t ny);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return nx_ * ny_; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }
  double x(std::size_t i) const noexcept { return kXMin + static_cast<double>(i) * dx_; }
  double y(std::size_t j) const noexcept { return kYMin + static_cast<double>(j) * dy_; }
  /// Row-major by x then y.
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * ny_ + j; }
  bool on_boundary(std::size_t i, std::size_t j) const noexcept {
    return i == 0 || j == 0 || i + 1 == nx_ || j + 1 == ny_;
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_;
  }

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double dx_ = 0.0;
  double dy_ = 0.0;
};

/// Scalar field sampled on every node of a Grid.
class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(const Grid& grid, double fill = 0.0);
  Field2D(const Grid& grid, std::vector<double> values);

  /// Samples f(x, y) at every node.
  template <class F>
  static Field2D from_function(const Grid& grid, F&& f) {
    Field2D out(grid);
    for (std::size_t i = 0; i < grid.nx(); ++i)
      for (std::size_t j = 0; j < grid.ny(); ++j)
        out(i, j) = f(grid.x(i), grid.y(j));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[grid_.index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  Field2D& operator+=(const Field2D& other);
  Field2D& operator-=(const Field2D& other);
  Field2D& operator*=(double s) noexcept;
  /// this += s * other
  Field2D& axpy(double s, const Field2D& other);

  void zero_boundary() noexcept;
  bool all_finite() const noexcept;
  double max_abs() const noexcept;

  friend bool operator==(const Field2D& a, const Field2D& b) noexcept {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field2D operator+(Field2D a, const Field2D& b);
Field2D operator-(Field2D a, const Field2D& b);
Field2D operator*(double s, Field2D a);

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double frobenius_norm() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws DimensionError if the two fields live on different grids.
void require_same_grid(const Field2D& f, const Field2D& g, const char* what);

/// Trapezoidal-rule approximation of the integral of f*g over the domain.
double inner_product(const Field2D& f, const Field2D& g);

/// Five-point Laplacian on interior nodes; boundary nodes are zero.
Field2D laplacian(const Field2D& f);

/// Second-order central d/dx on interior nodes; boundary nodes are zero.
Field2D ddx(const Field2D& f);

/// sqrt(sum f_ij^2 / (nx*ny)).
double l2_grid_norm(const Field2D& f);

}  // namespace qgrom
