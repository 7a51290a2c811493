#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace deed {

/// Rectangular pixel grid [0, width*h] x [0, height*h].
///
/// Pixel (i, j) has column index i in [0, width) and row index j in
/// [0, height); storage is row-major, index = j * width + i.
class Grid {
 public:
  Grid(int width, int height, double spacing = 1.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return static_cast<std::size_t>(width_) * height_; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * width_ + i;
  }
  /// Pixel area h^2, the quadrature weight of every sum over the grid.
  double cell_area() const { return spacing_ * spacing_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_;
  int height_;
  double spacing_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = 0.0);
  /// Throws InvariantViolation on a size mismatch or a non-finite entry.
  ScalarField(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;

  bool operator==(const ScalarField&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double a, const ScalarField& u);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm_squared() const { return x * x + y * y; }
  double norm() const;
  bool operator==(const Vec2&) const = default;
};

class VectorField {
 public:
  explicit VectorField(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  Vec2 operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  Vec2& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  Vec2 operator[](std::size_t k) const { return values_[k]; }
  Vec2& operator[](std::size_t k) { return values_[k]; }
  std::span<const Vec2> values() const { return values_; }

 private:
  Grid grid_;
  std::vector<Vec2> values_;
};

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct SymTensor2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;

  static SymTensor2 identity() { return {}; }

  Vec2 apply(Vec2 q) const { return {a11 * q.x + a12 * q.y, a12 * q.x + a22 * q.y}; }
  double quadratic_form(Vec2 q) const {
    return a11 * q.x * q.x + 2.0 * a12 * q.x * q.y + a22 * q.y * q.y;
  }
  double trace() const { return a11 + a22; }
  double determinant() const { return a11 * a22 - a12 * a12; }
  double max_eigenvalue() const;
  /// Computed as det / max_eigenvalue to avoid the cancellation in (tr - sqrt(disc)) / 2.
  double min_eigenvalue() const;
  bool positive_definite() const {
    return a11 > 0.0 && a22 > 0.0 && determinant() > 0.0;
  }
  bool operator==(const SymTensor2&) const = default;
};

SymTensor2 operator*(double s, const SymTensor2& a);

class TensorField {
 public:
  /// Identity tensor at every pixel.
  explicit TensorField(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  SymTensor2 operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  SymTensor2& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  SymTensor2 operator[](std::size_t k) const { return values_[k]; }
  SymTensor2& operator[](std::size_t k) { return values_[k]; }
  std::span<const SymTensor2> values() const { return values_; }

  bool operator==(const TensorField&) const = default;

  /// Smallest per-pixel eigenvalue over the field.
  double min_eigenvalue() const;
  bool positive_definite() const;
  /// Throws InvariantViolation naming the first pixel that is not SPD or not finite.
  void check_positive_definite(const char* what) const;

 private:
  Grid grid_;
  std::vector<SymTensor2> values_;
};

/// Characteristic function of the data set K; at least one pixel is set.
class Mask {
 public:
  /// Throws InvariantViolation when no flag is set or the size is wrong.
  Mask(const Grid& grid, std::vector<std::uint8_t> flags);

  const Grid& grid() const { return grid_; }
  std::size_t count() const { return count_; }
  bool operator[](std::size_t k) const { return flags_[k] != 0; }
  bool operator()(int i, int j) const { return flags_[grid_.index(i, j)] != 0; }
  std::span<const std::uint8_t> flags() const { return flags_; }
  bool full() const { return count_ == flags_.size(); }

  bool operator==(const Mask&) const = default;

 private:
  Grid grid_;
  std::vector<std::uint8_t> flags_;
  std::size_t count_;
};

Mask mask_full(const Grid& grid);

/// Forward differences; the component that would leave the grid is 0.
VectorField gradient_forward(const ScalarField& u);

/// Adjoint of gradient_forward: returns G^T q, where q components on
/// boundary links that gradient_forward sets to zero are ignored.
ScalarField gradient_forward_adjoint(const VectorField& q);

/// Central differences with reflecting ghost cells (u(-1, j) = u(1, j)).
VectorField gradient_central(const ScalarField& u);

/// Pairwise (cascade) summation; fixed reduction order for reproducibility.
double pairwise_sum(std::span<const double> terms);

/// h^2 * sum u * v.
double inner_product_l2(const ScalarField& u, const ScalarField& v);
double norm_l2(const ScalarField& u);
/// (||u||_2^2 + ||grad_h u||_2^2)^(1/2) with forward differences.
double norm_w12(const ScalarField& u);
double sup_norm(const ScalarField& u);
double sup_distance(const ScalarField& a, const ScalarField& b);

}  // namespace deed
