#include "deed/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deed/errors.hpp"

namespace deed {

Grid::Grid(int width, int height, double spacing)
    : width_(width), height_(height), spacing_(spacing) {
  if (width < 2 || height < 2) {
    throw ConfigError("grid must be at least 2x2, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw ConfigError("grid spacing must be positive and finite");
  }
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw GridMismatch(std::string(what) + ": fields live on different grids (" +
                       std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                       std::to_string(b.width()) + "x" + std::to_string(b.height()) + ")");
  }
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {
  if (!std::isfinite(fill)) throw InvariantViolation("ScalarField: non-finite fill value");
}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvariantViolation("ScalarField: expected " + std::to_string(grid_.size()) +
                             " values, got " + std::to_string(values_.size()));
  }
  if (!all_finite()) throw InvariantViolation("ScalarField: non-finite value");
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "operator+");
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "operator-");
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

ScalarField operator*(double a, const ScalarField& u) {
  ScalarField out(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = a * u[k];
  return out;
}

// ---------------------------------------------------------------- tensors

double Vec2::norm() const { return std::hypot(x, y); }

double SymTensor2::max_eigenvalue() const {
  const double half_gap = std::hypot(0.5 * (a11 - a22), a12);
  return 0.5 * (a11 + a22) + half_gap;
}

double SymTensor2::min_eigenvalue() const {
  const double top = max_eigenvalue();
  if (top <= 0.0) {
    const double half_gap = std::hypot(0.5 * (a11 - a22), a12);
    return 0.5 * (a11 + a22) - half_gap;
  }
  return determinant() / top;
}

SymTensor2 operator*(double s, const SymTensor2& a) {
  return {s * a.a11, s * a.a12, s * a.a22};
}

VectorField::VectorField(const Grid& grid) : grid_(grid), values_(grid.size()) {}

TensorField::TensorField(const Grid& grid) : grid_(grid), values_(grid.size()) {}

double TensorField::min_eigenvalue() const {
  double result = values_.front().min_eigenvalue();
  for (const auto& a : values_) result = std::min(result, a.min_eigenvalue());
  return result;
}

bool TensorField::positive_definite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const SymTensor2& a) { return a.positive_definite(); });
}

void TensorField::check_positive_definite(const char* what) const {
  for (int j = 0; j < grid_.height(); ++j) {
    for (int i = 0; i < grid_.width(); ++i) {
      const SymTensor2 a = (*this)(i, j);
      const bool finite = std::isfinite(a.a11) && std::isfinite(a.a12) && std::isfinite(a.a22);
      if (!finite || !a.positive_definite()) {
        throw InvariantViolation(std::string(what) + ": tensor not symmetric positive definite at (" +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

// ---------------------------------------------------------------- Mask

Mask::Mask(const Grid& grid, std::vector<std::uint8_t> flags)
    : grid_(grid), flags_(std::move(flags)), count_(0) {
  if (flags_.size() != grid_.size()) throw InvariantViolation("Mask: size does not match grid");
  for (auto& f : flags_) {
    f = f ? 1 : 0;
    count_ += f;
  }
  if (count_ == 0) throw InvariantViolation("Mask: data set K must contain at least one pixel");
}

Mask mask_full(const Grid& grid) { return Mask(grid, std::vector<std::uint8_t>(grid.size(), 1)); }

// ---------------------------------------------------------------- differences

VectorField gradient_forward(const ScalarField& u) {
  const Grid& g = u.grid();
  const double inv_h = 1.0 / g.spacing();
  VectorField out(g);
  for (int j = 0; j < g.height(); ++j) {
    for (int i = 0; i < g.width(); ++i) {
      Vec2 d;
      if (i + 1 < g.width()) d.x = (u(i + 1, j) - u(i, j)) * inv_h;
      if (j + 1 < g.height()) d.y = (u(i, j + 1) - u(i, j)) * inv_h;
      out(i, j) = d;
    }
  }
  return out;
}

ScalarField gradient_forward_adjoint(const VectorField& q) {
  const Grid& g = q.grid();
  const double inv_h = 1.0 / g.spacing();
  ScalarField out(g);
  for (int j = 0; j < g.height(); ++j) {
    for (int i = 0; i < g.width(); ++i) {
      const Vec2 qk = q(i, j);
      if (i + 1 < g.width()) {
        out(i + 1, j) += qk.x * inv_h;
        out(i, j) -= qk.x * inv_h;
      }
      if (j + 1 < g.height()) {
        out(i, j + 1) += qk.y * inv_h;
        out(i, j) -= qk.y * inv_h;
      }
    }
  }
  return out;
}

VectorField gradient_central(const ScalarField& u) {
  const Grid& g = u.grid();
  const double inv_2h = 0.5 / g.spacing();
  const int w = g.width();
  const int h = g.height();
  auto reflect = [](int k, int n) {
    if (k < 0) return -k;
    if (k >= n) return 2 * (n - 1) - k;
    return k;
  };
  VectorField out(g);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      out(i, j) = {(u(reflect(i + 1, w), j) - u(reflect(i - 1, w), j)) * inv_2h,
                   (u(i, reflect(j + 1, h)) - u(i, reflect(j - 1, h))) * inv_2h};
    }
  }
  return out;
}

// ---------------------------------------------------------------- reductions

double pairwise_sum(std::span<const double> terms) {
  constexpr std::size_t leaf = 8;
  if (terms.size() <= leaf) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

double inner_product_l2(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u.grid(), v.grid(), "inner_product_l2");
  std::vector<double> products(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) products[k] = u[k] * v[k];
  return u.grid().cell_area() * pairwise_sum(products);
}

double norm_l2(const ScalarField& u) { return std::sqrt(inner_product_l2(u, u)); }

double norm_w12(const ScalarField& u) {
  const VectorField d = gradient_forward(u);
  std::vector<double> terms(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) terms[k] = u[k] * u[k] + d[k].norm_squared();
  return std::sqrt(u.grid().cell_area() * pairwise_sum(terms));
}

double sup_norm(const ScalarField& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "sup_distance");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace deed
