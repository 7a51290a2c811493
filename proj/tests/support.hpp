#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "deed/grid.hpp"

namespace deed::test {

inline ScalarField random_field(const Grid& grid, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(grid);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

inline Mask random_mask(const Grid& grid, std::mt19937_64& rng, double density = 0.5) {
  std::bernoulli_distribution in(density);
  std::vector<std::uint8_t> flags(grid.size());
  for (auto& b : flags) b = in(rng) ? 1 : 0;
  flags[rng() % flags.size()] = 1;
  return Mask(grid, flags);
}

/// Random direction with ||d||_{W^{1,2}} = 1.
inline ScalarField unit_w12_direction(const Grid& grid, std::mt19937_64& rng) {
  ScalarField d = random_field(grid, rng, -1.0, 1.0);
  return (1.0 / norm_w12(d)) * d;
}

/// Dense Gaussian elimination with partial pivoting; a is row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= m * a[c * n + k];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t k = r + 1; k < n; ++k) acc -= a[r * n + k] * x[k];
    x[r] = acc / a[r * n + r];
  }
  return x;
}

}  // namespace deed::test
