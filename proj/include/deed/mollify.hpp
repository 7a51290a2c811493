#pragma once

#include <vector>

#include "deed/grid.hpp"

namespace deed {

/// Truncated Gaussian k_sigma on a (2r+1) x (2r+1) pixel stencil.
///
/// The 2-D weights are the outer product of the normalized 1-D profile,
/// so weight(di, dj) is proportional to exp(-(di^2 + dj^2) h^2 / (2 sigma^2))
/// and the stencil sums to one.
struct GaussianKernel {
  double sigma;
  double spacing;
  int radius;
  std::vector<double> profile;  ///< 1-D weights at offsets -radius..radius, sum 1
  std::vector<double> weights;  ///< row-major 2-D weights, sum 1

  double weight(int di, int dj) const {
    const int n = 2 * radius + 1;
    return weights[static_cast<std::size_t>(dj + radius) * n + (di + radius)];
  }
};

/// Radius is ceil(3 sigma / h). Throws ConfigError for sigma <= 0.
GaussianKernel gaussian_kernel(double sigma, double spacing = 1.0);

/// Gaussian smoothing restricted to the grid: at every pixel only in-domain
/// neighbours contribute and their weights are renormalized to sum to one.
/// Constants are reproduced exactly.
ScalarField mollify(const ScalarField& u, double sigma);
ScalarField mollify(const ScalarField& u, const GaussianKernel& kernel);

}  // namespace deed
