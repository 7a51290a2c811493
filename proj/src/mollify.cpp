#include "deed/mollify.hpp"

#include <algorithm>
#include <cmath>

#include "deed/errors.hpp"

namespace deed {

GaussianKernel gaussian_kernel(double sigma, double spacing) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("gaussian_kernel: sigma must be positive");
  }
  if (!(spacing > 0.0)) throw ConfigError("gaussian_kernel: spacing must be positive");

  GaussianKernel k{sigma, spacing, static_cast<int>(std::ceil(3.0 * sigma / spacing)), {}, {}};
  const int n = 2 * k.radius + 1;

  k.profile.resize(n);
  double total = 0.0;
  for (int d = -k.radius; d <= k.radius; ++d) {
    const double x = d * spacing;
    k.profile[d + k.radius] = std::exp(-x * x / (2.0 * sigma * sigma));
    total += k.profile[d + k.radius];
  }
  for (double& p : k.profile) p /= total;

  k.weights.resize(static_cast<std::size_t>(n) * n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) k.weights[static_cast<std::size_t>(b) * n + a] = k.profile[a] * k.profile[b];
  }
  return k;
}

namespace {

// One renormalized 1-D pass. The window at every pixel is the intersection of
// the stencil with the grid, so the 2-D renormalized convolution factors into
// an x pass followed by a y pass.
//
// The value is accumulated as u(x) + sum w (u(y) - u(x)) / sum w, which is an
// algebraic rewrite of sum w u(y) / sum w that returns constants bit-exactly.
void smooth_line(const double* in, double* out, int n, std::ptrdiff_t stride,
                 const std::vector<double>& profile, int radius) {
  for (int c = 0; c < n; ++c) {
    const int lo = std::max(0, c - radius);
    const int hi = std::min(n - 1, c + radius);
    const double centre = in[c * stride];
    double mass = 0.0;
    double acc = 0.0;
    for (int k = lo; k <= hi; ++k) {
      const double w = profile[k - c + radius];
      mass += w;
      acc += w * (in[k * stride] - centre);
    }
    out[c * stride] = centre + acc / mass;
  }
}

}  // namespace

ScalarField mollify(const ScalarField& u, const GaussianKernel& kernel) {
  const Grid& g = u.grid();
  const int w = g.width();
  const int h = g.height();
  ScalarField rows(g);
  ScalarField out(g);
  const double* src = u.values().data();
  double* tmp = rows.values().data();
  double* dst = out.values().data();
  for (int j = 0; j < h; ++j) {
    smooth_line(src + static_cast<std::ptrdiff_t>(j) * w, tmp + static_cast<std::ptrdiff_t>(j) * w, w, 1,
                kernel.profile, kernel.radius);
  }
  for (int i = 0; i < w; ++i) smooth_line(tmp + i, dst + i, h, w, kernel.profile, kernel.radius);
  return out;
}

ScalarField mollify(const ScalarField& u, double sigma) {
  return mollify(u, gaussian_kernel(sigma, u.grid().spacing()));
}

}  // namespace deed
