#include "deed/synthetic.hpp"

#include <algorithm>
#include <random>

namespace deed {

ScalarField noisy_step_image(const Grid& grid, double low, double high, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise);
  ScalarField u(grid);
  for (int j = 0; j < grid.height(); ++j) {
    for (int i = 0; i < grid.width(); ++i) {
      const double clean = 2 * i < grid.width() ? low : high;
      u(i, j) = std::clamp(clean + (noise > 0.0 ? gauss(rng) : 0.0), 0.0, 1.0);
    }
  }
  return u;
}

ScalarField uniform_random_field(const Grid& grid, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  ScalarField u(grid);
  for (auto& v : u.values()) v = uniform(rng);
  return u;
}

}  // namespace deed
