#pragma once

#include <cstdint>

#include "deed/grid.hpp"

namespace deed {

/// Vertical step edge (low on the left half, high on the right) plus i.i.d.
/// Gaussian noise of standard deviation `noise`, clamped to [0, 1].
ScalarField noisy_step_image(const Grid& grid, double low, double high, double noise, std::uint64_t seed);

/// Uniform random values in [lo, hi).
ScalarField uniform_random_field(const Grid& grid, double lo, double hi, std::uint64_t seed);

}  // namespace deed
