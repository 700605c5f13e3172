#pragma once

#include <cstdint>

#include "roughsde/grid_path.hpp"

namespace roughsde {

// Exact-in-distribution fractional Brownian motion on the grid, B_0 = 0,
// via circulant embedding of the fGn covariance (Davies-Harte). Identical
// (H, grid, seed) always reproduces the identical path.
// H in (0,1); throws std::invalid_argument otherwise. Throws InternalError
// if the embedding produces an eigenvalue below -1e-10 (does not happen for
// fGn, kept as a guard).
GridPath sample_fbm(double H, const Grid& grid, std::uint64_t seed);

}  // namespace roughsde
