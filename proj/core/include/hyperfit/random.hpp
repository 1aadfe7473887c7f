#pragma once

#include "hyperfit/geometry.hpp"

#include <cstdint>
#include <random>

namespace hyperfit {

using Rng = std::mt19937_64;

/// Derives an independent sub-seed for stream `stream` of `seed` (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniformly distributed unit vector (normalised Gaussian sample).
Vector random_unit_vector(Eigen::Index dim, Rng& rng);

}  // namespace hyperfit
