#pragma once

#include "semiconj/types.hpp"

#include <cstdint>
#include <vector>

namespace semiconj {

/// Deterministic unit directions used by the infimum samplers and the
/// star-shapedness validator. For n = 1 the two signs alternate, n = 2 uses
/// uniformly spaced angles, n = 3 a Fibonacci sphere; n > 3 falls back to a
/// quasi-random (Kronecker/Box-Muller) construction. The seed rotates or
/// shifts the pattern without changing its coverage.
std::vector<Vec> unit_directions(int dimension, int count, std::uint64_t seed = 0);

/// k-th point of the d-dimensional Kronecker (generalized golden ratio)
/// low-discrepancy sequence in [0,1)^d, shifted deterministically by `seed`.
std::vector<double> kronecker_point(std::uint64_t k, int dim, std::uint64_t seed = 0);

/// Sampler seed: SEMICONJ_SEED from the environment when set, else `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback = 0);

}  // namespace semiconj
