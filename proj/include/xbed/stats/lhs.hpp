#pragma once

#include "xbed/common.hpp"
#include "xbed/stats/bounds.hpp"

#include <cstdint>

namespace xbed::stats {

/// Latin hypercube design: n rows, exactly one row in each of the n
/// equal-width strata of every dimension. Deterministic for a fixed seed.
Matrix lhs_sample(Eigen::Index n, const Bounds& bounds, std::uint64_t seed);

/// n points drawn uniformly in the box. Rows are generated sequentially, so
/// the first k rows for a given seed are the same for every n >= k.
Matrix uniform_sample(Eigen::Index n, const Bounds& bounds, std::uint64_t seed);

}  // namespace xbed::stats
