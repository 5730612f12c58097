#pragma once

#include "xbed/common.hpp"
#include "xbed/stats/bounds.hpp"

#include <cstdint>

namespace xbed::stats {

// Factorized standard normal prior over the standardized coefficients.
class StandardNormalPrior {
public:
    explicit StandardNormalPrior(Eigen::Index dim) : dim_(dim) {}

    Eigen::Index dimension() const { return dim_; }

    double log_density_at(const Eigen::Ref<const Vector>& x) const;
    double density_at(const Eigen::Ref<const Vector>& x) const;

    // Row-wise over a matrix of points.
    Vector log_density(const Matrix& xs) const;
    Vector density(const Matrix& xs) const;

private:
    Eigen::Index dim_;
};

/// n draws from the prior truncated to the box, by per-coordinate rejection.
/// Coordinates whose interval holds almost no prior mass fall back to uniform.
Matrix prior_sample(Eigen::Index n, const Bounds& bounds, std::uint64_t seed);

}  // namespace xbed::stats
