#pragma once

#include "xbed/common.hpp"

namespace xbed::stats {

// Axis-aligned box [lower, upper] in the search space.
struct Bounds {
    Vector lower;
    Vector upper;

    Bounds() = default;
    Bounds(Vector lo, Vector hi);

    static Bounds uniform(Eigen::Index dim, double lo, double hi);

    Eigen::Index dimension() const { return lower.size(); }
    Vector width() const { return upper - lower; }
    // Euclidean length of the box diagonal.
    double diameter() const;
    bool contains(const Eigen::Ref<const Vector>& x, double slack = 0.0) const;
};

}  // namespace xbed::stats
