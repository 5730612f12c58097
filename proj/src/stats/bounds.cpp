#include "xbed/stats/bounds.hpp"

namespace xbed::stats {

Bounds::Bounds(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    require(lower.size() == upper.size(), "bounds: lower/upper length mismatch");
    require(lower.size() > 0, "bounds: zero dimension");
    for (Eigen::Index d = 0; d < lower.size(); ++d)
        require(lower(d) < upper(d), "bounds: lower must be below upper in every dimension");
}

Bounds Bounds::uniform(Eigen::Index dim, double lo, double hi) {
    return Bounds(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

double Bounds::diameter() const { return width().norm(); }

bool Bounds::contains(const Eigen::Ref<const Vector>& x, double slack) const {
    if (x.size() != dimension()) return false;
    for (Eigen::Index d = 0; d < x.size(); ++d)
        if (x(d) < lower(d) - slack || x(d) > upper(d) + slack) return false;
    return true;
}

}  // namespace xbed::stats
