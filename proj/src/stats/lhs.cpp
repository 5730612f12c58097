#include "xbed/stats/lhs.hpp"

#include "xbed/stats/random.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace xbed::stats {

Matrix lhs_sample(Eigen::Index n, const Bounds& bounds, std::uint64_t seed) {
    require(n >= 1, "lhs_sample: n must be at least 1");
    const Eigen::Index dim = bounds.dimension();
    require(dim >= 1, "lhs_sample: zero-dimension bounds");

    Rng rng(seed);
    Matrix out(n, dim);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    // Keep the jitter strictly inside its stratum even after rounding.
    constexpr double kMaxJitter = 1.0 - 1e-9;
    for (Eigen::Index d = 0; d < dim; ++d) {
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        const double lo = bounds.lower(d);
        const double w = bounds.upper(d) - lo;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = std::min(rng.uniform(), kMaxJitter);
            out(i, d) = lo + w * (static_cast<double>(perm[static_cast<std::size_t>(i)]) + u) / static_cast<double>(n);
        }
    }
    return out;
}

Matrix uniform_sample(Eigen::Index n, const Bounds& bounds, std::uint64_t seed) {
    require(n >= 1, "uniform_sample: n must be at least 1");
    const Eigen::Index dim = bounds.dimension();
    require(dim >= 1, "uniform_sample: zero-dimension bounds");
    Rng rng(seed);
    Matrix out(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index d = 0; d < dim; ++d) out(i, d) = rng.uniform(bounds.lower(d), bounds.upper(d));
    return out;
}

}  // namespace xbed::stats
