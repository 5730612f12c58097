#include "xbed/stats/prior.hpp"

#include "xbed/stats/random.hpp"

#include <cmath>
#include <numbers>

namespace xbed::stats {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

double StandardNormalPrior::log_density_at(const Eigen::Ref<const Vector>& x) const {
    require(x.size() == dim_, "prior_density: dimension mismatch");
    return -0.5 * x.squaredNorm() - static_cast<double>(dim_) * kHalfLog2Pi;
}

double StandardNormalPrior::density_at(const Eigen::Ref<const Vector>& x) const { return std::exp(log_density_at(x)); }

Vector StandardNormalPrior::log_density(const Matrix& xs) const {
    require(xs.cols() == dim_, "prior_density: dimension mismatch");
    return (-0.5 * xs.rowwise().squaredNorm()).array() - static_cast<double>(dim_) * kHalfLog2Pi;
}

Vector StandardNormalPrior::density(const Matrix& xs) const { return log_density(xs).array().exp(); }

Matrix prior_sample(Eigen::Index n, const Bounds& bounds, std::uint64_t seed) {
    require(n >= 0, "prior_sample: negative count");
    Rng rng(seed);
    Matrix out(n, bounds.dimension());
    constexpr int kMaxTries = 1000;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index d = 0; d < bounds.dimension(); ++d) {
            double v = 0.0;
            int tries = 0;
            do {
                v = rng.normal();
            } while ((v < bounds.lower(d) || v > bounds.upper(d)) && ++tries < kMaxTries);
            if (tries >= kMaxTries) v = rng.uniform(bounds.lower(d), bounds.upper(d));
            out(i, d) = v;
        }
    }
    return out;
}

}  // namespace xbed::stats
