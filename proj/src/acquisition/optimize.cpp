#include "xbed/acquisition/optimize.hpp"

#include "xbed/stats/lhs.hpp"
#include "xbed/stats/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace xbed::acquisition {

AcquisitionField score_candidates(const Acquisition& acq, Matrix candidates, Eigen::Index shard) {
    require(candidates.rows() >= 1, "score_candidates: no candidates");
    require(shard >= 1, "score_candidates: shard size must be positive");
    const Eigen::Index n = candidates.rows();
    Vector neg(n);
    for (Eigen::Index start = 0; start < n; start += shard) {
        const Eigen::Index len = std::min(shard, n - start);
        neg.segment(start, len) = -acq.log10_score(candidates.middleRows(start, len));
    }
    AcquisitionField field;
    const double worst = -std::log10(kDensityFloor);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(neg(i))) {
            // +inf (zero score) and NaN both go to the floor; -inf would mean an infinite score.
            neg(i) = std::isnan(neg(i)) || neg(i) > 0 ? worst : -worst;
            ++field.nonfinite;
        }
        neg(i) = std::min(neg(i), worst);
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return neg(a) < neg(b); });
    field.candidates.resize(n, candidates.cols());
    field.neg_log10_scores.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        field.candidates.row(i) = candidates.row(order[static_cast<std::size_t>(i)]);
        field.neg_log10_scores(i) = neg(order[static_cast<std::size_t>(i)]);
    }
    return field;
}

AcquisitionField mc_optimize(const Acquisition& acq, const stats::Bounds& bounds, Eigen::Index n_q, std::uint64_t seed,
                             CandidateDistribution dist) {
    require(n_q >= 1, "mc_optimize: n_q must be at least 1");
    Matrix candidates = dist == CandidateDistribution::Uniform ? stats::uniform_sample(n_q, bounds, seed)
                                                               : stats::prior_sample(n_q, bounds, seed);
    return score_candidates(acq, std::move(candidates));
}

double exclusion_radius(const stats::Bounds& bounds, double r_l) {
    require(r_l >= 0.0 && r_l < 1.0, "exclusion_radius: r_l must lie in [0, 1)");
    return r_l * bounds.diameter();
}

Batch batch_select(const AcquisitionField& field, Eigen::Index n_b, double r_min) {
    require(n_b >= 1, "batch_select: batch size must be at least 1");
    require(r_min >= 0.0, "batch_select: negative exclusion radius");
    std::vector<Eigen::Index> chosen;
    const double r2 = r_min * r_min;
    // Walking the sorted field and keeping candidates at distance >= r_min
    // from everything kept so far is the same as repeatedly taking the best
    // survivor and eliminating its neighbourhood.
    for (Eigen::Index i = 0; i < field.candidates.rows() && static_cast<Eigen::Index>(chosen.size()) < n_b; ++i) {
        bool ok = true;
        for (Eigen::Index c : chosen) {
            if ((field.candidates.row(i) - field.candidates.row(c)).squaredNorm() < r2) {
                ok = false;
                break;
            }
        }
        if (ok) chosen.push_back(i);
    }
    Batch batch;
    const auto k = static_cast<Eigen::Index>(chosen.size());
    batch.points.resize(k, field.candidates.cols());
    batch.log10_scores.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        batch.points.row(j) = field.candidates.row(chosen[static_cast<std::size_t>(j)]);
        batch.log10_scores(j) = -field.neg_log10_scores(chosen[static_cast<std::size_t>(j)]);
    }
    batch.exhausted = k < n_b;
    return batch;
}

}  // namespace xbed::acquisition
