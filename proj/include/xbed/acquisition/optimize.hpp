#pragma once

#include "xbed/acquisition/acquisition.hpp"

namespace xbed::acquisition {

/// Scored candidates sorted by -log10 a(x) ascending (best first).
struct AcquisitionField {
    Matrix candidates;
    Vector neg_log10_scores;
    std::size_t nonfinite = 0;  // scores that were NaN/inf and got floored
};

enum class CandidateDistribution { Uniform, Prior };

/// Scores a given candidate set in shards of `shard` rows and sorts it.
AcquisitionField score_candidates(const Acquisition& acq, Matrix candidates, Eigen::Index shard = 16384);

/// Monte Carlo maximization: n_q candidates drawn in the box (uniformly, or
/// from the prior truncated to the box), scored and sorted.
AcquisitionField mc_optimize(const Acquisition& acq, const stats::Bounds& bounds, Eigen::Index n_q, std::uint64_t seed,
                             CandidateDistribution dist = CandidateDistribution::Uniform);

/// Exclusion radius r_l * sqrt(sum_d (upper_d - lower_d)^2).
double exclusion_radius(const stats::Bounds& bounds, double r_l);

struct Batch {
    Matrix points;
    Vector log10_scores;  // non-increasing
    bool exhausted = false;  // pool ran out before n_b points
};

/// Greedy selection: best remaining candidate, drop everything closer than
/// r_min to it, repeat until n_b points are chosen.
Batch batch_select(const AcquisitionField& field, Eigen::Index n_b, double r_min);

}  // namespace xbed::acquisition
