#pragma once

#include "xbed/common.hpp"

namespace xbed::stats {

struct PdfEstimate {
    Vector grid;
    Vector density;
    double bandwidth = 0.0;

    // Linear interpolation on the grid; points outside take the edge value.
    double interpolate(double y) const;
    bool on_grid(double y) const { return y >= grid(0) && y <= grid(grid.size() - 1); }
};

Vector linspace(double lo, double hi, Eigen::Index n);

/// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(const Eigen::Ref<const Vector>& weights);

/// Scott bandwidth n_eff^(-1/5) * weighted std, using the frequency-weight
/// unbiased variance. Degenerate data (zero spread or a single effective
/// sample) falls back to 1e-3 * max(1, |weighted mean|).
double scott_bandwidth(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights);

/// Gaussian KDE with weights normalized to unit sum, evaluated on `grid`.
PdfEstimate weighted_kde(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights,
                         const Eigen::Ref<const Vector>& grid);

/// Same, with an explicit bandwidth.
PdfEstimate weighted_kde(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights,
                         const Eigen::Ref<const Vector>& grid, double bandwidth);

/// Grid spanning [min - pad*h, max + pad*h] for the bandwidth h of the data.
Vector kde_grid(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights,
                Eigen::Index n_points, double pad_bandwidths = 5.0);

inline constexpr double kLogFloor = 1e-16;
inline constexpr double kSupportFraction = 1e-12;

/// Integral of |log10 p_approx - log10 p_true| by the trapezoid rule. Both
/// densities are floored at 1e-16 and the integral runs over the contiguous
/// range where p_true exceeds 1e-12 of its peak.
double log_pdf_error(const PdfEstimate& approx, const PdfEstimate& truth);

}  // namespace xbed::stats
