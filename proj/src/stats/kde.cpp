#include "xbed/stats/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace xbed::stats {

double PdfEstimate::interpolate(double y) const {
    const Eigen::Index n = grid.size();
    if (y <= grid(0)) return density(0);
    if (y >= grid(n - 1)) return density(n - 1);
    const double* begin = grid.data();
    const auto it = std::upper_bound(begin, begin + n, y);
    const Eigen::Index hi = it - begin;
    const Eigen::Index lo = hi - 1;
    const double t = (y - grid(lo)) / (grid(hi) - grid(lo));
    return (1.0 - t) * density(lo) + t * density(hi);
}

Vector linspace(double lo, double hi, Eigen::Index n) {
    require(n >= 2, "linspace: need at least two points");
    return Vector::LinSpaced(n, lo, hi);
}

double effective_sample_size(const Eigen::Ref<const Vector>& weights) {
    const double s = weights.sum();
    const double s2 = weights.squaredNorm();
    return s2 > 0.0 ? s * s / s2 : 0.0;
}

namespace {

void check_inputs(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights) {
    require(values.size() == weights.size(), "weighted_kde: values and weights differ in length");
    require(values.size() >= 1, "weighted_kde: no samples");
    require((weights.array() >= 0.0).all(), "weighted_kde: negative weight");
    require(weights.sum() > 0.0, "weighted_kde: all weights are zero");
}

}  // namespace

double scott_bandwidth(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights) {
    check_inputs(values, weights);
    const Vector w = weights / weights.sum();
    const double mean = w.dot(values);
    const double sum_w2 = w.squaredNorm();
    const double denom = 1.0 - sum_w2;
    const double var = denom > 1e-12 ? w.dot((values.array() - mean).square().matrix()) / denom : 0.0;
    const double fallback = 1e-3 * std::max(1.0, std::abs(mean));
    if (!(var > 0.0) || !std::isfinite(var)) return fallback;
    const double h = std::pow(1.0 / sum_w2, -0.2) * std::sqrt(var);
    return h > 0.0 ? h : fallback;
}

PdfEstimate weighted_kde(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights,
                         const Eigen::Ref<const Vector>& grid) {
    return weighted_kde(values, weights, grid, scott_bandwidth(values, weights));
}

PdfEstimate weighted_kde(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights,
                         const Eigen::Ref<const Vector>& grid, double bandwidth) {
    check_inputs(values, weights);
    require(bandwidth > 0.0, "weighted_kde: bandwidth must be positive");
    require(grid.size() >= 1, "weighted_kde: empty grid");

    const double total = weights.sum();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values(a) < values(b); });
    std::vector<double> v(order.size()), w(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        v[i] = values(order[i]);
        w[i] = weights(order[i]) / total;
    }

    // exp(-z^2/2) underflows to exactly zero past this many bandwidths.
    constexpr double kCutoff = 38.7;
    const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
    PdfEstimate pdf;
    pdf.grid = grid;
    pdf.bandwidth = bandwidth;
    pdf.density.resize(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        const double y = grid(g);
        const auto lo = std::lower_bound(v.begin(), v.end(), y - kCutoff * bandwidth) - v.begin();
        const auto hi = std::upper_bound(v.begin(), v.end(), y + kCutoff * bandwidth) - v.begin();
        double acc = 0.0;
        for (auto i = lo; i < hi; ++i) {
            const double z = (y - v[static_cast<std::size_t>(i)]) / bandwidth;
            acc += w[static_cast<std::size_t>(i)] * std::exp(-0.5 * z * z);
        }
        pdf.density(g) = acc * norm;
    }
    return pdf;
}

Vector kde_grid(const Eigen::Ref<const Vector>& values, const Eigen::Ref<const Vector>& weights, Eigen::Index n_points,
                double pad_bandwidths) {
    const double h = scott_bandwidth(values, weights);
    return linspace(values.minCoeff() - pad_bandwidths * h, values.maxCoeff() + pad_bandwidths * h, n_points);
}

double log_pdf_error(const PdfEstimate& approx, const PdfEstimate& truth) {
    const Eigen::Index n = truth.grid.size();
    require(approx.grid.size() == n && approx.density.size() == n && truth.density.size() == n,
            "log_pdf_error: densities are not on the same grid");
    require(n >= 2, "log_pdf_error: grid needs at least two points");
    const double scale = std::max(truth.grid.cwiseAbs().maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < n; ++i)
        require(std::abs(approx.grid(i) - truth.grid(i)) <= 1e-12 * scale, "log_pdf_error: grid mismatch");

    const double threshold = kSupportFraction * truth.density.maxCoeff();
    Eigen::Index first = 0;
    while (first < n && !(truth.density(first) > threshold)) ++first;
    Eigen::Index last = n - 1;
    while (last > first && !(truth.density(last) > threshold)) --last;
    if (first >= last) return 0.0;

    auto integrand = [&](Eigen::Index i) {
        const double a = std::log10(std::max(approx.density(i), kLogFloor));
        const double t = std::log10(std::max(truth.density(i), kLogFloor));
        return std::abs(a - t);
    };
    double acc = 0.0;
    for (Eigen::Index i = first; i < last; ++i)
        acc += 0.5 * (integrand(i) + integrand(i + 1)) * (truth.grid(i + 1) - truth.grid(i));
    return acc;
}

}  // namespace xbed::stats
