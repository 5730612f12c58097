#include "xbed/acquisition/acquisition.hpp"

#include <cmath>

namespace xbed::acquisition {

Vector prior_weights(const Matrix& xs, const stats::StandardNormalPrior& prior) {
    const Vector lp = prior.log_density(xs);
    return (lp.array() - lp.maxCoeff()).exp();
}

stats::PdfEstimate output_density(const Surrogate& surrogate, const Matrix& probes, const stats::StandardNormalPrior& prior,
                                  double e0, Eigen::Index grid_points) {
    require(e0 > 0.0, "output_density: e0 must be positive");
    const Vector mu = surrogate.density_map(probes) / e0;
    const Vector w = prior_weights(probes, prior);
    return stats::weighted_kde(mu, w, stats::kde_grid(mu, w, grid_points));
}

Vector log10_danger(const Vector& log_px, const Vector& mu, const stats::PdfEstimate& p_mu, DangerStats* stats) {
    require(log_px.size() == mu.size(), "danger_score: size mismatch");
    Vector out(mu.size());
    std::size_t off = 0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (!p_mu.on_grid(mu(i))) ++off;
        const double pm = std::max(p_mu.interpolate(mu(i)), kDensityFloor);
        out(i) = log_px(i) / std::log(10.0) - std::log10(pm);
    }
    if (stats) stats->off_grid += off;
    return out;
}

Vector danger_score(const Matrix& xs, const Surrogate& surrogate, const stats::PdfEstimate& p_mu,
                    const stats::StandardNormalPrior& prior, double e0, DangerStats* stats) {
    const Vector mu = surrogate.density_map(xs) / e0;
    return log10_danger(prior.log_density(xs), mu, p_mu, stats).unaryExpr([](double v) { return std::pow(10.0, v); });
}

namespace {
Vector log10_floored(const Vector& v) {
    return v.unaryExpr([](double x) { return std::log10(std::max(x, kDensityFloor)); });
}
}  // namespace

Vector UncertaintySampling::log10_score(const Matrix& xs) const {
    return log10_floored(surrogate_->predict(xs).variance);
}

Vector LikelihoodWeightedUS::log10_score(const Matrix& xs) const {
    const Surrogate::Evaluation ev = surrogate_->evaluate(xs);
    DangerStats st;
    const Vector lw = log10_danger(prior_.log_density(xs), ev.density_map / e0_, p_mu_, &st);
    off_grid_ += st.off_grid;
    return lw + log10_floored(ev.prediction.variance);
}

Vector us_scores(const Surrogate& surrogate, const Matrix& xs) { return surrogate.predict(xs).variance; }

Vector uslw_scores(const Surrogate& surrogate, const Matrix& xs, const stats::PdfEstimate& p_mu,
                   const stats::StandardNormalPrior& prior, double e0) {
    return danger_score(xs, surrogate, p_mu, prior, e0).cwiseProduct(surrogate.predict(xs).variance);
}

}  // namespace xbed::acquisition
