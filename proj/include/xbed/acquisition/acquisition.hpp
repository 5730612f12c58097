#pragma once

#include "xbed/common.hpp"
#include "xbed/stats/bounds.hpp"
#include "xbed/stats/kde.hpp"
#include "xbed/stats/prior.hpp"
#include "xbed/surrogate.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace xbed::acquisition {

inline constexpr double kDensityFloor = 1e-300;

/// Density of the surrogate's output when inputs follow the prior: weighted
/// KDE of density_map(probes) / e0 with prior weights on the probes.
stats::PdfEstimate output_density(const Surrogate& surrogate, const Matrix& probes, const stats::StandardNormalPrior& prior,
                                  double e0, Eigen::Index grid_points);

/// Normalized prior weights exp(log p - max log p); immune to underflow.
Vector prior_weights(const Matrix& xs, const stats::StandardNormalPrior& prior);

struct DangerStats {
    std::size_t off_grid = 0;  // mu values outside the density grid (edge density used)
};

/// log10 w = log10 p_x - log10 p_mu(mu), p_mu floored at 1e-300.
Vector log10_danger(const Vector& log_px, const Vector& mu, const stats::PdfEstimate& p_mu, DangerStats* stats = nullptr);

/// w(x) = p_x(x) / p_mu(mu(x)) with mu the surrogate's density map / e0.
Vector danger_score(const Matrix& xs, const Surrogate& surrogate, const stats::PdfEstimate& p_mu,
                    const stats::StandardNormalPrior& prior, double e0 = 1.0, DangerStats* stats = nullptr);

/// An acquisition function scored in log10 units (larger is better).
class Acquisition {
public:
    virtual ~Acquisition() = default;
    virtual std::string name() const = 0;
    virtual Vector log10_score(const Matrix& xs) const = 0;
};

/// a(x) = sigma^2(x).
class UncertaintySampling final : public Acquisition {
public:
    explicit UncertaintySampling(std::shared_ptr<const Surrogate> surrogate) : surrogate_(std::move(surrogate)) {}
    std::string name() const override { return "us"; }
    Vector log10_score(const Matrix& xs) const override;

private:
    std::shared_ptr<const Surrogate> surrogate_;
};

/// a(x) = w(x) sigma^2(x).
class LikelihoodWeightedUS final : public Acquisition {
public:
    LikelihoodWeightedUS(std::shared_ptr<const Surrogate> surrogate, stats::PdfEstimate p_mu,
                         stats::StandardNormalPrior prior, double e0 = 1.0)
        : surrogate_(std::move(surrogate)), p_mu_(std::move(p_mu)), prior_(prior), e0_(e0) {}
    std::string name() const override { return "uslw"; }
    Vector log10_score(const Matrix& xs) const override;

    std::size_t off_grid_count() const { return off_grid_; }

private:
    std::shared_ptr<const Surrogate> surrogate_;
    stats::PdfEstimate p_mu_;
    stats::StandardNormalPrior prior_;
    double e0_;
    mutable std::size_t off_grid_ = 0;
};

/// Raw scores from log10 scores.
Vector us_scores(const Surrogate& surrogate, const Matrix& xs);
Vector uslw_scores(const Surrogate& surrogate, const Matrix& xs, const stats::PdfEstimate& p_mu,
                   const stats::StandardNormalPrior& prior, double e0 = 1.0);

}  // namespace xbed::acquisition
