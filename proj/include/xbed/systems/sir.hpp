#pragma once

#include "xbed/stats/kl_expansion.hpp"
#include "xbed/systems/system.hpp"

#include <atomic>
#include <vector>

namespace xbed::systems {

struct SirConfig {
    double gamma = 0.1;         // recovery rate [1/day]
    double delta = 0.0;         // immunity-loss rate [1/day]
    double beta0 = 3e-9;        // infection-rate scale
    double phi0 = 2.55;         // offset added to the random field
    double initial_infected = 50.0;
    double population = 1e8;
    double horizon = 45.0;      // days
    double dt = 0.1;            // days
    stats::RandomFieldBasis basis;

    void validate() const;
};

struct SirKernel {
    double variance = 0.1;
    double length_scale = 1.0;
    Eigen::Index n_sensors = 125;
};

/// Default configuration with a KL basis of `n_modes` modes over [0, horizon].
SirConfig make_sir_config(Eigen::Index n_modes, const SirKernel& kernel = {});

struct SirTrajectory {
    Vector t, susceptible, infected, recovered;
    std::size_t clamped_rate_evaluations = 0;
};

/// RK4 integration with beta(t) = beta0 (field(t) + phi0), linearly
/// interpolated between sensors and clamped at zero.
SirTrajectory sir_trajectory(const Eigen::Ref<const Vector>& x, const SirConfig& cfg);

struct SirResult {
    double infected = 0.0;
    std::size_t clamped_rate_evaluations = 0;
};

SirResult sir_qoi(const Eigen::Ref<const Vector>& x, const SirConfig& cfg);

class SirSystem final : public System {
public:
    SirSystem(SirConfig cfg, stats::Bounds bounds);

    std::string name() const override { return "sir"; }
    Eigen::Index dimension() const override { return cfg_.basis.parameter_dimension(); }
    const stats::Bounds& bounds() const override { return bounds_; }
    double evaluate(const Eigen::Ref<const Vector>& x) const override;
    Matrix features(const Matrix& xs) const override;
    std::string fingerprint() const override;

    const SirConfig& config() const { return cfg_; }
    std::size_t clamped_rate_evaluations() const { return clamped_.load(); }

private:
    SirConfig cfg_;
    stats::Bounds bounds_;
    mutable std::atomic<std::size_t> clamped_{0};
};

}  // namespace xbed::systems
