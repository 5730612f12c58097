#include "xbed/systems/sir.hpp"

#include <cmath>
#include <sstream>

namespace xbed::systems {

void SirConfig::validate() const {
    require(gamma > 0.0 && beta0 >= 0.0 && dt > 0.0 && horizon > 0.0 && population > 0.0,
            "sir: gamma, dt, horizon and population must be positive, beta0 nonnegative");
    require(delta >= 0.0 && initial_infected >= 0.0 && initial_infected <= population, "sir: invalid delta or I0");
    require(basis.n_sensors() >= 2 && !basis.is_complex, "sir: need a real basis with at least two sensors");
}

SirConfig make_sir_config(Eigen::Index n_modes, const SirKernel& kernel) {
    SirConfig cfg;
    const Vector grid = Vector::LinSpaced(kernel.n_sensors, 0.0, cfg.horizon);
    cfg.basis = stats::kl_expand(stats::rbf_kernel(kernel.variance, kernel.length_scale), grid, n_modes);
    return cfg;
}

namespace {

class RateFunction {
public:
    RateFunction(const Eigen::Ref<const Vector>& x, const SirConfig& cfg)
        : grid_(cfg.basis.sensor_grid), field_(stats::synthesize_real_field(x, cfg.basis)), cfg_(cfg) {}

    double operator()(double t, std::size_t& clamped) const {
        const Eigen::Index n = grid_.size();
        double f;
        if (t <= grid_(0)) {
            f = field_(0);
        } else if (t >= grid_(n - 1)) {
            f = field_(n - 1);
        } else {
            // Sensors are uniformly spaced.
            const double pos = (t - grid_(0)) / (grid_(n - 1) - grid_(0)) * static_cast<double>(n - 1);
            auto j = static_cast<Eigen::Index>(pos);
            if (j >= n - 1) j = n - 2;
            const double s = (t - grid_(j)) / (grid_(j + 1) - grid_(j));
            f = (1.0 - s) * field_(j) + s * field_(j + 1);
        }
        const double beta = cfg_.beta0 * (f + cfg_.phi0);
        if (beta < 0.0) {
            ++clamped;
            return 0.0;
        }
        return beta;
    }

private:
    const Vector& grid_;
    Vector field_;
    const SirConfig& cfg_;
};

struct State {
    double s, i, r;
};

State rhs(const State& y, double beta, const SirConfig& cfg) {
    const double infection = beta * y.i * y.s;
    return {-infection + cfg.delta * y.r, infection - cfg.gamma * y.i, cfg.gamma * y.i - cfg.delta * y.r};
}

State axpy(const State& y, double h, const State& k) { return {y.s + h * k.s, y.i + h * k.i, y.r + h * k.r}; }

template <typename Visit>
std::size_t integrate(const Eigen::Ref<const Vector>& x, const SirConfig& cfg, Visit&& visit) {
    require(x.size() == cfg.basis.parameter_dimension(), "sir_qoi: parameter dimension mismatch");
    const RateFunction beta(x, cfg);
    const long n_steps = std::lround(cfg.horizon / cfg.dt);
    std::size_t clamped = 0;
    State y{cfg.population - cfg.initial_infected, cfg.initial_infected, 0.0};
    visit(0, 0.0, y);
    for (long n = 0; n < n_steps; ++n) {
        const double t = static_cast<double>(n) * cfg.dt;
        const double h = cfg.dt;
        const double b0 = beta(t, clamped);
        const double bh = beta(t + 0.5 * h, clamped);
        const double b1 = beta(t + h, clamped);
        const State k1 = rhs(y, b0, cfg);
        const State k2 = rhs(axpy(y, 0.5 * h, k1), bh, cfg);
        const State k3 = rhs(axpy(y, 0.5 * h, k2), bh, cfg);
        const State k4 = rhs(axpy(y, h, k3), b1, cfg);
        y.s += h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
        y.i += h / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
        y.r += h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
        visit(n + 1, t + h, y);
    }
    return clamped;
}

}  // namespace

SirTrajectory sir_trajectory(const Eigen::Ref<const Vector>& x, const SirConfig& cfg) {
    cfg.validate();
    const long n_steps = std::lround(cfg.horizon / cfg.dt);
    SirTrajectory out;
    out.t.resize(n_steps + 1);
    out.susceptible.resize(n_steps + 1);
    out.infected.resize(n_steps + 1);
    out.recovered.resize(n_steps + 1);
    out.clamped_rate_evaluations = integrate(x, cfg, [&](long n, double t, const State& y) {
        out.t(n) = t;
        out.susceptible(n) = y.s;
        out.infected(n) = y.i;
        out.recovered(n) = y.r;
    });
    return out;
}

SirResult sir_qoi(const Eigen::Ref<const Vector>& x, const SirConfig& cfg) {
    cfg.validate();
    SirResult res;
    res.clamped_rate_evaluations = integrate(x, cfg, [&](long, double, const State& y) { res.infected = y.i; });
    return res;
}

SirSystem::SirSystem(SirConfig cfg, stats::Bounds bounds) : cfg_(std::move(cfg)), bounds_(std::move(bounds)) {
    cfg_.validate();
    require(bounds_.dimension() == cfg_.basis.parameter_dimension(), "sir: bounds dimension does not match basis");
}

double SirSystem::evaluate(const Eigen::Ref<const Vector>& x) const {
    const SirResult r = sir_qoi(x, cfg_);
    clamped_ += r.clamped_rate_evaluations;
    return r.infected;
}

Matrix SirSystem::features(const Matrix& xs) const { return stats::field_features(xs, cfg_.basis); }

std::string SirSystem::fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << "sir gamma=" << cfg_.gamma << " delta=" << cfg_.delta << " beta0=" << cfg_.beta0 << " phi0=" << cfg_.phi0
       << " I0=" << cfg_.initial_infected << " P=" << cfg_.population << " T=" << cfg_.horizon << " dt=" << cfg_.dt
       << " modes=" << cfg_.basis.n_modes() << " lo=" << bounds_.lower.transpose() << " hi=" << bounds_.upper.transpose();
    std::uint64_t h = fnv1a(cfg_.basis.eigenvalues.data(), sizeof(double) * cfg_.basis.eigenvalues.size());
    h = fnv1a(cfg_.basis.modes.data(), sizeof(std::complex<double>) * cfg_.basis.modes.size(), h);
    os << " basis=" << hex64(h);
    return os.str();
}

}  // namespace xbed::systems
