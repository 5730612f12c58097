#include "xbed/systems/mmt.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace xbed::systems {

namespace {
// FFTW planning is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

void MmtConfig::validate() const {
    require(n_x >= 4 && (n_x & (n_x - 1)) == 0, "mmt: grid size must be a power of two");
    require(dt > 0.0 && horizon >= 0.0 && k_star >= 0.0 && alpha > 0.0, "mmt: invalid dt, horizon, k* or alpha");
    require(basis.is_complex && basis.n_sensors() == n_x, "mmt: need a complex basis on the solver grid");
    // The integrating factor treats dispersion and dissipation exactly; the
    // explicit part only sees the cubic term.
    const double k_max = std::numbers::pi * static_cast<double>(n_x);
    require(dt * std::pow(k_max, alpha) < 1e6, "mmt: time step too large for the dispersion scale");
}

long MmtConfig::n_steps() const { return std::lround(horizon / dt); }

MmtConfig make_mmt_config(Eigen::Index n_modes, const MmtKernel& kernel) {
    MmtConfig cfg;
    Vector grid(cfg.n_x);
    for (Eigen::Index j = 0; j < cfg.n_x; ++j) grid(j) = static_cast<double>(j) / static_cast<double>(cfg.n_x);
    cfg.basis = stats::kl_expand(stats::complex_wave_kernel(kernel.variance, kernel.length_scale), grid, n_modes);
    return cfg;
}

struct MmtSolver::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

MmtSolver::MmtSolver(const MmtConfig& cfg) : cfg_(cfg), plans_(std::make_unique<Plans>()) {
    cfg_.validate();
    const Eigen::Index n = cfg_.n_x;
    k_.resize(n);
    linear_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index m = j <= n / 2 ? j : j - n;
        k_(j) = 2.0 * std::numbers::pi * static_cast<double>(m);
        const double ak = std::abs(k_(j));
        const double damping = ak > cfg_.k_star ? -(ak - cfg_.k_star) * (ak - cfg_.k_star) : 0.0;
        linear_(j) = std::complex<double>(damping, -std::pow(ak, cfg_.alpha));
    }
    exp_full_ = (linear_ * cfg_.dt).array().exp();
    exp_half_ = (linear_ * (0.5 * cfg_.dt)).array().exp();
    ComplexVector a(n), b(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int ni = static_cast<int>(n);
    plans_->forward = fftw_plan_dft_1d(ni, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_1d(ni, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plans_->forward || !plans_->backward) throw NumericalFailure("mmt: FFT planning failed");
}

MmtSolver::~MmtSolver() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plans_->forward) fftw_destroy_plan(plans_->forward);
    if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

ComplexVector MmtSolver::to_spectral(const ComplexVector& physical) const {
    require(physical.size() == cfg_.n_x, "mmt: state size mismatch");
    ComplexVector in = physical;
    ComplexVector out(cfg_.n_x);
    fftw_execute_dft(plans_->forward, as_fftw(in.data()), as_fftw(out.data()));
    out /= static_cast<double>(cfg_.n_x);
    return out;
}

ComplexVector MmtSolver::to_physical(const ComplexVector& spectral) const {
    require(spectral.size() == cfg_.n_x, "mmt: state size mismatch");
    ComplexVector in = spectral;
    ComplexVector out(cfg_.n_x);
    fftw_execute_dft(plans_->backward, as_fftw(in.data()), as_fftw(out.data()));
    return out;
}

struct MmtSolver::Workspace {
    explicit Workspace(Eigen::Index n) : phys(n), spec(n), stage(n), a(n), b(n), c(n), d(n) {}
    ComplexVector phys, spec, stage, a, b, c, d;
};

void MmtSolver::nonlinear_into(const ComplexVector& spectral, ComplexVector& out, Workspace& ws) const {
    const Eigen::Index n = cfg_.n_x;
    fftw_execute_dft(plans_->backward, as_fftw(const_cast<std::complex<double>*>(spectral.data())),
                     as_fftw(ws.phys.data()));
    for (Eigen::Index j = 0; j < n; ++j) ws.phys(j) *= std::norm(ws.phys(j));
    fftw_execute_dft(plans_->forward, as_fftw(ws.phys.data()), as_fftw(out.data()));
    const std::complex<double> scale(0.0, -cfg_.lambda / static_cast<double>(n));
    if (cfg_.dealias) {
        const Eigen::Index keep = n / 3;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index m = j <= n / 2 ? j : n - j;
            out(j) = m > keep ? std::complex<double>(0.0, 0.0) : out(j) * scale;
        }
    } else {
        out *= scale;
    }
}

ComplexVector MmtSolver::nonlinear_term(const ComplexVector& spectral) const {
    require(spectral.size() == cfg_.n_x, "mmt: state size mismatch");
    if (cfg_.lambda == 0.0) return ComplexVector::Zero(cfg_.n_x);
    Workspace ws(cfg_.n_x);
    ComplexVector out(cfg_.n_x);
    nonlinear_into(spectral, out, ws);
    return out;
}

void MmtSolver::step_into(ComplexVector& u, double dt, const ComplexVector& e, const ComplexVector& e2,
                          Workspace& ws) const {
    const Eigen::Index n = cfg_.n_x;
    if (cfg_.lambda == 0.0) {
        u.array() *= e.array();
        return;
    }
    const double h2 = 0.5 * dt;
    nonlinear_into(u, ws.a, ws);
    for (Eigen::Index j = 0; j < n; ++j) ws.stage(j) = e2(j) * (u(j) + h2 * ws.a(j));
    nonlinear_into(ws.stage, ws.b, ws);
    for (Eigen::Index j = 0; j < n; ++j) ws.stage(j) = e2(j) * u(j) + h2 * ws.b(j);
    nonlinear_into(ws.stage, ws.c, ws);
    for (Eigen::Index j = 0; j < n; ++j) ws.stage(j) = e(j) * u(j) + dt * e2(j) * ws.c(j);
    nonlinear_into(ws.stage, ws.d, ws);
    const double h6 = dt / 6.0;
    for (Eigen::Index j = 0; j < n; ++j)
        u(j) = e(j) * u(j) + h6 * (e(j) * ws.a(j) + 2.0 * e2(j) * (ws.b(j) + ws.c(j)) + ws.d(j));
}

ComplexVector MmtSolver::step(const ComplexVector& u, double dt) const {
    require(u.size() == cfg_.n_x, "mmt: state size mismatch");
    Workspace ws(cfg_.n_x);
    ComplexVector out = u;
    if (dt == cfg_.dt) {
        step_into(out, dt, exp_full_, exp_half_, ws);
    } else {
        const ComplexVector e = (linear_ * dt).array().exp();
        const ComplexVector e2 = (linear_ * (0.5 * dt)).array().exp();
        step_into(out, dt, e, e2, ws);
    }
    return out;
}

ComplexVector MmtSolver::evolve(ComplexVector u, long n_steps) const {
    require(u.size() == cfg_.n_x, "mmt: state size mismatch");
    constexpr long kCheckEvery = 100;
    Workspace ws(cfg_.n_x);
    for (long s = 0; s < n_steps; ++s) {
        step_into(u, cfg_.dt, exp_full_, exp_half_, ws);
        if ((s + 1) % kCheckEvery == 0 || s + 1 == n_steps) {
            if (!u.allFinite())
                throw NumericalFailure("mmt: non-finite state at step " + std::to_string(s + 1));
        }
    }
    return u;
}

double mmt_qoi(const Eigen::Ref<const Vector>& x, const MmtConfig& cfg) {
    const MmtSolver solver(cfg);
    const ComplexVector u0 = stats::synthesize_field(x, cfg.basis);
    const ComplexVector u_t = solver.to_physical(solver.evolve(solver.to_spectral(u0), cfg.n_steps()));
    return u_t.real().cwiseAbs().maxCoeff();
}

MmtSystem::MmtSystem(MmtConfig cfg, stats::Bounds bounds, Eigen::Index sensor_stride)
    : cfg_(std::move(cfg)), bounds_(std::move(bounds)), stride_(sensor_stride) {
    cfg_.validate();
    require(bounds_.dimension() == cfg_.basis.parameter_dimension(), "mmt: bounds dimension does not match basis");
    sensor_basis_ = stats::subsample_sensors(cfg_.basis, sensor_stride);
    solver_ = std::make_unique<MmtSolver>(cfg_);
}

double MmtSystem::evaluate(const Eigen::Ref<const Vector>& x) const {
    const ComplexVector u0 = stats::synthesize_field(x, cfg_.basis);
    const ComplexVector u_t = solver_->to_physical(solver_->evolve(solver_->to_spectral(u0), cfg_.n_steps()));
    return u_t.real().cwiseAbs().maxCoeff();
}

Matrix MmtSystem::features(const Matrix& xs) const { return stats::field_features(xs, sensor_basis_); }

std::string MmtSystem::fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << "mmt alpha=" << cfg_.alpha << " lambda=" << cfg_.lambda << " kstar=" << cfg_.k_star << " nx=" << cfg_.n_x
       << " dt=" << cfg_.dt << " T=" << cfg_.horizon << " dealias=" << cfg_.dealias << " modes=" << cfg_.basis.n_modes()
       << " stride=" << stride_ << " lo=" << bounds_.lower.transpose() << " hi=" << bounds_.upper.transpose();
    std::uint64_t h = fnv1a(cfg_.basis.eigenvalues.data(), sizeof(double) * cfg_.basis.eigenvalues.size());
    h = fnv1a(cfg_.basis.modes.data(), sizeof(std::complex<double>) * cfg_.basis.modes.size(), h);
    os << " basis=" << hex64(h);
    return os.str();
}

}  // namespace xbed::systems
