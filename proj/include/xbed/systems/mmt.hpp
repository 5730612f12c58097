#pragma once

#include "xbed/stats/kl_expansion.hpp"
#include "xbed/systems/system.hpp"

#include <memory>

namespace xbed::systems {

using stats::ComplexVector;

struct MmtConfig {
    double alpha = 0.5;        // dispersion exponent
    double lambda = -0.5;      // nonlinearity coefficient
    double k_star = 20.0;      // dissipation cutoff wavenumber
    Eigen::Index n_x = 512;    // grid points on the periodic unit interval
    double dt = 0.001;
    double horizon = 20.0;
    bool dealias = true;       // 2/3 rule on the cubic term
    stats::RandomFieldBasis basis;  // complex KL basis on the n_x grid

    void validate() const;
    long n_steps() const;
};

struct MmtKernel {
    double variance = 1.0;
    double length_scale = 0.35;
};

/// Default configuration with a complex KL basis of `n_modes` modes on the
/// solver grid (parameter dimension 2 * n_modes).
MmtConfig make_mmt_config(Eigen::Index n_modes, const MmtKernel& kernel = {});

/// Pseudo-spectral integrator. State is held as Fourier coefficients
/// u_hat(n) = (1/N) sum_j u_j exp(-2 pi i n j / N), in FFT order.
class MmtSolver {
public:
    explicit MmtSolver(const MmtConfig& cfg);
    ~MmtSolver();
    MmtSolver(const MmtSolver&) = delete;
    MmtSolver& operator=(const MmtSolver&) = delete;

    const Vector& wavenumbers() const { return k_; }
    /// Linear operator -i|k|^alpha + D(k) per mode.
    const ComplexVector& linear_operator() const { return linear_; }

    ComplexVector to_spectral(const ComplexVector& physical) const;
    ComplexVector to_physical(const ComplexVector& spectral) const;

    /// One integrating-factor RK4 step of size dt.
    ComplexVector step(const ComplexVector& spectral, double dt) const;
    ComplexVector step(const ComplexVector& spectral) const { return step(spectral, cfg_.dt); }

    /// Advance `n_steps` steps; throws NumericalFailure on a non-finite state.
    ComplexVector evolve(ComplexVector spectral, long n_steps) const;

    /// -i lambda FFT(|u|^2 u), dealiased.
    ComplexVector nonlinear_term(const ComplexVector& spectral) const;

    const MmtConfig& config() const { return cfg_; }

private:
    struct Plans;
    struct Workspace;
    void nonlinear_into(const ComplexVector& spectral, ComplexVector& out, Workspace& ws) const;
    void step_into(ComplexVector& u, double dt, const ComplexVector& e, const ComplexVector& e2, Workspace& ws) const;

    MmtConfig cfg_;
    Vector k_;
    ComplexVector linear_;
    ComplexVector exp_full_, exp_half_;
    std::unique_ptr<Plans> plans_;
};

/// max_j |Re u(x_j, T)| for the initial condition synthesized from x.
double mmt_qoi(const Eigen::Ref<const Vector>& x, const MmtConfig& cfg);

class MmtSystem final : public System {
public:
    /// `sensor_stride` selects the operator-network sensors from the solver grid.
    MmtSystem(MmtConfig cfg, stats::Bounds bounds, Eigen::Index sensor_stride = 4);

    std::string name() const override { return "mmt"; }
    Eigen::Index dimension() const override { return cfg_.basis.parameter_dimension(); }
    const stats::Bounds& bounds() const override { return bounds_; }
    double evaluate(const Eigen::Ref<const Vector>& x) const override;
    Matrix features(const Matrix& xs) const override;
    std::string fingerprint() const override;

    const MmtConfig& config() const { return cfg_; }

private:
    MmtConfig cfg_;
    stats::Bounds bounds_;
    stats::RandomFieldBasis sensor_basis_;
    Eigen::Index stride_;
    std::unique_ptr<MmtSolver> solver_;
};

}  // namespace xbed::systems
