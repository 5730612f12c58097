#pragma once

#include "xbed/common.hpp"
#include "xbed/surrogate.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <utility>

namespace xbed::gp {

/// Hyperparameters of the RBF-ARD kernel
///   k(x, x') = signal_variance * exp(-sum_d (x_d - x'_d)^2 / (2 lengthscales2_d))
/// plus i.i.d. observation noise and a constant mean.
struct GpHyperparameters {
    Vector lengthscales2;  // squared lengthscales, one per dimension
    double signal_variance = 1.0;
    double noise_variance = 1e-8;
    double mean = 0.0;
};

struct GpFitOptions {
    int restarts = 5;
    int max_iterations = 200;
    double gradient_tolerance = 1e-6;
};

class GpModel final : public Surrogate {
public:
    /// Conditions on the data with fixed hyperparameters (original units).
    GpModel(Matrix inputs, Vector targets, GpHyperparameters hyper);

    Eigen::Index dimension() const { return inputs_.cols(); }
    Eigen::Index size() const { return inputs_.rows(); }
    const GpHyperparameters& hyperparameters() const { return hyper_; }
    const Matrix& inputs() const { return inputs_; }
    const Vector& targets() const { return targets_; }

    /// Posterior mean and variance at one point; variance clamped at zero.
    std::pair<double, double> posterior(const Eigen::Ref<const Vector>& x) const;

    Prediction predict(const Matrix& xs) const override;
    Vector density_map(const Matrix& xs) const override { return predict(xs).mean; }

    double log_marginal_likelihood() const;
    double jitter() const { return jitter_; }

private:
    Matrix inputs_;
    Vector targets_;
    GpHyperparameters hyper_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Vector alpha_;
    double jitter_ = 0.0;
};

Eigen::MatrixXd rbf_ard(const Matrix& a, const Matrix& b, const Vector& lengthscales2, double signal_variance);

/// Log-space hyperparameter vector [log l2_1..D, log sf2, log(sn2 - floor)].
inline constexpr double kNoiseFloor = 1e-8;

GpHyperparameters unpack(const Vector& theta, double mean = 0.0);
Vector pack(const GpHyperparameters& hyper);

/// Log marginal likelihood of (inputs, targets) with zero mean at `theta`,
/// with its gradient in theta when `grad` is non-null.
double log_marginal_likelihood(const Matrix& inputs, const Vector& targets, const Vector& theta, Vector* grad);

/// Maximum-likelihood fit with multi-start BFGS in log space. Targets are
/// standardized internally; the returned model is in original units.
GpModel gp_fit(const Matrix& inputs, const Vector& targets, const GpFitOptions& opts, std::uint64_t seed);

}  // namespace xbed::gp
