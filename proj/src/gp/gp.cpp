#include "xbed/gp/gp.hpp"

#include "xbed/stats/random.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace xbed::gp {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

// Cholesky of k + jitter*I, climbing the jitter ladder until it succeeds.
bool factor_with_jitter(const Eigen::MatrixXd& k, Eigen::LLT<Eigen::MatrixXd>& llt, double& jitter) {
    llt.compute(k);
    jitter = 0.0;
    if (llt.info() == Eigen::Success) return true;
    const double scale = std::max(k.diagonal().mean(), 1e-300);
    for (double j = kJitterStart; j <= kJitterMax * 1.0001; j *= 10.0) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += j * scale;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) {
            jitter = j * scale;
            return true;
        }
    }
    return false;
}

}  // namespace

Eigen::MatrixXd rbf_ard(const Matrix& a, const Matrix& b, const Vector& lengthscales2, double signal_variance) {
    require(a.cols() == lengthscales2.size() && b.cols() == lengthscales2.size(), "rbf_ard: dimension mismatch");
    const Vector inv_scale = lengthscales2.cwiseInverse().cwiseSqrt();
    const Matrix as = a * inv_scale.asDiagonal();
    const Matrix bs = b * inv_scale.asDiagonal();
    Eigen::MatrixXd d2 = (-2.0 * as * bs.transpose()).colwise() + as.rowwise().squaredNorm();
    d2.rowwise() += bs.rowwise().squaredNorm().transpose();
    return signal_variance * (-0.5 * d2.cwiseMax(0.0)).array().exp().matrix();
}

GpHyperparameters unpack(const Vector& theta, double mean) {
    const Eigen::Index d = theta.size() - 2;
    require(d >= 1, "gp: hyperparameter vector too short");
    GpHyperparameters h;
    h.lengthscales2 = theta.head(d).array().exp();
    h.signal_variance = std::exp(theta(d));
    h.noise_variance = kNoiseFloor + std::exp(theta(d + 1));
    h.mean = mean;
    return h;
}

Vector pack(const GpHyperparameters& hyper) {
    const Eigen::Index d = hyper.lengthscales2.size();
    Vector theta(d + 2);
    theta.head(d) = hyper.lengthscales2.array().log();
    theta(d) = std::log(hyper.signal_variance);
    theta(d + 1) = std::log(std::max(hyper.noise_variance - kNoiseFloor, 1e-300));
    return theta;
}

GpModel::GpModel(Matrix inputs, Vector targets, GpHyperparameters hyper)
    : inputs_(std::move(inputs)), targets_(std::move(targets)), hyper_(std::move(hyper)) {
    require(inputs_.rows() >= 1 && inputs_.rows() == targets_.size(), "gp: need matching, non-empty data");
    require(hyper_.lengthscales2.size() == inputs_.cols(), "gp: lengthscale count does not match dimension");
    require((hyper_.lengthscales2.array() > 0.0).all() && hyper_.signal_variance > 0.0 && hyper_.noise_variance >= 0.0,
            "gp: hyperparameters must be positive");
    Eigen::MatrixXd k = rbf_ard(inputs_, inputs_, hyper_.lengthscales2, hyper_.signal_variance);
    k.diagonal().array() += hyper_.noise_variance;
    if (!factor_with_jitter(k, chol_, jitter_))
        throw NumericalFailure("gp: kernel matrix not positive definite after jitter 1e-4");
    alpha_ = chol_.solve((targets_.array() - hyper_.mean).matrix());
}

std::pair<double, double> GpModel::posterior(const Eigen::Ref<const Vector>& x) const {
    require(x.size() == dimension(), "gp_posterior: dimension mismatch");
    Matrix q = x.transpose();
    const Prediction p = predict(q);
    return {p.mean(0), p.variance(0)};
}

Prediction GpModel::predict(const Matrix& xs) const {
    require(xs.cols() == dimension(), "gp_posterior: dimension mismatch");
    const Eigen::MatrixXd ks = rbf_ard(xs, inputs_, hyper_.lengthscales2, hyper_.signal_variance);
    Prediction p;
    p.mean = (ks * alpha_).array() + hyper_.mean;
    const Eigen::MatrixXd v = chol_.matrixL().solve(ks.transpose());
    p.variance = (hyper_.signal_variance - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);
    return p;
}

double GpModel::log_marginal_likelihood() const {
    const Vector r = (targets_.array() - hyper_.mean).matrix();
    const double n = static_cast<double>(size());
    const Eigen::MatrixXd l = chol_.matrixL();
    return -0.5 * r.dot(alpha_) - l.diagonal().array().log().sum() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

double log_marginal_likelihood(const Matrix& inputs, const Vector& targets, const Vector& theta, Vector* grad) {
    const Eigen::Index d = inputs.cols();
    const Eigen::Index n = inputs.rows();
    require(theta.size() == d + 2, "gp: hyperparameter vector length mismatch");
    const GpHyperparameters h = unpack(theta);
    const Eigen::MatrixXd kf = rbf_ard(inputs, inputs, h.lengthscales2, h.signal_variance);
    Eigen::MatrixXd k = kf;
    k.diagonal().array() += h.noise_variance;
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
    if (!factor_with_jitter(k, llt, jitter)) throw NumericalFailure("gp: kernel matrix not positive definite");
    const Vector alpha = llt.solve(targets);
    const Eigen::MatrixXd l = llt.matrixL();
    const double lml = -0.5 * targets.dot(alpha) - l.diagonal().array().log().sum() -
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    if (grad) {
        // dL/dtheta_j = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta_j)
        const Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
        const Eigen::MatrixXd w = alpha * alpha.transpose() - kinv;
        grad->resize(d + 2);
        for (Eigen::Index dim = 0; dim < d; ++dim) {
            const Eigen::VectorXd c = inputs.col(dim);
            Eigen::MatrixXd diff2 = (c.replicate(1, n) - c.transpose().replicate(n, 1)).array().square();
            const Eigen::MatrixXd dk = kf.cwiseProduct(diff2) / (2.0 * h.lengthscales2(dim));
            (*grad)(dim) = 0.5 * w.cwiseProduct(dk).sum();
        }
        (*grad)(d) = 0.5 * w.cwiseProduct(kf).sum();
        (*grad)(d + 1) = 0.5 * w.trace() * std::exp(theta(d + 1));
    }
    return lml;
}

namespace {

struct Objective {
    const Matrix* inputs;
    const Vector* targets;
};

constexpr double kBadValue = 1e30;

Vector to_eigen(const gsl_vector* v) {
    Vector out(static_cast<Eigen::Index>(v->size));
    for (std::size_t i = 0; i < v->size; ++i) out(static_cast<Eigen::Index>(i)) = gsl_vector_get(v, i);
    return out;
}

void eval_fdf(const gsl_vector* v, void* params, double* f, gsl_vector* df) {
    const auto* obj = static_cast<const Objective*>(params);
    const Vector theta = to_eigen(v);
    Vector grad;
    double value = kBadValue;
    bool ok = theta.allFinite() && (theta.array().abs() < 50.0).all();
    if (ok) {
        try {
            value = -log_marginal_likelihood(*obj->inputs, *obj->targets, theta, df ? &grad : nullptr);
            ok = std::isfinite(value) && (!df || grad.allFinite());
        } catch (const NumericalFailure&) {
            ok = false;
        }
    }
    if (!ok) value = kBadValue;
    if (f) *f = value;
    if (df)
        for (std::size_t i = 0; i < df->size; ++i) gsl_vector_set(df, i, ok ? -grad(static_cast<Eigen::Index>(i)) : 0.0);
}

double eval_f(const gsl_vector* v, void* params) {
    double f = 0.0;
    eval_fdf(v, params, &f, nullptr);
    return f;
}

void eval_df(const gsl_vector* v, void* params, gsl_vector* df) { eval_fdf(v, params, nullptr, df); }

Vector local_ascent(const Matrix& inputs, const Vector& targets, const Vector& start, const GpFitOptions& opts) {
    const std::size_t n = static_cast<std::size_t>(start.size());
    Objective obj{&inputs, &targets};
    gsl_multimin_function_fdf fn;
    fn.n = n;
    fn.f = &eval_f;
    fn.df = &eval_df;
    fn.fdf = &eval_fdf;
    fn.params = &obj;

    gsl_vector* x = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, start(static_cast<Eigen::Index>(i)));
    gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
    gsl_multimin_fdfminimizer_set(s, &fn, x, 0.1, 0.1);
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
        if (gsl_multimin_test_gradient(s->gradient, opts.gradient_tolerance) == GSL_SUCCESS) break;
    }
    Vector best = to_eigen(s->x);
    gsl_multimin_fdfminimizer_free(s);
    gsl_vector_free(x);
    return best;
}

struct GslErrorsOff {
    GslErrorsOff() : previous(gsl_set_error_handler_off()) {}
    ~GslErrorsOff() { gsl_set_error_handler(previous); }
    gsl_error_handler_t* previous;
};

}  // namespace

GpModel gp_fit(const Matrix& inputs, const Vector& targets, const GpFitOptions& opts, std::uint64_t seed) {
    require(inputs.rows() >= 2 && inputs.rows() == targets.size(), "gp_fit: need at least two observations");
    require(opts.restarts >= 1, "gp_fit: need at least one restart");
    const Eigen::Index d = inputs.cols();

    const double y_mean = targets.mean();
    double y_std = std::sqrt((targets.array() - y_mean).square().mean());
    if (!(y_std > 0.0)) y_std = 1.0;
    const Vector ys = (targets.array() - y_mean) / y_std;

    Vector width = inputs.colwise().maxCoeff() - inputs.colwise().minCoeff();
    for (Eigen::Index k = 0; k < d; ++k)
        if (!(width(k) > 0.0)) width(k) = 1.0;

    GslErrorsOff quiet;
    stats::Rng rng(seed);
    auto log_uniform = [&](double lo, double hi) { return std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform(); };

    Vector best_theta;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        Vector start(d + 2);
        for (Eigen::Index k = 0; k < d; ++k) start(k) = 2.0 * log_uniform(1e-2 * width(k), 1e2 * width(k));
        start(d) = log_uniform(1e-2, 1e2);
        start(d + 1) = log_uniform(1e-8, 1e-1);

        Vector theta = local_ascent(inputs, ys, start, opts);
        for (Eigen::Index k = 0; k < d; ++k)
            theta(k) = std::clamp(theta(k), 2.0 * std::log(1e-3 * width(k)), 2.0 * std::log(1e3 * width(k)));
        theta(d) = std::clamp(theta(d), std::log(1e-6), std::log(1e6));
        theta(d + 1) = std::clamp(theta(d + 1), std::log(1e-12), std::log(1.0));
        double lml = -std::numeric_limits<double>::infinity();
        try {
            lml = log_marginal_likelihood(inputs, ys, theta, nullptr);
        } catch (const NumericalFailure&) {
            continue;
        }
        if (lml > best_lml) {
            best_lml = lml;
            best_theta = theta;
        }
    }
    if (best_theta.size() == 0) throw NumericalFailure("gp_fit: every restart failed");

    GpHyperparameters h = unpack(best_theta);
    h.signal_variance *= y_std * y_std;
    h.noise_variance *= y_std * y_std;
    h.mean = y_mean;
    return GpModel(inputs, targets, h);
}

}  // namespace xbed::gp
