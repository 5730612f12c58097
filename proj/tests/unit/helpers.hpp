#pragma once

#include "xbed/surrogate.hpp"
#include "xbed/systems/system.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>

namespace xbed::test {

// Scratch directory under the system temp dir, emptied on construction.
inline std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("xbed-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// G(x) = a + b * sum x_d + c * |x|^2, cheap and with a skewed output density.
class AnalyticSystem final : public systems::System {
public:
    AnalyticSystem(Eigen::Index dim, double a, double b, double c, double half_width = 6.0)
        : dim_(dim), a_(a), b_(b), c_(c), bounds_(stats::Bounds::uniform(dim, -half_width, half_width)) {}

    std::string name() const override { return "analytic"; }
    Eigen::Index dimension() const override { return dim_; }
    const stats::Bounds& bounds() const override { return bounds_; }
    double evaluate(const Eigen::Ref<const Vector>& x) const override {
        ++calls;
        if (fail_above && x(0) > *fail_above) throw NumericalFailure("analytic: refused");
        return a_ + b_ * x.sum() + c_ * x.squaredNorm();
    }
    Matrix features(const Matrix& xs) const override { return xs; }
    std::string fingerprint() const override {
        return "analytic " + std::to_string(dim_) + " " + std::to_string(a_) + " " + std::to_string(b_) + " " +
               std::to_string(c_);
    }

    mutable std::size_t calls = 0;
    std::optional<double> fail_above;

private:
    Eigen::Index dim_;
    double a_, b_, c_;
    stats::Bounds bounds_;
};

// Surrogate given by closed-form mean and variance; the density map is the mean.
class FunctionSurrogate final : public Surrogate {
public:
    using Fn = std::function<double(const Vector&)>;
    FunctionSurrogate(Fn mean, Fn variance) : mean_(std::move(mean)), variance_(std::move(variance)) {}

    Prediction predict(const Matrix& xs) const override {
        Prediction p{Vector(xs.rows()), Vector(xs.rows())};
        for (Eigen::Index i = 0; i < xs.rows(); ++i) {
            const Vector x = xs.row(i).transpose();
            p.mean(i) = mean_(x);
            p.variance(i) = variance_(x);
        }
        return p;
    }
    Vector density_map(const Matrix& xs) const override { return predict(xs).mean; }

private:
    Fn mean_, variance_;
};

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(g);
    return m;
}

}  // namespace xbed::test
