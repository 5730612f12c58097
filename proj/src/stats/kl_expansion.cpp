#include "xbed/stats/kl_expansion.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace xbed::stats {

KernelSpec rbf_kernel(double variance, double length_scale) {
    require(variance > 0.0 && length_scale > 0.0, "rbf_kernel: variance and length scale must be positive");
    return {[=](double s, double t) {
                const double r = s - t;
                return std::complex<double>(variance * std::exp(-r * r / (2.0 * length_scale * length_scale)), 0.0);
            },
            false};
}

KernelSpec complex_wave_kernel(double variance, double length_scale) {
    require(variance > 0.0 && length_scale > 0.0, "complex_wave_kernel: variance and length scale must be positive");
    return {[=](double s, double t) {
                const double r = s - t;
                return variance * std::exp(-r * r / length_scale) * std::polar(1.0, r);
            },
            true};
}

namespace {

// Fix the arbitrary eigenvector phase: largest-magnitude entry real positive.
void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> p = v(imax);
    if (std::abs(p) > 0.0) v *= std::conj(p) / std::abs(p);
}

}  // namespace

RandomFieldBasis kl_expand(const ComplexMatrix& kernel_matrix, const Vector& sensor_grid, Eigen::Index n_modes,
                           bool is_complex) {
    const Eigen::Index n = sensor_grid.size();
    require(kernel_matrix.rows() == n && kernel_matrix.cols() == n, "kl_expand: kernel matrix does not match grid");
    require(n_modes >= 1 && n_modes <= n, "kl_expand: mode count must be in [1, grid size]");

    Vector evals(n);
    Eigen::MatrixXcd evecs(n, n);
    if (is_complex) {
        const Eigen::MatrixXcd k = kernel_matrix;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(k);
        if (solver.info() != Eigen::Success) throw NumericalFailure("kl_expand: eigensolver did not converge");
        evals = solver.eigenvalues();
        evecs = solver.eigenvectors();
    } else {
        Eigen::MatrixXd re = kernel_matrix.real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(re);
        if (solver.info() != Eigen::Success) throw NumericalFailure("kl_expand: eigensolver did not converge");
        evals = solver.eigenvalues();
        evecs = solver.eigenvectors().cast<std::complex<double>>();
    }

    // Eigen returns ascending order.
    const double lambda_max = std::max(std::abs(evals(n - 1)), std::abs(evals(0)));
    const double tol = 1e-10 * static_cast<double>(n) * std::max(lambda_max, 1e-300);
    if (evals(0) < -tol)
        throw NumericalFailure("kl_expand: kernel matrix has eigenvalue " + std::to_string(evals(0)) +
                               " below tolerance; not positive semidefinite");

    RandomFieldBasis basis;
    basis.is_complex = is_complex;
    basis.sensor_grid = sensor_grid;
    basis.eigenvalues.resize(n_modes);
    basis.modes.resize(n_modes, n);
    for (Eigen::Index i = 0; i < n_modes; ++i) {
        const Eigen::Index src = n - 1 - i;
        basis.eigenvalues(i) = std::max(evals(src), 0.0);
        Eigen::VectorXcd v = evecs.col(src);
        normalize_phase(v);
        basis.modes.row(i) = v.transpose();
    }
    return basis;
}

RandomFieldBasis kl_expand(const KernelSpec& kernel, const Vector& sensor_grid, Eigen::Index n_modes) {
    const Eigen::Index n = sensor_grid.size();
    require(n >= 1, "kl_expand: empty sensor grid");
    ComplexMatrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) k(i, j) = kernel.k(sensor_grid(i), sensor_grid(j));
    return kl_expand(k, sensor_grid, n_modes, kernel.is_complex);
}

ComplexVector synthesize_field(const Eigen::Ref<const Vector>& x, const RandomFieldBasis& basis) {
    require(x.size() == basis.parameter_dimension(), "synthesize_field: coefficient dimension mismatch");
    ComplexVector field = ComplexVector::Zero(basis.n_sensors());
    for (Eigen::Index i = 0; i < basis.n_modes(); ++i) {
        const std::complex<double> c =
            basis.is_complex ? std::complex<double>(x(2 * i), x(2 * i + 1)) : std::complex<double>(x(i), 0.0);
        field += (c * std::sqrt(basis.eigenvalues(i))) * basis.modes.row(i).transpose();
    }
    return field;
}

Vector synthesize_real_field(const Eigen::Ref<const Vector>& x, const RandomFieldBasis& basis) {
    return synthesize_field(x, basis).real();
}

Matrix field_features(const Matrix& xs, const RandomFieldBasis& basis) {
    require(xs.cols() == basis.parameter_dimension(), "field_features: coefficient dimension mismatch");
    const Eigen::Index m = basis.n_modes();
    const Eigen::Index s = basis.n_sensors();
    if (!basis.is_complex) {
        Matrix map(m, s);
        for (Eigen::Index i = 0; i < m; ++i) map.row(i) = std::sqrt(basis.eigenvalues(i)) * basis.modes.row(i).real();
        return xs * map;
    }
    // Row 2i carries Re(c_i), row 2i+1 carries Im(c_i); columns interleave Re/Im of u.
    Matrix map(2 * m, 2 * s);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sl = std::sqrt(basis.eigenvalues(i));
        for (Eigen::Index j = 0; j < s; ++j) {
            const std::complex<double> phi = sl * basis.modes(i, j);
            map(2 * i, 2 * j) = phi.real();
            map(2 * i, 2 * j + 1) = phi.imag();
            map(2 * i + 1, 2 * j) = -phi.imag();
            map(2 * i + 1, 2 * j + 1) = phi.real();
        }
    }
    return xs * map;
}

RandomFieldBasis subsample_sensors(const RandomFieldBasis& basis, Eigen::Index stride) {
    require(stride >= 1, "subsample_sensors: stride must be positive");
    const Eigen::Index n = (basis.n_sensors() + stride - 1) / stride;
    RandomFieldBasis out;
    out.eigenvalues = basis.eigenvalues;
    out.is_complex = basis.is_complex;
    out.sensor_grid.resize(n);
    out.modes.resize(basis.n_modes(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.sensor_grid(j) = basis.sensor_grid(j * stride);
        out.modes.col(j) = basis.modes.col(j * stride);
    }
    return out;
}

}  // namespace xbed::stats
