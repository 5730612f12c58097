#pragma once

#include "xbed/common.hpp"

#include <complex>
#include <functional>

namespace xbed::stats {

using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

/// Truncated Karhunen-Loeve basis on a fixed set of sensor locations.
///
/// Modes are orthonormal rows under the plain discrete inner product and the
/// eigenvalues are those of the kernel matrix on the grid. A standardized
/// coefficient vector x maps to the field sum_i x_i sqrt(lambda_i) phi_i, so
/// x ~ N(0, I) reproduces the kernel covariance. For complex bases each mode
/// takes two coordinates (real part, imaginary part), interleaved.
struct RandomFieldBasis {
    Vector eigenvalues;
    ComplexMatrix modes;  // n_modes x n_sensors
    Vector sensor_grid;
    bool is_complex = false;

    Eigen::Index n_modes() const { return eigenvalues.size(); }
    Eigen::Index n_sensors() const { return sensor_grid.size(); }
    // Length of the standardized coefficient vector.
    Eigen::Index parameter_dimension() const { return is_complex ? 2 * n_modes() : n_modes(); }
};

using KernelFunction = std::function<std::complex<double>(double, double)>;

struct KernelSpec {
    KernelFunction k;
    bool is_complex = false;
};

/// sigma2 * exp(-(s - s')^2 / (2 l^2)).
KernelSpec rbf_kernel(double variance, double length_scale);

/// sigma2 * exp(i (s - s')) * exp(-(s - s')^2 / l). The length scale enters
/// without the usual factor of two or square.
KernelSpec complex_wave_kernel(double variance, double length_scale);

/// Kernel given directly as a matrix on the grid (must be Hermitian PSD).
RandomFieldBasis kl_expand(const ComplexMatrix& kernel_matrix, const Vector& sensor_grid,
                           Eigen::Index n_modes, bool is_complex);

RandomFieldBasis kl_expand(const KernelSpec& kernel, const Vector& sensor_grid, Eigen::Index n_modes);

/// Complex field on the sensor grid for one coefficient vector.
ComplexVector synthesize_field(const Eigen::Ref<const Vector>& x, const RandomFieldBasis& basis);

/// Real part only; convenient for real bases.
Vector synthesize_real_field(const Eigen::Ref<const Vector>& x, const RandomFieldBasis& basis);

/// Sensor features for a batch of coefficient vectors, one row per point.
/// Real bases give n_sensors columns; complex bases give 2*n_sensors columns
/// ordered (Re u(s_0), Im u(s_0), Re u(s_1), ...).
Matrix field_features(const Matrix& xs, const RandomFieldBasis& basis);

/// Restricts a basis to every `stride`-th sensor (modes are not renormalized).
RandomFieldBasis subsample_sensors(const RandomFieldBasis& basis, Eigen::Index stride);

}  // namespace xbed::stats
