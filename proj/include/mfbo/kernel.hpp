#pragma once

#include <Eigen/Dense>

#include "mfbo/errors.hpp"
#include "mfbo/search_space.hpp"

namespace mfbo {

/// Hyperparameters of the two-fidelity product kernel
///
///   k((x,l), (x',l')) = sigma_f^2 * k_I(x,x') * k_IS(l,l')
///   k_I(x,x')  = exp(-1/2 sum_i (x_i - x'_i)^2 / lambda_i)
///   k_IS(l,l') = c + (1-l)^(1+delta) * (1-l')^(1+delta)
///
/// All parameters are optimized in log space; delta as log(delta + 1e-6) so
/// the exponent 1 + delta stays >= 1.
struct KernelParams {
    Vector length_scales;        // lambda_i > 0, one per input dimension
    double fidelity_offset = 1.0;    // c >= 0
    double fidelity_exponent = 1.0;  // delta >= 0
    double signal_variance = 1.0;    // sigma_f^2 > 0
    double noise_variance = 1e-2;    // sigma_eps^2 >= 0

    static constexpr double kDeltaShift = 1e-6;

    /// Mid-range defaults in normalized input space.
    static KernelParams defaults(std::size_t dims) {
        KernelParams p;
        p.length_scales = Vector::Constant(static_cast<Eigen::Index>(dims), 0.5);
        return p;
    }

    std::size_t dims() const { return static_cast<std::size_t>(length_scales.size()); }

    /// Pack into the log-space optimization vector
    /// [log lambda_1..d, log c, log(delta + shift), log sigma_f^2, log sigma_eps^2].
    Vector to_log() const;
    static KernelParams from_log(const Vector& theta, std::size_t dims);
};

double kernel_input(const Vector& x, const Vector& xp, const Vector& lambda);
double kernel_fidelity(double l, double lp, double c, double delta);
double kernel_full(const Vector& x, double l, const Vector& xp, double lp, const KernelParams& p);

/// Symmetric Gram matrix over the training set (no noise term).
Matrix kernel_matrix(const Matrix& X, const Vector& levels, const KernelParams& p);

/// Cross-kernel between training rows and query rows, n x m.
Matrix kernel_cross(const Matrix& X, const Vector& levels, const Matrix& Xq,
                    const Vector& levels_q, const KernelParams& p);

} // namespace mfbo
