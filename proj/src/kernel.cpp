#include "mfbo/kernel.hpp"

#include <cmath>

namespace mfbo {

Vector KernelParams::to_log() const {
    const Eigen::Index d = length_scales.size();
    Vector theta(d + 4);
    for (Eigen::Index i = 0; i < d; ++i) theta(i) = std::log(length_scales(i));
    theta(d) = std::log(fidelity_offset);
    theta(d + 1) = std::log(fidelity_exponent + kDeltaShift);
    theta(d + 2) = std::log(signal_variance);
    theta(d + 3) = std::log(noise_variance);
    return theta;
}

KernelParams KernelParams::from_log(const Vector& theta, std::size_t dims) {
    const auto d = static_cast<Eigen::Index>(dims);
    if (theta.size() != d + 4) throw Error("kernel parameter vector has wrong size");
    KernelParams p;
    p.length_scales = theta.head(d).array().exp();
    p.fidelity_offset = std::exp(theta(d));
    p.fidelity_exponent = std::max(0.0, std::exp(theta(d + 1)) - kDeltaShift);
    p.signal_variance = std::exp(theta(d + 2));
    p.noise_variance = std::exp(theta(d + 3));
    return p;
}

double kernel_input(const Vector& x, const Vector& xp, const Vector& lambda) {
    if (x.size() != xp.size() || x.size() != lambda.size())
        throw Error("kernel_input: dimension mismatch");
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double diff = x(i) - xp(i);
        s += diff * diff / lambda(i);
    }
    return std::exp(-0.5 * s);
}

double kernel_fidelity(double l, double lp, double c, double delta) {
    double a = std::pow(1.0 - l, 1.0 + delta);
    double b = std::pow(1.0 - lp, 1.0 + delta);
    return c + a * b;
}

double kernel_full(const Vector& x, double l, const Vector& xp, double lp, const KernelParams& p) {
    return p.signal_variance * kernel_input(x, xp, p.length_scales) *
           kernel_fidelity(l, lp, p.fidelity_offset, p.fidelity_exponent);
}

namespace {

/// (1-l)^(1+delta) per entry.
Vector fidelity_feature(const Vector& levels, double delta) {
    Vector u(levels.size());
    for (Eigen::Index i = 0; i < levels.size(); ++i)
        u(i) = std::pow(1.0 - levels(i), 1.0 + delta);
    return u;
}

} // namespace

Matrix kernel_matrix(const Matrix& X, const Vector& levels, const KernelParams& p) {
    if (levels.size() != X.rows()) throw Error("kernel_matrix: levels/input row mismatch");
    return kernel_cross(X, levels, X, levels, p);
}

Matrix kernel_cross(const Matrix& X, const Vector& levels, const Matrix& Xq,
                    const Vector& levels_q, const KernelParams& p) {
    if (X.cols() != Xq.cols()) throw Error("kernel_cross: dimension mismatch");
    if (X.cols() != p.length_scales.size()) throw Error("kernel_cross: length-scale dimension mismatch");

    // squared Mahalanobis distances via one GEMM:
    // S = |a|^2 + |b|^2 - 2 a.b on inputs scaled by 1/sqrt(lambda)
    Vector inv_sqrt = p.length_scales.array().rsqrt();
    Matrix A = X * inv_sqrt.asDiagonal();
    Matrix B = Xq * inv_sqrt.asDiagonal();
    Vector a2 = A.rowwise().squaredNorm();
    Vector b2 = B.rowwise().squaredNorm();
    Matrix S = (-2.0 * A * B.transpose());
    S.colwise() += a2;
    S.rowwise() += b2.transpose();
    S = S.cwiseMax(0.0);

    Vector u = fidelity_feature(levels, p.fidelity_exponent);
    Vector uq = fidelity_feature(levels_q, p.fidelity_exponent);
    Matrix K_in = (-0.5 * S).array().exp().matrix();
    Matrix K_fid = ((u * uq.transpose()).array() + p.fidelity_offset).matrix();
    return p.signal_variance * K_in.cwiseProduct(K_fid);
}

} // namespace mfbo
