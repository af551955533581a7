#include "mfbo/surrogate.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mfbo/optim.hpp"

namespace mfbo {

namespace {

constexpr double kJitterStart = 1e-8;
constexpr double kJitterCap = 1e-2;
constexpr double kLogTwoPi = 1.8378770664093455; // log(2*pi)

/// Shared per-fit context: per-dimension squared-distance matrices and the
/// fidelity pattern, so each likelihood evaluation only re-weights them.
struct FitContext {
    const Matrix& X;
    const Vector& levels;
    const Vector& y; // standardized
    std::vector<Matrix> sqdist;  // one n x n matrix per dimension
    Matrix fid_base;             // (1-l_i)(1-l_j)
    Matrix log_fid_base;         // log of the above where positive, 0 elsewhere

    FitContext(const Matrix& X_, const Vector& levels_, const Vector& y_)
        : X(X_), levels(levels_), y(y_) {
        const Eigen::Index n = X.rows();
        sqdist.reserve(static_cast<std::size_t>(X.cols()));
        for (Eigen::Index k = 0; k < X.cols(); ++k) {
            Matrix D(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j <= i; ++j) {
                    double diff = X(i, k) - X(j, k);
                    D(i, j) = D(j, i) = diff * diff;
                }
            sqdist.push_back(std::move(D));
        }
        fid_base.resize(n, n);
        log_fid_base = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                double v = (1.0 - levels(i)) * (1.0 - levels(j));
                fid_base(i, j) = v;
                if (v > 0.0) log_fid_base(i, j) = std::log(v);
            }
    }
};

/// -LML and gradient in log-parameter space. Returns +inf when the kernel
/// matrix cannot be factorized even after jitter escalation.
double neg_lml(const FitContext& ctx, const Vector& theta, Vector* grad) {
    const Eigen::Index n = ctx.X.rows();
    const Eigen::Index d = ctx.X.cols();
    const KernelParams p = KernelParams::from_log(theta, static_cast<std::size_t>(d));

    Matrix S = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < d; ++k) S += ctx.sqdist[static_cast<std::size_t>(k)] / p.length_scales(k);
    Matrix K_in = (-0.5 * S).array().exp();

    const double expo = 1.0 + p.fidelity_exponent;
    Matrix fid_pow(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double b = ctx.fid_base(i, j);
            fid_pow(i, j) = b > 0.0 ? std::exp(expo * ctx.log_fid_base(i, j)) : 0.0;
        }
    Matrix K_fid = fid_pow.array() + p.fidelity_offset;
    Matrix K = p.signal_variance * K_in.cwiseProduct(K_fid);

    double mean_diag = K.diagonal().mean();
    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;
    for (;;) {
        Matrix Ky = K;
        Ky.diagonal().array() += p.noise_variance + jitter;
        llt.compute(Ky);
        if (llt.info() == Eigen::Success) break;
        jitter = (jitter == 0.0) ? kJitterStart * mean_diag : jitter * 10.0;
        if (jitter > kJitterCap * mean_diag)
            return std::numeric_limits<double>::infinity();
    }

    Vector alpha = llt.solve(ctx.y);
    double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double lml = -0.5 * ctx.y.dot(alpha) - 0.5 * log_det - 0.5 * n * kLogTwoPi;
    if (!std::isfinite(lml)) return std::numeric_limits<double>::infinity();

    if (grad) {
        // dLML/dtheta_j = 1/2 tr((alpha alpha^T - Ky^{-1}) dK/dtheta_j)
        Matrix A = alpha * alpha.transpose() - llt.solve(Matrix::Identity(n, n));
        grad->resize(d + 4);
        for (Eigen::Index k = 0; k < d; ++k) {
            Matrix dK = K.cwiseProduct(ctx.sqdist[static_cast<std::size_t>(k)]) *
                        (0.5 / p.length_scales(k));
            (*grad)(k) = -0.5 * A.cwiseProduct(dK).sum();
        }
        {
            Matrix dK = (p.signal_variance * p.fidelity_offset) * K_in;
            (*grad)(d) = -0.5 * A.cwiseProduct(dK).sum();
        }
        {
            Matrix dK = p.signal_variance *
                        K_in.cwiseProduct(fid_pow.cwiseProduct(ctx.log_fid_base)) *
                        (p.fidelity_exponent + KernelParams::kDeltaShift);
            (*grad)(d + 1) = -0.5 * A.cwiseProduct(dK).sum();
        }
        (*grad)(d + 2) = -0.5 * A.cwiseProduct(K).sum();
        (*grad)(d + 3) = -0.5 * p.noise_variance * A.trace();
    }
    return -lml;
}

} // namespace

SurrogateState::SurrogateState(Matrix inputs, Vector levels, Vector outputs, KernelParams params,
                               bool standardize_outputs)
    : inputs_(std::move(inputs)), levels_(std::move(levels)), outputs_raw_(std::move(outputs)),
      params_(std::move(params)) {
    if (inputs_.rows() != levels_.size() || inputs_.rows() != outputs_raw_.size())
        throw Error("surrogate: inputs, levels and outputs must have matching lengths");
    if (params_.length_scales.size() != inputs_.cols())
        throw Error("surrogate: kernel length scales must match input dimension");

    if (standardize_outputs && outputs_raw_.size() > 0) {
        out_shift_ = outputs_raw_.mean();
        double var = (outputs_raw_.array() - out_shift_).square().mean();
        out_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    outputs_std_ = (outputs_raw_.array() - out_shift_) / out_scale_;
    factorize();
}

SurrogateState SurrogateState::prior(std::size_t dims, KernelParams params) {
    SurrogateState s;
    s.inputs_ = Matrix(0, static_cast<Eigen::Index>(dims));
    s.levels_ = Vector(0);
    s.outputs_raw_ = Vector(0);
    s.outputs_std_ = Vector(0);
    s.params_ = std::move(params);
    return s;
}

void SurrogateState::factorize() {
    const Eigen::Index n = inputs_.rows();
    if (n == 0) return;
    Matrix K = kernel_matrix(inputs_, levels_, params_);
    double mean_diag = K.diagonal().mean();
    jitter_ = 0.0;
    for (;;) {
        Matrix Ky = K;
        Ky.diagonal().array() += params_.noise_variance + jitter_;
        llt_.compute(Ky);
        if (llt_.info() == Eigen::Success) break;
        jitter_ = (jitter_ == 0.0) ? kJitterStart * mean_diag : jitter_ * 10.0;
        if (jitter_ > kJitterCap * mean_diag)
            throw FitError("kernel matrix not positive definite after jitter escalation");
    }
    alpha_ = llt_.solve(outputs_std_);
    log_det_ = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

void SurrogateState::posterior(const Matrix& queries, const Vector& levels,
                               Vector& mean_out, Vector& var_out) const {
    if (queries.cols() != inputs_.cols())
        throw Error("posterior: query dimension mismatch");
    const Eigen::Index m = queries.rows();
    mean_out.resize(m);
    var_out.resize(m);

    if (size() == 0) {
        for (Eigen::Index j = 0; j < m; ++j) {
            mean_out(j) = 0.0;
            var_out(j) = kernel_full(queries.row(j).transpose(), levels(j),
                                     queries.row(j).transpose(), levels(j), params_);
        }
        return;
    }

    Matrix Ks = kernel_cross(inputs_, levels_, queries, levels, params_);
    Matrix V = llt_.matrixL().solve(Ks);
    for (Eigen::Index j = 0; j < m; ++j) {
        double prior_var = kernel_full(queries.row(j).transpose(), levels(j),
                                       queries.row(j).transpose(), levels(j), params_);
        double mu = Ks.col(j).dot(alpha_);
        double var = prior_var - V.col(j).squaredNorm();
        mean_out(j) = out_shift_ + out_scale_ * mu;
        var_out(j) = std::max(0.0, var) * out_scale_ * out_scale_;
    }
}

std::pair<double, double> SurrogateState::posterior_at(const Vector& x, double level) const {
    Matrix q(1, x.size());
    q.row(0) = x.transpose();
    Vector lv(1);
    lv(0) = level;
    Vector mu, var;
    posterior(q, lv, mu, var);
    return {mu(0), var(0)};
}

SurrogateState::TwoFidelityView SurrogateState::posterior_two_fidelity(const Matrix& queries) const {
    const Eigen::Index m = queries.rows();
    TwoFidelityView out;
    out.mean_hf.resize(m);
    out.var_hf.resize(m);
    out.var_lf.resize(m);
    out.cov.resize(m);

    const double s2 = out_scale_ * out_scale_;
    const double c = params_.fidelity_offset;
    const double prior_hf = params_.signal_variance * c;             // k_IS(1,1) = c
    const double prior_lf = params_.signal_variance * (c + 1.0);     // k_IS(0,0) = c + 1
    const double prior_cross = params_.signal_variance * c;          // k_IS(0,1) = c

    if (size() == 0) {
        out.mean_hf.setZero();
        out.var_hf.setConstant(prior_hf * s2);
        out.var_lf.setConstant(prior_lf * s2);
        out.cov.setConstant(prior_cross * s2);
        return out;
    }

    Vector hf_levels = Vector::Constant(m, kHighFidelity);
    Vector lf_levels = Vector::Constant(m, kLowFidelity);
    Matrix Ks_hf = kernel_cross(inputs_, levels_, queries, hf_levels, params_);
    Matrix Ks_lf = kernel_cross(inputs_, levels_, queries, lf_levels, params_);
    Matrix V_hf = llt_.matrixL().solve(Ks_hf);
    Matrix V_lf = llt_.matrixL().solve(Ks_lf);

    for (Eigen::Index j = 0; j < m; ++j) {
        out.mean_hf(j) = out_shift_ + out_scale_ * Ks_hf.col(j).dot(alpha_);
        out.var_hf(j) = std::max(0.0, prior_hf - V_hf.col(j).squaredNorm()) * s2;
        out.var_lf(j) = std::max(0.0, prior_lf - V_lf.col(j).squaredNorm()) * s2;
        out.cov(j) = (prior_cross - V_hf.col(j).dot(V_lf.col(j))) * s2;
    }
    return out;
}

double SurrogateState::log_marginal_likelihood() const {
    const auto n = static_cast<double>(size());
    if (size() == 0) return 0.0;
    return -0.5 * outputs_std_.dot(alpha_) - 0.5 * log_det_ - 0.5 * n * kLogTwoPi;
}

double log_marginal_likelihood_grad(const Matrix& inputs, const Vector& levels,
                                    const Vector& std_outputs, const Vector& theta,
                                    Vector* grad) {
    FitContext ctx(inputs, levels, std_outputs);
    double neg = neg_lml(ctx, theta, grad);
    if (grad) *grad = -*grad;
    return -neg;
}

SurrogateState fit(const Matrix& inputs, const Vector& levels, const Vector& outputs,
                   const FitOptions& opts, RngStream& rng) {
    const Eigen::Index n = inputs.rows();
    const auto d = static_cast<std::size_t>(inputs.cols());
    if (n < 2) throw Error("fit: at least 2 observations required");

    double shift = outputs.mean();
    double var = (outputs.array() - shift).square().mean();
    double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    Vector y_std = (outputs.array() - shift) / scale;

    FitContext ctx(inputs, levels, y_std);
    auto objective = [&ctx](const Vector& theta, Vector* g) { return neg_lml(ctx, theta, g); };

    const Eigen::Index p = static_cast<Eigen::Index>(d) + 4;
    optim::LbfgsOptions lopts;
    lopts.lower = Vector::Constant(p, -20.0);
    lopts.upper = Vector::Constant(p, 12.0);
    // noise floor in log space; keeps the model honest about its resolution
    lopts.lower(p - 1) = std::log(std::max(opts.noise_floor, 1e-20));

    std::vector<std::pair<Vector, int>> starts; // (theta0, max_iter)
    if (opts.include_default_init || !opts.warm_start)
        starts.emplace_back(KernelParams::defaults(d).to_log(), opts.max_iter);
    if (opts.warm_start) starts.emplace_back(opts.warm_start->to_log(), opts.warm_max_iter);
    for (int r = 0; r < opts.restarts; ++r) {
        KernelParams q = KernelParams::defaults(d);
        for (Eigen::Index i = 0; i < q.length_scales.size(); ++i)
            q.length_scales(i) = std::exp(rng.uniform(std::log(1e-2), std::log(1e1)));
        q.fidelity_offset = std::exp(rng.uniform(std::log(1e-2), std::log(1e1)));
        q.fidelity_exponent = std::exp(rng.uniform(std::log(1e-2), std::log(1e1)));
        q.signal_variance = std::exp(rng.uniform(std::log(1e-2), std::log(1e1)));
        q.noise_variance = std::exp(rng.uniform(std::log(1e-6), std::log(1e-1)));
        starts.emplace_back(q.to_log(), opts.max_iter);
    }

    Vector best_theta;
    double best_neg = std::numeric_limits<double>::infinity();
    for (const auto& [theta0, max_iter] : starts) {
        optim::LbfgsOptions lo = lopts;
        lo.max_iter = max_iter;
        auto res = optim::lbfgs(objective, theta0, lo);
        if (std::isfinite(res.f) && res.f < best_neg) {
            best_neg = res.f;
            best_theta = res.x;
        }
    }
    if (!best_theta.size()) throw FitError("fit: no feasible hyperparameters found");

    return SurrogateState(inputs, levels, outputs, KernelParams::from_log(best_theta, d));
}

SurrogateState fit(const std::vector<Observation>& data, const SearchSpace& space,
                   const FitOptions& opts, RngStream& rng) {
    const auto n = static_cast<Eigen::Index>(data.size());
    Matrix X(n, static_cast<Eigen::Index>(space.dims()));
    Vector levels(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X.row(i) = space.to_unit(data[static_cast<std::size_t>(i)].x.coords).transpose();
        levels(i) = data[static_cast<std::size_t>(i)].fidelity;
        y(i) = data[static_cast<std::size_t>(i)].y;
    }
    return fit(X, levels, y, opts, rng);
}

} // namespace mfbo
