#pragma once

#include <optional>
#include <vector>

#include "mfbo/kernel.hpp"
#include "mfbo/observation.hpp"
#include "mfbo/rng.hpp"

namespace mfbo {

/// Fitted two-fidelity GP: training data (inputs in normalized space),
/// kernel hyperparameters, and the cached Cholesky factorization of
/// (K + sigma_eps^2 I). Immutable after construction; posterior queries are
/// read-only and thread-safe.
class SurrogateState {
public:
    /// Builds the factorization, escalating jitter from 1e-8*mean(diag K) by
    /// factors of 10 up to 1e-2*mean(diag K). Throws FitError past the cap.
    SurrogateState(Matrix inputs, Vector levels, Vector outputs, KernelParams params,
                   bool standardize_outputs = true);

    /// Zero-observation state: posterior is the prior (mean 0, variance k).
    static SurrogateState prior(std::size_t dims, KernelParams params);

    std::size_t size() const { return static_cast<std::size_t>(outputs_raw_.size()); }
    std::size_t dims() const { return static_cast<std::size_t>(inputs_.cols()); }

    const KernelParams& params() const { return params_; }
    const Matrix& train_inputs() const { return inputs_; }
    const Vector& train_levels() const { return levels_; }
    const Vector& train_outputs() const { return outputs_raw_; }
    const Vector& standardized_outputs() const { return outputs_std_; }
    double output_shift() const { return out_shift_; }
    double output_scale() const { return out_scale_; }
    double jitter() const { return jitter_; }

    /// Predictive mean and variance at each (x, l) query row. Variances are
    /// clamped at zero after the subtraction.
    void posterior(const Matrix& queries, const Vector& levels,
                   Vector& mean_out, Vector& var_out) const;

    std::pair<double, double> posterior_at(const Vector& x, double level) const;

    /// Joint posterior pieces needed by the cost-aware acquisitions: per query
    /// point, the high-fidelity mean/variance, the low-fidelity variance, and
    /// the posterior covariance between f(x, 0) and f(x, 1).
    struct TwoFidelityView {
        Vector mean_hf;
        Vector var_hf;
        Vector var_lf;
        Vector cov;
    };
    TwoFidelityView posterior_two_fidelity(const Matrix& queries) const;

    /// log p(y~ | X, theta) of the standardized training outputs, computed
    /// through the cached factorization.
    double log_marginal_likelihood() const;

private:
    SurrogateState() = default;
    void factorize();

    Matrix inputs_;   // n x d, normalized coordinates
    Vector levels_;   // n
    Vector outputs_raw_;
    Vector outputs_std_;
    double out_shift_ = 0.0;
    double out_scale_ = 1.0;
    KernelParams params_;

    Eigen::LLT<Matrix> llt_;
    Vector alpha_; // (K + sigma^2 I)^{-1} y~
    double jitter_ = 0.0;
    double log_det_ = 0.0;
};

struct FitOptions {
    int restarts = 8;              // random multi-start initializations
    int max_iter = 80;             // L-BFGS iterations per start
    int warm_max_iter = 30;        // iterations when polishing a warm start
    double noise_floor = 1e-4;     // lower bound on sigma_eps^2 (standardized outputs)
    bool include_default_init = true; // always start from the documented defaults
    std::optional<KernelParams> warm_start;
};

/// Maximum-marginal-likelihood fit. Inputs must already be normalized to the
/// unit cube; outputs are standardized internally (pooled over fidelities)
/// and de-standardized on prediction.
SurrogateState fit(const Matrix& inputs, const Vector& levels, const Vector& outputs,
                   const FitOptions& opts, RngStream& rng);

/// Convenience overload over a list of observations, normalizing through the
/// given space.
SurrogateState fit(const std::vector<Observation>& data, const SearchSpace& space,
                   const FitOptions& opts, RngStream& rng);

/// Log marginal likelihood and its gradient w.r.t. the log-space parameter
/// vector, at fixed data. Exposed for the finite-difference check.
double log_marginal_likelihood_grad(const Matrix& inputs, const Vector& levels,
                                    const Vector& std_outputs, const Vector& theta,
                                    Vector* grad);

} // namespace mfbo
