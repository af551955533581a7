#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mfbo/fidelity.hpp"
#include "mfbo/rng.hpp"
#include "mfbo/search_space.hpp"

namespace mfbo {

/// A two-fidelity benchmark under the maximization convention: evaluate()
/// returns the objective to maximize, optimum() its known high-fidelity
/// maximum. Evaluations are pure and safe to call concurrently.
class Problem {
public:
    virtual ~Problem() = default;
    virtual const SearchSpace& space() const = 0;
    virtual const FidelityModel& fidelity_model() const = 0;
    virtual double evaluate(const DesignPoint& x, double level) const = 0;
    virtual double optimum() const = 0;
    virtual std::string name() const = 0;
};

/// Branin-2D with a bias term on the x1^2 coefficient. The high-fidelity
/// level always evaluates the unbiased (alpha = 1) expression; the bias only
/// distorts the low-fidelity surface. Raw (minimization-canonical) value.
double branin(const Vector& x, double level, double alpha);

/// Park-4D with a bias term on the x4 coefficient; x1 is clamped to >= 1e-6
/// to avoid the division singularity at x1 = 0.
double park(const Vector& x, double level, double alpha);

class SyntheticProblem : public Problem {
public:
    enum class Family { Branin2D, Park4D };

    SyntheticProblem(Family family, double alpha, double rho);

    const SearchSpace& space() const override { return space_; }
    const FidelityModel& fidelity_model() const override { return fidelity_; }
    double evaluate(const DesignPoint& x, double level) const override;
    double optimum() const override { return optimum_; }
    std::string name() const override;

    Family family() const { return family_; }
    double alpha() const { return alpha_; }

private:
    Family family_;
    double alpha_;
    SearchSpace space_;
    FidelityModel fidelity_;
    double optimum_;
};

/// Precomputed candidate table: features (min-max normalized per column),
/// one high- and one low-fidelity value per row. Lookups are bit-exact.
class TabularProblem : public Problem {
public:
    TabularProblem(SearchSpace candidates, Vector hf_values, Vector lf_values,
                   double rho, std::string name);

    const SearchSpace& space() const override { return space_; }
    const FidelityModel& fidelity_model() const override { return fidelity_; }
    double evaluate(const DesignPoint& x, double level) const override;
    double optimum() const override { return optimum_; }
    std::string name() const override { return name_; }

    const Vector& hf_values() const { return hf_; }
    const Vector& lf_values() const { return lf_; }
    std::size_t optimum_index() const { return optimum_index_; }

private:
    SearchSpace space_;
    Vector hf_;
    Vector lf_;
    FidelityModel fidelity_;
    double optimum_;
    std::size_t optimum_index_;
    std::string name_;
};

/// Loads a candidate table from CSV (header row, comma-delimited, '.'
/// decimals). Feature columns are min-max normalized to [0,1]; `id_col`, when
/// given, must hold unique identifiers. Parse failures name the offending
/// row and column.
TabularProblem load_tabular(const std::string& path, const std::vector<std::string>& feature_cols,
                            const std::string& hf_col, const std::string& lf_col, double rho,
                            const std::string& id_col = "", const std::string& name = "");

/// Replaces the low-fidelity column with a noise-degraded copy whose
/// informativeness (exact table R^2) falls below `target_r2`.
TabularProblem degrade_lf(const TabularProblem& problem, double target_r2, RngStream& rng);

struct InformativenessReport {
    double r_squared = 0.0; // raw value of the linear fit
    std::size_t n_samples = 0;
    double slope = 0.0;
    double intercept = 0.0;
    bool degenerate = false; // zero low-fidelity variance
};

/// Samples n inputs uniformly, evaluates both fidelities, and reports the
/// R^2 of the ordinary-least-squares fit HF ~ slope * LF + intercept.
InformativenessReport estimate_informativeness(const Problem& problem, std::size_t n, RngStream& rng);

/// R^2 of paired samples (used directly by the CLI for user-supplied pairs).
InformativenessReport paired_r_squared(const Vector& lf, const Vector& hf);

} // namespace mfbo
