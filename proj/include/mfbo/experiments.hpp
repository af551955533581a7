#pragma once

#include <string>
#include <vector>

#include "mfbo/campaign.hpp"
#include "mfbo/metrics.hpp"

namespace mfbo {

struct SweepConfig {
    SyntheticProblem::Family problem_family = SyntheticProblem::Family::Branin2D;
    std::vector<double> rho_values = {0.02, 0.05, 0.1, 0.2, 0.33, 0.5};
    std::vector<double> alpha_values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<AcquisitionSpec::Family> families = {AcquisitionSpec::Family::EI,
                                                     AcquisitionSpec::Family::MES};
    double total_budget = 50.0;
    double init_fraction = 0.10;
    double init_hf_share = 0.5;
    std::size_t n_seeds = 10; // reduced default for desk-scale runtime
    std::uint64_t master_seed = 0;
    int surrogate_restarts = 2;
    double tau = 2.0;
    int workers = 0;
    std::size_t r2_samples = 1000;
};

/// One (rho, alpha, family) cell of the sweep, long format.
struct SweepCell {
    double rho = 0.0;
    double alpha = 0.0;
    double r_squared = 0.0;
    AcquisitionSpec::Family family = AcquisitionSpec::Family::EI;
    double delta_mean = 0.0;
    double delta_std = 0.0;
    std::size_t n_seeds = 0;
    bool failed = false;
    std::string error;
};

struct SweepGrid {
    std::vector<double> rho_values;
    std::vector<double> alpha_values;
    std::vector<SweepCell> cells;
};

/// Paired SFBO/MFBO suites over the (rho, alpha) grid. Every cell compares
/// runs that share the same seed list; the single-fidelity baseline does not
/// depend on rho or alpha and is computed once per family. Failed cells are
/// marked and the sweep continues.
SweepGrid run_sweep(const SweepConfig& config);

struct AdvisorVerdict {
    double rho = 0.0;
    double r_squared = 0.0;
    bool run_mfbo = false;
    double tau1 = 0.2;
    double tau2 = 0.75;
};

/// Decision flowchart: recommend MFBO iff the approximation is cheap enough
/// (rho < tau1) and informative enough (R^2 > tau2).
AdvisorVerdict advise(double rho, double r_squared, double tau1 = 0.2, double tau2 = 0.75);

struct QueryRatio {
    double hf_fraction = 0.0;
    double lf_fraction = 0.0;
};

/// Fractions of sequential (post-initialization) queries per fidelity level.
QueryRatio fidelity_query_ratio(const CampaignTrace& trace);

/// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

} // namespace mfbo
