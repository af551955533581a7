#pragma once

#include <vector>

#include "mfbo/observation.hpp"

namespace mfbo {

/// High-fidelity simple regret aligned to the single-fidelity cost grid.
struct RegretTrace {
    std::vector<double> values;   // non-increasing, length = SF step count
    std::vector<double> sf_costs; // the cumulative-cost grid the values sit on
};

/// Outcome of the budget-discount comparison between one multi-fidelity run
/// and its same-seed single-fidelity counterpart.
struct DiscountReport {
    double delta = 0.0;            // capped at 1
    double r_star_corrected = 0.0; // tau * best multi-fidelity regret
    double b_sf = 0.0;             // SF budget to reach r_star_corrected
    bool sf_reached = true;        // false => delta capped at 1
    double b_mf = 0.0;             // MF budget to reach r_star_corrected
    double tau = 2.0;
};

/// r_i = f* - (best high-fidelity value among the first i observations),
/// including the initial design. The trace must be single-fidelity.
RegretTrace simple_regret_sf(const CampaignTrace& trace, double f_star);

/// Aligns the high-fidelity regrets of a multi-fidelity trace onto the given
/// single-fidelity cumulative-cost grid: for each grid entry, the minimum
/// regret among high-fidelity observations whose cumulative cost fits.
RegretTrace simple_regret_mf(const CampaignTrace& mf_trace, const std::vector<double>& sf_costs,
                             double f_star);

/// Plain discount formula (b_sf - b_mf) / b_sf, capped at 1 when the
/// single-fidelity run never reached the target regret.
double discount_delta(double b_sf, bool sf_reached, double b_mf);

/// Full same-seed comparison: r~* = tau * min(aligned mf regret); b(.) is the
/// earliest cumulative cost at which each method reaches regret <= r~*.
DiscountReport discount(const RegretTrace& sf, const CampaignTrace& mf_trace, double f_star,
                        double tau = 2.0);

struct DiscountSummary {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

DiscountSummary aggregate(const std::vector<DiscountReport>& reports);

} // namespace mfbo
