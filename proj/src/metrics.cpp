#include "mfbo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfbo {

RegretTrace simple_regret_sf(const CampaignTrace& trace, double f_star) {
    if (!trace.high_fidelity_only())
        throw Error("simple_regret_sf: trace contains non-high-fidelity observations");
    RegretTrace out;
    out.values.reserve(trace.size());
    out.sf_costs = trace.cumulative_costs();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& o : trace.observations()) {
        best = std::max(best, o.y);
        out.values.push_back(std::max(f_star - best, 0.0));
    }
    return out;
}

RegretTrace simple_regret_mf(const CampaignTrace& mf_trace, const std::vector<double>& sf_costs,
                             double f_star) {
    // high-fidelity observations with their cumulative costs
    std::vector<double> hf_costs, hf_regrets;
    for (std::size_t k = 0; k < mf_trace.size(); ++k) {
        const auto& o = mf_trace.observations()[k];
        if (o.fidelity == kHighFidelity) {
            hf_costs.push_back(mf_trace.cumulative_costs()[k]);
            hf_regrets.push_back(std::max(f_star - o.y, 0.0));
        }
    }

    RegretTrace out;
    out.sf_costs = sf_costs;
    out.values.reserve(sf_costs.size());
    std::size_t k = 0;
    double r_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sf_costs.size(); ++i) {
        while (k < hf_costs.size() && hf_costs[k] <= sf_costs[i]) {
            r_min = std::min(r_min, hf_regrets[k]);
            ++k;
        }
        if (!std::isfinite(r_min))
            throw AlignmentError("simple_regret_mf: no high-fidelity observation within the first "
                                 "single-fidelity budget " +
                                 std::to_string(sf_costs[i]));
        out.values.push_back(r_min);
    }
    return out;
}

double discount_delta(double b_sf, bool sf_reached, double b_mf) {
    if (!sf_reached) return 1.0;
    return (b_sf - b_mf) / b_sf;
}

DiscountReport discount(const RegretTrace& sf, const CampaignTrace& mf_trace, double f_star,
                        double tau) {
    if (sf.values.empty()) throw Error("discount: empty single-fidelity regret trace");
    RegretTrace mf = simple_regret_mf(mf_trace, sf.sf_costs, f_star);

    DiscountReport rep;
    rep.tau = tau;
    double best_mf = *std::min_element(mf.values.begin(), mf.values.end());
    rep.r_star_corrected = best_mf * tau;

    // earliest multi-fidelity cumulative cost reaching the target
    rep.b_mf = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < mf_trace.size(); ++k) {
        const auto& o = mf_trace.observations()[k];
        if (o.fidelity != kHighFidelity) continue;
        if (std::max(f_star - o.y, 0.0) <= rep.r_star_corrected) {
            rep.b_mf = mf_trace.cumulative_costs()[k];
            break;
        }
    }
    if (std::isnan(rep.b_mf))
        throw Error("discount: multi-fidelity run never attains its own corrected regret "
                    "(impossible for tau >= 1)");

    rep.sf_reached = false;
    for (std::size_t i = 0; i < sf.values.size(); ++i) {
        if (sf.values[i] <= rep.r_star_corrected) {
            rep.b_sf = sf.sf_costs[i];
            rep.sf_reached = true;
            break;
        }
    }
    rep.delta = discount_delta(rep.b_sf, rep.sf_reached, rep.b_mf);
    return rep;
}

DiscountSummary aggregate(const std::vector<DiscountReport>& reports) {
    if (reports.empty()) throw Error("aggregate: empty report list");
    DiscountSummary s;
    s.count = reports.size();
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& r : reports) {
        sum += r.delta;
        s.min = std::min(s.min, r.delta);
        s.max = std::max(s.max, r.delta);
    }
    s.mean = sum / static_cast<double>(s.count);
    double sq = 0.0;
    for (const auto& r : reports) sq += (r.delta - s.mean) * (r.delta - s.mean);
    s.stddev = s.count > 1 ? std::sqrt(sq / static_cast<double>(s.count - 1)) : 0.0;
    return s;
}

} // namespace mfbo
