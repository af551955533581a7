#include "mfbo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mfbo {

SweepGrid run_sweep(const SweepConfig& config) {
    if (config.rho_values.empty() || config.alpha_values.empty())
        throw ConfigError("run_sweep: empty rho or alpha grid");
    if (config.n_seeds == 0) throw ConfigError("run_sweep: n_seeds must be >= 1");

    std::vector<std::uint64_t> seeds(config.n_seeds);
    for (std::size_t j = 0; j < seeds.size(); ++j)
        seeds[j] = RngStream(config.master_seed).derive(j + 1).seed();

    SweepGrid grid;
    grid.rho_values = config.rho_values;
    grid.alpha_values = config.alpha_values;

    // informativeness per alpha, estimated once with a fixed derived seed
    std::vector<double> r2_per_alpha(config.alpha_values.size(), 0.0);
    for (std::size_t ia = 0; ia < config.alpha_values.size(); ++ia) {
        try {
            SyntheticProblem probe(config.problem_family, config.alpha_values[ia], 0.5);
            RngStream r2_rng = RngStream(config.master_seed).derive(0x522000 + ia);
            r2_per_alpha[ia] = estimate_informativeness(probe, config.r2_samples, r2_rng).r_squared;
        } catch (const std::exception&) {
            r2_per_alpha[ia] = std::numeric_limits<double>::quiet_NaN();
        }
    }

    // The single-fidelity baseline never touches the low-fidelity surface, so
    // it is identical across cells; compute it once per family.
    for (auto family : config.families) {
        std::vector<RegretTrace> sf_regrets;
        bool sf_ok = true;
        std::string sf_error;
        {
            SyntheticProblem hf_problem(config.problem_family, 1.0, 0.5);
            CampaignConfig cc;
            cc.problem = &hf_problem;
            cc.mode = CampaignConfig::Mode::SFBO;
            cc.acquisition.family = family;
            cc.total_budget = config.total_budget;
            cc.init_fraction = config.init_fraction;
            cc.init_hf_share = config.init_hf_share;
            cc.surrogate_restarts = config.surrogate_restarts;
            try {
                auto sf_results = run_suite(cc, seeds, config.workers);
                for (const auto& r : sf_results)
                    sf_regrets.push_back(simple_regret_sf(r.trace, hf_problem.optimum()));
            } catch (const std::exception& e) {
                sf_ok = false;
                sf_error = e.what();
            }
        }

        for (std::size_t ir = 0; ir < config.rho_values.size(); ++ir) {
            for (std::size_t ia = 0; ia < config.alpha_values.size(); ++ia) {
                SweepCell cell;
                cell.rho = config.rho_values[ir];
                cell.alpha = config.alpha_values[ia];
                cell.r_squared = r2_per_alpha[ia];
                cell.family = family;
                cell.n_seeds = config.n_seeds;
                if (!sf_ok) {
                    cell.failed = true;
                    cell.error = "single-fidelity baseline failed: " + sf_error;
                    grid.cells.push_back(std::move(cell));
                    continue;
                }
                try {
                    SyntheticProblem problem(config.problem_family, cell.alpha, cell.rho);
                    CampaignConfig cc;
                    cc.problem = &problem;
                    cc.mode = CampaignConfig::Mode::MFBO;
                    cc.acquisition.family = family;
                    cc.total_budget = config.total_budget;
                    cc.init_fraction = config.init_fraction;
                    cc.init_hf_share = config.init_hf_share;
                    cc.surrogate_restarts = config.surrogate_restarts;
                    auto mf_results = run_suite(cc, seeds, config.workers);

                    std::vector<DiscountReport> reports;
                    for (std::size_t j = 0; j < seeds.size(); ++j)
                        reports.push_back(discount(sf_regrets[j], mf_results[j].trace,
                                                   problem.optimum(), config.tau));
                    auto summary = aggregate(reports);
                    cell.delta_mean = summary.mean;
                    cell.delta_std = summary.stddev;
                } catch (const std::exception& e) {
                    cell.failed = true;
                    cell.error = "cell (rho=" + std::to_string(cell.rho) +
                                 ", alpha=" + std::to_string(cell.alpha) + "): " + e.what();
                }
                grid.cells.push_back(std::move(cell));
            }
        }
    }
    return grid;
}

AdvisorVerdict advise(double rho, double r_squared, double tau1, double tau2) {
    if (!(rho > 0.0)) throw ConfigError("advise: rho must be positive");
    AdvisorVerdict v;
    v.rho = rho;
    v.r_squared = r_squared;
    v.tau1 = tau1;
    v.tau2 = tau2;
    v.run_mfbo = rho < tau1 && r_squared > tau2;
    return v;
}

QueryRatio fidelity_query_ratio(const CampaignTrace& trace) {
    if (trace.empty()) throw Error("fidelity_query_ratio: empty trace");
    std::size_t n_seq = trace.size() - trace.initial_count();
    if (n_seq == 0) throw Error("fidelity_query_ratio: trace has no sequential queries");
    std::size_t hf = 0;
    for (std::size_t i = trace.initial_count(); i < trace.size(); ++i)
        if (trace.observations()[i].fidelity == kHighFidelity) ++hf;
    QueryRatio r;
    r.hf_fraction = static_cast<double>(hf) / static_cast<double>(n_seq);
    r.lf_fraction = 1.0 - r.hf_fraction;
    return r;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw Error("spearman: inputs must be equally sized with at least 2 entries");
    auto ra = average_ranks(a);
    auto rb = average_ranks(b);
    double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
    double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    if (da <= 0.0 || db <= 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

} // namespace mfbo
