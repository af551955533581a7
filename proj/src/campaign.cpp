#include "mfbo/campaign.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "mfbo/sampling.hpp"
#include "mfbo/surrogate.hpp"

namespace mfbo {

namespace {

constexpr double kBudgetSlack = 1e-9;

std::size_t affordable_count(double budget, double unit_cost) {
    return static_cast<std::size_t>(std::floor(budget / unit_cost + kBudgetSlack));
}

void validate(const CampaignConfig& config) {
    if (!config.problem) throw ConfigError("campaign: no problem configured");
    if (!(config.total_budget > 0.0)) throw ConfigError("campaign: total_budget must be positive");
    if (!(config.init_fraction > 0.0) || !(config.init_fraction < 1.0))
        throw ConfigError("campaign: init_fraction must lie in (0, 1)");
    if (!(config.init_hf_share >= 0.0) || !(config.init_hf_share <= 1.0))
        throw ConfigError("campaign: init_hf_share must lie in [0, 1]");
    if (config.surrogate_restarts < 0) throw ConfigError("campaign: surrogate_restarts must be >= 0");
}

} // namespace

CampaignResult run_campaign(const CampaignConfig& config, std::uint64_t seed) {
    validate(config);
    const Problem& problem = *config.problem;
    const SearchSpace& space = problem.space();
    const FidelityModel& fm = problem.fidelity_model();
    const bool multi = config.mode == CampaignConfig::Mode::MFBO;

    AcquisitionSpec acq = config.acquisition;
    acq.mode = multi ? AcquisitionSpec::Mode::MultiFidelity : AcquisitionSpec::Mode::SingleFidelity;

    RngStream rng(seed);

    // --- initial design -------------------------------------------------
    const double init_budget = config.init_fraction * config.total_budget;
    std::size_t n_hf = 0, n_lf = 0;
    if (multi) {
        // at least 2 HF points so the incumbent and regret are defined,
        // at least 1 LF point so both sources are represented
        n_hf = std::max<std::size_t>(2, affordable_count(init_budget * config.init_hf_share, 1.0));
        n_lf = std::max<std::size_t>(1, affordable_count(init_budget * (1.0 - config.init_hf_share), fm.rho()));
    } else {
        n_hf = std::max<std::size_t>(2, affordable_count(init_budget, 1.0));
    }
    if (space.is_discrete()) {
        // the initial design can never outgrow the candidate table
        n_hf = std::min(n_hf, space.candidate_count());
        n_lf = std::min(n_lf, space.candidate_count() - n_hf);
    }
    double init_cost = static_cast<double>(n_hf) + static_cast<double>(n_lf) * fm.rho();
    if (init_cost > config.total_budget + kBudgetSlack)
        throw ConfigError("campaign: budget " + std::to_string(config.total_budget) +
                          " cannot cover the initial design cost " + std::to_string(init_cost));

    std::vector<DesignPoint> hf_points, lf_points;
    if (space.is_continuous()) {
        hf_points = latin_hypercube(space, n_hf, rng);
        if (n_lf > 0) lf_points = latin_hypercube(space, n_lf, rng);
    } else {
        auto pts = uniform_sample(space, n_hf + n_lf, rng);
        hf_points.assign(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n_hf));
        lf_points.assign(pts.begin() + static_cast<std::ptrdiff_t>(n_hf), pts.end());
    }

    CampaignTrace trace(seed);
    auto observe = [&](const DesignPoint& x, double level) {
        Observation o;
        o.x = x;
        o.fidelity = level;
        o.cost = fm.cost(level);
        o.y = problem.evaluate(x, level);
        trace.append(std::move(o));
    };
    for (const auto& p : hf_points) observe(p, fm.high());
    for (const auto& p : lf_points) observe(p, fm.low());
    trace.set_initial_count(trace.size());

    // --- sequential loop ------------------------------------------------
    auto reason = CampaignResult::Reason::BudgetExhausted;
    std::optional<KernelParams> warm;
    FitOptions fit_opts;
    fit_opts.noise_floor = config.noise_floor;

    for (std::size_t iteration = 0;; ++iteration) {
        double remaining = config.total_budget - trace.total_cost();
        double cheapest = multi ? fm.rho() : 1.0;
        if (remaining + kBudgetSlack < cheapest) break;

        // warm-started refit every iteration; the full multi-start search runs
        // periodically (and always on the first fit)
        bool full_start = iteration % 5 == 0 || !warm;
        fit_opts.restarts = full_start ? config.surrogate_restarts : 0;
        fit_opts.include_default_init = full_start;
        fit_opts.warm_start = warm;
        SurrogateState state = fit(trace.observations(), space, fit_opts, rng);
        warm = state.params();

        QueryDecision decision;
        try {
            decision = next_query(state, space, fm, acq, trace.observations(), rng,
                                  remaining + kBudgetSlack);
        } catch (const ExhaustedError&) {
            reason = CampaignResult::Reason::SpaceExhausted;
            break;
        }
        observe(decision.x, decision.fidelity);
    }

    CampaignResult result;
    result.trace = std::move(trace);
    result.total_cost_spent = result.trace.total_cost();
    result.terminated_reason = reason;
    result.best_hf_value = -std::numeric_limits<double>::infinity();
    for (const auto& o : result.trace.observations())
        if (o.fidelity == fm.high()) result.best_hf_value = std::max(result.best_hf_value, o.y);
    return result;
}

std::vector<CampaignResult> run_suite(const CampaignConfig& config,
                                      const std::vector<std::uint64_t>& seeds, int workers) {
    if (seeds.empty()) throw ConfigError("run_suite: seed list must not be empty");

    std::vector<CampaignResult> results(seeds.size());
    std::vector<std::exception_ptr> failures(seeds.size());

    unsigned n_workers = workers > 0 ? static_cast<unsigned>(workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(seeds.size()));

    if (n_workers <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            try {
                results[i] = run_campaign(config, seeds[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= seeds.size()) return;
                try {
                    results[i] = run_campaign(config, seeds[i]);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const std::exception& e) {
                throw Error("seed " + std::to_string(seeds[i]) + ": " + e.what());
            }
        }
    }
    return results;
}

} // namespace mfbo
