#pragma once

#include <cstdint>
#include <vector>

#include "mfbo/acquisition.hpp"
#include "mfbo/problems.hpp"

namespace mfbo {

struct CampaignConfig {
    enum class Mode { SFBO, MFBO };

    const Problem* problem = nullptr;
    AcquisitionSpec acquisition;
    Mode mode = Mode::SFBO;
    double total_budget = 50.0; // in high-fidelity query units
    double init_fraction = 0.10;
    double init_hf_share = 0.5;
    std::vector<std::uint64_t> seeds = default_seeds();
    int surrogate_restarts = 2;
    double noise_floor = 1e-4; // passed through to the surrogate fit

    static std::vector<std::uint64_t> default_seeds() {
        std::vector<std::uint64_t> s(20);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
        return s;
    }
};

struct CampaignResult {
    enum class Reason { BudgetExhausted, SpaceExhausted };

    CampaignTrace trace;
    double best_hf_value = 0.0;
    double total_cost_spent = 0.0;
    Reason terminated_reason = Reason::BudgetExhausted;
};

/// One full optimization run: initial design, then the sequential
/// fit / maximize-acquisition / evaluate cycle until the budget cannot cover
/// the cheapest admissible query or a discrete space is exhausted. The whole
/// trace is a deterministic function of (config, seed).
CampaignResult run_campaign(const CampaignConfig& config, std::uint64_t seed);

/// One campaign per seed, in seed order. `workers` > 1 runs seeds in
/// parallel; results are identical regardless of the worker count. A failing
/// seed is reported with its seed value after the remaining seeds finish.
std::vector<CampaignResult> run_suite(const CampaignConfig& config,
                                      const std::vector<std::uint64_t>& seeds, int workers = 0);

} // namespace mfbo
