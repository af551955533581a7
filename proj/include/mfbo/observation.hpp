#pragma once

#include <cstdint>
#include <vector>

#include "mfbo/errors.hpp"
#include "mfbo/fidelity.hpp"
#include "mfbo/search_space.hpp"

namespace mfbo {

/// One query result: where, at which fidelity, what came back, what it cost.
struct Observation {
    DesignPoint x;
    double fidelity = kHighFidelity;
    double y = 0.0;
    double cost = 1.0;
};

/// Ordered record of a single optimization campaign: the initial design
/// first, then the sequential queries. Cumulative costs are maintained as
/// prefix sums on append.
class CampaignTrace {
public:
    CampaignTrace() = default;
    explicit CampaignTrace(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    void append(Observation obs) {
        double prev = cumulative_costs_.empty() ? 0.0 : cumulative_costs_.back();
        cumulative_costs_.push_back(prev + obs.cost);
        observations_.push_back(std::move(obs));
    }

    /// Marks the end of the initial design; everything after is sequential.
    void set_initial_count(std::size_t n) { initial_count_ = n; }
    std::size_t initial_count() const { return initial_count_; }

    std::size_t size() const { return observations_.size(); }
    bool empty() const { return observations_.empty(); }

    const std::vector<Observation>& observations() const { return observations_; }
    const std::vector<double>& cumulative_costs() const { return cumulative_costs_; }

    double total_cost() const { return cumulative_costs_.empty() ? 0.0 : cumulative_costs_.back(); }

    bool high_fidelity_only() const {
        for (const auto& o : observations_)
            if (o.fidelity != kHighFidelity) return false;
        return true;
    }

private:
    std::uint64_t seed_ = 0;
    std::size_t initial_count_ = 0;
    std::vector<Observation> observations_;
    std::vector<double> cumulative_costs_;
};

} // namespace mfbo
