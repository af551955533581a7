#pragma once

#include <optional>
#include <vector>

#include "mfbo/fidelity.hpp"
#include "mfbo/observation.hpp"
#include "mfbo/rng.hpp"
#include "mfbo/surrogate.hpp"

namespace mfbo {

struct AcquisitionSpec {
    enum class Family { EI, MES };
    enum class Mode { SingleFidelity, MultiFidelity };

    Family family = Family::EI;
    Mode mode = Mode::SingleFidelity;
    int mes_max_samples = 16;        // f* draws per decision
    int candidate_grid_size = 2048;  // grid for continuous maximization
};

/// Outcome of one acquisition maximization. In multi-fidelity mode
/// acquisition_value = raw_value / cost(fidelity); in single-fidelity mode
/// the two are equal.
struct QueryDecision {
    DesignPoint x;
    double fidelity = kHighFidelity;
    double acquisition_value = 0.0;
    double raw_value = 0.0;
};

/// Closed-form expected improvement under the maximization convention.
/// Degenerates to max(mean - incumbent, 0) at zero standard deviation.
double expected_improvement(double mean, double stddev, double incumbent);

/// Max-value entropy contribution averaged over sampled global maxima:
/// mean over f* of gamma*phi(gamma)/(2*Phi(gamma)) - log Phi(gamma) with
/// gamma = (f* - mean)/stddev. Zero at zero standard deviation.
double mes_value(double mean, double stddev, const std::vector<double>& max_samples);

/// Draws n_samples approximate global-maximum values of the high-fidelity
/// posterior via a Gumbel fit to the max-CDF over a discretization grid.
/// Every sample is clamped to at least the best observed high-fidelity value.
std::vector<double> sample_max_values(const SurrogateState& state, const SearchSpace& space,
                                      int n_samples, RngStream& rng);

/// Argmax over an ordered candidate list with deterministic tie-breaking:
/// lowest candidate index first, then lowest fidelity.
struct ScoredCandidate {
    std::size_t index;
    double fidelity;
    double acquisition_value;
    double raw_value;
};
std::optional<ScoredCandidate> select_best(const std::vector<ScoredCandidate>& scored);

/// Maximizes the acquisition over the space (and, in multi-fidelity mode,
/// over both fidelity levels with raw values divided by the level cost).
/// Discrete spaces never revisit an already-queried (candidate, fidelity)
/// pair. `max_cost`, when set, restricts the admissible fidelities to those
/// affordable within the remaining budget.
QueryDecision next_query(const SurrogateState& state, const SearchSpace& space,
                         const FidelityModel& fidelity, const AcquisitionSpec& spec,
                         const std::vector<Observation>& data, RngStream& rng,
                         std::optional<double> max_cost = std::nullopt);

} // namespace mfbo
