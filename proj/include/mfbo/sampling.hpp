#pragma once

#include <vector>

#include "mfbo/rng.hpp"
#include "mfbo/search_space.hpp"

namespace mfbo {

/// Latin hypercube design: n points whose projection onto every dimension
/// occupies each of the n equal-width strata exactly once. Continuous spaces
/// only; discrete initialization uses uniform_sample instead.
std::vector<DesignPoint> latin_hypercube(const SearchSpace& space, std::size_t n, RngStream& rng);

/// i.i.d. uniform points over the bounds (continuous) or a without-replacement
/// draw from the candidate table (discrete). n = 0 yields an empty list.
std::vector<DesignPoint> uniform_sample(const SearchSpace& space, std::size_t n, RngStream& rng);

} // namespace mfbo
