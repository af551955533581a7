#include "mfbo/sampling.hpp"

namespace mfbo {

std::vector<DesignPoint> latin_hypercube(const SearchSpace& space, std::size_t n, RngStream& rng) {
    if (space.is_discrete())
        throw Error("latin_hypercube: unsupported on discrete spaces; use uniform_sample");
    if (n == 0) throw Error("latin_hypercube: n must be >= 1");

    const std::size_t d = space.dims();
    Matrix unit(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        auto strata = rng.permutation(n);
        for (std::size_t i = 0; i < n; ++i) {
            double u = rng.uniform();
            unit(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (static_cast<double>(strata[i]) + u) / static_cast<double>(n);
        }
    }

    std::vector<DesignPoint> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        points.push_back({space.from_unit(unit.row(static_cast<Eigen::Index>(i)).transpose()), std::nullopt});
    return points;
}

std::vector<DesignPoint> uniform_sample(const SearchSpace& space, std::size_t n, RngStream& rng) {
    std::vector<DesignPoint> points;
    if (n == 0) return points;
    points.reserve(n);

    if (space.is_continuous()) {
        const std::size_t d = space.dims();
        for (std::size_t i = 0; i < n; ++i) {
            Vector u(static_cast<Eigen::Index>(d));
            for (std::size_t j = 0; j < d; ++j) u(static_cast<Eigen::Index>(j)) = rng.uniform();
            points.push_back({space.from_unit(u), std::nullopt});
        }
        return points;
    }

    if (n > space.candidate_count())
        throw Error("uniform_sample: requested " + std::to_string(n) + " points but only " +
                    std::to_string(space.candidate_count()) + " candidates exist");
    // partial Fisher-Yates
    std::vector<std::size_t> idx(space.candidate_count());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(idx.size() - i));
        std::swap(idx[i], idx[j]);
        points.push_back(space.candidate(idx[i]));
    }
    return points;
}

} // namespace mfbo
