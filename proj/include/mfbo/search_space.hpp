#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mfbo/errors.hpp"

namespace mfbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A candidate input: coordinates in problem units, plus the row index of the
/// candidate table for discrete spaces.
struct DesignPoint {
    Vector coords;
    std::optional<std::size_t> index; // set iff the space is discrete
};

/// Box-bounded continuous space or a fixed table of discrete candidates.
class SearchSpace {
public:
    enum class Kind { Continuous, Discrete };

    static SearchSpace continuous(std::vector<std::pair<double, double>> bounds) {
        if (bounds.empty()) throw ConfigError("continuous space needs at least one dimension");
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            if (!(bounds[i].first < bounds[i].second))
                throw ConfigError("continuous bounds: lo must be < hi in dimension " + std::to_string(i));
        }
        SearchSpace s;
        s.kind_ = Kind::Continuous;
        s.bounds_ = std::move(bounds);
        return s;
    }

    /// `candidates` holds one row per candidate; `ids` are unique identifiers
    /// (defaults to the row index rendered as a string).
    static SearchSpace discrete(Matrix candidates, std::vector<std::string> ids = {}) {
        if (candidates.rows() == 0) throw ConfigError("discrete space needs a non-empty candidate list");
        if (ids.empty()) {
            ids.resize(static_cast<std::size_t>(candidates.rows()));
            for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
        }
        if (static_cast<Eigen::Index>(ids.size()) != candidates.rows())
            throw ConfigError("discrete space: id count must match candidate count");
        SearchSpace s;
        s.kind_ = Kind::Discrete;
        s.candidates_ = std::move(candidates);
        s.ids_ = std::move(ids);
        return s;
    }

    Kind kind() const { return kind_; }
    bool is_continuous() const { return kind_ == Kind::Continuous; }
    bool is_discrete() const { return kind_ == Kind::Discrete; }

    std::size_t dims() const {
        return is_continuous() ? bounds_.size() : static_cast<std::size_t>(candidates_.cols());
    }

    const std::vector<std::pair<double, double>>& bounds() const { return bounds_; }

    std::size_t candidate_count() const { return static_cast<std::size_t>(candidates_.rows()); }
    const Matrix& candidates() const { return candidates_; }
    const std::vector<std::string>& candidate_ids() const { return ids_; }

    DesignPoint candidate(std::size_t i) const {
        return DesignPoint{candidates_.row(static_cast<Eigen::Index>(i)).transpose(), i};
    }

    bool contains(const Vector& x) const {
        if (!is_continuous() || static_cast<std::size_t>(x.size()) != dims()) return false;
        for (std::size_t i = 0; i < bounds_.size(); ++i) {
            double v = x(static_cast<Eigen::Index>(i));
            if (v < bounds_[i].first || v > bounds_[i].second) return false;
        }
        return true;
    }

    /// Map problem-space coordinates to the unit cube used by the surrogate.
    /// Discrete candidates are assumed already normalized by the loader.
    Vector to_unit(const Vector& x) const {
        if (is_discrete()) return x;
        Vector u(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const auto& [lo, hi] = bounds_[static_cast<std::size_t>(i)];
            u(i) = (x(i) - lo) / (hi - lo);
        }
        return u;
    }

    Vector from_unit(const Vector& u) const {
        if (is_discrete()) return u;
        Vector x(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const auto& [lo, hi] = bounds_[static_cast<std::size_t>(i)];
            x(i) = lo + (hi - lo) * u(i);
        }
        return x;
    }

private:
    SearchSpace() = default;

    Kind kind_ = Kind::Continuous;
    std::vector<std::pair<double, double>> bounds_;
    Matrix candidates_;
    std::vector<std::string> ids_;
};

} // namespace mfbo
