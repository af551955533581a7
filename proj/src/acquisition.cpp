#include "mfbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "mfbo/optim.hpp"
#include "mfbo/sampling.hpp"

namespace mfbo {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kLogSqrt2Pi = 0.9189385332046727;

double norm_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }
double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

/// log Phi(z), switching to the tail expansion below z = -6 where erfc
/// starts losing accuracy in the log.
double log_norm_cdf(double z) {
    if (z > -6.0) return std::log(norm_cdf(z));
    double z2 = z * z;
    double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - std::log(-z) - kLogSqrt2Pi + std::log(series);
}

/// Information-fraction weight of a low-fidelity query: the squared posterior
/// correlation between f(x, l=0) and f(x, l=1), i.e. the share of remaining
/// high-fidelity variance at x that observing the low fidelity would remove.
/// 1 for a high-fidelity query by definition; 0 once the low-fidelity value
/// at x is already pinned down.
double fidelity_weight(double var_hf, double var_lf, double cov) {
    const double eps = 1e-14;
    if (var_hf <= eps || var_lf <= eps) return 0.0;
    double corr2 = cov * cov / (var_hf * var_lf);
    return std::min(corr2, 1.0);
}

double best_high_fidelity_output(const std::vector<Observation>& data) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& o : data)
        if (o.fidelity == kHighFidelity) best = std::max(best, o.y);
    return best;
}

} // namespace

double expected_improvement(double mean, double stddev, double incumbent) {
    if (stddev <= 0.0) return std::max(mean - incumbent, 0.0);
    double z = (mean - incumbent) / stddev;
    double ei = stddev * (z * norm_cdf(z) + norm_pdf(z));
    return std::max(ei, 0.0);
}

double mes_value(double mean, double stddev, const std::vector<double>& max_samples) {
    if (stddev <= 0.0 || max_samples.empty()) return 0.0;
    double acc = 0.0;
    for (double fstar : max_samples) {
        double gamma = (fstar - mean) / stddev;
        double log_cdf = log_norm_cdf(gamma);
        double log_pdf = -0.5 * gamma * gamma - kLogSqrt2Pi;
        double ratio = std::exp(log_pdf - log_cdf); // phi/Phi
        acc += 0.5 * gamma * ratio - log_cdf;
    }
    return std::max(acc / static_cast<double>(max_samples.size()), 0.0);
}

std::vector<double> sample_max_values(const SurrogateState& state, const SearchSpace& space,
                                      int n_samples, RngStream& rng) {
    constexpr int kGridSize = 1000;

    // discretization grid in normalized coordinates
    Matrix grid;
    if (space.is_continuous()) {
        const auto d = static_cast<Eigen::Index>(space.dims());
        grid.resize(kGridSize, d);
        for (Eigen::Index i = 0; i < grid.rows(); ++i)
            for (Eigen::Index j = 0; j < d; ++j) grid(i, j) = rng.uniform();
    } else {
        if (space.candidate_count() <= kGridSize) {
            grid = space.candidates();
        } else {
            auto pts = uniform_sample(space, kGridSize, rng);
            grid.resize(kGridSize, static_cast<Eigen::Index>(space.dims()));
            for (Eigen::Index i = 0; i < grid.rows(); ++i)
                grid.row(i) = pts[static_cast<std::size_t>(i)].coords.transpose();
        }
    }

    Vector mu, var;
    Vector hf = Vector::Constant(grid.rows(), kHighFidelity);
    state.posterior(grid, hf, mu, var);
    Vector sigma = var.array().max(0.0).sqrt();

    // best observed high-fidelity output from the training set
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(state.size()); ++i)
        if (state.train_levels()(i) == kHighFidelity)
            best = std::max(best, state.train_outputs()(i));
    if (!std::isfinite(best)) best = state.size() ? state.train_outputs().maxCoeff() : mu.maxCoeff();

    if (sigma.maxCoeff() <= 1e-12)
        return std::vector<double>(static_cast<std::size_t>(n_samples), best);

    // Gumbel fit to P(max <= y) = prod_i Phi((y - mu_i)/sigma_i)
    auto log_prob_below = [&](double y) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < mu.size(); ++i) {
            double s = std::max(sigma(i), 1e-12);
            acc += log_norm_cdf((y - mu(i)) / s);
        }
        return acc;
    };
    double lo = (mu.array() - 8.0 * sigma.array().max(1e-12)).minCoeff();
    double hi = (mu.array() + 8.0 * sigma.array().max(1e-12)).maxCoeff();
    auto quantile = [&](double q) {
        double a = lo, b = hi;
        double target = std::log(q);
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (a + b);
            if (log_prob_below(mid) < target)
                a = mid;
            else
                b = mid;
        }
        return 0.5 * (a + b);
    };
    double y25 = quantile(0.25);
    double y50 = quantile(0.50);
    double y75 = quantile(0.75);
    double denom = std::log(std::log(4.0)) - std::log(std::log(4.0 / 3.0));
    double b_scale = std::max((y75 - y25) / denom, 1e-12);
    double a_loc = y50 + b_scale * std::log(std::log(2.0));

    std::vector<double> samples(static_cast<std::size_t>(n_samples));
    for (auto& s : samples) s = std::max(a_loc + b_scale * rng.gumbel(), best);
    return samples;
}

std::optional<ScoredCandidate> select_best(const std::vector<ScoredCandidate>& scored) {
    std::optional<ScoredCandidate> best;
    for (const auto& c : scored) {
        if (!best) {
            best = c;
            continue;
        }
        if (c.acquisition_value > best->acquisition_value) {
            best = c;
        } else if (c.acquisition_value == best->acquisition_value) {
            if (c.index < best->index ||
                (c.index == best->index && c.fidelity < best->fidelity))
                best = c;
        }
    }
    return best;
}

QueryDecision next_query(const SurrogateState& state, const SearchSpace& space,
                         const FidelityModel& fidelity, const AcquisitionSpec& spec,
                         const std::vector<Observation>& data, RngStream& rng,
                         std::optional<double> max_cost) {
    const bool multi = spec.mode == AcquisitionSpec::Mode::MultiFidelity;

    std::vector<double> levels;
    if (multi) levels.push_back(fidelity.low());
    levels.push_back(fidelity.high());
    if (max_cost) {
        std::erase_if(levels, [&](double l) { return fidelity.cost(l) > *max_cost; });
        if (levels.empty()) throw Error("next_query: no fidelity affordable within remaining budget");
    }

    double incumbent = best_high_fidelity_output(data);
    if (!std::isfinite(incumbent))
        throw Error("next_query: at least one high-fidelity observation is required");

    std::vector<double> fstar;
    if (spec.family == AcquisitionSpec::Family::MES)
        fstar = sample_max_values(state, space, spec.mes_max_samples, rng);

    auto base_value = [&](double mean_hf, double sd_hf) {
        return spec.family == AcquisitionSpec::Family::EI
                   ? expected_improvement(mean_hf, sd_hf, incumbent)
                   : mes_value(mean_hf, sd_hf, fstar);
    };

    // candidate matrix in normalized coordinates
    Matrix cand;
    std::vector<std::set<double>> queried; // per candidate: fidelities to skip
    if (space.is_discrete()) {
        cand = space.candidates();
        queried.assign(space.candidate_count(), {});
        for (const auto& o : data)
            if (o.x.index) queried[*o.x.index].insert(o.fidelity);
    } else {
        const auto m = static_cast<std::size_t>(spec.candidate_grid_size);
        const auto d = static_cast<Eigen::Index>(space.dims());
        cand.resize(static_cast<Eigen::Index>(m), d);
        for (Eigen::Index j = 0; j < d; ++j) {
            auto strata = rng.permutation(m);
            for (std::size_t i = 0; i < m; ++i)
                cand(static_cast<Eigen::Index>(i), j) =
                    (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(m);
        }
    }

    auto score_rows = [&](const Matrix& rows, std::size_t index_offset,
                          std::vector<ScoredCandidate>& out) {
        if (multi) {
            auto view = state.posterior_two_fidelity(rows);
            for (Eigen::Index i = 0; i < rows.rows(); ++i) {
                std::size_t idx = index_offset + static_cast<std::size_t>(i);
                double base = base_value(view.mean_hf(i), std::sqrt(view.var_hf(i)));
                for (double l : levels) {
                    if (space.is_discrete() && idx < queried.size() && queried[idx].count(l)) continue;
                    double w = l == kHighFidelity
                                   ? 1.0
                                   : fidelity_weight(view.var_hf(i), view.var_lf(i), view.cov(i));
                    double raw = base * w;
                    out.push_back({idx, l, raw / fidelity.cost(l), raw});
                }
            }
        } else {
            Vector mu, var;
            Vector hf = Vector::Constant(rows.rows(), kHighFidelity);
            state.posterior(rows, hf, mu, var);
            for (Eigen::Index i = 0; i < rows.rows(); ++i) {
                std::size_t idx = index_offset + static_cast<std::size_t>(i);
                if (space.is_discrete() && idx < queried.size() && queried[idx].count(kHighFidelity))
                    continue;
                double raw = base_value(mu(i), std::sqrt(std::max(var(i), 0.0)));
                out.push_back({idx, kHighFidelity, raw, raw});
            }
        }
    };

    std::vector<ScoredCandidate> scored;
    scored.reserve(static_cast<std::size_t>(cand.rows()) * levels.size());
    score_rows(cand, 0, scored);
    if (scored.empty()) throw ExhaustedError("next_query: all (candidate, fidelity) pairs queried");

    // local polish from the best few grid points (continuous only)
    Matrix refined;
    if (space.is_continuous()) {
        std::vector<ScoredCandidate> top = scored;
        std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
            return a.acquisition_value > b.acquisition_value;
        });
        const std::size_t n_starts = std::min<std::size_t>(5, top.size());
        const auto d = static_cast<Eigen::Index>(space.dims());
        std::vector<std::pair<Vector, double>> polished;
        for (std::size_t s = 0; s < n_starts; ++s) {
            const auto& start = top[s];
            double l = start.fidelity;
            auto neg_acq = [&](const Vector& x) {
                Matrix row(1, d);
                row.row(0) = x.transpose();
                double raw;
                if (multi) {
                    auto v = state.posterior_two_fidelity(row);
                    double base = base_value(v.mean_hf(0), std::sqrt(v.var_hf(0)));
                    double w = l == kHighFidelity
                                   ? 1.0
                                   : fidelity_weight(v.var_hf(0), v.var_lf(0), v.cov(0));
                    raw = base * w;
                } else {
                    auto [mu1, var1] = state.posterior_at(x, kHighFidelity);
                    raw = base_value(mu1, std::sqrt(std::max(var1, 0.0)));
                }
                return -(multi ? raw / fidelity.cost(l) : raw);
            };
            optim::NelderMeadOptions nm;
            nm.max_evals = 40 * static_cast<int>(d) + 40;
            nm.init_step = 0.02;
            nm.lower = Vector::Zero(d);
            nm.upper = Vector::Ones(d);
            auto res = optim::nelder_mead(neg_acq, cand.row(static_cast<Eigen::Index>(start.index)).transpose(), nm);
            polished.emplace_back(res.x, l);
        }
        refined.resize(static_cast<Eigen::Index>(polished.size()), d);
        std::vector<ScoredCandidate> refined_scored;
        for (std::size_t i = 0; i < polished.size(); ++i) {
            Matrix row(1, d);
            row.row(0) = polished[i].first.transpose();
            std::vector<ScoredCandidate> tmp;
            score_rows(row, static_cast<std::size_t>(cand.rows()) + i, tmp);
            double want = polished[i].second;
            for (const auto& c : tmp)
                if (c.fidelity == want) refined_scored.push_back(c);
            refined.row(static_cast<Eigen::Index>(i)) = polished[i].first.transpose();
        }
        scored.insert(scored.end(), refined_scored.begin(), refined_scored.end());
    }

    auto best = select_best(scored);
    if (!best) throw ExhaustedError("next_query: no admissible candidate");

    QueryDecision decision;
    decision.fidelity = best->fidelity;
    decision.acquisition_value = best->acquisition_value;
    decision.raw_value = best->raw_value;
    if (space.is_discrete()) {
        decision.x = space.candidate(best->index);
    } else {
        Vector unit = best->index < static_cast<std::size_t>(cand.rows())
                          ? Vector(cand.row(static_cast<Eigen::Index>(best->index)).transpose())
                          : Vector(refined.row(static_cast<Eigen::Index>(best->index -
                                                                         static_cast<std::size_t>(cand.rows())))
                                       .transpose());
        decision.x = DesignPoint{space.from_unit(unit), std::nullopt};
    }
    return decision;
}

} // namespace mfbo
