#include "mfbo/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace mfbo::optim {

namespace {

void project(Vector& x, const Vector& lo, const Vector& hi) {
    if (lo.size() == 0) return;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) = std::clamp(x(i), lo(i), hi(i));
}

} // namespace

Result lbfgs(const GradFn& fg, Vector x0, const LbfgsOptions& opts) {
    const Eigen::Index n = x0.size();
    project(x0, opts.lower, opts.upper);

    Vector x = x0;
    Vector g(n);
    int evals = 1;
    double f = fg(x, &g);
    if (!std::isfinite(f)) return {x, f, evals};

    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tol * std::max(1.0, std::abs(f))) break;

        // two-loop recursion
        Vector q = g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            const Vector& s = s_hist.back();
            const Vector& y = y_hist.back();
            q *= s.dot(y) / y.squaredNorm();
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        Vector dir = -q;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) { // fall back to steepest descent
            dir = -g;
            slope = -g.squaredNorm();
            if (!(slope < 0.0)) break;
        }

        // Armijo backtracking
        double step = 1.0;
        const double c1 = 1e-4;
        Vector x_new;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = x + step * dir;
            project(x_new, opts.lower, opts.upper);
            if ((x_new - x).lpNorm<Eigen::Infinity>() == 0.0) break;
            f_new = fg(x_new, nullptr);
            ++evals;
            if (std::isfinite(f_new) && f_new <= f + c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        Vector g_new(n);
        f_new = fg(x_new, &g_new);
        ++evals;
        if (!std::isfinite(f_new)) break;

        Vector s = x_new - x;
        Vector y = g_new - g;
        double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        double f_change = std::abs(f - f_new);
        x = x_new;
        g = g_new;
        f = f_new;
        if (f_change <= opts.f_tol * std::max(1.0, std::abs(f))) break;
    }
    return {x, f, evals};
}

Result nelder_mead(const Fn& f, Vector x0, const NelderMeadOptions& opts) {
    const Eigen::Index n = x0.size();
    project(x0, opts.lower, opts.upper);

    auto eval = [&](Vector v) {
        project(v, opts.lower, opts.upper);
        double val = f(v);
        return std::pair<Vector, double>(std::move(v), std::isfinite(val) ? val : std::numeric_limits<double>::infinity());
    };

    std::vector<std::pair<Vector, double>> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(eval(x0));
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector v = x0;
        v(i) += (v(i) + opts.init_step <= (opts.upper.size() ? opts.upper(i) : 1e300))
                    ? opts.init_step
                    : -opts.init_step;
        simplex.push_back(eval(v));
    }
    int evals = static_cast<int>(simplex.size());

    auto by_value = [](const auto& a, const auto& b) { return a.second < b.second; };
    std::sort(simplex.begin(), simplex.end(), by_value);

    while (evals < opts.max_evals) {
        if (std::abs(simplex.back().second - simplex.front().second) <=
            opts.f_tol * std::max(1.0, std::abs(simplex.front().second)))
            break;

        Vector centroid = Vector::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (std::size_t k = 0; k + 1 < simplex.size(); ++k) centroid(i) += simplex[k].first(i);
            centroid(i) /= static_cast<double>(n);
        }
        const auto& worst = simplex.back();

        auto reflect = eval(centroid + (centroid - worst.first));
        ++evals;
        if (reflect.second < simplex.front().second) {
            auto expand = eval(centroid + 2.0 * (centroid - worst.first));
            ++evals;
            simplex.back() = expand.second < reflect.second ? expand : reflect;
        } else if (reflect.second < simplex[simplex.size() - 2].second) {
            simplex.back() = reflect;
        } else {
            auto contract = eval(centroid + 0.5 * (worst.first - centroid));
            ++evals;
            if (contract.second < worst.second) {
                simplex.back() = contract;
            } else {
                for (std::size_t k = 1; k < simplex.size(); ++k) {
                    simplex[k] = eval(simplex.front().first + 0.5 * (simplex[k].first - simplex.front().first));
                    ++evals;
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_value);
    }
    return {simplex.front().first, simplex.front().second, evals};
}

} // namespace mfbo::optim
