#include "mfbo/problems.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "mfbo/sampling.hpp"

namespace mfbo {

namespace {

using std::numbers::pi;

double effective_alpha(double level, double alpha) {
    return level == kHighFidelity ? 1.0 : alpha;
}

} // namespace

double branin(const Vector& x, double level, double alpha) {
    if (x.size() != 2) throw Error("branin: expects a 2-vector");
    double a = effective_alpha(level, alpha);
    double coeff = 5.1 / (4.0 * pi * pi) - 0.1 * (1.0 - a);
    double t = x(1) - coeff * x(0) * x(0) + (5.0 / pi) * x(0) - 6.0;
    return t * t + 10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(x(0)) + 10.0;
}

double park(const Vector& x, double level, double alpha) {
    if (x.size() != 4) throw Error("park: expects a 4-vector");
    double a = effective_alpha(level, alpha);
    double x1 = std::max(x(0), 1e-6);
    double inner = (x(1) + x(2) * x(2)) * x(3) / (x1 * x1);
    double t1 = 0.5 * x1 * (std::sqrt(1.0 + inner) - 1.0);
    double t2 = (x1 + (3.0 - 1.5 * (1.0 - a)) * x(3)) * std::exp(1.0 + std::sin(x(2)));
    return t1 + t2;
}

SyntheticProblem::SyntheticProblem(Family family, double alpha, double rho)
    : family_(family), alpha_(alpha),
      space_(family == Family::Branin2D
                 ? SearchSpace::continuous({{-5.0, 10.0}, {0.0, 15.0}})
                 : SearchSpace::continuous({{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}})),
      fidelity_(FidelityModel::two_level(rho)) {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("synthetic problem: alpha must lie in [0, 1]");
    if (family_ == Family::Branin2D) {
        optimum_ = -5.0 / (4.0 * pi); // -Branin minimum, attained at (pi, 2.275)
    } else {
        Vector corner = Vector::Ones(4);
        optimum_ = park(corner, kHighFidelity, 1.0);
    }
}

double SyntheticProblem::evaluate(const DesignPoint& x, double level) const {
    if (!space_.contains(x.coords)) throw Error(name() + ": input outside bounds");
    // Branin is canonically minimized; negate so the toolkit always maximizes.
    if (family_ == Family::Branin2D) return -branin(x.coords, level, alpha_);
    return park(x.coords, level, alpha_);
}

std::string SyntheticProblem::name() const {
    return family_ == Family::Branin2D ? "branin" : "park";
}

TabularProblem::TabularProblem(SearchSpace candidates, Vector hf_values, Vector lf_values,
                               double rho, std::string name)
    : space_(std::move(candidates)), hf_(std::move(hf_values)), lf_(std::move(lf_values)),
      fidelity_(FidelityModel::two_level(rho)), name_(std::move(name)) {
    if (!space_.is_discrete()) throw ConfigError("tabular problem requires a discrete space");
    const auto n = static_cast<Eigen::Index>(space_.candidate_count());
    if (hf_.size() != n || lf_.size() != n)
        throw ConfigError("tabular problem: value columns must match candidate count");
    Eigen::Index arg = 0;
    optimum_ = hf_.maxCoeff(&arg);
    optimum_index_ = static_cast<std::size_t>(arg);
}

double TabularProblem::evaluate(const DesignPoint& x, double level) const {
    if (!x.index) throw Error("tabular problem: design point carries no candidate index");
    if (*x.index >= space_.candidate_count()) throw Error("tabular problem: candidate index out of range");
    auto i = static_cast<Eigen::Index>(*x.index);
    return level == kHighFidelity ? hf_(i) : lf_(i);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw DataError("row " + std::to_string(row) + ", column '" + col +
                        "': value '" + cell + "' is not numeric");
    return value;
}

} // namespace

TabularProblem load_tabular(const std::string& path, const std::vector<std::string>& feature_cols,
                            const std::string& hf_col, const std::string& lf_col, double rho,
                            const std::string& id_col, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV file '" + path + "' is empty");
    auto header = split_csv_line(line);

    auto column_index = [&](const std::string& col) {
        auto it = std::find(header.begin(), header.end(), col);
        if (it == header.end())
            throw DataError("column '" + col + "' not found in '" + path + "'");
        return static_cast<std::size_t>(it - header.begin());
    };

    std::vector<std::size_t> feat_idx;
    for (const auto& c : feature_cols) feat_idx.push_back(column_index(c));
    std::size_t hf_idx = column_index(hf_col);
    std::size_t lf_idx = column_index(lf_col);
    std::size_t id_idx = id_col.empty() ? static_cast<std::size_t>(-1) : column_index(id_col);

    std::vector<std::vector<double>> features;
    std::vector<double> hf, lf;
    std::vector<std::string> ids;
    std::set<std::string> seen_ids;

    std::size_t row = 1; // header is row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
        std::vector<double> f;
        f.reserve(feat_idx.size());
        for (std::size_t k = 0; k < feat_idx.size(); ++k)
            f.push_back(parse_cell(cells[feat_idx[k]], row, feature_cols[k]));
        features.push_back(std::move(f));
        hf.push_back(parse_cell(cells[hf_idx], row, hf_col));
        lf.push_back(parse_cell(cells[lf_idx], row, lf_col));
        if (id_idx != static_cast<std::size_t>(-1)) {
            const std::string& id = cells[id_idx];
            if (!seen_ids.insert(id).second)
                throw DataError("row " + std::to_string(row) + ": duplicate candidate id '" + id + "'");
            ids.push_back(id);
        }
    }
    if (features.empty()) throw DataError("CSV file '" + path + "' contains no data rows");

    const auto n = static_cast<Eigen::Index>(features.size());
    const auto d = static_cast<Eigen::Index>(feature_cols.size());
    Matrix cand(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            cand(i, j) = features[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

    // per-column min-max normalization; constant columns collapse to 0
    for (Eigen::Index j = 0; j < d; ++j) {
        double lo = cand.col(j).minCoeff();
        double hi = cand.col(j).maxCoeff();
        if (hi > lo)
            cand.col(j) = (cand.col(j).array() - lo) / (hi - lo);
        else
            cand.col(j).setZero();
    }

    Vector hf_v = Eigen::Map<Vector>(hf.data(), n);
    Vector lf_v = Eigen::Map<Vector>(lf.data(), n);
    return TabularProblem(SearchSpace::discrete(cand, ids), hf_v, lf_v, rho,
                          name.empty() ? path : name);
}

TabularProblem degrade_lf(const TabularProblem& problem, double target_r2, RngStream& rng) {
    const Vector& hf = problem.hf_values();
    const Vector& lf = problem.lf_values();
    double lf_sd = std::sqrt((lf.array() - lf.mean()).square().mean());
    if (lf_sd <= 0.0) lf_sd = 1.0;

    Vector noise(lf.size());
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();

    double scale = 0.05;
    Vector degraded = lf;
    for (int it = 0; it < 60; ++it) {
        degraded = lf + (scale * lf_sd) * noise;
        if (paired_r_squared(degraded, hf).r_squared < target_r2) break;
        scale *= 1.4;
    }
    return TabularProblem(problem.space(), hf, degraded, problem.fidelity_model().rho(),
                          problem.name() + "-degraded");
}

InformativenessReport paired_r_squared(const Vector& lf, const Vector& hf) {
    if (lf.size() != hf.size() || lf.size() == 0)
        throw Error("paired_r_squared: inputs must be non-empty and equally sized");
    InformativenessReport rep;
    rep.n_samples = static_cast<std::size_t>(lf.size());

    double mlf = lf.mean();
    double mhf = hf.mean();
    double var_lf = (lf.array() - mlf).square().sum();
    double cov = ((lf.array() - mlf) * (hf.array() - mhf)).sum();
    double ss_tot = (hf.array() - mhf).square().sum();

    if (var_lf <= 1e-24) {
        rep.degenerate = true;
        rep.intercept = mhf;
        return rep;
    }
    rep.slope = cov / var_lf;
    rep.intercept = mhf - rep.slope * mlf;
    Vector resid = hf - (rep.slope * lf.array() + rep.intercept).matrix();
    double ss_res = resid.squaredNorm();
    rep.r_squared = ss_tot <= 1e-24 ? (ss_res <= 1e-24 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
    return rep;
}

InformativenessReport estimate_informativeness(const Problem& problem, std::size_t n, RngStream& rng) {
    std::size_t count = n;
    if (problem.space().is_discrete())
        count = std::min(count, problem.space().candidate_count());
    auto points = uniform_sample(problem.space(), count, rng);

    Vector hf(static_cast<Eigen::Index>(points.size()));
    Vector lf(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        hf(static_cast<Eigen::Index>(i)) = problem.evaluate(points[i], kHighFidelity);
        lf(static_cast<Eigen::Index>(i)) = problem.evaluate(points[i], kLowFidelity);
    }
    return paired_r_squared(lf, hf);
}

} // namespace mfbo
