#include "mfbo/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "mfbo/campaign.hpp"
#include "mfbo/experiments.hpp"
#include "mfbo/io.hpp"
#include "mfbo/metrics.hpp"
#include "mfbo/surrogate.hpp"

namespace mfbo::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return j;
}

/// Rejects keys outside the allowed set; validation errors name the field.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

double get_number(const json& j, const std::string& key, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing required field '" + key + "'");
    }
    if (!j.at(key).is_number()) throw ConfigError("field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::string get_string(const json& j, const std::string& key,
                       std::optional<std::string> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing required field '" + key + "'");
    }
    if (!j.at(key).is_string()) throw ConfigError("field '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

std::vector<std::uint64_t> parse_seeds(const json& j) {
    if (!j.contains("seeds")) return CampaignConfig::default_seeds();
    const auto& s = j.at("seeds");
    std::vector<std::uint64_t> seeds;
    if (s.is_number_integer()) {
        auto n = s.get<long long>();
        if (n <= 0) throw ConfigError("field 'seeds' must be a positive count or an array");
        for (long long i = 0; i < n; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    } else if (s.is_array()) {
        for (const auto& v : s) {
            if (!v.is_number_integer()) throw ConfigError("field 'seeds' must contain integers");
            seeds.push_back(v.get<std::uint64_t>());
        }
        if (seeds.empty()) throw ConfigError("field 'seeds' must not be empty");
    } else {
        throw ConfigError("field 'seeds' must be a count or an array of integers");
    }
    return seeds;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash(const json& j) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

std::unique_ptr<Problem> make_problem(const json& pj) {
    check_keys(pj, "problem",
               {"family", "alpha", "rho", "csv", "feature_cols", "hf_col", "lf_col", "id_col",
                "name", "degrade_lf_below_r2", "degrade_seed"});
    std::string family = get_string(pj, "family");
    double rho = get_number(pj, "rho");

    if (family == "branin" || family == "park") {
        double alpha = get_number(pj, "alpha", 1.0);
        auto fam = family == "branin" ? SyntheticProblem::Family::Branin2D
                                      : SyntheticProblem::Family::Park4D;
        return std::make_unique<SyntheticProblem>(fam, alpha, rho);
    }
    if (family == "tabular") {
        std::string csv = get_string(pj, "csv");
        if (!pj.contains("feature_cols") || !pj.at("feature_cols").is_array())
            throw ConfigError("tabular problem: 'feature_cols' must be an array of column names");
        std::vector<std::string> feats;
        for (const auto& f : pj.at("feature_cols")) feats.push_back(f.get<std::string>());
        auto problem = std::make_unique<TabularProblem>(
            load_tabular(csv, feats, get_string(pj, "hf_col", "hf"), get_string(pj, "lf_col", "lf"),
                         rho, get_string(pj, "id_col", ""), get_string(pj, "name", "")));
        if (pj.contains("degrade_lf_below_r2")) {
            double target = get_number(pj, "degrade_lf_below_r2");
            RngStream rng(static_cast<std::uint64_t>(get_number(pj, "degrade_seed", 12345.0)));
            problem = std::make_unique<TabularProblem>(degrade_lf(*problem, target, rng));
        }
        return problem;
    }
    throw ConfigError("problem family '" + family + "' is not one of branin, park, tabular");
}

AcquisitionSpec parse_acquisition(const json& j) {
    AcquisitionSpec spec;
    if (!j.contains("acquisition")) return spec;
    const auto& a = j.at("acquisition");
    check_keys(a, "acquisition", {"family", "mes_max_samples", "candidate_grid_size"});
    spec.family = io::family_from_name(get_string(a, "family", "ei"));
    spec.mes_max_samples = static_cast<int>(get_number(a, "mes_max_samples", 16.0));
    spec.candidate_grid_size = static_cast<int>(get_number(a, "candidate_grid_size", 2048.0));
    if (spec.mes_max_samples < 1) throw ConfigError("field 'mes_max_samples' must be >= 1");
    if (spec.candidate_grid_size < 1) throw ConfigError("field 'candidate_grid_size' must be >= 1");
    return spec;
}

std::string resolve_out_dir(const json& j, const std::optional<std::string>& out_override) {
    if (out_override) return *out_override;
    if (const char* env = std::getenv("MFBO_OUT")) return env;
    return get_string(j, "out_dir");
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    const std::vector<std::uint64_t>& seeds) {
    json m;
    m["version"] = kVersion;
    m["command"] = command;
    m["config_hash"] = config_hash(config);
    m["seeds"] = seeds;
    m["config"] = config;
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << "\n";
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_override,
            std::optional<int> workers_override) {
    return run_guarded([&] {
        json j = load_json(config_path);
        check_keys(j, "config",
                   {"mode", "problem", "acquisition", "budget", "init_fraction", "init_hf_share",
                    "seeds", "surrogate_restarts", "tau", "out_dir", "workers"});

        std::string mode = get_string(j, "mode", "both");
        if (mode != "sfbo" && mode != "mfbo" && mode != "both")
            throw ConfigError("field 'mode' must be one of sfbo, mfbo, both");
        if (!j.contains("problem")) throw ConfigError("missing required field 'problem'");

        auto problem = make_problem(j.at("problem"));
        auto seeds = parse_seeds(j);
        double tau = get_number(j, "tau", 2.0);
        int workers = workers_override.value_or(static_cast<int>(get_number(j, "workers", 0.0)));

        CampaignConfig cc;
        cc.problem = problem.get();
        cc.acquisition = parse_acquisition(j);
        cc.total_budget = get_number(j, "budget");
        cc.init_fraction = get_number(j, "init_fraction", 0.10);
        cc.init_hf_share = get_number(j, "init_hf_share", 0.5);
        cc.surrogate_restarts = static_cast<int>(get_number(j, "surrogate_restarts", 2.0));
        cc.seeds = seeds;
        if (!(cc.init_fraction > 0.0) || !(cc.init_fraction < 1.0))
            throw ConfigError("field 'init_fraction' must lie in (0, 1)");
        if (!(cc.total_budget > 0.0)) throw ConfigError("field 'budget' must be positive");

        fs::path out_dir = resolve_out_dir(j, out_override);
        fs::create_directories(out_dir);
        write_manifest(out_dir, "run", j, seeds);

        std::vector<CampaignResult> sf_results, mf_results;
        if (mode == "sfbo" || mode == "both") {
            cc.mode = CampaignConfig::Mode::SFBO;
            sf_results = run_suite(cc, seeds, workers);
            for (std::size_t i = 0; i < seeds.size(); ++i)
                io::write_trace_csv((out_dir / ("trace_sfbo_seed" + std::to_string(seeds[i]) + ".csv")).string(),
                                    sf_results[i].trace);
        }
        if (mode == "mfbo" || mode == "both") {
            cc.mode = CampaignConfig::Mode::MFBO;
            mf_results = run_suite(cc, seeds, workers);
            for (std::size_t i = 0; i < seeds.size(); ++i)
                io::write_trace_csv((out_dir / ("trace_mfbo_seed" + std::to_string(seeds[i]) + ".csv")).string(),
                                    mf_results[i].trace);
        }

        // cost grid: the SF traces' own grid, or integer HF units when no SF suite ran
        std::vector<double> sf_costs;
        if (!sf_results.empty()) {
            sf_costs = sf_results[0].trace.cumulative_costs();
            for (const auto& r : sf_results)
                if (r.trace.size() < sf_costs.size())
                    sf_costs.resize(r.trace.size());
        } else {
            for (double c = 1.0; c <= cc.total_budget + 1e-9; c += 1.0) sf_costs.push_back(c);
        }

        const double f_star = problem->optimum();
        std::vector<RegretTrace> sf_regrets, mf_regrets;
        for (const auto& r : sf_results) {
            auto t = simple_regret_sf(r.trace, f_star);
            t.values.resize(sf_costs.size());
            t.sf_costs = sf_costs;
            sf_regrets.push_back(std::move(t));
        }
        for (const auto& r : mf_results)
            mf_regrets.push_back(simple_regret_mf(r.trace, sf_costs, f_star));
        io::write_regret_csv((out_dir / "regret_aligned.csv").string(), sf_costs, sf_regrets, mf_regrets);

        if (mode == "both") {
            std::vector<DiscountReport> reports;
            json per_seed = json::array();
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                auto rep = discount(sf_regrets[i], mf_results[i].trace, f_star, tau);
                auto ratio = fidelity_query_ratio(mf_results[i].trace);
                json r;
                r["seed"] = seeds[i];
                r["delta"] = rep.delta;
                r["r_star_corrected"] = rep.r_star_corrected;
                r["b_sf"] = rep.sf_reached ? json(rep.b_sf) : json("unreached");
                r["b_mf"] = rep.b_mf;
                r["tau"] = rep.tau;
                r["hf_query_fraction"] = ratio.hf_fraction;
                per_seed.push_back(std::move(r));
                reports.push_back(rep);
            }
            auto summary = aggregate(reports);
            json d;
            d["per_seed"] = per_seed;
            d["summary"] = {{"mean", summary.mean},
                            {"std", summary.stddev},
                            {"min", summary.min},
                            {"max", summary.max},
                            {"count", summary.count}};
            std::ofstream out(out_dir / "discount.json");
            out << d.dump(2) << "\n";
        }
        std::cout << "wrote " << out_dir.string() << "\n";
    });
}

int cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_override,
              std::optional<int> workers_override) {
    return run_guarded([&] {
        json j = load_json(config_path);
        check_keys(j, "config",
                   {"problem_family", "rho_values", "alpha_values", "families", "budget",
                    "init_fraction", "init_hf_share", "n_seeds", "master_seed",
                    "surrogate_restarts", "tau", "workers", "r2_samples", "out_dir"});

        SweepConfig sc;
        std::string family = get_string(j, "problem_family", "branin");
        if (family == "branin")
            sc.problem_family = SyntheticProblem::Family::Branin2D;
        else if (family == "park")
            sc.problem_family = SyntheticProblem::Family::Park4D;
        else
            throw ConfigError("field 'problem_family' must be branin or park");

        auto read_grid = [&](const char* key, std::vector<double>& target) {
            if (!j.contains(key)) return;
            if (!j.at(key).is_array()) throw ConfigError(std::string("field '") + key + "' must be an array");
            target.clear();
            for (const auto& v : j.at(key)) target.push_back(v.get<double>());
        };
        read_grid("rho_values", sc.rho_values);
        read_grid("alpha_values", sc.alpha_values);
        if (j.contains("families")) {
            sc.families.clear();
            for (const auto& f : j.at("families"))
                sc.families.push_back(io::family_from_name(f.get<std::string>()));
        }
        sc.total_budget = get_number(j, "budget", 50.0);
        sc.init_fraction = get_number(j, "init_fraction", 0.10);
        sc.init_hf_share = get_number(j, "init_hf_share", 0.5);
        sc.n_seeds = static_cast<std::size_t>(get_number(j, "n_seeds", 10.0));
        sc.master_seed = static_cast<std::uint64_t>(get_number(j, "master_seed", 0.0));
        sc.surrogate_restarts = static_cast<int>(get_number(j, "surrogate_restarts", 2.0));
        sc.tau = get_number(j, "tau", 2.0);
        sc.workers = workers_override.value_or(static_cast<int>(get_number(j, "workers", 0.0)));
        sc.r2_samples = static_cast<std::size_t>(get_number(j, "r2_samples", 1000.0));

        fs::path out_dir = resolve_out_dir(j, out_override);
        fs::create_directories(out_dir);
        std::vector<std::uint64_t> seeds(sc.n_seeds);
        for (std::size_t i = 0; i < seeds.size(); ++i)
            seeds[i] = RngStream(sc.master_seed).derive(i + 1).seed();
        write_manifest(out_dir, "sweep", j, seeds);

        auto grid = run_sweep(sc);
        io::write_heatmap_csv((out_dir / "heatmap.csv").string(), grid);

        std::size_t failed = 0;
        for (const auto& c : grid.cells)
            if (c.failed) ++failed;
        std::cout << "wrote " << (out_dir / "heatmap.csv").string() << " (" << grid.cells.size()
                  << " cells, " << failed << " failed)\n";
    });
}

int cmd_advise(double rho, std::optional<double> r2, const std::optional<std::string>& pairs_csv,
               double tau1, double tau2) {
    return run_guarded([&] {
        if (!r2 && !pairs_csv) throw ConfigError("advise: provide --r2 or --pairs");
        double r_squared;
        if (r2) {
            r_squared = *r2;
        } else {
            Vector lf, hf;
            io::read_pairs_csv(*pairs_csv, lf, hf);
            r_squared = std::max(paired_r_squared(lf, hf).r_squared, 0.0);
            std::cout << "estimated R^2 from " << lf.size() << " pairs: " << r_squared << "\n";
        }
        auto v = advise(rho, r_squared, tau1, tau2);
        std::cout << "rho = " << v.rho << (v.rho < v.tau1 ? " < " : " >= ") << "tau1 = " << v.tau1
                  << (v.rho < v.tau1 ? ": yes" : ": no") << "\n";
        std::cout << "R^2 = " << v.r_squared << (v.r_squared > v.tau2 ? " > " : " <= ")
                  << "tau2 = " << v.tau2 << (v.r_squared > v.tau2 ? ": yes" : ": no") << "\n";
        std::cout << "verdict: " << (v.run_mfbo ? "run MFBO" : "run SFBO") << "\n";
    });
}

int cmd_estimate_r2(const std::string& pairs_csv) {
    return run_guarded([&] {
        Vector lf, hf;
        io::read_pairs_csv(pairs_csv, lf, hf);
        auto rep = paired_r_squared(lf, hf);
        std::cout << "n = " << rep.n_samples << "\n";
        std::cout << "R^2 = " << rep.r_squared << (rep.degenerate ? " (degenerate fit)" : "") << "\n";
        std::cout << "slope = " << rep.slope << ", intercept = " << rep.intercept << "\n";
    });
}

} // namespace mfbo::cli
