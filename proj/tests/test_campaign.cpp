#include <doctest.h>

#include <sstream>

#include "mfbo/campaign.hpp"
#include "mfbo/io.hpp"

using namespace mfbo;

namespace {

TabularProblem tiny_table(std::size_t n, double rho = 0.5) {
    Matrix cand(static_cast<Eigen::Index>(n), 1);
    Vector hf(static_cast<Eigen::Index>(n)), lf(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        auto k = static_cast<Eigen::Index>(i);
        cand(k, 0) = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        hf(k) = std::sin(3.0 * cand(k, 0)) + 0.2 * cand(k, 0);
        lf(k) = hf(k) + 0.01;
    }
    return TabularProblem(SearchSpace::discrete(cand), hf, lf, rho, "tiny");
}

std::string serialize(const CampaignTrace& trace) {
    std::ostringstream out;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& o = trace.observations()[i];
        out << io::format_double(o.fidelity) << '|' << io::format_double(o.y) << '|'
            << io::format_double(trace.cumulative_costs()[i]) << '|';
        for (Eigen::Index j = 0; j < o.x.coords.size(); ++j)
            out << io::format_double(o.x.coords(j)) << ',';
        out << ';';
    }
    return out.str();
}

CampaignConfig branin_config(const Problem& p, CampaignConfig::Mode mode, double budget) {
    CampaignConfig cc;
    cc.problem = &p;
    cc.mode = mode;
    cc.total_budget = budget;
    cc.surrogate_restarts = 1;
    cc.acquisition.candidate_grid_size = 256;
    return cc;
}

} // namespace

TEST_CASE("single-fidelity campaign spends the documented budget split") {
    SyntheticProblem prob(SyntheticProblem::Family::Branin2D, 0.9, 0.1);
    auto cc = branin_config(prob, CampaignConfig::Mode::SFBO, 50.0);
    cc.acquisition.candidate_grid_size = 64; // keep this full-length run cheap
    auto res = run_campaign(cc, 7);

    CHECK(res.trace.initial_count() == 5);       // 10% of 50
    CHECK(res.trace.size() == 50);               // 5 initial + 45 sequential
    CHECK(res.total_cost_spent == doctest::Approx(50.0));
    CHECK(res.trace.high_fidelity_only());
    CHECK(res.terminated_reason == CampaignResult::Reason::BudgetExhausted);

    // incumbent is non-decreasing along the high-fidelity trace
    double best = -1e300;
    for (const auto& o : res.trace.observations()) {
        best = std::max(best, o.y);
        CHECK(best >= o.y);
    }
    CHECK(res.best_hf_value == doctest::Approx(best));
}

TEST_CASE("multi-fidelity initial design follows the 50/50 budget split") {
    SyntheticProblem prob(SyntheticProblem::Family::Branin2D, 0.9, 0.1);
    auto cc = branin_config(prob, CampaignConfig::Mode::MFBO, 50.0);
    cc.total_budget = 10.0; // keep the sequential loop short
    // init budget 1.0 -> floor(0.5) = 0 HF bumped to 2, floor(0.5/0.1) = 5 LF
    auto res = run_campaign(cc, 3);
    std::size_t hf = 0, lf = 0;
    for (std::size_t i = 0; i < res.trace.initial_count(); ++i) {
        if (res.trace.observations()[i].fidelity == kHighFidelity)
            ++hf;
        else
            ++lf;
    }
    CHECK(hf == 2);
    CHECK(lf == 5);
    CHECK(res.trace.observations()[0].fidelity == kHighFidelity); // HF first

    SUBCASE("the documented example arithmetic: budget 50, rho 0.1") {
        auto cc2 = branin_config(prob, CampaignConfig::Mode::MFBO, 50.0);
        // only inspect the initial design; shrink the loop by budget trickery is
        // not possible here, so recompute the arithmetic directly
        double init_budget = cc2.init_fraction * cc2.total_budget; // 5.0
        CHECK(static_cast<int>(std::floor(init_budget * 0.5 / 1.0 + 1e-9)) == 2);
        CHECK(static_cast<int>(std::floor(init_budget * 0.5 / 0.1 + 1e-9)) == 25);
    }
}

TEST_CASE("budget safety: no query exceeds the remaining budget") {
    SyntheticProblem prob(SyntheticProblem::Family::Branin2D, 0.8, 0.3);
    auto cc = branin_config(prob, CampaignConfig::Mode::MFBO, 8.0);
    auto res = run_campaign(cc, 11);
    CHECK(res.total_cost_spent <= cc.total_budget + 1e-9);
    double running = 0.0;
    for (const auto& o : res.trace.observations()) {
        CHECK(o.cost <= cc.total_budget - running + 1e-9);
        running += o.cost;
    }
    // MFBO trace holds both fidelities
    bool has_lf = false, has_hf = false;
    for (const auto& o : res.trace.observations()) {
        has_lf |= o.fidelity == kLowFidelity;
        has_hf |= o.fidelity == kHighFidelity;
    }
    CHECK(has_lf);
    CHECK(has_hf);
}

TEST_CASE("discrete exhaustion stops the campaign") {
    auto prob = tiny_table(3);
    CampaignConfig cc;
    cc.problem = &prob;
    cc.mode = CampaignConfig::Mode::SFBO;
    cc.total_budget = 100.0;
    cc.surrogate_restarts = 1;
    auto res = run_campaign(cc, 5);
    CHECK(res.trace.size() == 3);
    CHECK(res.terminated_reason == CampaignResult::Reason::SpaceExhausted);
    CHECK(res.trace.high_fidelity_only());
}

TEST_CASE("campaigns are bit-reproducible from the seed") {
    SyntheticProblem prob(SyntheticProblem::Family::Branin2D, 0.7, 0.2);
    auto cc = branin_config(prob, CampaignConfig::Mode::MFBO, 6.0);
    auto a = run_campaign(cc, 42);
    auto b = run_campaign(cc, 42);
    CHECK(serialize(a.trace) == serialize(b.trace));
    auto c = run_campaign(cc, 43);
    CHECK(serialize(a.trace) != serialize(c.trace));
}

TEST_CASE("run_suite basics") {
    auto prob = tiny_table(12, 0.5);
    CampaignConfig cc;
    cc.problem = &prob;
    cc.mode = CampaignConfig::Mode::MFBO;
    cc.total_budget = 5.0;
    cc.surrogate_restarts = 1;

    SUBCASE("identical seeds give identical traces") {
        auto results = run_suite(cc, {9, 9}, 1);
        REQUIRE(results.size() == 2);
        CHECK(serialize(results[0].trace) == serialize(results[1].trace));
    }
    SUBCASE("twenty seeds give twenty results in order") {
        std::vector<std::uint64_t> seeds(20);
        for (std::size_t i = 0; i < 20; ++i) seeds[i] = i;
        auto results = run_suite(cc, seeds, 2);
        CHECK(results.size() == 20);
        for (std::size_t i = 0; i < 20; ++i) CHECK(results[i].trace.seed() == i);
    }
    SUBCASE("empty seed list is a config error") {
        CHECK_THROWS_AS(run_suite(cc, {}, 1), ConfigError);
    }
    SUBCASE("worker count does not change results") {
        auto seq = run_suite(cc, {1, 2, 3}, 1);
        auto par = run_suite(cc, {1, 2, 3}, 3);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(serialize(seq[i].trace) == serialize(par[i].trace));
    }
}

TEST_CASE("invalid configurations are rejected up front") {
    SyntheticProblem prob(SyntheticProblem::Family::Branin2D, 0.9, 0.1);
    CampaignConfig cc;
    cc.problem = &prob;

    SUBCASE("init_fraction out of range") {
        cc.init_fraction = 1.5;
        CHECK_THROWS_AS(run_campaign(cc, 0), ConfigError);
    }
    SUBCASE("budget below the initial design cost") {
        cc.total_budget = 1.5; // cannot afford 2 initial HF points
        CHECK_THROWS_AS(run_campaign(cc, 0), ConfigError);
    }
    SUBCASE("missing problem") {
        CampaignConfig empty;
        CHECK_THROWS_AS(run_campaign(empty, 0), ConfigError);
    }
}

TEST_CASE("rho = 1 with an uninformative table still runs to completion") {
    Matrix cand(10, 1);
    Vector hf(10), lf(10);
    RngStream rng(8);
    for (int i = 0; i < 10; ++i) {
        cand(i, 0) = i / 9.0;
        hf(i) = rng.normal();
        lf(i) = rng.normal(); // unrelated to hf
    }
    TabularProblem prob(SearchSpace::discrete(cand), hf, lf, 1.0, "hostile");
    CampaignConfig cc;
    cc.problem = &prob;
    cc.mode = CampaignConfig::Mode::MFBO;
    cc.total_budget = 8.0;
    cc.surrogate_restarts = 1;
    auto res = run_campaign(cc, 2);
    CHECK(res.trace.size() >= res.trace.initial_count());
    CHECK(res.total_cost_spent <= 8.0 + 1e-9);
}
