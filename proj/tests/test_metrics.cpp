#include <doctest.h>

#include <cmath>
#include <limits>

#include "mfbo/metrics.hpp"
#include "mfbo/rng.hpp"

using namespace mfbo;

namespace {

CampaignTrace make_trace(const std::vector<double>& fidelities, const std::vector<double>& ys,
                         const std::vector<double>& costs) {
    CampaignTrace t(0);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        Observation o;
        o.x = DesignPoint{Vector::Zero(1), std::nullopt};
        o.fidelity = fidelities[i];
        o.y = ys[i];
        o.cost = costs[i];
        t.append(o);
    }
    return t;
}

CampaignTrace sf_trace(const std::vector<double>& ys) {
    return make_trace(std::vector<double>(ys.size(), 1.0), ys,
                      std::vector<double>(ys.size(), 1.0));
}

/// Brute-force double loop over all (grid step, observation) pairs.
std::vector<double> brute_force_alignment(const CampaignTrace& mf, const std::vector<double>& sf_costs,
                                          double f_star) {
    std::vector<double> out;
    for (double budget : sf_costs) {
        double r = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < mf.size(); ++k) {
            const auto& o = mf.observations()[k];
            if (o.fidelity != 1.0) continue;
            if (mf.cumulative_costs()[k] <= budget)
                r = std::min(r, std::max(f_star - o.y, 0.0));
        }
        if (!std::isfinite(r)) throw AlignmentError("brute force: no HF point in budget");
        out.push_back(r);
    }
    return out;
}

} // namespace

TEST_CASE("single-fidelity simple regret") {
    SUBCASE("hand trace") {
        auto t = sf_trace({7.0, 9.0});
        auto r = simple_regret_sf(t, 10.0);
        CHECK(r.values == std::vector<double>{3.0, 1.0});
        CHECK(r.sf_costs == std::vector<double>{1.0, 2.0});
    }
    SUBCASE("regret sticks at zero once the optimum is hit") {
        auto t = sf_trace({5.0, 8.0, 10.0, 7.0, 9.0});
        auto r = simple_regret_sf(t, 10.0);
        CHECK(r.values == std::vector<double>{5.0, 2.0, 0.0, 0.0, 0.0});
    }
    SUBCASE("constant observations give constant regret") {
        auto t = sf_trace({4.0, 4.0, 4.0});
        auto r = simple_regret_sf(t, 10.0);
        for (double v : r.values) CHECK(v == 6.0);
    }
    SUBCASE("mixed-fidelity traces are rejected") {
        auto t = make_trace({1.0, 0.0}, {1.0, 2.0}, {1.0, 0.1});
        CHECK_THROWS_AS(simple_regret_sf(t, 10.0), Error);
    }
}

TEST_CASE("multi-fidelity regret alignment") {
    SUBCASE("worked example") {
        auto mf = make_trace({1.0, 0.0, 1.0}, {7.0, 99.0, 9.0}, {1.0, 0.1, 1.0});
        // cumulative costs: 1, 1.1, 2.1
        auto r = simple_regret_mf(mf, {1.0, 2.0, 3.0}, 10.0);
        CHECK(r.values == std::vector<double>{3.0, 3.0, 1.0});
    }
    SUBCASE("an all-high-fidelity trace matches the single-fidelity regret") {
        auto t = sf_trace({5.0, 8.0, 6.0, 9.5});
        auto sf = simple_regret_sf(t, 10.0);
        auto mf = simple_regret_mf(t, sf.sf_costs, 10.0);
        CHECK(mf.values == sf.values);
    }
    SUBCASE("low-fidelity observations never enter the regret") {
        auto a = make_trace({1.0, 1.0}, {7.0, 9.0}, {1.0, 1.0});
        auto b = make_trace({1.0, 1.0, 0.0, 0.0}, {7.0, 9.0, 10.0, 10.0}, {1.0, 1.0, 0.0001, 0.0001});
        auto ra = simple_regret_mf(a, {1.0, 2.0, 3.0}, 10.0);
        auto rb = simple_regret_mf(b, {1.0, 2.0, 3.0}, 10.0);
        // the near-free LF observations at the optimum change nothing
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(ra.values[i] == doctest::Approx(rb.values[i]));
    }
    SUBCASE("missing first-step coverage raises an alignment error") {
        auto mf = make_trace({0.0, 1.0}, {5.0, 9.0}, {0.6, 1.0});
        // first HF observation lands at cumulative cost 1.6 > 1
        CHECK_THROWS_AS(simple_regret_mf(mf, {1.0, 2.0}, 10.0), AlignmentError);
    }
}

TEST_CASE("alignment equals the brute-force double loop on randomized traces") {
    RngStream rng(911);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 2 + rng.uniform_index(30);
        std::vector<double> fid, ys, costs;
        fid.push_back(1.0); // guarantee coverage of the first budget step
        ys.push_back(rng.uniform(-5.0, 5.0));
        costs.push_back(0.2 + 0.8 * rng.uniform());
        for (std::size_t i = 1; i < n; ++i) {
            bool hf = rng.uniform() < 0.4;
            fid.push_back(hf ? 1.0 : 0.0);
            ys.push_back(rng.uniform(-5.0, 5.0));
            costs.push_back(hf ? 1.0 : 0.1);
        }
        auto mf = make_trace(fid, ys, costs);
        std::vector<double> grid;
        double c = 1.0;
        std::size_t steps = 1 + rng.uniform_index(20);
        for (std::size_t i = 0; i < steps; ++i) {
            grid.push_back(c);
            c += 1.0;
        }
        double f_star = 6.0;
        auto fast = simple_regret_mf(mf, grid, f_star);
        auto slow = brute_force_alignment(mf, grid, f_star);
        REQUIRE(fast.values.size() == slow.size());
        for (std::size_t i = 0; i < slow.size(); ++i) CHECK(fast.values[i] == slow[i]);
        for (std::size_t i = 1; i < fast.values.size(); ++i)
            CHECK(fast.values[i] <= fast.values[i - 1]);
    }
}

TEST_CASE("discount formula substitutions") {
    CHECK(discount_delta(10.0, true, 5.0) == doctest::Approx(0.5));
    CHECK(discount_delta(10.0, true, 12.0) == doctest::Approx(-0.2));
    CHECK(discount_delta(0.0, false, 5.0) == 1.0);
}

TEST_CASE("discount over constructed traces") {
    // SF reaches regret 2 only at its 8th step; MF reaches regret 1 at cost 3.2
    std::vector<double> sf_y = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 9.5};
    auto sf_t = sf_trace(sf_y);
    auto sf = simple_regret_sf(sf_t, 10.0);

    auto mf_t = make_trace({1.0, 0.0, 0.0, 1.0}, {5.0, 0.0, 0.0, 9.0}, {1.0, 0.1, 0.1, 2.0});
    // cumulative: 1.0, 1.1, 1.2, 3.2 ; HF regrets 5 (cost 1), 1 (cost 3.2)
    auto rep = discount(sf, mf_t, 10.0, 2.0);
    CHECK(rep.r_star_corrected == doctest::Approx(2.0));
    CHECK(rep.b_mf == doctest::Approx(3.2));
    CHECK(rep.sf_reached);
    CHECK(rep.b_sf == doctest::Approx(8.0));
    CHECK(rep.delta == doctest::Approx((8.0 - 3.2) / 8.0));

    SUBCASE("unreachable target caps delta at 1") {
        std::vector<double> weak(10, 1.0);
        auto weak_sf = simple_regret_sf(sf_trace(weak), 10.0);
        auto perfect = make_trace({1.0, 1.0}, {5.0, 10.0}, {1.0, 1.0});
        auto r = discount(weak_sf, perfect, 10.0, 2.0);
        CHECK_FALSE(r.sf_reached);
        CHECK(r.delta == 1.0);
        CHECK(r.r_star_corrected == 0.0); // tau * 0 stays 0
    }

    SUBCASE("tau = 1 targets the best multi-fidelity regret exactly") {
        auto r = discount(sf, mf_t, 10.0, 1.0);
        CHECK(r.r_star_corrected == doctest::Approx(1.0));
        CHECK(r.b_sf == doctest::Approx(9.0));
    }

    SUBCASE("delta is invariant to a common cost scaling") {
        auto scale_trace = [](const CampaignTrace& t, double k) {
            CampaignTrace out(t.seed());
            for (const auto& o : t.observations()) {
                Observation s = o;
                s.cost *= k;
                out.append(s);
            }
            return out;
        };
        for (double k : {0.5, 2.0, 7.0}) {
            auto sf_scaled_t = scale_trace(sf_t, k);
            CampaignTrace mf_scaled_t = scale_trace(mf_t, k);
            RegretTrace sf_scaled = simple_regret_sf(sf_scaled_t, 10.0);
            auto r = discount(sf_scaled, mf_scaled_t, 10.0, 2.0);
            CHECK(r.delta == doctest::Approx(rep.delta).epsilon(1e-12));
        }
    }
}

TEST_CASE("aggregate summarizes per-seed discounts") {
    auto mk = [](double d) {
        DiscountReport r;
        r.delta = d;
        return r;
    };
    SUBCASE("equal values have zero spread") {
        auto s = aggregate({mk(0.5), mk(0.5)});
        CHECK(s.mean == doctest::Approx(0.5));
        CHECK(s.stddev == doctest::Approx(0.0));
    }
    SUBCASE("symmetric values cancel") {
        auto s = aggregate({mk(1.0), mk(-1.0)});
        CHECK(s.mean == doctest::Approx(0.0));
        CHECK(s.min == -1.0);
        CHECK(s.max == 1.0);
    }
    SUBCASE("matches an independent summation oracle on 20 reports") {
        RngStream rng(3);
        std::vector<DiscountReport> reports;
        double sum = 0.0;
        for (int i = 0; i < 20; ++i) {
            double d = rng.uniform(-1.0, 1.0);
            sum += d;
            reports.push_back(mk(d));
        }
        auto s = aggregate(reports);
        CHECK(s.mean == doctest::Approx(sum / 20.0).epsilon(1e-12));
    }
    SUBCASE("empty input is rejected") { CHECK_THROWS_AS(aggregate({}), Error); }
}
