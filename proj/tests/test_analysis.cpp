#include <doctest.h>

#include <cmath>

#include "rcp/analysis.hpp"

using namespace rcp;

TEST_CASE("slot counts") {
    CHECK(slot_count(1, 1000.0, false) == 7);   // ceil(ln 1000) = 7
    CHECK(slot_count(3, 1000.0, false) == 21);
    CHECK(slot_count(2, 16.0, true) == 8);      // ceil(2 log2 16)
    CHECK(slot_count(1, 2.0, false) == 1);
}

TEST_CASE("levels are strictly increasing and deterministic") {
    HarrisSystem h(InterarrivalLaw::pareto(0.5, 1.0), 0.5, {0, 4000}, 70000.0, true,
                   404);
    const auto a = compute_levels(h, 100.0, 6);
    const auto b = compute_levels(h, 100.0, 6);
    REQUIRE(a.complete);
    REQUIRE(a.levels.size() == 6);
    CHECK(a.levels == b.levels);
    Site prev = 0;
    for (Site l : a.levels) {
        CHECK(l > prev);
        prev = l;
    }
    // defining property: site L_i has no death mark in [t0 2^i, t0 2^{i+2}],
    // and no site strictly between L_{i-1} and L_i is clean there
    for (std::size_t i = 1; i <= 6; ++i) {
        const double lo = 100.0 * std::ldexp(1.0, static_cast<int>(i));
        const double hi = 100.0 * std::ldexp(1.0, static_cast<int>(i) + 2);
        const Site li = a.levels[i - 1];
        const Site lprev = i >= 2 ? a.levels[i - 2] : 0;
        CHECK(h.deaths_in(li, lo, hi).empty());
        for (Site k = lprev + 1; k < li; ++k)
            CHECK_FALSE(h.deaths_in(k, lo, hi).empty());
    }
}

TEST_CASE("deterministic clocks make every site a level") {
    // all death clocks tick only at 1e9, far past every scan window
    HarrisSystem h(InterarrivalLaw::empirical({1e9}), 1.0, {0, 100}, 5000.0, true, 7);
    const auto tr = compute_levels(h, 10.0, 5);
    REQUIRE(tr.complete);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(tr.levels[i] == static_cast<Site>(i + 1));
}

TEST_CASE("window exhaustion yields a partial trace") {
    // heavy death activity and a tiny window: the scan must run out
    HarrisSystem h(InterarrivalLaw::exponential(1.0), 1.0, {0, 5}, 1e7, true, 11);
    const auto tr = compute_levels(h, 100.0, 12);
    CHECK_FALSE(tr.complete);
    CHECK(tr.levels.size() < 12);
}

TEST_CASE("bad event flags match literal stream queries") {
    HarrisSystem h(InterarrivalLaw::pareto(0.5, 1.0), 0.5, {0, 4000}, 18000.0, true,
                   21);
    auto tr = compute_levels(h, 100.0, 5);
    REQUIRE(tr.complete);
    detect_bad_events(tr, h, 0.2);
    REQUIRE(tr.bad.size() == 5);
    for (std::size_t i = 1; i <= 5; ++i) {
        const auto& flags = tr.bad[i - 1];
        // (I): scan length against the slot budget
        const Site lprev = i >= 2 ? tr.levels[i - 2] : 0;
        const auto budget = static_cast<Site>(slot_count(i, 100.0, false));
        CHECK(flags.long_scan == (tr.levels[i - 1] - lprev > budget));
        // (II): any death in [t0 2^i - (t0 2^i)^gamma, t0 2^i] for the scanned sites
        const double anchor = 100.0 * std::ldexp(1.0, static_cast<int>(i));
        const double start = anchor - std::pow(anchor, 0.2);
        bool late = false;
        for (Site k = lprev + 1; k <= tr.levels[i - 1]; ++k)
            if (!h.deaths_in(k, start, anchor).empty()) late = true;
        CHECK(flags.late_death == late);
    }
}

TEST_CASE("bad event rates: degenerate lambdas") {
    const auto law = InterarrivalLaw::pareto(0.5, 1.0);
    // lambda = 0: no arrows can ever fill a slot, so every level is bad
    const auto zero = estimate_bad_event_rates(law, 0.0, 100.0, 0.2, 4, 100, 3);
    for (const auto& row : zero.rows) CHECK(row.est.p_hat == 1.0);

    // enormous lambda: slots essentially never empty, so badness reduces to
    // the (I)/(II) geometry, strictly below 1
    const auto big = estimate_bad_event_rates(law, 1e6, 100.0, 0.2, 4, 400, 3);
    for (const auto& row : big.rows) CHECK(row.est.p_hat < 1.0);
    CHECK(big.sum_rates ==
          doctest::Approx(big.rows[0].est.p_hat + big.rows[1].est.p_hat +
                          big.rows[2].est.p_hat + big.rows[3].est.p_hat));
    CHECK(big.exhausted == 0);
}

TEST_CASE("bad event rates are deterministic") {
    const auto law = InterarrivalLaw::pareto(0.5, 1.0);
    const auto a = estimate_bad_event_rates(law, 0.5, 100.0, 0.2, 4, 200, 9);
    const auto b = estimate_bad_event_rates(law, 0.5, 100.0, 0.2, 4, 200, 9);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        CHECK(a.rows[i].est.p_hat == b.rows[i].est.p_hat);
}

TEST_CASE("survival curve is pathwise nonincreasing with an exponential control") {
    SimConfig c{InterarrivalLaw::exponential(1.0)};
    c.lambda = 0.5;
    c.half_width = 60;
    c.replicas = 2000;
    c.seed = 17;
    const auto curve = survival_curve(c, {1.0, 2.0, 4.0, 8.0, 16.0});
    CHECK(curve.pathwise_violations == 0);
    REQUIRE(curve.rows.size() == 5);
    for (std::size_t i = 1; i < 5; ++i)
        CHECK(curve.rows[i].est.p_hat <= curve.rows[i - 1].est.p_hat);
    // subcritical: survival decays roughly geometrically
    CHECK(curve.rows[4].est.p_hat < 0.25 * curve.rows[0].est.p_hat);
}

TEST_CASE("lambda scan is coupled and monotone") {
    SimConfig c{InterarrivalLaw::pareto(0.5, 1.0)};
    c.half_width = 60;
    c.horizon = 30.0;
    c.replicas = 1500;
    c.seed = 23;
    const auto scan = lambda_scan(c, {0.05, 0.2, 0.8, 2.0});
    CHECK(scan.pathwise_violations == 0);
    REQUIRE(scan.rows.size() == 4);
    for (std::size_t i = 1; i < 4; ++i)
        CHECK(scan.rows[i].est.p_hat >= scan.rows[i - 1].est.p_hat);
}

TEST_CASE("lambda upper estimate: validation and bisection") {
    SimConfig c{InterarrivalLaw::exponential(1.0)};
    c.half_width = 50;
    c.horizon = 30.0;
    c.replicas = 400;
    c.seed = 29;
    CHECK_THROWS_AS(estimate_lambda_c_upper(c, 1.0, 0.5, 4.0, 0.05),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_lambda_c_upper(c, 0.2, 3.0, 4.0, 0.05),
                    std::invalid_argument);  // bracket does not straddle theta

    const auto res = estimate_lambda_c_upper(c, 0.2, 0.5, 4.0, 0.05);
    CHECK(res.lambda_hat > 0.5);
    CHECK(res.lambda_hat < 4.0);
    CHECK(res.theta == 0.2);
    CHECK(res.bisection_steps > 0);
    // the returned point keeps the survival fraction at or above theta
    SimConfig probe = c;
    probe.lambda = res.lambda_hat;
    probe.lambda_ref = 4.0;
    CHECK(run_batch(probe).survival.p_hat >= 0.2);
}
