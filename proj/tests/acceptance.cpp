// Acceptance suite: one test case per criterion, each ending with a single
// "criterion_N: PASS/FAIL" line on stdout.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rcp/analysis.hpp"
#include "rcp/engine.hpp"
#include "rcp/harris.hpp"
#include "rcp/renewal.hpp"
#include "rcp/rng.hpp"
#include "rcp/stats.hpp"

using namespace rcp;

namespace {

void report(int k, bool ok, const std::string& detail = "") {
    std::printf("criterion_%d: %s%s%s\n", k, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
}

std::size_t kept_event_count(const HarrisSystem& h) {
    std::size_t n = 0;
    const auto w = h.window();
    for (Site x = w.x_min; x <= w.x_max; ++x) {
        n += h.deaths_in(x, 0.0, h.horizon()).size();
        for (int dir : {+1, -1}) {
            if (h.one_sided() && dir < 0) continue;
            if (!w.contains(x + dir)) continue;
            n += h.arrows_in(x, x + dir, 0.0, h.horizon()).size();
        }
    }
    return n;
}

}  // namespace

TEST_CASE("criterion_1: exact reachability agrees with brute force") {
    const auto law = InterarrivalLaw::pareto(0.5, 1.0);
    std::size_t checked = 0, agreed = 0, reachable_hits = 0;
    Rng pick = make_stream(1001, 0, StreamKind::Scratch);
    for (std::uint64_t s = 0; s < 500; ++s) {
        const Site width = static_cast<Site>(2 + s % 5);  // 2..6 sites
        const double lambda = (s % 2) ? 2.0 : 0.5;
        double horizon = 1.0 + 9.0 * uniform01(pick);
        // shrink the horizon until the exhaustive search budget fits
        for (;;) {
            HarrisSystem h(law, lambda, {0, width - 1}, horizon, false, s);
            if (kept_event_count(h) > 64) {
                horizon *= 0.5;
                continue;
            }
            const Site src = static_cast<Site>(uniform01(pick) * width);
            const Site dst = static_cast<Site>(uniform01(pick) * width);
            const double dst_time = horizon * (0.5 + 0.5 * uniform01(pick));
            const auto cert = h.reachable(src, 0.0, dst, dst_time);
            const bool brute = h.brute_force_reachable(src, 0.0, dst, dst_time);
            ++checked;
            if (cert.has_value() == brute) ++agreed;
            if (brute) ++reachable_hits;
            if (cert) CHECK(h.certificate_valid(*cert, src, 0.0, dst, dst_time));
            break;
        }
    }
    CHECK(checked == 500);
    CHECK(agreed == checked);
    CHECK(reachable_hits > 0);
    CHECK(reachable_hits < checked);
    std::ostringstream d;
    d << agreed << "/" << checked << " agree, " << reachable_hits << " reachable";
    report(1, agreed == checked && checked == 500, d.str());
}

TEST_CASE("criterion_2: additivity over the initial set") {
    const auto law = InterarrivalLaw::pareto(0.5, 1.0);
    Rng pick = make_stream(2002, 0, StreamKind::Scratch);
    std::size_t ok = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const double lambda = 0.5 + 1.5 * uniform01(pick);
        HarrisSystem h(law, lambda, {-4, 4}, 8.0, false, 7000 + s);
        std::set<Site> a;
        while (a.empty())
            for (Site x = -4; x <= 4; ++x)
                if (uniform01(pick) < 0.3) a.insert(x);
        const double t = 8.0 * uniform01(pick);
        const auto joint = h.infected_set_at(a, t);
        std::set<Site> merged;
        for (Site x : a) {
            const auto part = h.infected_set_at({x}, t);
            merged.insert(part.begin(), part.end());
        }
        if (joint == merged) ++ok;
        CHECK(joint == merged);
    }
    report(2, ok == 200, std::to_string(ok) + "/200 triples equal");
}

TEST_CASE("criterion_3: pathwise monotone lambda scan") {
    SimConfig c{InterarrivalLaw::pareto(0.5, 1.0)};
    c.half_width = 50;
    c.horizon = 20.0;
    c.replicas = 1000;
    c.seed = 3003;
    const auto scan = lambda_scan(c, {0.05, 0.1, 0.2, 0.4});
    CHECK(scan.pathwise_violations == 0);
    std::ostringstream d;
    d << scan.pathwise_violations << " violations over " << c.replicas << " replicas";
    report(3, scan.pathwise_violations == 0, d.str());
}

TEST_CASE("criterion_4: Poisson oracles for gap and far-gap") {
    const auto law = InterarrivalLaw::exponential(1.0);
    bool ok = true;
    std::ostringstream d;
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
        const auto g = estimate_gap_probability(law, t, 2.0, 100000, 4004);
        const double oracle = std::exp(-t);
        const double sigma = stats::binomial_sigma(oracle, 100000);
        const bool pass = std::abs(g.est.p_hat - oracle) < 4.0 * sigma;
        CHECK(pass);
        ok = ok && pass;
        d << "t=" << t << " dev=" << std::abs(g.est.p_hat - oracle) / sigma << "s ";
    }
    const double s = 1024.0, expnt = 0.1;
    const auto fg = estimate_far_gap(law, {s}, expnt, 100000, 4005);
    const double len = std::pow(s, expnt);
    const double oracle = 1.0 - std::exp(-len);
    const double sigma = stats::binomial_sigma(oracle, 100000);
    const bool pass = std::abs(fg.rows[0].est.p_hat - oracle) < 4.0 * sigma;
    CHECK(pass);
    ok = ok && pass;
    d << "fargap dev=" << std::abs(fg.rows[0].est.p_hat - oracle) / sigma << "s";
    report(4, ok, d.str());
}

TEST_CASE("criterion_5: uniform big-gap probability for the heavy tail") {
    const auto par = InterarrivalLaw::pareto(0.5, 1.0);
    double min_ci_low = 1.0;
    for (double t : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
        const auto g = estimate_gap_probability(par, t, 10.0, 100000, 5005);
        min_ci_low = std::min(min_ci_low, g.est.ci_low);
    }
    CHECK(min_ci_low >= 0.005);
    const auto ctrl = estimate_gap_probability(InterarrivalLaw::exponential(1.0),
                                               10.0, 10.0, 100000, 5006);
    CHECK(ctrl.est.p_hat < 1e-3);
    std::ostringstream d;
    d << "min ci_low=" << min_ci_low << ", exp control=" << ctrl.est.p_hat;
    report(5, min_ci_low >= 0.005 && ctrl.est.p_hat < 1e-3, d.str());
}

TEST_CASE("criterion_6: renewal count tail bound") {
    const auto par = InterarrivalLaw::pareto(0.5, 1.0);
    bool ok = true;
    std::ostringstream d;
    for (double t : {100.0, 1000.0}) {
        const auto c = estimate_count_tail(par, t, 0.5, 100000, 6006);
        const double bound = 1.0 / t + 3.0 * stats::binomial_sigma(1.0 / t, 100000);
        const bool pass = c.est.p_hat <= bound;
        CHECK(pass);
        ok = ok && pass;
        d << "t=" << t << " p=" << c.est.p_hat << "<=" << bound << " ";
    }
    report(6, ok, d.str());
}

TEST_CASE("criterion_7: quiet subinterval validation bound") {
    const auto par = InterarrivalLaw::pareto(0.5, 1.0);
    const double t = 10000.0, eps3 = 0.5;
    const auto q = find_quiet_subinterval(par, 10000.0, 20000.0, eps3, 10000, 7007);
    const double bound = std::pow(t, -eps3 / 3.0);  // ~0.215
    CHECK(q.fresh.ci_high <= bound);
    std::ostringstream d;
    d << "J=[" << q.j_lo << "," << q.j_hi << "], fresh ci_high=" << q.fresh.ci_high
      << " vs " << bound;
    report(7, q.fresh.ci_high <= bound, d.str());
}

TEST_CASE("criterion_8: coupling crossing-time tail trend and marginals") {
    const auto par = InterarrivalLaw::pareto(0.5, 1.0);
    const double v0 = 10.0;
    const std::vector<double> t_grid{100.0, 1000.0, 10000.0};
    const auto tab = estimate_coupling_tails(par, v0, t_grid, {4, 8, 12}, 10000, 8008);
    REQUIRE(tab.rows.size() == 3);
    double lo = 1e300, hi = 0.0;
    for (const auto& row : tab.rows) {
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
    }
    const bool not_at_largest = tab.rows[2].ratio < hi || hi == lo;
    const bool ratio_bounded = lo > 0.0 && hi / lo <= 3.0;
    CHECK(not_at_largest);
    CHECK(ratio_bounded);

    // marginal law of the coupled sequences vs direct sampling
    std::vector<double> coupled, direct;
    Rng rng = make_stream(8009, 0, StreamKind::Scratch);
    for (std::uint64_t r = 0; coupled.size() < 5000; ++r) {
        const auto cp = build_v0_coupling(par, v0, make_stream(8010, r, StreamKind::Replica, 7));
        coupled.insert(coupled.end(), cp.t_tilde.begin(), cp.t_tilde.end());
    }
    coupled.resize(5000);
    for (int i = 0; i < 5000; ++i) direct.push_back(par.sample(rng));
    const double p = stats::ks_two_sample_pvalue(coupled, direct);
    CHECK(p > 1e-3);

    std::ostringstream d;
    d << "ratios " << tab.rows[0].ratio << "," << tab.rows[1].ratio << ","
      << tab.rows[2].ratio << "; ks p=" << p;
    report(8, not_at_largest && ratio_bounded && p > 1e-3, d.str());
}

TEST_CASE("criterion_9: far-gap hit probability decays in s") {
    const auto par = InterarrivalLaw::pareto(0.5, 1.0);
    const std::vector<double> s_grid{1024.0, 16384.0, 262144.0};
    const auto tab = estimate_far_gap(par, s_grid, 0.1, 100000, 9009);
    REQUIRE(tab.rows.size() == 3);
    bool ok = true;
    for (std::size_t i = 1; i < 3; ++i) {
        const bool decreasing = tab.rows[i].est.p_hat < tab.rows[i - 1].est.p_hat;
        const bool separated = tab.rows[i].est.ci_high < tab.rows[i - 1].est.ci_low;
        CHECK(decreasing);
        CHECK(separated);
        ok = ok && decreasing && separated;
    }
    std::ostringstream d;
    d << "p=" << tab.rows[0].est.p_hat << "," << tab.rows[1].est.p_hat << ","
      << tab.rows[2].est.p_hat << "; decay slope " << tab.fitted_decay;
    report(9, ok, d.str());
}

TEST_CASE("criterion_10: bad-event rates fall with the level and with t0") {
    const auto par = InterarrivalLaw::pareto(0.5, 1.0);
    const auto big = estimate_bad_event_rates(par, 0.5, 1000.0, 0.1, 8, 1000, 10010);
    std::vector<double> is, ps;
    for (const auto& row : big.rows) {
        is.push_back(static_cast<double>(row.i));
        ps.push_back(row.est.p_hat);
    }
    const double rho = stats::spearman(is, ps);
    CHECK(rho <= -0.5);

    const auto small = estimate_bad_event_rates(par, 0.5, 100.0, 0.1, 8, 1000, 10010);
    CHECK(big.sum_rates < small.sum_rates);

    std::ostringstream d;
    d << "spearman=" << rho << "; sum(t0=1e3)=" << big.sum_rates
      << " vs sum(t0=1e2)=" << small.sum_rates;
    report(10, rho <= -0.5 && big.sum_rates < small.sum_rates, d.str());
}

TEST_CASE("criterion_11: heavy-tail survival plateau vs markov control") {
    SimConfig c{InterarrivalLaw::pareto(0.5, 1.0)};
    c.lambda = 0.25;
    c.half_width = 2000;
    c.one_sided = true;
    c.replicas = 1000;
    c.seed = 11011;
    const auto curve = survival_curve(c, {1000.0, 10000.0});
    REQUIRE(curve.rows.size() == 2);
    const auto& a = curve.rows[0].est;
    const auto& b = curve.rows[1].est;
    const double width =
        std::max(a.ci_high - a.ci_low, b.ci_high - b.ci_low);  // joint CI width
    const bool close = std::abs(a.p_hat - b.p_hat) < width;
    const bool positive = a.p_hat >= 0.05 && b.p_hat >= 0.05;
    const bool monotone = curve.pathwise_violations == 0;
    CHECK(close);
    CHECK(positive);
    CHECK(monotone);

    SimConfig ctrl{InterarrivalLaw::exponential(1.0)};
    ctrl.lambda = 0.25;
    ctrl.half_width = 2000;
    ctrl.one_sided = true;
    ctrl.horizon = 1000.0;
    ctrl.replicas = 1000;
    ctrl.seed = 11012;
    const auto mk = run_batch(ctrl);
    CHECK(mk.survival.p_hat < 0.01);

    std::ostringstream d;
    d << "p(1e3)=" << a.p_hat << " p(1e4)=" << b.p_hat << " width=" << width
      << "; markov=" << mk.survival.p_hat;
    report(11, close && positive && monotone && mk.survival.p_hat < 0.01, d.str());
}

TEST_CASE("criterion_12: every command is rerun-deterministic") {
    const char* cli = std::getenv("RCP_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "RCP_CLI must point at the command-line binary");

    struct Job {
        const char* command;
        const char* config;
    };
    const Job jobs[] = {
        {"simulate",
         "law = pareto(alpha=0.5, scale=1)\nlambda = 0.5\nL = 20\nT = 10\n"
         "replicas = 100\nper_replica = 1\n"},
        {"survival-curve",
         "law = pareto(alpha=0.5, scale=1)\nlambda = 0.3\nL = 20\nT_list = 2:4:8\n"
         "replicas = 100\n"},
        {"lambda-scan",
         "law = pareto(alpha=0.5, scale=1)\nlambdas = 0.1:0.3\nL = 20\nT = 10\n"
         "replicas = 100\n"},
        {"lambda-upper",
         "law = exponential(rate=1)\ntheta = 0.2\nlambda_lo = 0.5\nlambda_hi = 4\n"
         "tol = 0.2\nL = 20\nT = 10\nreplicas = 100\n"},
        {"gap-prob",
         "law = exponential(rate=1)\nt_list = 1:2\nK = 2\nreplicas = 1000\n"},
        {"count-tail",
         "law = pareto(alpha=0.5, scale=1)\nt_list = 100\neps3 = 0.5\n"
         "replicas = 1000\n"},
        {"quiet-interval",
         "law = pareto(alpha=0.5, scale=1)\ni_lo = 100\ni_hi = 200\neps3 = 0.5\n"
         "replicas = 500\n"},
        {"coupling",
         "law = pareto(alpha=0.5, scale=1)\nv0 = 4\nt_list = 100:400\nn_list = 4:8\n"
         "replicas = 500\n"},
        {"far-gap",
         "law = pareto(alpha=0.5, scale=1)\ns_list = 16:64\nexponent = 0.5\n"
         "replicas = 1000\n"},
        {"levels",
         "law = pareto(alpha=0.5, scale=1)\nlambda = 0.5\nt0 = 100\ngamma = 0.2\n"
         "i_max = 4\nreplicas = 100\n"},
        {"conditions", "law = pareto(alpha=0.5, scale=1)\n"},
    };

    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };

    bool all_ok = true;
    for (const auto& job : jobs) {
        const std::string cfg = std::string("accept12_") + job.command + ".cfg";
        {
            std::ofstream out(cfg, std::ios::binary);
            out << job.config;
        }
        std::string first;
        bool ok = true;
        for (int run = 0; run < 2; ++run) {
            const std::string out = std::string("accept12_") + job.command + ".csv";
            const std::string cmd = std::string("\"") + cli + "\" " + job.command +
                                    " --config " + cfg + " --seed 5 --out " + out;
            const int rc = std::system(cmd.c_str());
            if (rc != 0) {
                ok = false;
                break;
            }
            const std::string text = slurp(out);
            if (run == 0)
                first = text;
            else
                ok = !text.empty() && text == first;
            std::remove(out.c_str());
        }
        std::remove(cfg.c_str());
        CHECK_MESSAGE(ok, job.command);
        all_ok = all_ok && ok;
    }
    report(12, all_ok, "11 commands rerun byte-identically");
}
