#include "rcp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcp/parallel.hpp"

namespace rcp {

std::size_t slot_count(std::size_t i, double t0, bool use_log2) {
    const double lg = use_log2 ? std::log2(t0) : std::log(t0);
    return static_cast<std::size_t>(std::ceil(static_cast<double>(i) * lg));
}

LevelTrace compute_levels(const HarrisSystem& system, double t0, std::size_t i_max,
                          bool use_log2) {
    if (!(t0 > 0.0)) throw std::invalid_argument("compute_levels: t0 must be > 0");
    if (i_max < 1) throw std::invalid_argument("compute_levels: i_max must be >= 1");
    if (system.window().x_min != 0)
        throw std::invalid_argument("compute_levels: needs the one-sided field on N");
    const double needed = t0 * std::ldexp(1.0, static_cast<int>(i_max) + 2);
    if (system.horizon() < needed)
        throw std::invalid_argument("compute_levels: horizon below t0*2^(i_max+2)");

    LevelTrace trace;
    trace.t0 = t0;
    trace.use_log2 = use_log2;
    trace.i_max = i_max;
    Site prev = 0;
    for (std::size_t i = 1; i <= i_max; ++i) {
        const double lo = t0 * std::ldexp(1.0, static_cast<int>(i));
        const double hi = t0 * std::ldexp(1.0, static_cast<int>(i) + 2);
        bool found = false;
        for (Site k = prev + 1; k <= system.window().x_max; ++k) {
            if (system.deaths_in(k, lo, hi).empty()) {
                trace.levels.push_back(k);
                prev = k;
                found = true;
                break;
            }
        }
        if (!found) {
            trace.complete = false;
            return trace;  // partial trace, window exhausted
        }
    }
    trace.complete = true;
    return trace;
}

void detect_bad_events(LevelTrace& trace, const HarrisSystem& system, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("detect_bad_events: gamma must be in (0,1)");
    trace.gamma = gamma;
    trace.bad.assign(trace.levels.size(), BadFlags{});
    Site prev = 0;
    for (std::size_t i = 1; i <= trace.levels.size(); ++i) {
        const Site level = trace.levels[i - 1];
        const double anchor = trace.t0 * std::ldexp(1.0, static_cast<int>(i));
        const double len = std::pow(anchor, gamma);
        const double start = anchor - len;
        const std::size_t slots = slot_count(i, trace.t0, trace.use_log2);
        const double slot_len = len / static_cast<double>(slots);
        BadFlags& b = trace.bad[i - 1];

        b.long_scan = static_cast<std::size_t>(level - prev) > slots;
        for (Site k = prev + 1; k <= level; ++k) {
            if (!system.deaths_in(k, start, anchor).empty()) {
                b.late_death = true;
                break;
            }
        }
        for (Site k = prev; k < level; ++k) {
            const auto idx = static_cast<std::size_t>(k - prev);
            if (idx >= slots) break;  // already flagged via (I)
            const double a = start + static_cast<double>(idx) * slot_len;
            if (system.arrows_in(k, k + 1, a, a + slot_len).empty()) {
                b.missing_arrow = true;
                break;
            }
        }
        prev = level;
    }
}

BadEventRateTable estimate_bad_event_rates(const InterarrivalLaw& law, double lambda,
                                           double t0, double gamma,
                                           std::size_t i_max, std::size_t replicas,
                                           std::uint64_t seed, Site window_sites,
                                           bool use_log2) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("estimate_bad_event_rates: bad lambda");
    if (!(t0 > 0.0) || i_max < 1 || replicas < 1)
        throw std::invalid_argument("estimate_bad_event_rates: bad parameters");

    std::vector<char> bad(replicas * i_max, 0);
    std::vector<char> ran_out(replicas, 0);
    parallel_replicas(replicas, [&](std::size_t r) {
        char* row = bad.data() + r * i_max;
        Site prev = 0;
        for (std::size_t i = 1; i <= i_max; ++i) {
            const double anchor = t0 * std::ldexp(1.0, static_cast<int>(i));
            const double hi = t0 * std::ldexp(1.0, static_cast<int>(i) + 2);
            const double len = std::pow(anchor, gamma);
            const double start = anchor - len;
            const std::size_t slots = slot_count(i, t0, use_log2);
            const double slot_len = len / static_cast<double>(slots);

            // level scan; streams identical to HarrisSystem's by key
            Site level = 0;
            bool late_death = false;
            for (Site k = prev + 1; k <= window_sites; ++k) {
                Rng rng = make_stream(seed, r, StreamKind::Death, k);
                double s = 0.0;
                bool in_main = false, in_late = false;
                while (s <= hi) {
                    s += law.sample(rng);
                    if (s >= anchor && s <= hi) in_main = true;
                    if (s >= start && s <= anchor) in_late = true;
                }
                if (in_late) late_death = true;
                if (!in_main) {
                    level = k;
                    break;
                }
            }
            if (level == 0) {
                ran_out[r] = 1;
                for (std::size_t j = i; j <= i_max; ++j) row[j - 1] = 1;
                break;
            }

            bool bad_i = static_cast<std::size_t>(level - prev) > slots || late_death;
            if (!bad_i && lambda > 0.0) {
                // arrow slots hit disjoint time windows on distinct edges, so
                // the Poisson count in each slot is an independent Bernoulli
                const double p_empty = std::exp(-lambda * slot_len);
                for (Site k = prev; k < level; ++k) {
                    const auto idx = static_cast<std::size_t>(k - prev);
                    if (idx >= slots) break;
                    Rng rng = make_stream(seed, r, StreamKind::Scratch, k,
                                          static_cast<Site>(i));
                    if (uniform01(rng) < p_empty) {
                        bad_i = true;
                        break;
                    }
                }
            } else if (!bad_i && lambda == 0.0) {
                bad_i = true;  // no arrows exist at all
            }
            row[i - 1] = bad_i ? 1 : 0;
            prev = level;
        }
    });

    BadEventRateTable table;
    table.t0 = t0;
    table.gamma = gamma;
    table.lambda = lambda;
    table.exhausted = static_cast<std::size_t>(
        std::count(ran_out.begin(), ran_out.end(), char(1)));
    for (std::size_t i = 1; i <= i_max; ++i) {
        std::size_t n_bad = 0;
        for (std::size_t r = 0; r < replicas; ++r) n_bad += bad[r * i_max + (i - 1)];
        const auto est = stats::binomial_ci(n_bad, replicas);
        table.rows.push_back({i, est});
        table.sum_rates += est.p_hat;
    }
    return table;
}

SurvivalCurve survival_curve(const SimConfig& base, const std::vector<double>& horizons) {
    if (horizons.empty()) throw std::invalid_argument("survival_curve: empty horizon list");
    for (std::size_t j = 1; j < horizons.size(); ++j)
        if (!(horizons[j] > horizons[j - 1]))
            throw std::invalid_argument("survival_curve: horizons must be increasing");

    SimConfig config = base;
    config.horizon = horizons.back();
    config.snapshot_times = horizons;
    const BatchSummary batch = run_batch(config, true);

    SurvivalCurve curve;
    curve.indicators.assign(horizons.size(),
                            std::vector<char>(config.replicas, 0));
    for (std::size_t r = 0; r < config.replicas; ++r) {
        const auto& snaps = batch.outcomes[r].snapshots;
        for (std::size_t j = 0; j < horizons.size(); ++j)
            curve.indicators[j][r] = snaps[j].infected > 0 ? 1 : 0;
    }
    for (std::size_t j = 0; j < horizons.size(); ++j) {
        const auto n = static_cast<std::size_t>(std::count(
            curve.indicators[j].begin(), curve.indicators[j].end(), char(1)));
        curve.rows.push_back({horizons[j], stats::binomial_ci(n, config.replicas)});
        if (j > 0)
            for (std::size_t r = 0; r < config.replicas; ++r)
                if (curve.indicators[j][r] > curve.indicators[j - 1][r])
                    ++curve.pathwise_violations;
    }
    return curve;
}

LambdaScan lambda_scan(const SimConfig& base, const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw std::invalid_argument("lambda_scan: empty lambda list");
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        if (!(lambdas[j] > 0.0)) throw std::invalid_argument("lambda_scan: lambdas must be > 0");
        if (j > 0 && !(lambdas[j] > lambdas[j - 1]))
            throw std::invalid_argument("lambda_scan: lambdas must be increasing");
    }
    const double l_ref = lambdas.back();

    LambdaScan scan;
    for (double l : lambdas) {
        SimConfig config = base;
        config.lambda = l;
        config.lambda_ref = l_ref;
        const BatchSummary batch = run_batch(config, true);
        std::vector<char> ind(config.replicas, 0);
        for (std::size_t r = 0; r < config.replicas; ++r)
            ind[r] = batch.outcomes[r].survived ? 1 : 0;
        scan.rows.push_back({l, batch.survival});
        scan.indicators.push_back(std::move(ind));
    }
    for (std::size_t j = 1; j < scan.indicators.size(); ++j)
        for (std::size_t r = 0; r < scan.indicators[j].size(); ++r)
            if (scan.indicators[j][r] < scan.indicators[j - 1][r])
                ++scan.pathwise_violations;
    return scan;
}

LambdaUpperResult estimate_lambda_c_upper(const SimConfig& base, double theta,
                                          double lambda_lo, double lambda_hi,
                                          double tolerance) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("estimate_lambda_c_upper: theta must be in (0,1)");
    if (!(lambda_lo > 0.0 && lambda_lo < lambda_hi))
        throw std::invalid_argument("estimate_lambda_c_upper: bad bracket");
    if (!(tolerance > 0.0))
        throw std::invalid_argument("estimate_lambda_c_upper: tolerance must be > 0");

    auto fraction = [&](double lambda) {
        SimConfig config = base;
        config.lambda = lambda;
        config.lambda_ref = lambda_hi;  // coupled, so the map is exactly monotone
        return run_batch(config).survival.p_hat;
    };
    if (!(fraction(lambda_lo) < theta && fraction(lambda_hi) >= theta))
        throw std::invalid_argument("estimate_lambda_c_upper: bracket does not straddle theta");

    double lo = lambda_lo, hi = lambda_hi;
    std::size_t steps = 0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (fraction(mid) >= theta)
            hi = mid;
        else
            lo = mid;
        ++steps;
    }
    return {hi, theta, base.horizon, base.half_width, base.replicas, steps};
}

}  // namespace rcp
