#include "rcp/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcp/parallel.hpp"

namespace rcp {

RenewalStream::RenewalStream(const InterarrivalLaw& law, double horizon, Rng rng)
    : law_(law), horizon_(horizon), rng_(std::move(rng)) {
    if (!(horizon > 0.0)) throw std::invalid_argument("RenewalStream: horizon must be > 0");
    next_point_ = law_.sample(rng_);
    while (next_point_ <= horizon_) {
        points_.push_back(next_point_);
        next_point_ += law_.sample(rng_);
    }
}

void RenewalStream::extend_to(double new_horizon) {
    if (new_horizon <= horizon_) return;
    horizon_ = new_horizon;
    while (next_point_ <= horizon_) {
        points_.push_back(next_point_);
        next_point_ += law_.sample(rng_);
    }
}

bool RenewalStream::hits_interval(double a, double b) const {
    if (!(0.0 <= a && a < b)) throw std::invalid_argument("hits_interval: need 0 <= a < b");
    if (b > horizon_) throw std::runtime_error("hits_interval: extend stream past b first");
    auto it = std::upper_bound(points_.begin(), points_.end(), a);
    return it != points_.end() && *it < b;
}

std::size_t RenewalStream::count_in_interval(double a, double b) const {
    if (a > b) throw std::invalid_argument("count_in_interval: a > b");
    if (b > horizon_) throw std::runtime_error("count_in_interval: extend stream past b first");
    auto lo = std::lower_bound(points_.begin(), points_.end(), a);
    auto hi = std::upper_bound(points_.begin(), points_.end(), b);
    return static_cast<std::size_t>(hi - lo);
}

RenewalStream generate_stream(const InterarrivalLaw& law, double horizon, Rng rng) {
    return RenewalStream(law, horizon, std::move(rng));
}

GapEstimate estimate_gap_probability(const InterarrivalLaw& law, double t, double K,
                                     std::size_t replicas, std::uint64_t seed) {
    if (!(t > 0.0)) throw std::invalid_argument("estimate_gap_probability: t must be > 0");
    if (!(K > 1.0)) throw std::invalid_argument("estimate_gap_probability: K must be > 1");
    std::vector<char> miss(replicas, 0);
    parallel_replicas(replicas, [&](std::size_t r) {
        Rng rng = make_stream(seed, r, StreamKind::Replica, 1);
        double s = 0.0;
        bool hit = false;
        while (s < K * t) {
            s += law.sample(rng);
            if (s > t && s < K * t) {
                hit = true;
                break;
            }
        }
        miss[r] = hit ? 0 : 1;
    });
    const auto n_miss = static_cast<std::size_t>(
        std::count(miss.begin(), miss.end(), char(1)));
    return {t, K, stats::binomial_ci(n_miss, replicas)};
}

CountTailEstimate estimate_count_tail(const InterarrivalLaw& law, double t,
                                      double eps3, std::size_t replicas,
                                      std::uint64_t seed) {
    if (!(t >= 10.0)) throw std::invalid_argument("estimate_count_tail: t must be >= 10");
    const double lg = std::log(t);
    const double cutoff = std::pow(t, 1.0 - eps3) * lg * lg;
    std::vector<char> exceed(replicas, 0);
    parallel_replicas(replicas, [&](std::size_t r) {
        Rng rng = make_stream(seed, r, StreamKind::Replica, 2);
        double s = 0.0;
        std::size_t n = 0;
        for (;;) {
            s += law.sample(rng);
            if (s > t) break;
            ++n;
            if (static_cast<double>(n) > cutoff) break;
        }
        exceed[r] = static_cast<double>(n) > cutoff ? 1 : 0;
    });
    const auto n_ex = static_cast<std::size_t>(
        std::count(exceed.begin(), exceed.end(), char(1)));
    return {t, cutoff, stats::binomial_ci(n_ex, replicas)};
}

QuietInterval find_quiet_subinterval(const InterarrivalLaw& law, double i_lo,
                                     double i_hi, double eps3,
                                     std::size_t replicas, std::uint64_t seed) {
    const double t = i_hi - i_lo;
    if (!(t >= 10.0)) throw std::invalid_argument("find_quiet_subinterval: |I| must be >= 10");
    const double len = std::pow(t, eps3 / 2.0);
    const double step = len / 2.0;
    std::size_t ncand = 0;
    while (i_lo + static_cast<double>(ncand) * step + len <= i_hi + 1e-9) ++ncand;
    if (ncand == 0) throw std::invalid_argument("find_quiet_subinterval: interval too short");

    // shared scan: one set of streams, hit indicators per (replica, candidate)
    std::vector<char> hits(replicas * ncand, 0);
    parallel_replicas(replicas, [&](std::size_t r) {
        Rng rng = make_stream(seed, r, StreamKind::Replica, 3);
        char* row = hits.data() + r * ncand;
        double s = 0.0;
        while (s <= i_hi) {
            s += law.sample(rng);
            if (s < i_lo - len || s > i_hi) continue;
            // candidates k with start_k <= s <= start_k + len
            const double lo_k = std::ceil((s - i_lo - len) / step);
            const double hi_k = std::floor((s - i_lo) / step);
            if (hi_k < 0.0 || lo_k > static_cast<double>(ncand) - 1.0) continue;
            const auto k0 = static_cast<std::size_t>(std::max(0.0, lo_k));
            const auto k1 = static_cast<std::size_t>(
                std::min(static_cast<double>(ncand) - 1.0, hi_k));
            for (std::size_t k = k0; k <= k1; ++k) row[k] = 1;
        }
    });

    std::vector<std::size_t> hit_counts(ncand, 0);
    for (std::size_t r = 0; r < replicas; ++r)
        for (std::size_t k = 0; k < ncand; ++k)
            hit_counts[k] += hits[r * ncand + k];
    const std::size_t best =
        static_cast<std::size_t>(std::min_element(hit_counts.begin(), hit_counts.end()) -
                                 hit_counts.begin());
    const double j_lo = i_lo + static_cast<double>(best) * step;
    const double j_hi = j_lo + len;

    // independent validation pass on the chosen J
    std::vector<char> fresh_hit(replicas, 0);
    parallel_replicas(replicas, [&](std::size_t r) {
        Rng rng = make_stream(seed, r, StreamKind::Replica, 4);
        double s = 0.0;
        while (s <= j_hi) {
            s += law.sample(rng);
            if (s >= j_lo && s <= j_hi) {
                fresh_hit[r] = 1;
                break;
            }
        }
    });
    const auto n_fresh = static_cast<std::size_t>(
        std::count(fresh_hit.begin(), fresh_hit.end(), char(1)));
    return {j_lo, j_hi, stats::binomial_ci(hit_counts[best], replicas),
            stats::binomial_ci(n_fresh, replicas)};
}

std::pair<double, double> choose_coupling_interval(const InterarrivalLaw& law) {
    for (int j = -60; j <= 64; ++j) {
        const double a = std::ldexp(1.0, j);
        const double b = std::ldexp(1.0, j + 1);
        if (law.interval_mass(a, b, InterarrivalLaw::IntervalKind::HalfOpen) < 0.05)
            continue;
        if (const auto* emp = std::get_if<Empirical>(&law.variant())) {
            // need a nondegenerate conditional law on I
            double first = -1.0;
            bool distinct = false;
            for (double p : emp->points) {
                if (p < a || p >= b) continue;
                if (first < 0.0)
                    first = p;
                else if (p != first)
                    distinct = true;
            }
            if (!distinct) continue;
        }
        return {a, b};
    }
    throw std::runtime_error("choose_coupling_interval: no dyadic interval with mass >= 0.05");
}

namespace {

struct WalkResult {
    std::size_t n = 0;  // crossing index, valid when crossed
    double sum_t = 0.0, sum_tt = 0.0;
    bool crossed = false;
};

// One (V0)-coupling walk without storing the sequences.  record, when
// non-null, receives every (T_i, T~_i) pair.
WalkResult coupling_walk(const InterarrivalLaw& law, double i_lo, double i_hi,
                         double v0, Rng& rng, std::size_t max_steps,
                         std::vector<std::pair<double, double>>* record) {
    WalkResult w;
    double diff = 0.0;
    for (std::size_t i = 1; i <= max_steps; ++i) {
        double x = law.sample(rng);
        double xt;
        if (x >= i_lo && x < i_hi) {
            xt = law.sample_in(i_lo, i_hi, rng);  // rule c)
        } else {
            xt = x;  // rule b)
        }
        w.sum_t += x;
        w.sum_tt += xt;
        diff += x - xt;
        if (record) record->emplace_back(x, xt);
        if (diff > v0) {
            w.n = i;
            w.crossed = true;
            return w;
        }
    }
    return w;
}

}  // namespace

CoupledPair build_v0_coupling(const InterarrivalLaw& law, double v0, Rng rng,
                              std::size_t max_steps) {
    if (!(v0 >= 1.0)) throw std::invalid_argument("build_v0_coupling: V0 must be >= 1");
    const auto [i_lo, i_hi] = choose_coupling_interval(law);
    std::vector<std::pair<double, double>> rec;
    const WalkResult w = coupling_walk(law, i_lo, i_hi, v0, rng, max_steps, &rec);
    CoupledPair out;
    out.i_lo = i_lo;
    out.i_hi = i_hi;
    out.v0 = v0;
    out.n_v0 = w.crossed ? w.n : 0;
    out.sum_t = w.sum_t;
    out.sum_t_tilde = w.sum_tt;
    out.truncated = !w.crossed;
    out.t.reserve(rec.size());
    out.t_tilde.reserve(rec.size());
    for (const auto& [x, xt] : rec) {
        out.t.push_back(x);
        out.t_tilde.push_back(xt);
    }
    return out;
}

CouplingTailTable estimate_coupling_tails(const InterarrivalLaw& law, double v0,
                                          const std::vector<double>& t_grid,
                                          const std::vector<int>& n_grid,
                                          std::size_t replicas, std::uint64_t seed) {
    if (!(v0 >= 1.0)) throw std::invalid_argument("estimate_coupling_tails: V0 must be >= 1");
    if (t_grid.empty()) throw std::invalid_argument("estimate_coupling_tails: empty t grid");
    const auto [i_lo, i_hi] = choose_coupling_interval(law);
    const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
    const auto max_steps = static_cast<std::size_t>(t_max) + 1;

    std::vector<std::size_t> crossing(replicas, 0);  // max_steps+1 == censored
    std::vector<double> max_sum(replicas, 0.0);
    std::vector<char> crossed(replicas, 0);
    parallel_replicas(replicas, [&](std::size_t r) {
        Rng rng = make_stream(seed, r, StreamKind::Replica, 5);
        const WalkResult w = coupling_walk(law, i_lo, i_hi, v0, rng, max_steps, nullptr);
        crossing[r] = w.crossed ? w.n : max_steps + 1;
        crossed[r] = w.crossed ? 1 : 0;
        max_sum[r] = std::max(w.sum_t, w.sum_tt);
    });

    CouplingTailTable table;
    table.v0 = v0;
    table.truncated = replicas - static_cast<std::size_t>(
                                     std::count(crossed.begin(), crossed.end(), char(1)));
    double k_emp = 0.0;
    for (double t : t_grid) {
        std::size_t n_exceed = 0;
        for (std::size_t r = 0; r < replicas; ++r)
            if (static_cast<double>(crossing[r]) > t) ++n_exceed;
        const auto est = stats::binomial_ci(n_exceed, replicas);
        const double ratio = est.p_hat * std::sqrt(t) / v0;
        k_emp = std::max(k_emp, est.ci_high * std::sqrt(t) / v0);
        table.rows.push_back({t, est, ratio});
    }
    table.empirical_K = k_emp;

    for (int n : n_grid) {
        if (v0 > std::ldexp(1.0, n)) continue;  // only n with V0 <= 2^n
        const double bound = std::pow(2.0, k_emp * static_cast<double>(n));
        std::size_t n_exceed = 0, n_valid = 0;
        for (std::size_t r = 0; r < replicas; ++r) {
            if (!crossed[r]) continue;
            ++n_valid;
            if (max_sum[r] > bound) ++n_exceed;
        }
        const double p = n_valid == 0
                             ? 0.0
                             : static_cast<double>(n_exceed) / static_cast<double>(n_valid);
        table.sums.push_back({n, bound, p});
    }
    return table;
}

FarGapTable estimate_far_gap(const InterarrivalLaw& law,
                             const std::vector<double>& s_grid, double exponent,
                             std::size_t replicas, std::uint64_t seed) {
    if (!(exponent > 0.0 && exponent < 1.0))
        throw std::invalid_argument("estimate_far_gap: exponent must be in (0,1)");
    for (double s : s_grid)
        if (!(s >= 2.0)) throw std::invalid_argument("estimate_far_gap: s must be >= 2");
    const std::size_t ns = s_grid.size();
    double end_max = 0.0;
    for (double s : s_grid) end_max = std::max(end_max, s + std::pow(s, exponent));

    std::vector<char> hits(replicas * ns, 0);
    parallel_replicas(replicas, [&](std::size_t r) {
        Rng rng = make_stream(seed, r, StreamKind::Replica, 6);
        char* row = hits.data() + r * ns;
        double p = 0.0;
        while (p <= end_max) {
            p += law.sample(rng);
            for (std::size_t k = 0; k < ns; ++k) {
                const double s = s_grid[k];
                if (p >= s && p <= s + std::pow(s, exponent)) row[k] = 1;
            }
        }
    });

    FarGapTable table;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t nfit = 0;
    for (std::size_t k = 0; k < ns; ++k) {
        std::size_t n_hit = 0;
        for (std::size_t r = 0; r < replicas; ++r) n_hit += hits[r * ns + k];
        const auto est = stats::binomial_ci(n_hit, replicas);
        table.rows.push_back({s_grid[k], std::pow(s_grid[k], exponent), est});
        if (est.p_hat > 0.0) {
            const double x = std::log2(s_grid[k]);
            const double y = std::log2(est.p_hat);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++nfit;
        }
    }
    table.fitted_decay =
        nfit >= 2 ? (sxy - sx * sy / static_cast<double>(nfit)) /
                        (sxx - sx * sx / static_cast<double>(nfit))
                  : 0.0;
    return table;
}

}  // namespace rcp
