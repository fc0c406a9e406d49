#include "rcp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "rcp/parallel.hpp"

namespace rcp {

void SimConfig::validate() const {
    if (half_width < 0) throw std::invalid_argument("SimConfig: half_width must be >= 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("SimConfig: horizon must be > 0");
    if (replicas < 1) throw std::invalid_argument("SimConfig: replicas must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("SimConfig: lambda must be > 0");
    if (lambda_ref != 0.0 && lambda_ref < lambda)
        throw std::invalid_argument("SimConfig: lambda_ref must be >= lambda");
    const SiteWindow w = window();
    for (Site x : initial)
        if (!w.contains(x)) throw std::invalid_argument("SimConfig: initial set outside window");
}

namespace {

// Incremental event generators; a site's full renewal phase is generated
// from time 0 even when the site is touched late, which the non-Markovian
// clock requires.  Identical keys reproduce HarrisSystem's streams exactly.
struct DeathGen {
    Rng rng;
    const InterarrivalLaw* law;
    double next;

    DeathGen(const InterarrivalLaw& l, std::uint64_t seed, std::uint64_t replica,
             Site site, double min_first_gap)
        : rng(make_stream(seed, replica, StreamKind::Death, site)), law(&l) {
        next = law->sample(rng);
        while (next <= min_first_gap) next = law->sample(rng);  // rejection
    }
    void advance() { next += law->sample(rng); }
};

struct ArrowGen {
    Rng rng;
    double lambda_ref;
    double lambda;
    double next;

    ArrowGen(double l_ref, double l, std::uint64_t seed, std::uint64_t replica,
             Site from, Site to)
        : rng(make_stream(seed, replica, StreamKind::Arrow, from, to)),
          lambda_ref(l_ref),
          lambda(l),
          next(0.0) {
        advance();
    }
    // steps to the next thinning-kept arrow
    void advance() {
        for (;;) {
            next += -std::log(uniform01(rng)) / lambda_ref;
            const double mark = uniform01(rng);
            if (mark * lambda_ref <= lambda) return;
        }
    }
};

enum EventKind : int { kDeath = 0, kArrow = 1 };  // deaths first on float ties

struct QueuedEvent {
    double time;
    int kind;
    Site site;
    Site to;
    bool operator>(const QueuedEvent& o) const {
        return std::tie(time, kind, site, to) > std::tie(o.time, o.kind, o.site, o.to);
    }
};

}  // namespace

SimOutcome run_replica(const SimConfig& config, std::uint64_t replica_id,
                       double origin_min_gap) {
    config.validate();
    const SiteWindow window = config.window();
    const double T = config.horizon;
    const double l_ref = config.lambda_ref > 0.0 ? config.lambda_ref : config.lambda;

    std::unordered_map<Site, DeathGen> death_gens;
    std::unordered_map<std::uint64_t, ArrowGen> arrow_gens;  // key: idx*2 + dir
    std::unordered_set<Site> infected;
    std::unordered_set<Site> activated;
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue;

    SimOutcome out;

    auto note_extent = [&](Site x) {
        const Site e = config.one_sided ? x : std::abs(x);
        out.max_extent = std::max(out.max_extent, e);
        if (x == window.x_max || (!config.one_sided && x == window.x_min))
            out.boundary_hit = true;
    };

    // Activating a site schedules its whole future event flow: deaths of the
    // site and arrows on its outgoing edges.  Handlers check state, so events
    // for currently-healthy sites are simply ignored when popped.
    auto activate = [&](Site x, double now) {
        if (!activated.insert(x).second) return;
        ++out.materialized_sites;
        DeathGen dg(config.law, config.seed, replica_id, x,
                    x == 0 ? origin_min_gap : 0.0);
        while (dg.next <= now) dg.advance();
        if (dg.next <= T) queue.push({dg.next, kDeath, x, x});
        death_gens.emplace(x, std::move(dg));
        for (int dir : {+1, -1}) {
            if (config.one_sided && dir < 0) continue;
            const Site y = x + dir;
            if (!window.contains(y)) continue;  // absorbing boundary
            ArrowGen ag(l_ref, config.lambda, config.seed, replica_id, x, y);
            while (ag.next <= now) ag.advance();
            if (ag.next <= T) queue.push({ag.next, kArrow, x, y});
            const std::uint64_t key =
                static_cast<std::uint64_t>(x - window.x_min) * 2 + (dir > 0 ? 1 : 0);
            arrow_gens.emplace(key, std::move(ag));
        }
    };

    for (Site x : config.initial) {
        infected.insert(x);
        note_extent(x);
        activate(x, 0.0);
    }

    std::vector<double> snap_times = config.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t snap_i = 0;
    auto emit_snapshots_until = [&](double t) {
        while (snap_i < snap_times.size() && snap_times[snap_i] < t) {
            if (snap_times[snap_i] <= T)
                out.snapshots.push_back(
                    {snap_times[snap_i], infected.size(), out.max_extent});
            ++snap_i;
        }
    };

    if (infected.empty()) {
        out.survived = false;
        out.tau = 0.0;
        emit_snapshots_until(T + 1.0);
        return out;
    }

    while (!queue.empty()) {
        const QueuedEvent ev = queue.top();
        queue.pop();
        emit_snapshots_until(ev.time);
        ++out.processed_events;

        if (ev.kind == kDeath) {
            auto& dg = death_gens.at(ev.site);
            dg.advance();
            if (dg.next <= T) queue.push({dg.next, kDeath, ev.site, ev.site});
            if (infected.erase(ev.site) && infected.empty()) {
                out.survived = false;
                out.tau = ev.time;
                emit_snapshots_until(T + 1.0);
                return out;
            }
        } else {
            const std::uint64_t key =
                static_cast<std::uint64_t>(ev.site - window.x_min) * 2 +
                (ev.to > ev.site ? 1 : 0);
            auto& ag = arrow_gens.at(key);
            ag.advance();
            if (ag.next <= T) queue.push({ag.next, kArrow, ev.site, ev.to});
            if (infected.count(ev.site) && !infected.count(ev.to)) {
                infected.insert(ev.to);
                note_extent(ev.to);
                activate(ev.to, ev.time);
            }
        }
    }

    emit_snapshots_until(T + 1.0);
    out.survived = !infected.empty();
    out.tau = T;  // unused when survived
    return out;
}

namespace {

BatchSummary summarize(std::vector<SimOutcome>& outcomes, bool retain) {
    BatchSummary summary;
    std::size_t n_survived = 0, n_boundary = 0;
    double tau_sum = 0.0;
    for (const auto& o : outcomes) {
        if (o.survived) {
            ++n_survived;
        } else {
            tau_sum += o.tau;
            ++summary.n_finite;
        }
        if (o.boundary_hit) ++n_boundary;
    }
    summary.survival = stats::binomial_ci(n_survived, outcomes.size());
    summary.mean_tau_finite =
        summary.n_finite ? tau_sum / static_cast<double>(summary.n_finite) : 0.0;
    summary.boundary_frac =
        static_cast<double>(n_boundary) / static_cast<double>(outcomes.size());
    if (retain) summary.outcomes = std::move(outcomes);
    return summary;
}

}  // namespace

BatchSummary run_batch(const SimConfig& config, bool retain_outcomes) {
    config.validate();
    std::vector<SimOutcome> outcomes(config.replicas);
    parallel_replicas(config.replicas,
                      [&](std::size_t r) { outcomes[r] = run_replica(config, r); });
    return summarize(outcomes, retain_outcomes);
}

BatchSummary conditioned_origin_batch(const SimConfig& config, double c,
                                      bool retain_outcomes) {
    config.validate();
    if (c > 0.0 && !(config.law.tail_mass(c) > 0.0))
        throw std::invalid_argument("conditioned_origin_batch: tail_mass(c) = 0");
    std::vector<SimOutcome> outcomes(config.replicas);
    parallel_replicas(config.replicas,
                      [&](std::size_t r) { outcomes[r] = run_replica(config, r, c); });
    return summarize(outcomes, retain_outcomes);
}

}  // namespace rcp
