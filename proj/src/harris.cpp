#include "rcp/harris.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace rcp {

std::vector<double> death_point_list(const InterarrivalLaw& law, std::uint64_t seed,
                                     std::uint64_t replica, Site site, double horizon) {
    Rng rng = make_stream(seed, replica, StreamKind::Death, site);
    std::vector<double> pts;
    double s = law.sample(rng);
    while (s <= horizon) {
        pts.push_back(s);
        s += law.sample(rng);
    }
    return pts;
}

std::vector<std::pair<double, double>> arrow_event_list(double lambda_ref,
                                                        std::uint64_t seed,
                                                        std::uint64_t replica,
                                                        Site from, Site to,
                                                        double horizon) {
    Rng rng = make_stream(seed, replica, StreamKind::Arrow, from, to);
    std::vector<std::pair<double, double>> events;
    double t = 0.0;
    for (;;) {
        t += -std::log(uniform01(rng)) / lambda_ref;
        if (t > horizon) break;
        events.emplace_back(t, uniform01(rng));
    }
    return events;
}

HarrisSystem::HarrisSystem(InterarrivalLaw law, double lambda, SiteWindow window,
                           double horizon, bool one_sided, std::uint64_t seed,
                           std::uint64_t replica, double lambda_ref)
    : law_(std::move(law)),
      lambda_(lambda),
      lambda_ref_(lambda_ref > 0.0 ? lambda_ref : lambda),
      window_(window),
      horizon_(horizon),
      one_sided_(one_sided),
      seed_(seed),
      replica_(replica) {
    if (!(lambda > 0.0)) throw std::invalid_argument("HarrisSystem: lambda must be > 0");
    if (window.x_min > window.x_max) throw std::invalid_argument("HarrisSystem: empty window");
    if (!(horizon > 0.0)) throw std::invalid_argument("HarrisSystem: horizon must be > 0");
    if (lambda_ref_ < lambda_)
        throw std::invalid_argument("HarrisSystem: lambda_ref must be >= lambda");
}

const std::vector<double>& HarrisSystem::death_points(Site site) const {
    if (!window_.contains(site)) throw std::out_of_range("death_points: site outside window");
    std::lock_guard<std::mutex> lock(mu_);
    auto it = deaths_.find(site);
    if (it == deaths_.end()) {
        it = deaths_.emplace(site, death_point_list(law_, seed_, replica_, site, horizon_))
                 .first;
    }
    return it->second;
}

void HarrisSystem::check_edge(Site from, Site to) const {
    if (!window_.contains(from) || !window_.contains(to))
        throw std::out_of_range("arrows: site outside window");
    if (std::abs(from - to) != 1)
        throw std::invalid_argument("arrows: sites must be lattice neighbours");
    if (one_sided_ && to != from + 1)
        throw std::invalid_argument("arrows: one-sided mode only allows x -> x+1");
}

const std::vector<std::pair<double, double>>& HarrisSystem::arrow_points(Site from,
                                                                         Site to) const {
    check_edge(from, to);
    const std::uint64_t key =
        static_cast<std::uint64_t>(from - window_.x_min) * 2 + (to > from ? 1 : 0);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = arrows_.find(key);
    if (it == arrows_.end()) {
        it = arrows_
                 .emplace(key, arrow_event_list(lambda_ref_, seed_, replica_, from, to,
                                                horizon_))
                 .first;
    }
    return it->second;
}

std::vector<double> HarrisSystem::deaths_in(Site site, double a, double b) const {
    if (!(0.0 <= a && a <= b && b <= horizon_))
        throw std::invalid_argument("deaths_in: need 0 <= a <= b <= horizon");
    const auto& pts = death_points(site);
    auto lo = std::lower_bound(pts.begin(), pts.end(), a);
    auto hi = std::upper_bound(pts.begin(), pts.end(), b);
    return {lo, hi};
}

std::vector<double> HarrisSystem::arrows_in(Site from, Site to, double a, double b) const {
    if (!(0.0 <= a && a <= b && b <= horizon_))
        throw std::invalid_argument("arrows_in: need 0 <= a <= b <= horizon");
    const auto& events = arrow_points(from, to);
    std::vector<double> out;
    for (const auto& [t, mark] : events) {
        if (t < a) continue;
        if (t > b) break;
        if (arrow_kept(mark)) out.push_back(t);
    }
    return out;
}

std::set<Site> HarrisSystem::infected_set_at(const std::set<Site>& initial,
                                             double t) const {
    if (t < 0.0 || t > horizon_)
        throw std::invalid_argument("infected_set_at: t outside [0, horizon]");
    for (Site x : initial)
        if (!window_.contains(x))
            throw std::out_of_range("infected_set_at: initial site outside window");
    if (t == 0.0) return initial;

    // full materialization sweep; intended for desk-size windows
    struct Event {
        double time;
        int kind;  // 0 = death, 1 = arrow; deaths first on float ties
        Site site;
        Site to;
    };
    std::vector<Event> events;
    for (Site x = window_.x_min; x <= window_.x_max; ++x) {
        for (double d : death_points(x))
            if (d <= t) events.push_back({d, 0, x, x});
        for (int dir : {+1, -1}) {
            if (one_sided_ && dir < 0) continue;
            const Site y = x + dir;
            if (!window_.contains(y)) continue;
            for (const auto& [u, mark] : arrow_points(x, y))
                if (u <= t && arrow_kept(mark)) events.push_back({u, 1, x, y});
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return std::tie(a.time, a.kind, a.site, a.to) <
               std::tie(b.time, b.kind, b.site, b.to);
    });

    std::set<Site> infected = initial;
    for (const Event& e : events) {
        if (e.kind == 0) {
            infected.erase(e.site);
        } else if (infected.count(e.site)) {
            infected.insert(e.to);
        }
    }
    return infected;
}

namespace {

// first death strictly after u, or fallback when none
double next_death_after(const std::vector<double>& deaths, double u, double fallback) {
    auto it = std::upper_bound(deaths.begin(), deaths.end(), u);
    return it == deaths.end() ? fallback : *it;
}

bool is_death_time(const std::vector<double>& deaths, double u) {
    return std::binary_search(deaths.begin(), deaths.end(), u);
}

}  // namespace

std::optional<PathCertificate> HarrisSystem::reachable(Site src_site, double src_time,
                                                       Site dst_site,
                                                       double dst_time) const {
    if (!window_.contains(src_site) || !window_.contains(dst_site))
        throw std::out_of_range("reachable: site outside window");
    if (!(0.0 <= src_time && src_time <= dst_time && dst_time <= horizon_))
        throw std::invalid_argument("reachable: need 0 <= src_time <= dst_time <= horizon");

    // Dijkstra on (site, death-interval) states keyed by earliest entry time;
    // an earlier entry into the same interval dominates (same survival limit,
    // strictly more arrows available).
    using State = std::pair<Site, std::size_t>;  // (site, #deaths < entry)
    struct Info {
        double entry;
        State parent;
        bool has_parent;
    };
    std::map<State, Info> best;
    using QItem = std::tuple<double, Site, std::size_t>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;

    auto interval_index = [&](Site x, double u) -> std::optional<std::size_t> {
        const auto& d = death_points(x);
        if (is_death_time(d, u)) return std::nullopt;  // entering on a mark
        return static_cast<std::size_t>(
            std::lower_bound(d.begin(), d.end(), u) - d.begin());
    };

    const auto src_idx = interval_index(src_site, src_time);
    if (!src_idx) return std::nullopt;
    best[{src_site, *src_idx}] = {src_time, {}, false};
    queue.emplace(src_time, src_site, *src_idx);

    std::optional<State> goal;
    while (!queue.empty()) {
        const auto [entry, x, idx] = queue.top();
        queue.pop();
        const State s{x, idx};
        if (best[s].entry < entry) continue;  // stale
        const double limit = next_death_after(death_points(x), entry, horizon_ + 1.0);
        if (x == dst_site && entry <= dst_time && limit > dst_time) {
            goal = s;
            break;
        }
        for (int dir : {+1, -1}) {
            if (one_sided_ && dir < 0) continue;
            const Site y = x + dir;
            if (!window_.contains(y)) continue;
            for (const auto& [a, mark] : arrow_points(x, y)) {
                if (a <= entry) continue;
                if (a >= limit || a > dst_time) break;
                if (!arrow_kept(mark)) continue;
                const auto yidx = interval_index(y, a);
                if (!yidx) continue;
                // later arrows can land in later death intervals of y, so
                // every arrow in (entry, limit) gets its own relaxation
                const State ns{y, *yidx};
                auto it = best.find(ns);
                if (it == best.end() || a < it->second.entry) {
                    best[ns] = {a, s, true};
                    queue.emplace(a, y, *yidx);
                }
            }
        }
    }
    if (!goal) return std::nullopt;

    PathCertificate cert;
    cert.terminal = dst_time;
    for (State s = *goal;;) {
        const Info& info = best[s];
        cert.hops.emplace_back(s.first, info.entry);
        if (!info.has_parent) break;
        s = info.parent;
    }
    std::reverse(cert.hops.begin(), cert.hops.end());
    return cert;
}

bool HarrisSystem::brute_force_reachable(Site src_site, double src_time, Site dst_site,
                                         double dst_time) const {
    if (window_.size() > 8)
        throw std::invalid_argument("brute_force_reachable: window limited to 8 sites");
    if (!(0.0 <= src_time && src_time <= dst_time && dst_time <= horizon_))
        throw std::invalid_argument("brute_force_reachable: bad time range");

    std::size_t n_events = 0;
    for (Site x = window_.x_min; x <= window_.x_max; ++x) {
        n_events += death_points(x).size();
        for (int dir : {+1, -1}) {
            if (one_sided_ && dir < 0) continue;
            if (!window_.contains(x + dir)) continue;
            for (const auto& [t, mark] : arrow_points(x, x + dir))
                if (arrow_kept(mark)) ++n_events;
        }
    }
    if (n_events > 64)
        throw std::invalid_argument("brute_force_reachable: event budget (64) exceeded");

    std::set<std::pair<Site, double>> visited;
    auto dfs = [&](auto&& self, Site x, double u) -> bool {
        if (!visited.insert({x, u}).second) return false;
        const auto& d = death_points(x);
        const double limit = next_death_after(d, u, horizon_ + 1.0);
        if (x == dst_site && u <= dst_time && limit > dst_time) return true;
        for (int dir : {+1, -1}) {
            if (one_sided_ && dir < 0) continue;
            const Site y = x + dir;
            if (!window_.contains(y)) continue;
            for (const auto& [a, mark] : arrow_points(x, y)) {
                if (a <= u || a >= limit || a > dst_time) continue;
                if (!arrow_kept(mark)) continue;
                if (is_death_time(death_points(y), a)) continue;
                if (self(self, y, a)) return true;
            }
        }
        return false;
    };
    if (is_death_time(death_points(src_site), src_time)) return false;
    return dfs(dfs, src_site, src_time);
}

bool HarrisSystem::certificate_valid(const PathCertificate& cert, Site src_site,
                                     double src_time, Site dst_site,
                                     double dst_time) const {
    if (cert.hops.empty()) return false;
    if (cert.hops.front() != std::make_pair(src_site, src_time)) return false;
    if (cert.hops.back().first != dst_site || cert.terminal != dst_time) return false;
    for (std::size_t i = 0; i < cert.hops.size(); ++i) {
        const auto [x, entry] = cert.hops[i];
        const double leave =
            i + 1 < cert.hops.size() ? cert.hops[i + 1].second : cert.terminal;
        if (entry > leave) return false;
        if (!deaths_in(x, entry, leave).empty()) return false;  // closed interval
        if (i + 1 < cert.hops.size()) {
            const auto [y, jump] = cert.hops[i + 1];
            if (std::abs(y - x) != 1) return false;
            const auto arrs = arrows_in(x, y, jump, jump);
            if (arrs.empty()) return false;
        }
    }
    return true;
}

void HarrisSystem::dump_csv(std::ostream& os) const {
    std::lock_guard<std::mutex> lock(mu_);
    os << "kind,site,to,time\n";
    os.precision(17);
    for (const auto& [site, pts] : deaths_)
        for (double t : pts) os << "death," << site << ",," << t << "\n";
    for (const auto& [key, events] : arrows_) {
        const Site from = window_.x_min + static_cast<Site>(key / 2);
        const Site to = from + ((key % 2) ? 1 : -1);
        for (const auto& [t, mark] : events)
            if (arrow_kept(mark)) os << "arrow," << from << "," << to << "," << t << "\n";
    }
}

}  // namespace rcp
