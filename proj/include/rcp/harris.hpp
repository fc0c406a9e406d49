#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rcp/distributions.hpp"
#include "rcp/rng.hpp"

namespace rcp {

using Site = std::int64_t;

struct SiteWindow {
    Site x_min;
    Site x_max;
    bool contains(Site x) const { return x_min <= x && x <= x_max; }
    std::size_t size() const { return static_cast<std::size_t>(x_max - x_min + 1); }
};

// Raw stream generation shared by HarrisSystem and the engine: identical
// (seed, replica, object) keys give identical events on both paths.
std::vector<double> death_point_list(const InterarrivalLaw& law, std::uint64_t seed,
                                     std::uint64_t replica, Site site, double horizon);

// Poisson events at rate lambda_ref, each with an independent uniform mark.
// A rate-lambda stream keeps events with mark <= lambda / lambda_ref; running
// two lambdas off the same lambda_ref couples them by thinning.
std::vector<std::pair<double, double>> arrow_event_list(double lambda_ref,
                                                        std::uint64_t seed,
                                                        std::uint64_t replica,
                                                        Site from, Site to,
                                                        double horizon);

struct PathCertificate {
    // (site, entry time) hops; hops[0] is the source, entry times increase
    std::vector<std::pair<Site, double>> hops;
    double terminal;
};

// Death marks and directed Poisson arrows over window x [0, horizon],
// materialized lazily per object.  Queries are idempotent: identical keys
// regenerate identical events, so concurrent cache fills are safe behind the
// internal mutex.
class HarrisSystem {
public:
    HarrisSystem(InterarrivalLaw law, double lambda, SiteWindow window,
                 double horizon, bool one_sided, std::uint64_t seed,
                 std::uint64_t replica = 0, double lambda_ref = 0.0);

    const InterarrivalLaw& law() const { return law_; }
    double lambda() const { return lambda_; }
    double lambda_ref() const { return lambda_ref_; }
    SiteWindow window() const { return window_; }
    double horizon() const { return horizon_; }
    bool one_sided() const { return one_sided_; }
    std::uint64_t seed() const { return seed_; }

    // sorted death times of `site` in the closed interval [a, b]
    std::vector<double> deaths_in(Site site, double a, double b) const;

    // sorted arrow times of the directed edge (from, to) in [a, b]
    std::vector<double> arrows_in(Site from, Site to, double a, double b) const;

    // xi^A_t computed by a full forward event sweep over the window
    std::set<Site> infected_set_at(const std::set<Site>& initial, double t) const;

    std::optional<PathCertificate> reachable(Site src_site, double src_time,
                                             Site dst_site, double dst_time) const;

    // exhaustive search over the event graph; window <= 8 sites, <= 64 events
    bool brute_force_reachable(Site src_site, double src_time, Site dst_site,
                               double dst_time) const;

    bool certificate_valid(const PathCertificate& cert, Site src_site,
                           double src_time, Site dst_site, double dst_time) const;

    // debug dump of everything materialized so far: kind,site,to,time
    void dump_csv(std::ostream& os) const;

    const std::vector<double>& death_points(Site site) const;
    const std::vector<std::pair<double, double>>& arrow_points(Site from, Site to) const;

    bool arrow_kept(double mark) const { return mark * lambda_ref_ <= lambda_; }

private:
    void check_edge(Site from, Site to) const;

    InterarrivalLaw law_;
    double lambda_;
    double lambda_ref_;
    SiteWindow window_;
    double horizon_;
    bool one_sided_;
    std::uint64_t seed_;
    std::uint64_t replica_;

    mutable std::mutex mu_;
    mutable std::unordered_map<Site, std::vector<double>> deaths_;
    mutable std::unordered_map<std::uint64_t, std::vector<std::pair<double, double>>> arrows_;
};

}  // namespace rcp
