#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "rcp/distributions.hpp"
#include "rcp/harris.hpp"
#include "rcp/stats.hpp"

namespace rcp {

struct SimConfig {
    InterarrivalLaw law;
    double lambda = 1.0;
    Site half_width = 100;      // window = [-L, L], or [0, L] when one_sided
    double horizon = 100.0;     // T
    std::set<Site> initial{0};  // A
    std::size_t replicas = 1;
    std::uint64_t seed = 0;
    bool one_sided = false;
    std::vector<double> snapshot_times;
    double lambda_ref = 0.0;  // 0 means lambda; larger couples runs by thinning

    SiteWindow window() const {
        return one_sided ? SiteWindow{0, half_width} : SiteWindow{-half_width, half_width};
    }
    void validate() const;
};

struct Snapshot {
    double time;
    std::size_t infected;
    Site extent;
};

struct SimOutcome {
    bool survived = false;      // xi^A_T nonempty
    double tau = 0.0;           // extinction time; only meaningful when !survived
    Site max_extent = 0;        // largest |x| (one-sided: largest x) ever infected
    bool boundary_hit = false;  // infection touched the window edge
    std::vector<Snapshot> snapshots;
    std::uint64_t processed_events = 0;
    std::size_t materialized_sites = 0;
};

// Forward event sweep for one replica.  origin_min_gap > 0 forces the first
// interarrival at site 0 above that value by rejection resampling.
SimOutcome run_replica(const SimConfig& config, std::uint64_t replica_id,
                       double origin_min_gap = 0.0);

struct BatchSummary {
    stats::BinomialEstimate survival;  // 99% CI
    double mean_tau_finite = 0.0;      // over non-surviving replicas only
    std::size_t n_finite = 0;
    double boundary_frac = 0.0;
    std::vector<SimOutcome> outcomes;  // retained on request
};

BatchSummary run_batch(const SimConfig& config, bool retain_outcomes = false);

// run_batch with every replica's origin clock conditioned on T_{0,1} > c.
BatchSummary conditioned_origin_batch(const SimConfig& config, double c,
                                      bool retain_outcomes = false);

}  // namespace rcp
