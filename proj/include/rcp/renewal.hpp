#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rcp/distributions.hpp"
#include "rcp/rng.hpp"
#include "rcp/stats.hpp"

namespace rcp {

// One site's death clock: renewal points S_n = T_1 + ... + T_n inside
// [0, horizon].  No point at time 0.  Extending the horizon continues the
// same interarrival sequence, so already-generated points never change.
class RenewalStream {
public:
    RenewalStream(const InterarrivalLaw& law, double horizon, Rng rng);

    const std::vector<double>& points() const { return points_; }
    double horizon() const { return horizon_; }

    void extend_to(double new_horizon);

    // true iff some S_n lies in the open interval (a, b)
    bool hits_interval(double a, double b) const;
    // number of points in the closed interval [a, b]
    std::size_t count_in_interval(double a, double b) const;

private:
    InterarrivalLaw law_;
    double horizon_;
    std::vector<double> points_;
    double next_point_;  // first renewal beyond the current horizon
    Rng rng_;
};

RenewalStream generate_stream(const InterarrivalLaw& law, double horizon, Rng rng);

struct GapEstimate {
    double t;
    double big_factor;  // K
    stats::BinomialEstimate est;  // fraction of streams missing (t, Kt)
};

// P((t, Kt) cap R = empty), Monte Carlo over independent streams.
GapEstimate estimate_gap_probability(const InterarrivalLaw& law, double t, double K,
                                     std::size_t replicas, std::uint64_t seed);

struct CountTailEstimate {
    double t;
    double cutoff;  // t^{1-eps3} ln^2 t
    stats::BinomialEstimate est;  // P(|R cap [0,t]| > cutoff)
};

CountTailEstimate estimate_count_tail(const InterarrivalLaw& law, double t,
                                      double eps3, std::size_t replicas,
                                      std::uint64_t seed);

struct QuietInterval {
    double j_lo, j_hi;            // chosen subinterval J
    stats::BinomialEstimate scan; // hit estimate from the shared scan streams
    stats::BinomialEstimate fresh;  // independent validation estimate
};

// Scans candidate subintervals of length t^{eps3/2} at half-length steps
// across I = [i_lo, i_hi] (t = |I|) and returns the one hit least often.
// The scan shares one set of streams across candidates; the returned J is
// re-estimated with fresh streams.
QuietInterval find_quiet_subinterval(const InterarrivalLaw& law, double i_lo,
                                     double i_hi, double eps3,
                                     std::size_t replicas, std::uint64_t seed);

// Bounded interval I with mass >= 0.05 and a nondegenerate conditional law,
// found by scanning dyadic intervals [2^j, 2^{j+1}).
std::pair<double, double> choose_coupling_interval(const InterarrivalLaw& law);

// Two identically distributed interarrival sequences, built per the coupling
// rules: draws agree outside I, are conditionally independent on I, and the
// sequences are tied together once the partial-sum difference exceeds V0.
struct CoupledPair {
    std::vector<double> t;        // T_1 .. T_{N_V0}
    std::vector<double> t_tilde;  // coupled copies
    double i_lo, i_hi;            // coupling interval I
    double v0;
    std::size_t n_v0;  // first index where sum(T - T~) > V0; 0 if truncated
    double sum_t, sum_t_tilde;  // partial sums at N_V0
    bool truncated;  // max_steps exhausted before the difference exceeded V0
};

CoupledPair build_v0_coupling(const InterarrivalLaw& law, double v0, Rng rng,
                              std::size_t max_steps = 100000000);

struct CouplingTailRow {
    double t;
    stats::BinomialEstimate est;  // P(N_V0 > t)
    double ratio;                 // p_hat * sqrt(t) / V0
};

struct CouplingSumRow {
    int n;
    double bound;        // 2^{K n} with the fitted K
    double prob_exceed;  // empirical P(max partial sum at N_V0 > bound)
};

struct CouplingTailTable {
    double v0;
    std::vector<CouplingTailRow> rows;
    double empirical_K;  // max over the grid of (p_hat + ci half-width) sqrt(t)/V0
    std::vector<CouplingSumRow> sums;
    std::size_t truncated;  // replicas whose walk never crossed V0
};

CouplingTailTable estimate_coupling_tails(const InterarrivalLaw& law, double v0,
                                          const std::vector<double>& t_grid,
                                          const std::vector<int>& n_grid,
                                          std::size_t replicas, std::uint64_t seed);

struct FarGapRow {
    double s;
    double length;  // s^exponent
    stats::BinomialEstimate est;  // P(R cap [s, s + s^exponent] != empty)
};

struct FarGapTable {
    std::vector<FarGapRow> rows;
    double fitted_decay;  // least-squares slope of log2 p vs log2 s
};

FarGapTable estimate_far_gap(const InterarrivalLaw& law,
                             const std::vector<double>& s_grid, double exponent,
                             std::size_t replicas, std::uint64_t seed);

}  // namespace rcp
