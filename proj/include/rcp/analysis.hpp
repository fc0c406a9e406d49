#pragma once

#include <cstdint>
#include <vector>

#include "rcp/engine.hpp"
#include "rcp/harris.hpp"
#include "rcp/stats.hpp"

namespace rcp {

struct BadFlags {
    bool long_scan = false;    // (I)  L_i - L_{i-1} exceeded the slot budget
    bool late_death = false;   // (II) a death mark just before t0 2^i
    bool missing_arrow = false;  // (III) an empty arrow slot in the relay chain
    bool any() const { return long_scan || late_death || missing_arrow; }
};

// Levels L_i and bad-event indicators for one realization of a one-sided
// renewal field.  L_0 = 0; levels[i-1] holds L_i.
struct LevelTrace {
    double t0 = 0.0;
    double gamma = 0.0;
    bool use_log2 = false;  // slot counts use log2(t0) instead of ln(t0)
    std::vector<Site> levels;
    std::vector<BadFlags> bad;
    std::size_t i_max = 0;
    bool complete = false;  // false when the window ran out of sites
};

// number of equal slots at level i: ceil(i * log(t0))
std::size_t slot_count(std::size_t i, double t0, bool use_log2);

LevelTrace compute_levels(const HarrisSystem& system, double t0, std::size_t i_max,
                          bool use_log2 = false);

// Fills the (I)/(II)/(III) indicators by literal queries against the
// system's death and arrow streams.
void detect_bad_events(LevelTrace& trace, const HarrisSystem& system, double gamma);

struct BadEventRateRow {
    std::size_t i;
    stats::BinomialEstimate est;  // P(B_i)
};

struct BadEventRateTable {
    double t0;
    double gamma;
    double lambda;
    std::vector<BadEventRateRow> rows;
    double sum_rates = 0.0;       // sum_i P(B_i), vs the < 1/2 target
    std::size_t exhausted = 0;    // replicas whose window ran out (counted bad)
};

BadEventRateTable estimate_bad_event_rates(const InterarrivalLaw& law, double lambda,
                                           double t0, double gamma,
                                           std::size_t i_max, std::size_t replicas,
                                           std::uint64_t seed,
                                           Site window_sites = 4000,
                                           bool use_log2 = false);

struct SurvivalCurveRow {
    double horizon;
    stats::BinomialEstimate est;
};

struct SurvivalCurve {
    std::vector<SurvivalCurveRow> rows;
    // per horizon x replica survival indicators (coupled trajectories)
    std::vector<std::vector<char>> indicators;
    std::size_t pathwise_violations = 0;  // structurally zero
};

// One trajectory per replica, evaluated at every horizon, so the curve is
// pathwise nonincreasing by construction.
SurvivalCurve survival_curve(const SimConfig& base, const std::vector<double>& horizons);

struct LambdaScanRow {
    double lambda;
    stats::BinomialEstimate est;
};

struct LambdaScan {
    std::vector<LambdaScanRow> rows;
    std::vector<std::vector<char>> indicators;  // per lambda x replica
    std::size_t pathwise_violations = 0;
};

// Thinning-coupled scan: all lambdas share arrow streams at rate max(lambdas).
LambdaScan lambda_scan(const SimConfig& base, const std::vector<double>& lambdas);

struct LambdaUpperResult {
    double lambda_hat;
    double theta;
    double horizon;
    Site half_width;
    std::size_t replicas;
    std::size_t bisection_steps;
};

// Bisection on the coupled, hence exactly monotone, lambda -> survival
// fraction map.  A finite-size diagnostic, always reported with its context.
LambdaUpperResult estimate_lambda_c_upper(const SimConfig& base, double theta,
                                          double lambda_lo, double lambda_hi,
                                          double tolerance);

}  // namespace rcp
