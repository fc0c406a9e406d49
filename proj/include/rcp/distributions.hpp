#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rcp/rng.hpp"

namespace rcp {

// Interarrival laws for the recovery clocks.  All built-in laws are atomless
// with no mass at 0, so tail/interval arithmetic needs no atom corrections.

struct Exponential {
    double rate;  // 1/time
};

// tail(t) = (t/scale)^(-alpha) for t >= scale, 1 below.
struct ParetoType {
    double alpha;
    double scale;
};

// tail(t) = exp{-int_1^t eps(s)/s ds} with eps alternating alpha,beta on
// consecutive breakpoint intervals [a_k, a_{k+1}); piecewise power in
// log-space, so sampling and tail queries are closed form per piece.
struct OscillatingEps {
    double alpha;
    double beta;
    std::vector<double> breakpoints;  // a_0 = 1 < a_1 < ...
};

// For testing only: empirical law of a sorted sample.
struct Empirical {
    std::vector<double> points;  // sorted, positive
};

class InterarrivalLaw {
public:
    using Variant = std::variant<Exponential, ParetoType, OscillatingEps, Empirical>;

    explicit InterarrivalLaw(Variant v);

    static InterarrivalLaw exponential(double rate);
    static InterarrivalLaw pareto(double alpha, double scale);
    static InterarrivalLaw oscillating(double alpha, double beta,
                                       std::vector<double> breakpoints);
    static InterarrivalLaw empirical(std::vector<double> points);

    const Variant& variant() const { return v_; }

    double sample(Rng& rng) const;
    // Sample conditioned on exceeding c (rejection; caller guarantees
    // tail_mass(c) > 0).
    double sample_above(double c, Rng& rng) const;
    // Sample conditioned on landing in [a,b) (rejection).
    double sample_in(double a, double b, Rng& rng) const;

    double tail_mass(double t) const;  // mu(t, +inf)

    enum class IntervalKind { Open, Closed, HalfOpen };
    double interval_mass(double a, double b,
                         IntervalKind kind = IntervalKind::Open) const;

    double truncated_first_moment(double t) const;  // int_[0,t] s mu(ds)

    // Inverse tail: smallest t with tail(t) <= u.  Drives sample().
    double quantile_from_tail(double u) const;

    std::string describe() const;

private:
    Variant v_;
};

// One condition (A, B, or C) of the heavy-tail hypotheses, evaluated
// literally on a finite grid.  "pass" means "holds at every grid point at or
// beyond the threshold"; the report carries per-point margins so the trend
// is visible.
struct ConditionPoint {
    double point;  // time t, or rank r for condition B
    double lhs;
    double rhs;
    double margin;  // rhs - lhs; positive means the inequality holds
    bool pass;
};

struct ConditionReport {
    char condition;  // 'A', 'B', or 'C'
    double M;        // M1, M2, or M3
    double eps;      // eps1, eps2, or eps3
    double threshold;  // t0 (A), r2 (B), M3 duplicated (C)
    std::vector<ConditionPoint> points;
    bool verdict;

    std::string to_csv() const;
};

struct ConditionParams {
    double M1 = 4.0, eps1 = 0.1, t0 = 10.0;
    double M2 = 4.0, eps2 = 0.1, r2 = 1.0;
    double eps3 = 0.5, M3 = 10.0;
};

// Evaluates A on time grid, B on rank grid, C on time grid.
std::vector<ConditionReport> check_conditions(const InterarrivalLaw& law,
                                              const ConditionParams& params,
                                              const std::vector<double>& time_grid,
                                              const std::vector<double>& rank_grid);

}  // namespace rcp
