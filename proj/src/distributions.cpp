#include "rcp/distributions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rcp {

namespace {

void validate(const Exponential& e) {
    if (!(e.rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
}

void validate(const ParetoType& p) {
    if (!(p.alpha > 0.0)) throw std::invalid_argument("pareto: alpha must be > 0");
    if (!(p.scale > 0.0)) throw std::invalid_argument("pareto: scale must be > 0");
}

void validate(const OscillatingEps& o) {
    if (!(0.0 < o.alpha && o.alpha < o.beta && o.beta < 1.0))
        throw std::invalid_argument("oscillating: need 0 < alpha < beta < 1");
    if (o.breakpoints.empty() || o.breakpoints.front() != 1.0)
        throw std::invalid_argument("oscillating: breakpoints must start at 1");
    for (std::size_t i = 1; i < o.breakpoints.size(); ++i)
        if (!(o.breakpoints[i] > o.breakpoints[i - 1]))
            throw std::invalid_argument("oscillating: breakpoints must be strictly increasing");
}

void validate(const Empirical& e) {
    if (e.points.empty()) throw std::invalid_argument("empirical: empty sample");
    double prev = 0.0;
    for (double p : e.points) {
        if (!(p > 0.0)) throw std::invalid_argument("empirical: points must be positive");
        if (p < prev) throw std::invalid_argument("empirical: points must be sorted");
        prev = p;
    }
}

double osc_eps(const OscillatingEps& o, std::size_t piece) {
    return (piece % 2 == 0) ? o.alpha : o.beta;
}

// tail value at breakpoint a_k (c_0 = 1 at a_0 = 1).
double osc_tail_at_break(const OscillatingEps& o, std::size_t k) {
    double c = 1.0;
    for (std::size_t j = 0; j + 1 <= k; ++j)
        c *= std::pow(o.breakpoints[j + 1] / o.breakpoints[j], -osc_eps(o, j));
    return c;
}

double osc_tail(const OscillatingEps& o, double t) {
    if (t <= o.breakpoints.front()) return 1.0;
    double c = 1.0;
    std::size_t k = 0;
    while (k + 1 < o.breakpoints.size() && t >= o.breakpoints[k + 1]) {
        c *= std::pow(o.breakpoints[k + 1] / o.breakpoints[k], -osc_eps(o, k));
        ++k;
    }
    return c * std::pow(t / o.breakpoints[k], -osc_eps(o, k));
}

double osc_quantile(const OscillatingEps& o, double u) {
    // smallest t with tail(t) <= u, u in (0,1)
    double c = 1.0;
    std::size_t k = 0;
    while (k + 1 < o.breakpoints.size()) {
        const double c_next =
            c * std::pow(o.breakpoints[k + 1] / o.breakpoints[k], -osc_eps(o, k));
        if (c_next < u) break;
        c = c_next;
        ++k;
    }
    return o.breakpoints[k] * std::pow(u / c, -1.0 / osc_eps(o, k));
}

// int_{a}^{b} s mu(ds) inside one power piece with tail c_k (s/a_k)^{-e}.
double osc_piece_moment(double c_k, double a_k, double e, double a, double b) {
    // density: c_k * e * a_k^e * s^{-e-1}; e < 1 always here
    const double coef = c_k * e * std::pow(a_k, e);
    return coef * (std::pow(b, 1.0 - e) - std::pow(a, 1.0 - e)) / (1.0 - e);
}

}  // namespace

InterarrivalLaw::InterarrivalLaw(Variant v) : v_(std::move(v)) {
    std::visit([](const auto& law) { validate(law); }, v_);
}

InterarrivalLaw InterarrivalLaw::exponential(double rate) {
    return InterarrivalLaw(Exponential{rate});
}
InterarrivalLaw InterarrivalLaw::pareto(double alpha, double scale) {
    return InterarrivalLaw(ParetoType{alpha, scale});
}
InterarrivalLaw InterarrivalLaw::oscillating(double alpha, double beta,
                                             std::vector<double> breakpoints) {
    return InterarrivalLaw(OscillatingEps{alpha, beta, std::move(breakpoints)});
}
InterarrivalLaw InterarrivalLaw::empirical(std::vector<double> points) {
    return InterarrivalLaw(Empirical{std::move(points)});
}

double InterarrivalLaw::tail_mass(double t) const {
    if (t < 0.0) throw std::invalid_argument("tail_mass: t must be >= 0");
    return std::visit(
        [t](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return std::exp(-law.rate * t);
            } else if constexpr (std::is_same_v<T, ParetoType>) {
                if (t < law.scale) return 1.0;
                return std::pow(t / law.scale, -law.alpha);
            } else if constexpr (std::is_same_v<T, OscillatingEps>) {
                return osc_tail(law, t);
            } else {
                std::size_t n = 0;
                for (double p : law.points)
                    if (p > t) ++n;
                return static_cast<double>(n) / static_cast<double>(law.points.size());
            }
        },
        v_);
}

double InterarrivalLaw::quantile_from_tail(double u) const {
    return std::visit(
        [u](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log(u) / law.rate;
            } else if constexpr (std::is_same_v<T, ParetoType>) {
                return law.scale * std::pow(u, -1.0 / law.alpha);
            } else if constexpr (std::is_same_v<T, OscillatingEps>) {
                return osc_quantile(law, u);
            } else {
                // smallest point with empirical tail <= u
                const std::size_t n = law.points.size();
                const auto rank = static_cast<std::size_t>(
                    std::ceil((1.0 - u) * static_cast<double>(n)));
                return law.points[std::min(n, std::max<std::size_t>(rank, 1)) - 1];
            }
        },
        v_);
}

double InterarrivalLaw::sample(Rng& rng) const {
    return quantile_from_tail(uniform01(rng));
}

double InterarrivalLaw::sample_above(double c, Rng& rng) const {
    const double tc = tail_mass(c);
    if (!(tc > 0.0)) throw std::invalid_argument("sample_above: tail_mass(c) = 0");
    if (std::holds_alternative<Empirical>(v_)) {
        for (;;) {
            const double x = sample(rng);
            if (x > c) return x;
        }
    }
    return quantile_from_tail(uniform01(rng) * tc);
}

double InterarrivalLaw::sample_in(double a, double b, Rng& rng) const {
    if (!(interval_mass(a, b, IntervalKind::HalfOpen) > 0.0))
        throw std::invalid_argument("sample_in: interval has zero mass");
    for (;;) {
        const double x = sample(rng);
        if (x >= a && x < b) return x;
    }
}

double InterarrivalLaw::interval_mass(double a, double b, IntervalKind) const {
    if (a > b) throw std::invalid_argument("interval_mass: a > b");
    // built-in laws are atomless above 0, so the interval kind never matters
    return tail_mass(a) - tail_mass(b);
}

double InterarrivalLaw::truncated_first_moment(double t) const {
    if (t < 0.0) throw std::invalid_argument("truncated_first_moment: t must be >= 0");
    return std::visit(
        [t](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                const double r = law.rate;
                return (1.0 - std::exp(-r * t) * (1.0 + r * t)) / r;
            } else if constexpr (std::is_same_v<T, ParetoType>) {
                if (t <= law.scale) return 0.0;
                const double a = law.alpha, m = law.scale;
                if (a == 1.0) return m * std::log(t / m);
                return a * std::pow(m, a) *
                       (std::pow(t, 1.0 - a) - std::pow(m, 1.0 - a)) / (1.0 - a);
            } else if constexpr (std::is_same_v<T, OscillatingEps>) {
                if (t <= law.breakpoints.front()) return 0.0;
                double total = 0.0;
                std::size_t k = 0;
                while (true) {
                    const double a_k = law.breakpoints[k];
                    const double c_k = osc_tail_at_break(law, k);
                    const double e = osc_eps(law, k);
                    const bool last = (k + 1 >= law.breakpoints.size());
                    const double upper = last ? t : std::min(t, law.breakpoints[k + 1]);
                    total += osc_piece_moment(c_k, a_k, e, a_k, upper);
                    if (last || upper >= t) break;
                    ++k;
                }
                return total;
            } else {
                double s = 0.0;
                for (double p : law.points)
                    if (p <= t) s += p;
                return s / static_cast<double>(law.points.size());
            }
        },
        v_);
}

std::string InterarrivalLaw::describe() const {
    std::ostringstream os;
    std::visit(
        [&os](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                os << "exponential(rate=" << law.rate << ")";
            } else if constexpr (std::is_same_v<T, ParetoType>) {
                os << "pareto(alpha=" << law.alpha << ", scale=" << law.scale << ")";
            } else if constexpr (std::is_same_v<T, OscillatingEps>) {
                os << "oscillating(alpha=" << law.alpha << ", beta=" << law.beta
                   << ", breaks=";
                for (std::size_t i = 0; i < law.breakpoints.size(); ++i)
                    os << (i ? ":" : "") << law.breakpoints[i];
                os << ")";
            } else {
                os << "empirical(n=" << law.points.size() << ")";
            }
        },
        v_);
    return os.str();
}

std::string ConditionReport::to_csv() const {
    std::ostringstream os;
    os.precision(15);
    for (const auto& p : points) {
        os << condition << "," << p.point << "," << p.lhs << "," << p.rhs << ","
           << p.margin << "," << (p.pass ? 1 : 0) << "\n";
    }
    return os.str();
}

std::vector<ConditionReport> check_conditions(const InterarrivalLaw& law,
                                              const ConditionParams& params,
                                              const std::vector<double>& time_grid,
                                              const std::vector<double>& rank_grid) {
    if (time_grid.empty() || rank_grid.empty())
        throw std::invalid_argument("check_conditions: empty grid");
    if (!(params.M1 > 1.0 && params.M2 > 1.0))
        throw std::invalid_argument("check_conditions: M1, M2 must exceed 1");
    if (!(params.eps1 > 0.0 && params.eps2 > 0.0) ||
        !(params.eps3 > 0.0 && params.eps3 < 1.0))
        throw std::invalid_argument("check_conditions: eps out of range");

    constexpr double kSlack = 1e-12;  // equality counts as passing

    ConditionReport ra{'A', params.M1, params.eps1, params.t0, {}, true};
    for (double t : time_grid) {
        const double lhs = params.eps1 * law.truncated_first_moment(t);
        const double rhs = t * law.interval_mass(t, params.M1 * t);
        const bool relevant = t > params.t0;
        const bool pass = lhs < rhs + kSlack * std::abs(rhs);
        ra.points.push_back({t, lhs, rhs, rhs - lhs, pass});
        if (relevant && !pass) ra.verdict = false;
    }

    ConditionReport rb{'B', params.M2, params.eps2, params.r2, {}, true};
    for (double r : rank_grid) {
        const double m = params.M2;
        const double lhs =
            params.eps2 * law.interval_mass(std::pow(m, r), std::pow(m, r + 1.0));
        const double rhs = law.interval_mass(std::pow(m, r + 1.0), std::pow(m, r + 2.0));
        const bool relevant = r >= params.r2;
        const bool pass = lhs <= rhs + kSlack * std::abs(rhs);
        rb.points.push_back({r, lhs, rhs, rhs - lhs, pass});
        if (relevant && !pass) rb.verdict = false;
    }

    ConditionReport rc{'C', params.M3, params.eps3, params.M3, {}, true};
    for (double t : time_grid) {
        const double lo = std::pow(t, -(1.0 - params.eps3));
        const double hi = std::pow(t, -params.eps3);
        const double tail = law.tail_mass(t);
        const bool relevant = t >= params.M3;
        const bool pass = tail >= lo * (1.0 - kSlack) && tail <= hi * (1.0 + kSlack);
        rc.points.push_back({t, lo, hi, std::min(tail - lo, hi - tail), pass});
        if (relevant && !pass) rc.verdict = false;
    }

    return {ra, rb, rc};
}

}  // namespace rcp
