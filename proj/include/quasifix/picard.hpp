#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "quasifix/contraction.hpp"
#include "quasifix/metric_space.hpp"

namespace quasifix {

/// Default additive tolerance absorbed by bound certificates. Golden tests on
/// exact-halves instances pass with tolerance 0.
inline constexpr double kDefaultBoundTolerance = 1e-9;

enum class IterationStatus { fixed_point_found, cycle_detected, max_iters_exceeded };

inline const char* status_name(IterationStatus st) {
    switch (st) {
        case IterationStatus::fixed_point_found: return "fixed_point_found";
        case IterationStatus::cycle_detected: return "cycle_detected";
        case IterationStatus::max_iters_exceeded: return "max_iters_exceeded";
    }
    return "?";
}

struct BoundParams {
    double q = 0.0;
    double d0 = 0.0;  // d(x, Tx)
};

/// Record of one Picard run. steps[i+1] = T(steps[i]); residuals[i] =
/// d(steps[i], steps[i+1]). On fixed_point_found, `point` is the fixed point
/// and `step_count` the number of applications needed to first reach it.
/// On cycle_detected, `cycle` lists one full period starting at the first
/// revisited point. On a finite space the outcome is never
/// max_iters_exceeded once max_iters >= |X|.
struct IterationTrace {
    Index start = 0;
    std::vector<Index> steps;
    std::vector<double> residuals;
    IterationStatus status = IterationStatus::max_iters_exceeded;
    Index point = -1;       // fixed point, if found
    Index step_count = -1;  // applications to first reach it
    std::vector<Index> cycle;
    std::optional<BoundParams> bound_params;
};

/// Applies T from `start` until a fixed point repeats, a non-trivial cycle is
/// revisited, or max_iters applications have been spent.
inline IterationTrace iterate(const FiniteMetricSpace& s, const SelfMap& T, Index start,
                              Index max_iters) {
    detail::check_map(s, T, "iterate");
    detail::check_point(s, start, "iterate");
    if (max_iters < 1) throw std::invalid_argument("iterate: max_iters must be >= 1");

    IterationTrace trace;
    trace.start = start;
    trace.steps.push_back(start);
    std::unordered_map<Index, Index> first_seen{{start, 0}};

    for (Index k = 0; k < max_iters; ++k) {
        const Index prev = trace.steps.back();
        const Index next = T(prev);
        trace.steps.push_back(next);
        trace.residuals.push_back(s.dist(prev, next));
        if (next == prev) {
            trace.status = IterationStatus::fixed_point_found;
            trace.point = next;
            trace.step_count = k;  // first occurrence was one application earlier
            return trace;
        }
        if (auto it = first_seen.find(next); it != first_seen.end()) {
            trace.status = IterationStatus::cycle_detected;
            trace.cycle.assign(trace.steps.begin() + it->second, trace.steps.end() - 1);
            return trace;
        }
        first_seen.emplace(next, static_cast<Index>(trace.steps.size()) - 1);
    }
    trace.status = IterationStatus::max_iters_exceeded;
    return trace;
}

/// Exhaustive scan for Tx = x, sorted by index.
inline std::vector<Index> find_fixed_points(const FiniteMetricSpace& s, const SelfMap& T) {
    detail::check_map(s, T, "find_fixed_points");
    std::vector<Index> out;
    for (Index x = 0; x < s.size(); ++x)
        if (T(x) == x) out.push_back(x);
    return out;
}

/// The a-priori rate bound q^n / (1 - q) * d0.
inline double a_priori_bound(double q, Index n, double d0) {
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("a_priori_bound: q must be in [0, 1)");
    if (n < 0) throw std::invalid_argument("a_priori_bound: n must be nonnegative");
    if (d0 < 0.0) throw std::invalid_argument("a_priori_bound: d0 must be nonnegative");
    return std::pow(q, static_cast<double>(n)) * d0 / (1.0 - q);
}

/// Rate bound for a map whose k-th power is contractive:
/// q^m / (1 - q) * max(base_gaps), with m = floor(n / k) and base_gaps[i] =
/// d(T^i x, T^{i+k} x) for i = 0..k-1. Reduces to a_priori_bound when k = 1.
inline double power_bound(double q, Index k, Index n, const std::vector<double>& base_gaps) {
    if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("power_bound: q must be in [0, 1)");
    if (k < 1) throw std::invalid_argument("power_bound: k must be >= 1");
    if (n < 0) throw std::invalid_argument("power_bound: n must be nonnegative");
    if (static_cast<Index>(base_gaps.size()) != k)
        throw std::invalid_argument("power_bound: base_gaps must have exactly k entries");
    const Index m = n / k;
    double gap = 0.0;
    for (double g : base_gaps) {
        if (g < 0.0) throw std::invalid_argument("power_bound: gaps must be nonnegative");
        gap = std::max(gap, g);
    }
    return std::pow(q, static_cast<double>(m)) * gap / (1.0 - q);
}

/// One quantitative guarantee, checked: holds iff actual <= bound + tolerance.
/// m is the partner step for pairwise estimates and -1 otherwise.
struct BoundCertificate {
    Index n = 0;
    Index m = -1;
    double bound_value = 0.0;
    double actual_distance = 0.0;
    bool holds = false;
};

inline BoundCertificate make_certificate(Index n, Index m, double bound, double actual,
                                         double tolerance) {
    return {n, m, bound, actual, actual <= bound + tolerance};
}

/// Checks the orbit-diameter guarantee delta[O_T(x, n)] <= d(x, Tx) / (1 - q).
inline BoundCertificate orbit_diameter_bound_check(const FiniteMetricSpace& s, const SelfMap& T,
                                                   Index x, Index n, double q,
                                                   double tolerance = kDefaultBoundTolerance) {
    if (!(q >= 0.0 && q < 1.0))
        throw std::invalid_argument("orbit_diameter_bound_check: q must be in [0, 1)");
    const Orbit o = orbit(s, T, x, n);
    const double actual = diameter(s, o.points);
    const double bound = s.dist(x, T(x)) / (1.0 - q);
    return make_certificate(n, -1, bound, actual, tolerance);
}

/// Smallest k* <= n with d(x, T^{k*} x) = delta[O_T(x, n)] exactly, when the
/// orbit diameter is attained from the base point. Guaranteed to exist for
/// generalized quasi-contractions; reported as absent otherwise.
inline std::optional<Index> diameter_witness(const FiniteMetricSpace& s, const SelfMap& T, Index x,
                                             Index n) {
    const Orbit o = orbit(s, T, x, n);
    const double delta = diameter(s, o.points);
    for (Index k = 0; k <= n; ++k)
        if (s.dist(x, o.points[static_cast<std::size_t>(k)]) == delta) return k;
    return std::nullopt;
}

/// Pairwise Cauchy estimates d(T^n x, T^m x) <= q^n d(x, Tx) / (1 - q) for all
/// 1 <= n < m <= horizon, in lexicographic (n, m) order.
inline std::vector<BoundCertificate> cauchy_estimate_check(const FiniteMetricSpace& s,
                                                           const SelfMap& T, Index x, double q,
                                                           Index horizon,
                                                           double tolerance = kDefaultBoundTolerance) {
    if (!(q >= 0.0 && q < 1.0))
        throw std::invalid_argument("cauchy_estimate_check: q must be in [0, 1)");
    if (horizon < 1) throw std::invalid_argument("cauchy_estimate_check: horizon must be >= 1");
    const Orbit o = orbit(s, T, x, horizon);
    const double d0 = s.dist(x, T(x));
    std::vector<BoundCertificate> certs;
    certs.reserve(static_cast<std::size_t>(horizon * (horizon - 1) / 2));
    for (Index n = 1; n < horizon; ++n) {
        const double bound = a_priori_bound(q, n, d0);
        for (Index m = n + 1; m <= horizon; ++m) {
            const double actual = s.dist(o.points[static_cast<std::size_t>(n)],
                                         o.points[static_cast<std::size_t>(m)]);
            certs.push_back(make_certificate(n, m, bound, actual, tolerance));
        }
    }
    return certs;
}

}  // namespace quasifix
