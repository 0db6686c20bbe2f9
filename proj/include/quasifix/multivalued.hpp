#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "quasifix/contraction.hpp"
#include "quasifix/metric_space.hpp"
#include "quasifix/picard.hpp"

namespace quasifix {

/// Pointwise union composition: (F^2)(x) = union of F(u) over u in F(x).
/// This is the reading that makes wrapping a single-valued map as singleton
/// sets behave identically to the single-valued machinery.
inline MultiMap compose_multimap(const FiniteMetricSpace& s, const MultiMap& F) {
    detail::check_multimap(s, F, "compose_multimap");
    MultiMap out;
    out.images.reserve(static_cast<std::size_t>(F.size()));
    for (Index x = 0; x < F.size(); ++x) {
        std::vector<Index> members;
        for (Index u : F(x).members)
            members.insert(members.end(), F(u).members.begin(), F(u).members.end());
        out.images.emplace_back(std::move(members));
    }
    return out;
}

struct MvContractionReport {
    TermSet terms = TermSet::generalized();
    double minimal_q = 0.0;
    std::optional<std::pair<Index, Index>> witness;
    bool contractive = false;
};

/// The nine set-functional comparison terms at (x, y). Point arguments are
/// read as singletons; the t2x_* slots hold the D(F^2 x, .) values.
inline std::array<double, kTermCount> mv_term_values(const FiniteMetricSpace& s, const MultiMap& F,
                                                     const MultiMap& F2, Index x, Index y) {
    const PointSet px = PointSet::singleton(x);
    const PointSet py = PointSet::singleton(y);
    const PointSet& fx = F(x);
    const PointSet& fy = F(y);
    const PointSet& f2x = F2(x);
    return {s.dist(x, y),
            set_dist_sup(s, px, fx),
            set_dist_sup(s, py, fy),
            set_dist_inf(s, px, fy),
            set_dist_inf(s, py, fx),
            set_dist_inf(s, f2x, px),
            set_dist_inf(s, f2x, fx),
            set_dist_inf(s, f2x, py),
            set_dist_inf(s, f2x, fy)};
}

/// Exact minimal modulus for the multi-valued condition: maximum over ordered
/// pairs x != y of rho(Fx, Fy) divided by the enabled-term maximum. The
/// five-term variant is obtained by disabling the four F^2 terms
/// (TermSet::quasi()). Ratio, witness, and tie-break semantics match the
/// single-valued classifier.
inline MvContractionReport mv_minimal_q(const FiniteMetricSpace& s, const MultiMap& F,
                                        const TermSet& terms = TermSet::generalized()) {
    detail::check_multimap(s, F, "mv_minimal_q");
    const MultiMap F2 = compose_multimap(s, F);

    auto [q, witness] = detail::max_ratio_scan(s.size(), [&](Index x, Index y) {
        const auto values = mv_term_values(s, F, F2, x, y);
        double den = 0.0;
        for (int i = 0; i < kTermCount; ++i)
            if (terms.contains(static_cast<Term>(i)))
                den = std::max(den, values[static_cast<std::size_t>(i)]);
        return detail::displacement_ratio(set_dist_sup(s, F(x), F(y)), den);
    });

    MvContractionReport report;
    report.terms = terms;
    report.minimal_q = q;
    report.witness = witness;
    report.contractive = q < 1.0;
    return report;
}

/// Single-valued selection from a multimap: underlying(x) is a member of F(x)
/// with d(x, underlying(x)) >= q^a * rho({x}, F(x)) for the certified q.
/// The farthest-point rule used here attains rho exactly, so the inequality
/// holds for every a simultaneously.
struct SelectionMap {
    SelfMap underlying;
    double exponent_a = 0.5;
    double modulus_q = 0.0;
    MultiMap source;
};

/// Picks the member of F(x) maximizing d(x, .), smallest index on ties.
/// q and a are validated and recorded; the pick itself depends on neither.
inline SelectionMap build_selection(const FiniteMetricSpace& s, const MultiMap& F, double q,
                                    double a) {
    detail::check_multimap(s, F, "build_selection");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("build_selection: q must be in (0, 1)");
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("build_selection: a must be in (0, 1)");

    SelectionMap sel;
    sel.exponent_a = a;
    sel.modulus_q = q;
    sel.underlying.images.reserve(static_cast<std::size_t>(F.size()));
    for (Index x = 0; x < F.size(); ++x) {
        Index pick = F(x).members.front();
        double best = s.dist(x, pick);
        for (Index u : F(x).members)  // members ascend, so strict improvement keeps the smallest
            if (s.dist(x, u) > best) {
                best = s.dist(x, u);
                pick = u;
            }
        sel.underlying.images.push_back(pick);
    }
    sel.source = F;
    return sel;
}

/// Orbit of F produced by iterating a selection map. steps[i+1] is a member of
/// F(steps[i]) by the selection invariant.
struct MvOrbitTrace {
    Index start = 0;
    std::vector<Index> steps;
    std::vector<double> residuals;
    IterationStatus status = IterationStatus::max_iters_exceeded;
    Index point = -1;
    Index step_count = -1;
    std::vector<Index> cycle;
    SelectionMap selection;
};

inline MvOrbitTrace mv_iterate(const FiniteMetricSpace& s, const MultiMap& F, Index start, double q,
                               double a, Index max_iters) {
    SelectionMap sel = build_selection(s, F, q, a);
    IterationTrace t = iterate(s, sel.underlying, start, max_iters);
    MvOrbitTrace trace;
    trace.start = t.start;
    trace.steps = std::move(t.steps);
    trace.residuals = std::move(t.residuals);
    trace.status = t.status;
    trace.point = t.point;
    trace.step_count = t.step_count;
    trace.cycle = std::move(t.cycle);
    trace.selection = std::move(sel);
    return trace;
}

/// Multi-valued rate bound (q^{1-a})^n / (1 - q^{1-a}) * d01.
inline double mv_bound(double q, double a, Index n, double d01) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("mv_bound: q must be in (0, 1)");
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("mv_bound: a must be in (0, 1)");
    if (n < 0) throw std::invalid_argument("mv_bound: n must be nonnegative");
    if (d01 < 0.0) throw std::invalid_argument("mv_bound: d01 must be nonnegative");
    const double r = std::pow(q, 1.0 - a);
    return std::pow(r, static_cast<double>(n)) * d01 / (1.0 - r);
}

/// Strict fixed points F(x) = {x}; weak fixed points x in F(x) are reported
/// alongside for diagnostics (every strict fixed point is also weak).
struct MvFixedPoints {
    std::vector<Index> strict;
    std::vector<Index> weak;
};

inline MvFixedPoints mv_fixed_points(const FiniteMetricSpace& s, const MultiMap& F) {
    detail::check_multimap(s, F, "mv_fixed_points");
    MvFixedPoints out;
    for (Index x = 0; x < F.size(); ++x) {
        if (F(x).contains(x)) out.weak.push_back(x);
        if (F(x).size() == 1 && F(x).members.front() == x) out.strict.push_back(x);
    }
    return out;
}

/// Wraps a single-valued map as a multimap of singletons.
inline MultiMap as_multimap(const SelfMap& T) {
    MultiMap f;
    f.images.reserve(T.images.size());
    for (Index im : T.images) f.images.push_back(PointSet::singleton(im));
    return f;
}

}  // namespace quasifix
