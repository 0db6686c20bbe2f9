#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quasifix {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A finite metric space: labeled points and an exact pairwise distance table.
///
/// The table is expected to satisfy the metric axioms with exact (epsilon-free)
/// comparisons; use validate_metric to check and metric_closure to repair
/// noisy or incomplete inputs. Point identity is by index; labels are
/// display-only.
struct FiniteMetricSpace {
    std::vector<std::string> labels;
    Matrix dist;

    Index size() const { return static_cast<Index>(labels.size()); }
    double d(Index i, Index j) const { return dist(i, j); }
    const std::string& label(Index i) const { return labels[static_cast<std::size_t>(i)]; }
};

/// Nonempty set of point indices, kept sorted and duplicate-free so that
/// set equality is plain vector equality.
struct PointSet {
    std::vector<Index> members;

    PointSet() = default;
    explicit PointSet(std::vector<Index> m) : members(std::move(m)) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        if (members.empty()) throw std::invalid_argument("PointSet: must be nonempty");
    }
    PointSet(std::initializer_list<Index> m) : PointSet(std::vector<Index>(m)) {}

    static PointSet singleton(Index i) { return PointSet{i}; }

    bool contains(Index i) const {
        return std::binary_search(members.begin(), members.end(), i);
    }
    Index size() const { return static_cast<Index>(members.size()); }
    bool operator==(const PointSet&) const = default;
};

/// Total single-valued map on point indices: images[i] is the image of i.
struct SelfMap {
    std::vector<Index> images;

    Index operator()(Index i) const { return images[static_cast<std::size_t>(i)]; }
    Index size() const { return static_cast<Index>(images.size()); }
    bool operator==(const SelfMap&) const = default;
};

/// Total multi-valued map: images[i] is the (nonempty) image set of i.
struct MultiMap {
    std::vector<PointSet> images;

    const PointSet& operator()(Index i) const { return images[static_cast<std::size_t>(i)]; }
    Index size() const { return static_cast<Index>(images.size()); }
    bool operator==(const MultiMap&) const = default;
};

/// The iterate list {x, Tx, ..., T^n x} as an ordered sequence (duplicates kept).
struct Orbit {
    Index base = 0;
    std::vector<Index> points;  // length n + 1

    Index length() const { return static_cast<Index>(points.size()) - 1; }
};

enum class MetricAxiom { identity_of_indiscernibles, symmetry, triangle_inequality };

inline const char* axiom_name(MetricAxiom a) {
    switch (a) {
        case MetricAxiom::identity_of_indiscernibles: return "identity of indiscernibles";
        case MetricAxiom::symmetry: return "symmetry";
        case MetricAxiom::triangle_inequality: return "triangle inequality";
    }
    return "?";
}

/// First violated axiom with its witness pair (i, j) or triple (i, j, k).
/// k is -1 for pair witnesses.
struct MetricViolation {
    MetricAxiom axiom;
    Index i = -1;
    Index j = -1;
    Index k = -1;

    std::string describe() const {
        std::string s = axiom_name(axiom);
        s += " violated at (" + std::to_string(i) + ", " + std::to_string(j);
        if (k >= 0) s += ", " + std::to_string(k);
        s += ")";
        return s;
    }
};

struct ValidationVerdict {
    std::optional<MetricViolation> violation;

    bool valid() const { return !violation.has_value(); }
    std::string describe() const { return valid() ? "valid metric" : violation->describe(); }
};

namespace detail {

inline void require_square_finite(const Matrix& table, const char* who) {
    if (table.rows() != table.cols())
        throw std::invalid_argument(std::string(who) + ": table must be square");
    if (table.size() == 0)
        throw std::invalid_argument(std::string(who) + ": table must be nonempty");
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.cols(); ++j) {
            const double v = table(i, j);
            if (std::isnan(v))
                throw std::invalid_argument(std::string(who) + ": non-finite entry at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            if (v < 0.0)
                throw std::invalid_argument(std::string(who) + ": negative entry at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
        }
}

inline void check_point(const FiniteMetricSpace& s, Index x, const char* who) {
    if (x < 0 || x >= s.size())
        throw std::out_of_range(std::string(who) + ": point index " + std::to_string(x) +
                                " out of range [0, " + std::to_string(s.size()) + ")");
}

inline void check_set(const FiniteMetricSpace& s, const PointSet& a, const char* who) {
    for (Index m : a.members) check_point(s, m, who);
}

inline void check_map(const FiniteMetricSpace& s, const SelfMap& t, const char* who) {
    if (t.size() != s.size())
        throw std::invalid_argument(std::string(who) + ": map size " + std::to_string(t.size()) +
                                    " does not match space size " + std::to_string(s.size()));
    for (Index im : t.images) check_point(s, im, who);
}

inline void check_multimap(const FiniteMetricSpace& s, const MultiMap& f, const char* who) {
    if (f.size() != s.size())
        throw std::invalid_argument(std::string(who) + ": map size " + std::to_string(f.size()) +
                                    " does not match space size " + std::to_string(s.size()));
    for (const PointSet& ps : f.images) check_set(s, ps, who);
}

inline std::vector<std::string> default_labels(Index n) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return labels;
}

}  // namespace detail

/// Checks the three metric axioms with exact comparison, scanning row-major.
/// Entries must be finite and nonnegative (input error otherwise); the verdict
/// reports the first violated axiom in the order identity, symmetry, triangle,
/// each with the first witness in row-major order.
inline ValidationVerdict validate_metric(const Matrix& table) {
    detail::require_square_finite(table, "validate_metric");
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.cols(); ++j) {
            const double v = table(i, j);
            if (std::isinf(v))
                throw std::invalid_argument("validate_metric: non-finite entry at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            const bool ok = (i == j) ? (v == 0.0) : (v > 0.0);
            if (!ok)
                return {MetricViolation{MetricAxiom::identity_of_indiscernibles, i, j, -1}};
        }
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.cols(); ++j)
            if (table(i, j) != table(j, i))
                return {MetricViolation{MetricAxiom::symmetry, i, j, -1}};
    // d(i,k) <= d(i,j) + d(j,k), scanned lexicographically in (i, j, k)
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.rows(); ++j)
            for (Index k = 0; k < table.rows(); ++k)
                if (table(i, k) > table(i, j) + table(j, k))
                    return {MetricViolation{MetricAxiom::triangle_inequality, i, j, k}};
    return {};
}

inline ValidationVerdict validate_metric(const FiniteMetricSpace& s) {
    if (static_cast<Index>(s.labels.size()) != s.dist.rows())
        throw std::invalid_argument("validate_metric: label count does not match table size");
    return validate_metric(s.dist);
}

/// Infimum of d(a, b) over a in A, b in B (the set functional D).
inline double set_dist_inf(const FiniteMetricSpace& s, const PointSet& A, const PointSet& B) {
    detail::check_set(s, A, "set_dist_inf");
    detail::check_set(s, B, "set_dist_inf");
    double v = kInfinity;
    for (Index a : A.members)
        for (Index b : B.members) v = std::min(v, s.dist(a, b));
    return v;
}

/// Supremum of d(a, b) over a in A, b in B (the set functional rho).
inline double set_dist_sup(const FiniteMetricSpace& s, const PointSet& A, const PointSet& B) {
    detail::check_set(s, A, "set_dist_sup");
    detail::check_set(s, B, "set_dist_sup");
    double v = 0.0;
    for (Index a : A.members)
        for (Index b : B.members) v = std::max(v, s.dist(a, b));
    return v;
}

/// Largest pairwise distance within A (the set functional delta); 0 for singletons.
inline double diameter(const FiniteMetricSpace& s, const PointSet& A) {
    return set_dist_sup(s, A, A);
}

/// Diameter of an arbitrary index sequence (duplicates allowed).
inline double diameter(const FiniteMetricSpace& s, const std::vector<Index>& pts) {
    double v = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) v = std::max(v, s.dist(pts[i], pts[j]));
    return v;
}

/// First n+1 iterates of T from x, as an ordered list.
inline Orbit orbit(const FiniteMetricSpace& s, const SelfMap& T, Index x, Index n) {
    detail::check_map(s, T, "orbit");
    detail::check_point(s, x, "orbit");
    if (n < 0) throw std::invalid_argument("orbit: n must be nonnegative");
    Orbit o;
    o.base = x;
    o.points.reserve(static_cast<std::size_t>(n) + 1);
    Index p = x;
    o.points.push_back(p);
    for (Index k = 0; k < n; ++k) {
        p = T(p);
        o.points.push_back(p);
    }
    return o;
}

/// k-fold composition T^k as an explicit map.
inline SelfMap compose_power(const SelfMap& T, Index k) {
    if (k < 1) throw std::invalid_argument("compose_power: k must be >= 1");
    SelfMap out = T;
    for (Index step = 1; step < k; ++step)
        for (auto& im : out.images) im = T(im);
    return out;
}

/// All-pairs shortest-path closure of a weighted graph given as a symmetric
/// table with zero diagonal, positive off-diagonal weights, and +inf for
/// absent edges. The result satisfies the metric axioms, never exceeds the
/// input entrywise, and is idempotent. Disconnected inputs are rejected.
inline FiniteMetricSpace metric_closure(const Matrix& weights,
                                        std::vector<std::string> labels = {}) {
    detail::require_square_finite(weights, "metric_closure");
    const Index n = weights.rows();
    for (Index i = 0; i < n; ++i) {
        if (weights(i, i) != 0.0)
            throw std::invalid_argument("metric_closure: diagonal entry at (" + std::to_string(i) +
                                        ", " + std::to_string(i) + ") must be 0");
        for (Index j = 0; j < n; ++j) {
            if (weights(i, j) != weights(j, i))
                throw std::invalid_argument("metric_closure: table must be symmetric, differs at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            if (i != j && weights(i, j) == 0.0)
                throw std::invalid_argument("metric_closure: off-diagonal weight at (" +
                                            std::to_string(i) + ", " + std::to_string(j) +
                                            ") must be positive (use +inf for absent edges)");
        }
    }

    Matrix dist = weights;
    for (Index k = 0; k < n; ++k) {
        const Matrix through =
            dist.col(k).replicate(1, n) + dist.row(k).replicate(n, 1);
        dist = dist.cwiseMin(through);
    }
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (std::isinf(dist(i, j)))
                throw std::invalid_argument("metric_closure: graph is disconnected, no path between " +
                                            std::to_string(i) + " and " + std::to_string(j));

    if (labels.empty()) labels = detail::default_labels(n);
    if (static_cast<Index>(labels.size()) != n)
        throw std::invalid_argument("metric_closure: label count does not match table size");
    return FiniteMetricSpace{std::move(labels), std::move(dist)};
}

}  // namespace quasifix
