#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "quasifix/metric_space.hpp"

namespace quasifix {

/// splitmix64 generator. Used instead of <random> engines-plus-distributions
/// so that generated instances are bit-identical across platforms and
/// standard-library versions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    Index next_index(Index bound) {
        return static_cast<Index>(next_below(static_cast<std::uint64_t>(bound)));
    }

private:
    std::uint64_t state_;
};

/// Connected weighted graph on n points: a random spanning tree plus each
/// remaining edge with probability `density`, weights uniform on {1, ..., 10},
/// absent edges +inf. Deterministic for fixed (n, density, seed).
inline Matrix sample_weight_graph(Index n, double density, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_weight_graph: n must be >= 1");
    if (!(density > 0.0 && density <= 1.0))
        throw std::invalid_argument("sample_weight_graph: density must be in (0, 1]");
    SplitMix64 rng(seed);
    Matrix w = Matrix::Constant(n, n, kInfinity);
    w.diagonal().setZero();
    for (Index i = 1; i < n; ++i) {
        const Index j = rng.next_index(i);
        const double weight = 1.0 + static_cast<double>(rng.next_below(10));
        w(i, j) = w(j, i) = weight;
    }
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            if (!std::isinf(w(i, j))) continue;  // tree edge
            if (rng.next_unit() < density) {
                const double weight = 1.0 + static_cast<double>(rng.next_below(10));
                w(i, j) = w(j, i) = weight;
            }
        }
    return w;
}

/// Seeded valid metric space: sample a connected weighted graph, then take its
/// shortest-path closure. Same (n, density, seed) gives a bit-identical table.
inline FiniteMetricSpace generate_space(Index n, double density, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_space: n must be >= 1");
    return metric_closure(sample_weight_graph(n, density, seed));
}

/// Uniformly random self-map.
inline SelfMap random_self_map(Index n, SplitMix64& rng) {
    SelfMap t;
    t.images.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) t.images.push_back(rng.next_index(n));
    return t;
}

/// Self-map that pulls every point toward a random hub: the image of x is a
/// uniform pick among points strictly closer to the hub than x (plus the hub
/// itself). Such maps are frequently, though not always, contractive; callers
/// filter on the classifier.
inline SelfMap hub_biased_self_map(const FiniteMetricSpace& s, SplitMix64& rng) {
    const Index n = s.size();
    const Index hub = rng.next_index(n);
    SelfMap t;
    t.images.reserve(static_cast<std::size_t>(n));
    for (Index x = 0; x < n; ++x) {
        std::vector<Index> candidates{hub};
        for (Index u = 0; u < n; ++u)
            if (s.dist(u, hub) < s.dist(x, hub)) candidates.push_back(u);
        t.images.push_back(candidates[static_cast<std::size_t>(
            rng.next_index(static_cast<Index>(candidates.size())))]);
    }
    return t;
}

/// Multi-valued map biased toward a random hub: every image contains the hub,
/// and image cardinality shrinks with distance from it. Uniform random
/// multimaps are almost never contractive under the sup-functional condition;
/// this generator produces positives at a usable rate (still rejection-filter
/// on mv_minimal_q).
inline MultiMap hub_biased_multimap(const FiniteMetricSpace& s, SplitMix64& rng) {
    const Index n = s.size();
    const Index hub = rng.next_index(n);

    // Points ordered by distance to the hub, index as tie-break.
    std::vector<Index> by_closeness;
    by_closeness.reserve(static_cast<std::size_t>(n));
    for (Index u = 0; u < n; ++u) by_closeness.push_back(u);
    std::sort(by_closeness.begin(), by_closeness.end(), [&](Index a, Index b) {
        if (s.dist(a, hub) != s.dist(b, hub)) return s.dist(a, hub) < s.dist(b, hub);
        return a < b;
    });

    double max_dist = 0.0;
    for (Index u = 0; u < n; ++u) max_dist = std::max(max_dist, s.dist(u, hub));

    MultiMap f;
    f.images.reserve(static_cast<std::size_t>(n));
    const Index pool = std::max<Index>(Index{1}, (n + 3) / 4);
    for (Index x = 0; x < n; ++x) {
        std::vector<Index> members{hub};
        if (max_dist > 0.0) {
            const double closeness = 1.0 - s.dist(x, hub) / max_dist;  // 1 at hub, 0 farthest
            const Index extra = static_cast<Index>(rng.next_below(3));
            for (Index e = 0; e < extra; ++e)
                if (rng.next_unit() < closeness)
                    members.push_back(by_closeness[static_cast<std::size_t>(rng.next_index(pool))]);
        }
        f.images.emplace_back(std::move(members));
    }
    return f;
}

}  // namespace quasifix
