#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quasifix/metric_space.hpp"

namespace quasifix {

/// Parse or validation failure, carrying the path of the offending field.
class SpecError : public std::runtime_error {
public:
    SpecError(std::string path, const std::string& reason)
        : std::runtime_error(path + ": " + reason), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class MetricKind { matrix, graph };

struct GraphEdge {
    Index i = 0;
    Index j = 0;
    double weight = 0.0;
    bool operator==(const GraphEdge&) const = default;
};

/// In-memory form of the space description file: the declarative content
/// (points, metric, optional map) plus the validated space built from it.
/// "graph" metrics are passed through metric_closure when the spec is parsed;
/// "matrix" metrics must already satisfy the metric axioms. See
/// docs/space_spec.md for the format.
struct SpaceSpec {
    std::string version = "1";
    std::vector<std::string> points;
    MetricKind metric_kind = MetricKind::matrix;
    Matrix rows;                   // matrix kind only
    std::vector<GraphEdge> edges;  // graph kind only
    std::optional<SelfMap> single_map;
    std::optional<MultiMap> multi_map;

    FiniteMetricSpace space;  // derived: validated (and, for graphs, closed)

    Index size() const { return static_cast<Index>(points.size()); }
};

/// Declarative equality: compares the file content, not the derived space.
bool operator==(const SpaceSpec& a, const SpaceSpec& b);

/// Parses and fully validates a space description. Throws SpecError naming
/// the field path and reason on any defect; unknown fields are rejected.
SpaceSpec parse_space_spec(const std::string& text);

/// Canonical emission: sorted keys, two-space indent, round-trip-exact
/// numbers, trailing newline. parse_space_spec(emit_space_spec(s)) == s.
std::string emit_space_spec(const SpaceSpec& spec);

/// Convenience: spec for a bare generated space (no map).
SpaceSpec spec_from_space(const FiniteMetricSpace& space);

}  // namespace quasifix
