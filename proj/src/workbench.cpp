#include "quasifix/workbench.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "quasifix/generate.hpp"
#include "quasifix/multivalued.hpp"

namespace quasifix {

using nlohmann::json;

namespace {

struct LoadedSpec {
    SpaceSpec spec;
    std::string digest;
};

LoadedSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("$", "cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    LoadedSpec loaded;
    loaded.digest = input_digest(text);
    loaded.spec = parse_space_spec(text);
    return loaded;
}

std::string fmt(double x) { return json_modulus(x).dump(); }

CommandResult error_result(const std::string& command, const std::string& path,
                           const std::string& message) {
    CommandResult result;
    result.exit_code = exit_input_error;
    result.report.command = command;
    result.report.input_path = path;
    result.report.digest = "";
    result.report.payload = json{{"error", message}};
    result.report.text = "error: " + message + "\n";
    return result;
}

const SelfMap& require_single_map(const SpaceSpec& spec) {
    if (!spec.single_map)
        throw SpecError("map", "command requires a single-valued map ('kind': 'single')");
    return *spec.single_map;
}

const MultiMap& require_multi_map(const SpaceSpec& spec) {
    if (!spec.multi_map)
        throw SpecError("map", "command requires a multi-valued map ('kind': 'multi')");
    return *spec.multi_map;
}

json point_json(const FiniteMetricSpace& s, Index i) {
    return json{{"index", i}, {"label", s.label(i)}};
}

json witness_json(const FiniteMetricSpace& s, const std::optional<std::pair<Index, Index>>& w) {
    if (!w) return nullptr;
    return json{{"x", w->first},
                {"x_label", s.label(w->first)},
                {"y", w->second},
                {"y_label", s.label(w->second)}};
}

json classification_json(const FiniteMetricSpace& s, const ContractionReport& r) {
    return json{{"terms", r.terms.name()},
                {"power", r.power},
                {"minimal_q", json_modulus(r.minimal_q)},
                {"contractive", r.contractive},
                {"witness", witness_json(s, r.witness)}};
}

std::string classification_line(const FiniteMetricSpace& s, const ContractionReport& r) {
    std::string line = "  " + r.terms.name();
    line.append(r.terms.name().size() < 12 ? 12 - r.terms.name().size() : 1, ' ');
    line += "q = " + fmt(r.minimal_q);
    line += r.contractive ? "  contractive" : "  not contractive";
    if (r.witness)
        line += "  (witness " + s.label(r.witness->first) + " -> " + s.label(r.witness->second) + ")";
    return line + "\n";
}

json trace_json(const FiniteMetricSpace& s, const IterationTrace& t) {
    json out{{"start", t.start},
             {"start_label", s.label(t.start)},
             {"status", status_name(t.status)},
             {"steps", t.steps},
             {"residuals", t.residuals}};
    if (t.status == IterationStatus::fixed_point_found) {
        out["point"] = t.point;
        out["point_label"] = s.label(t.point);
        out["step_count"] = t.step_count;
    } else if (t.status == IterationStatus::cycle_detected) {
        out["cycle"] = t.cycle;
    }
    return out;
}

std::string trace_line(const FiniteMetricSpace& s, const IterationTrace& t) {
    std::string line = "  start " + s.label(t.start) + ": ";
    switch (t.status) {
        case IterationStatus::fixed_point_found:
            line += "fixed point " + s.label(t.point) + " after " + std::to_string(t.step_count) +
                    " step" + (t.step_count == 1 ? "" : "s");
            break;
        case IterationStatus::cycle_detected: {
            line += "cycle";
            for (Index p : t.cycle) line += " " + s.label(p);
            break;
        }
        case IterationStatus::max_iters_exceeded:
            line += "no convergence within max-iters";
            break;
    }
    return line + "\n";
}

json certificate_json(Index start, const BoundCertificate& c) {
    json out{{"start", start},
             {"n", c.n},
             {"bound", c.bound_value},
             {"actual", c.actual_distance},
             {"holds", c.holds}};
    if (c.m >= 0) out["m"] = c.m;
    return out;
}

std::vector<Index> resolve_starts(const SpaceSpec& spec, std::optional<Index> start) {
    if (start) {
        if (*start < 0 || *start >= spec.size())
            throw SpecError("--start", "point index " + std::to_string(*start) +
                                           " out of range [0, " + std::to_string(spec.size()) + ")");
        return {*start};
    }
    std::vector<Index> all(static_cast<std::size_t>(spec.size()));
    for (Index i = 0; i < spec.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
}

}  // namespace

CommandResult run_validate(const std::string& path, const WorkbenchOptions&) {
    LoadedSpec loaded;
    try {
        loaded = load_spec(path);
    } catch (const std::exception& e) {
        return error_result("validate", path, e.what());
    }
    const SpaceSpec& spec = loaded.spec;

    CommandResult result;
    result.report.command = "validate";
    result.report.input_path = path;
    result.report.digest = loaded.digest;
    result.report.payload = json{
        {"valid", true},
        {"points", spec.size()},
        {"metric_kind", spec.metric_kind == MetricKind::matrix ? "matrix" : "graph"},
        {"map", spec.single_map ? "single" : (spec.multi_map ? "multi" : "none")}};
    result.report.text = "valid metric on " + std::to_string(spec.size()) + " points (" +
                         (spec.metric_kind == MetricKind::matrix ? "matrix" : "graph, closed") +
                         ")\n";
    result.exit_code = exit_ok;
    return result;
}

CommandResult run_classify(const std::string& path, const std::string& terms, Index power,
                           const WorkbenchOptions&) {
    LoadedSpec loaded;
    TermSet term_set = TermSet::generalized();
    try {
        term_set = TermSet::parse(terms);
        if (power < 1) throw SpecError("--power", "must be >= 1");
        loaded = load_spec(path);
        require_single_map(loaded.spec);
    } catch (const std::exception& e) {
        return error_result("classify", path, e.what());
    }
    const SpaceSpec& spec = loaded.spec;
    const ContractionReport r = minimal_q(spec.space, *spec.single_map, term_set, power);

    CommandResult result;
    result.report.command = "classify";
    result.report.input_path = path;
    result.report.digest = loaded.digest;
    result.report.payload = classification_json(spec.space, r);
    std::string text = "terms: " + term_set.name() + "  power: " + std::to_string(power) + "\n";
    text += "minimal q: " + fmt(r.minimal_q);
    if (r.witness)
        text += "  (witness " + spec.space.label(r.witness->first) + " -> " +
                spec.space.label(r.witness->second) + ")";
    text += "\n";
    text += r.contractive ? "contractive: yes\n" : "contractive: no\n";
    result.report.text = std::move(text);
    result.exit_code = r.contractive ? exit_ok : exit_not_contractive;
    return result;
}

CommandResult run_solve(const std::string& path, std::optional<Index> start,
                        std::optional<Index> max_iters, const WorkbenchOptions&) {
    LoadedSpec loaded;
    std::vector<Index> starts;
    try {
        loaded = load_spec(path);
        require_single_map(loaded.spec);
        starts = resolve_starts(loaded.spec, start);
        if (max_iters && *max_iters < 1) throw SpecError("--max-iters", "must be >= 1");
    } catch (const std::exception& e) {
        return error_result("solve", path, e.what());
    }
    const SpaceSpec& spec = loaded.spec;
    const Index iters = max_iters.value_or(10 * spec.size());

    json traces = json::array();
    std::string text;
    bool all_converged = true;
    for (Index x : starts) {
        const IterationTrace t = iterate(spec.space, *spec.single_map, x, iters);
        all_converged = all_converged && t.status == IterationStatus::fixed_point_found;
        traces.push_back(trace_json(spec.space, t));
        text += trace_line(spec.space, t);
    }

    CommandResult result;
    result.report.command = "solve";
    result.report.input_path = path;
    result.report.digest = loaded.digest;
    result.report.payload = json{{"max_iters", iters}, {"traces", std::move(traces)}};
    result.report.text = std::move(text);
    result.exit_code = all_converged ? exit_ok : exit_no_convergence;
    return result;
}

CommandResult run_mv_solve(const std::string& path, double a, std::optional<Index> start,
                           const WorkbenchOptions& opts) {
    LoadedSpec loaded;
    std::vector<Index> starts;
    try {
        if (!(a > 0.0 && a < 1.0)) throw SpecError("--a", "must be in (0, 1)");
        loaded = load_spec(path);
        require_multi_map(loaded.spec);
        starts = resolve_starts(loaded.spec, start);
    } catch (const std::exception& e) {
        return error_result("mv-solve", path, e.what());
    }
    const SpaceSpec& spec = loaded.spec;
    const MultiMap& F = *spec.multi_map;
    const Index iters = 10 * spec.size();

    const MvContractionReport r = mv_minimal_q(spec.space, F);
    // The selection pick is independent of q; clamp into (0,1) so that
    // degenerate (q = 0) and non-contractive inputs still iterate.
    const double q_eff = std::min(std::max(r.minimal_q, 1e-9), 1.0 - 1e-9);

    const MvFixedPoints fps = mv_fixed_points(spec.space, F);
    json traces = json::array();
    std::string text = "multi-valued minimal q: " + fmt(r.minimal_q) +
                       (r.contractive ? "  contractive" : "  not contractive") + "\n";
    bool all_converged = true;
    bool bounds_hold = true;
    Index bounds_checked = 0;
    for (Index x : starts) {
        const MvOrbitTrace t = mv_iterate(spec.space, F, x, q_eff, a, iters);
        IterationTrace flat;
        flat.start = t.start;
        flat.steps = t.steps;
        flat.residuals = t.residuals;
        flat.status = t.status;
        flat.point = t.point;
        flat.step_count = t.step_count;
        flat.cycle = t.cycle;
        all_converged = all_converged && t.status == IterationStatus::fixed_point_found;
        json tj = trace_json(spec.space, flat);
        if (r.contractive && r.minimal_q > 0.0 && t.status == IterationStatus::fixed_point_found &&
            t.steps.size() >= 2) {
            const double d01 = spec.space.dist(t.steps[0], t.steps[1]);
            json certs = json::array();
            for (std::size_t n = 0; n < t.steps.size(); ++n) {
                const double bound = mv_bound(r.minimal_q, a, static_cast<Index>(n), d01);
                const double actual = spec.space.dist(t.steps[n], t.point);
                const bool holds = actual <= bound + opts.tolerance;
                bounds_hold = bounds_hold && holds;
                ++bounds_checked;
                certs.push_back(json{{"n", n}, {"bound", bound}, {"actual", actual}, {"holds", holds}});
            }
            tj["rate_certificates"] = std::move(certs);
        }
        traces.push_back(std::move(tj));
        text += trace_line(spec.space, flat);
    }

    json strict = json::array();
    for (Index x : fps.strict) strict.push_back(point_json(spec.space, x));
    json weak = json::array();
    for (Index x : fps.weak) weak.push_back(point_json(spec.space, x));
    text += "strict fixed points:";
    for (Index x : fps.strict) text += " " + spec.space.label(x);
    if (fps.strict.empty()) text += " none";
    text += "\n";

    CommandResult result;
    result.report.command = "mv-solve";
    result.report.input_path = path;
    result.report.digest = loaded.digest;
    result.report.payload = json{{"a", a},
                                 {"minimal_q", json_modulus(r.minimal_q)},
                                 {"contractive", r.contractive},
                                 {"witness", witness_json(spec.space, r.witness)},
                                 {"strict_fixed_points", std::move(strict)},
                                 {"weak_fixed_points", std::move(weak)},
                                 {"rate_bounds", json{{"checked", bounds_checked}, {"all_hold", bounds_hold}}},
                                 {"traces", std::move(traces)}};
    result.report.text = std::move(text);
    if (!r.contractive)
        result.exit_code = exit_not_contractive;
    else if (!all_converged || !bounds_hold)
        result.exit_code = exit_no_convergence;
    else
        result.exit_code = exit_ok;
    return result;
}

CommandResult run_bound(const std::string& path, std::optional<Index> start,
                        std::optional<Index> horizon, Index power, const WorkbenchOptions& opts) {
    LoadedSpec loaded;
    std::vector<Index> starts;
    try {
        if (power < 1) throw SpecError("--power", "must be >= 1");
        if (horizon && *horizon < 0) throw SpecError("--n", "must be nonnegative");
        loaded = load_spec(path);
        require_single_map(loaded.spec);
        starts = resolve_starts(loaded.spec, start);
    } catch (const std::exception& e) {
        return error_result("bound", path, e.what());
    }
    const SpaceSpec& spec = loaded.spec;
    const SelfMap& T = *spec.single_map;
    const Index n_max = horizon.value_or(2 * spec.size());

    const ContractionReport r = minimal_q(spec.space, T, TermSet::generalized(), power);
    CommandResult result;
    result.report.command = "bound";
    result.report.input_path = path;
    result.report.digest = loaded.digest;

    if (!r.contractive) {
        result.report.payload = json{{"power", power},
                                     {"minimal_q", json_modulus(r.minimal_q)},
                                     {"contractive", false},
                                     {"certificates", json::array()}};
        result.report.text = "not contractive at power " + std::to_string(power) +
                             " (q = " + fmt(r.minimal_q) + "); no bounds to certify\n";
        result.exit_code = exit_not_contractive;
        return result;
    }

    const std::vector<Index> fps = find_fixed_points(spec.space, T);
    json certs = json::array();
    std::string text = "power " + std::to_string(power) + ": q = " + fmt(r.minimal_q) + "\n";
    bool all_hold = true;
    if (fps.size() != 1) {
        all_hold = false;
        text += "expected a unique fixed point, found " + std::to_string(fps.size()) + "\n";
    } else {
        const Index xstar = fps.front();
        text += "fixed point: " + spec.space.label(xstar) + "\n";
        for (Index x : starts) {
            const Orbit o = orbit(spec.space, T, x, n_max + power);
            std::vector<double> gaps(static_cast<std::size_t>(power));
            for (Index i = 0; i < power; ++i)
                gaps[static_cast<std::size_t>(i)] =
                    spec.space.dist(o.points[static_cast<std::size_t>(i)],
                                    o.points[static_cast<std::size_t>(i + power)]);
            for (Index n = 0; n <= n_max; ++n) {
                const double bound = power_bound(r.minimal_q, power, n, gaps);
                const double actual =
                    spec.space.dist(o.points[static_cast<std::size_t>(n)], xstar);
                const BoundCertificate c = make_certificate(n, -1, bound, actual, opts.tolerance);
                all_hold = all_hold && c.holds;
                certs.push_back(certificate_json(x, c));
            }
        }
        text += "certificates: " + std::to_string(certs.size()) + " checked, " +
                (all_hold ? "all hold" : "FAILURES present") + "\n";
    }

    result.report.payload = json{{"power", power},
                                 {"minimal_q", json_modulus(r.minimal_q)},
                                 {"contractive", true},
                                 {"fixed_point", fps.size() == 1 ? point_json(spec.space, fps.front())
                                                                 : json(nullptr)},
                                 {"all_hold", all_hold},
                                 {"certificates", std::move(certs)}};
    result.report.text = std::move(text);
    result.exit_code = all_hold ? exit_ok : exit_no_convergence;
    return result;
}

CommandResult run_gen(Index points, double density, std::uint64_t seed) {
    CommandResult result;
    result.report.command = "gen";
    result.report.input_path = "-";
    result.report.raw = true;
    try {
        const FiniteMetricSpace space = generate_space(points, density, seed);
        const std::string doc = emit_space_spec(spec_from_space(space));
        result.report.digest = input_digest(doc);
        result.report.payload = json::parse(doc);
        result.report.text = doc;
        result.exit_code = exit_ok;
    } catch (const std::exception& e) {
        return error_result("gen", "-", e.what());
    }
    return result;
}

CommandResult run_check(const std::string& path, const WorkbenchOptions& opts) {
    LoadedSpec loaded;
    try {
        loaded = load_spec(path);
        require_single_map(loaded.spec);
    } catch (const std::exception& e) {
        return error_result("check", path, e.what());
    }
    const SpaceSpec& spec = loaded.spec;
    const FiniteMetricSpace& s = spec.space;
    const SelfMap& T = *spec.single_map;
    const Index n = s.size();

    std::string text = "validation: valid metric on " + std::to_string(n) + " points\n";

    const std::vector<ContractionReport> table = classify_all(s, T);
    json classification = json::array();
    text += "classification:\n";
    for (const ContractionReport& r : table) {
        classification.push_back(classification_json(s, r));
        text += classification_line(s, r);
    }
    const ContractionReport& gen = table.back();

    const std::vector<Index> fps = find_fixed_points(s, T);
    json fixed_points = json::array();
    for (Index x : fps) fixed_points.push_back(point_json(s, x));
    const bool unique_fp = fps.size() == 1;
    text += "fixed points:";
    for (Index x : fps) text += " " + s.label(x);
    if (fps.empty()) text += " none";
    text += "\n";

    json traces = json::array();
    std::vector<IterationTrace> trace_list;
    bool all_converged = true;
    for (Index x = 0; x < n; ++x) {
        IterationTrace t = iterate(s, T, x, 10 * n);
        all_converged = all_converged && t.status == IterationStatus::fixed_point_found;
        if (gen.contractive) t.bound_params = BoundParams{gen.minimal_q, s.dist(x, T(x))};
        traces.push_back(trace_json(s, t));
        text += trace_line(s, t);
        trace_list.push_back(std::move(t));
    }

    json certificates;
    bool all_certs_hold = true;
    if (gen.contractive && unique_fp) {
        const Index xstar = fps.front();
        const double q = gen.minimal_q;
        const Index horizon = 2 * n;

        json a_priori = json::array();
        Index a_priori_failures = 0;
        for (const IterationTrace& t : trace_list) {
            const double d0 = s.dist(t.start, T(t.start));
            for (std::size_t k = 0; k < t.steps.size(); ++k) {
                const double bound = a_priori_bound(q, static_cast<Index>(k), d0);
                const double actual = s.dist(t.steps[k], xstar);
                const BoundCertificate c =
                    make_certificate(static_cast<Index>(k), -1, bound, actual, opts.tolerance);
                if (!c.holds) ++a_priori_failures;
                all_certs_hold = all_certs_hold && c.holds;
                a_priori.push_back(certificate_json(t.start, c));
            }
        }

        json orbit_diameter = json::array();
        json witnesses = json::array();
        Index orbit_failures = 0;
        for (Index x = 0; x < n; ++x) {
            const BoundCertificate c = orbit_diameter_bound_check(s, T, x, horizon, q, opts.tolerance);
            if (!c.holds) ++orbit_failures;
            all_certs_hold = all_certs_hold && c.holds;
            orbit_diameter.push_back(certificate_json(x, c));
            const std::optional<Index> w = diameter_witness(s, T, x, horizon);
            all_certs_hold = all_certs_hold && w.has_value();
            witnesses.push_back(json{{"start", x},
                                     {"exists", w.has_value()},
                                     {"witness_step", w ? json(*w) : json(nullptr)}});
        }

        Index cauchy_checked = 0;
        json cauchy_failures = json::array();
        for (Index x = 0; x < n; ++x) {
            for (const BoundCertificate& c : cauchy_estimate_check(s, T, x, q, horizon, opts.tolerance)) {
                ++cauchy_checked;
                if (!c.holds) {
                    all_certs_hold = false;
                    cauchy_failures.push_back(certificate_json(x, c));
                }
            }
        }

        certificates = json{{"a_priori", std::move(a_priori)},
                            {"orbit_diameter", std::move(orbit_diameter)},
                            {"diameter_witness", std::move(witnesses)},
                            {"cauchy", json{{"checked", cauchy_checked},
                                            {"failures", std::move(cauchy_failures)}}}};
        text += "certificates: a_priori " +
                std::to_string(certificates["a_priori"].size() - a_priori_failures) + "/" +
                std::to_string(certificates["a_priori"].size()) + " hold; orbit_diameter " +
                std::to_string(n - orbit_failures) + "/" + std::to_string(n) +
                " hold; diameter witnesses " + std::to_string(n) + " starts; cauchy " +
                std::to_string(cauchy_checked - certificates["cauchy"]["failures"].size()) + "/" +
                std::to_string(cauchy_checked) + " hold\n";
    } else {
        certificates = json(nullptr);
        all_certs_hold = false;
    }

    CommandResult result;
    result.report.command = "check";
    result.report.input_path = path;
    result.report.digest = loaded.digest;
    result.report.payload =
        json{{"valid", true},
             {"classification", std::move(classification)},
             {"fixed_points", std::move(fixed_points)},
             {"unique_fixed_point", unique_fp ? point_json(s, fps.front()) : json(nullptr)},
             {"traces", std::move(traces)},
             {"certificates", std::move(certificates)},
             {"all_certificates_hold", all_certs_hold}};

    if (!gen.contractive) {
        text += "result: not contractive (generalized q = " + fmt(gen.minimal_q) + ")\n";
        result.exit_code = exit_not_contractive;
    } else if (unique_fp && all_converged && all_certs_hold) {
        text += "result: contractive (generalized q = " + fmt(gen.minimal_q) +
                "); unique fixed point " + s.label(fps.front()) + "; all certificates hold\n";
        result.exit_code = exit_ok;
    } else {
        text += "result: contractive but verification failed\n";
        result.exit_code = exit_no_convergence;
    }
    result.report.text = std::move(text);
    return result;
}

}  // namespace quasifix
