#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "quasifix/workbench.hpp"

namespace {

quasifix::WorkbenchOptions options_from_env() {
    quasifix::WorkbenchOptions opts;
    if (const char* tol = std::getenv("QUASIFIX_TOL")) {
        try {
            opts.tolerance = std::stod(tol);
        } catch (const std::exception&) {
            throw CLI::ValidationError("QUASIFIX_TOL", "not a number: '" + std::string(tol) + "'");
        }
        if (!(opts.tolerance >= 0.0))
            throw CLI::ValidationError("QUASIFIX_TOL", "must be nonnegative");
    }
    return opts;
}

int emit(const quasifix::CommandResult& result, const std::string& format) {
    if (format == "json")
        std::cout << result.report.render_json();
    else
        std::cout << result.report.render_text();
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasifix: contraction certificates and fixed-point iteration on finite metric spaces"};
    app.require_subcommand(1);

    std::string format = "text";
    const auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"json", "text"}))
            ->default_str("text");
    };

    std::string path;
    std::string terms = "generalized";
    quasifix::Index power = 1;
    double a = 0.5;
    double density = 0.3;
    quasifix::Index points = 5;
    std::uint64_t seed = 0;
    std::optional<quasifix::Index> start;
    std::optional<quasifix::Index> max_iters;
    std::optional<quasifix::Index> horizon;

    CLI::App* validate = app.add_subcommand("validate", "check that the input describes a metric space");
    validate->add_option("input", path, "space description file")->required();
    add_format(validate);

    CLI::App* classify = app.add_subcommand("classify", "compute the minimal contraction modulus");
    classify->add_option("input", path, "space description file")->required();
    classify->add_option("--terms", terms,
                         "comparison terms: banach, kannan, quasi, generalized, or a 9-bit mask");
    classify->add_option("--power", power, "classify the k-th iterate");
    add_format(classify);

    CLI::App* solve = app.add_subcommand("solve", "run fixed-point iteration");
    solve->add_option("input", path, "space description file")->required();
    solve->add_option("--start", start, "start point index (default: every point)");
    solve->add_option("--max-iters", max_iters, "iteration cap (default: 10 * points)");
    add_format(solve);

    CLI::App* mv_solve = app.add_subcommand("mv-solve", "iterate a multi-valued map via selection");
    mv_solve->add_option("input", path, "space description file")->required();
    mv_solve->add_option("--a", a, "selection exponent in (0, 1)");
    mv_solve->add_option("--start", start, "start point index (default: every point)");
    add_format(mv_solve);

    CLI::App* bound = app.add_subcommand("bound", "certify convergence-rate bounds along orbits");
    bound->add_option("input", path, "space description file")->required();
    bound->add_option("--start", start, "start point index (default: every point)");
    bound->add_option("--n", horizon, "largest iteration index to certify (default: 2 * points)");
    bound->add_option("--power", power, "use the modulus of the k-th iterate");
    add_format(bound);

    CLI::App* gen = app.add_subcommand("gen", "emit a random space description");
    gen->add_option("--points", points, "number of points")->check(CLI::PositiveNumber);
    gen->add_option("--density", density, "extra-edge probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", seed, "generator seed");
    add_format(gen);

    CLI::App* check = app.add_subcommand("check", "full pipeline: validate, classify, solve, certify");
    check->add_option("input", path, "space description file")->required();
    add_format(check);

    CLI11_PARSE(app, argc, argv);

    try {
        const quasifix::WorkbenchOptions opts = options_from_env();
        if (validate->parsed()) return emit(quasifix::run_validate(path, opts), format);
        if (classify->parsed()) return emit(quasifix::run_classify(path, terms, power, opts), format);
        if (solve->parsed()) return emit(quasifix::run_solve(path, start, max_iters, opts), format);
        if (mv_solve->parsed()) return emit(quasifix::run_mv_solve(path, a, start, opts), format);
        if (bound->parsed()) return emit(quasifix::run_bound(path, start, horizon, power, opts), format);
        if (gen->parsed()) return emit(quasifix::run_gen(points, density, seed), format);
        if (check->parsed()) return emit(quasifix::run_check(path, opts), format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return quasifix::exit_input_error;
    }
    return quasifix::exit_input_error;
}
