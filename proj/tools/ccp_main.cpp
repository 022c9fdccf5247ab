// Command-line front end: configure and run chance-constrained solves on the
// built-in problems, export iterate/level-set logs, and run the verification
// suites.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccp/config.hpp"
#include "ccp/csv.hpp"
#include "ccp/verify.hpp"

namespace {

ccp::KeyValueList collect_overrides(const std::vector<std::string>& sets) {
    ccp::KeyValueList out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got '" + s + "'");
        out.emplace_back(std::string(ccp::detail::trim(s.substr(0, eq))),
                         std::string(ccp::detail::trim(s.substr(eq + 1))));
    }
    return out;
}

int run_command(const std::string& config_path, const std::vector<std::string>& sets,
                std::int64_t seed, const std::string& out_dir, bool verbose) {
    ccp::KeyValueList kvs;
    if (!config_path.empty()) kvs = ccp::parse_config_file(config_path);
    const auto overrides = collect_overrides(sets);
    kvs.insert(kvs.end(), overrides.begin(), overrides.end());
    if (seed >= 0) kvs.emplace_back("seed", std::to_string(seed));
    if (!out_dir.empty()) kvs.emplace_back("out_dir", out_dir);
    if (verbose) kvs.emplace_back("verbose", "1");

    ccp::RunConfig cfg = ccp::materialize_config(kvs);
    ccp::BenchmarkInstance inst = ccp::instantiate_problem(cfg);

    std::filesystem::create_directories(cfg.out_dir);

    ccp::SolveOptions options;
    options.log_rows = cfg.log_iterates;
    options.wall_clock = cfg.wall_clock;
    if (cfg.verbose)
        options.on_row = [](const ccp::IterateRow& row) {
            std::printf("iter %8zu  t=%.3fs  f=%+.8e  prob=%.4f  h=%.3e  eta=%+.3e\n", row.iter,
                        row.time_s, row.f, row.prob, row.h, row.eta);
        };

    const ccp::SolveReport report = ccp::solve(inst.prob, inst.config, options);

    if (cfg.log_iterates) {
        ccp::CsvWriter iterates((std::filesystem::path(cfg.out_dir) / "iterates.csv").string());
        iterates.header({"iter", "time_s", "f", "prob", "h", "eta"});
        for (const auto& row : report.rows)
            iterates.row_indexed(row.iter, {row.time_s, row.f, row.prob, row.h, row.eta});
    }
    if (cfg.log_levelsets && inst.prob.dim <= 2) {
        ccp::GridWindow window{{cfg.window[0], cfg.window[2]}, {cfg.window[1], cfg.window[3]}};
        if (inst.prob.dim == 1) window = {{cfg.window[0]}, {cfg.window[1]}};
        const auto grid = ccp::grid_oracle(inst, window, cfg.grid_resolution, true);
        ccp::CsvWriter levels((std::filesystem::path(cfg.out_dir) / "levelsets.csv").string());
        levels.header({"x1", "x2", "f", "prob"});
        for (const auto& row : grid.table) levels.row({row.x1, row.x2, row.f, row.prob});
    }

    const bool feasible = report.feasible(inst.config.p, inst.config.feasibility_tol);
    std::string summary = "status=" + std::string(feasible ? "feasible" : "infeasible") +
                          " problem=" + inst.name + " f=" + ccp::format_double(report.objective) +
                          " prob=" + ccp::format_double(report.empirical_prob) +
                          " eta=" + ccp::format_double(report.eta) +
                          " outer=" + std::to_string(report.outer_iterations);
    if (inst.known_opt) {
        const double fstar = *inst.known_opt;
        summary += " fstar=" + ccp::format_double(fstar) +
                   " subopt=" + ccp::format_double((report.objective - fstar) / std::abs(fstar));
    }
    if (report.hit_iteration_limit) summary += " warning=bundle-iteration-limit";
    std::printf("%s\n", summary.c_str());
    return feasible ? 0 : 2;
}

int list_problems() {
    std::printf("built-in problems:\n");
    std::printf("  toy2d         2-d quadratic objective, quadratic-in-xi constraint, p=0.008\n");
    std::printf("                defaults: pen1=400 pen2=600 start=0.5,1.5 start_eta=0.01\n");
    std::printf("  norm:<d>      d-dimensional norm problem, 10 quadratic rows per scenario,\n");
    std::printf("                p=0.8, analytic optimum; defaults: pen1=10 pen2=%s (d=2)\n",
                ccp::format_double(ccp::norm_problem_lambda(2)).c_str());
    std::printf("  file:<path>   scenario CSV + template f(x)=||x-a||^2, g(x,z)=x'z\n");
    std::printf("                (set template_a, header, p as needed)\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chance-constrained optimization via double penalization and a DC bundle method"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> sets;
    std::int64_t seed = -1;
    bool verbose = false;

    auto* run = app.add_subcommand("run", "solve a configured problem");
    run->add_option("--config", config_path, "flat key=value config file");
    run->add_option("--set", sets, "override a config key (key=value, repeatable)");
    run->add_option("--seed", seed, "override the seed");
    run->add_option("--out", out_dir, "output directory for CSV logs");
    run->add_flag("--verbose", verbose, "stream serious steps to stdout");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite,
                       "errorbound | subgradients | smoothing | penalization | quantiles | all")
        ->required();

    auto* list = app.add_subcommand("list-problems", "describe the built-in problems");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, sets, seed, out_dir, verbose);
        if (verify->parsed()) {
            const auto results = ccp::verify::run_suite(suite);
            const std::size_t failures = ccp::verify::report(results);
            std::printf("%zu/%zu checks passed\n", results.size() - failures, results.size());
            return failures == 0 ? 0 : 1;
        }
        if (list->parsed()) return list_problems();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
