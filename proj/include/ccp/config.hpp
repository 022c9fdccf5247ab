#pragma once

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ccp/benchmarks.hpp"
#include "ccp/csv.hpp"
#include "ccp/solver.hpp"

namespace ccp {

/**
 * Full description of a CLI run: the problem selector plus solver settings
 * and output options. Stored on disk as a flat `key = value` text file
 * (# starts a comment); unrecognized keys are rejected by name.
 *
 * Problem selectors: "toy2d", "norm:<d>", or "file:<path>" which loads a
 * scenario CSV and pairs it with the built-in quadratic-objective /
 * linear-constraint oracle template f(x) = ||x - a||^2, g(x,z) = x'z.
 */
struct RunConfig {
    std::string problem = "norm:2";
    std::size_t n_scenarios = 10000;
    bool scenario_header = false;      // file problems: skip the first row
    Vector template_a;                 // file template: objective center a
    std::array<double, 2> toy2d_w{2.0, 2.0};

    SolverConfig solver;               // materialized per-problem defaults + overrides

    std::string out_dir = ".";
    bool log_iterates = true;
    bool log_levelsets = true;
    bool wall_clock = true;
    bool verbose = false;
    Vector window;                     // x1lo, x1hi, x2lo, x2hi (d <= 2 exports)
    std::size_t grid_resolution = 100;
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw std::runtime_error("config key '" + key + "': expected a boolean, got '" + v + "'");
}

inline double parse_num(const std::string& v, const std::string& key) {
    double out;
    if (!parse_double(v, out))
        throw std::runtime_error("config key '" + key + "': expected a number, got '" + v + "'");
    return out;
}

inline std::size_t parse_count(const std::string& v, const std::string& key) {
    const double d = parse_num(v, key);
    if (d < 0 || d != std::floor(d))
        throw std::runtime_error("config key '" + key + "': expected a nonnegative integer");
    return static_cast<std::size_t>(d);
}

inline Vector parse_vector(const std::string& v, const std::string& key) {
    Vector out;
    std::vector<std::string_view> fields;
    split_csv_line(v, fields);
    for (auto f : fields) {
        double x;
        if (!parse_double(f, x))
            throw std::runtime_error("config key '" + key + "': bad vector entry '" +
                                     std::string(f) + "'");
        out.push_back(x);
    }
    return out;
}

inline std::string format_vector(ConstVecView v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

}  // namespace detail

/// Ordered key/value pairs as read from a config file or --set overrides.
using KeyValueList = std::vector<std::pair<std::string, std::string>>;

inline KeyValueList parse_config_text(std::istream& in) {
    KeyValueList out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        out.emplace_back(std::string(detail::trim(trimmed.substr(0, eq))),
                         std::string(detail::trim(trimmed.substr(eq + 1))));
    }
    return out;
}

inline KeyValueList parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config_text(in);
}

/// Default number of scenarios per problem family.
inline std::size_t default_scenario_count(const std::string& problem) {
    (void)problem;
    return 10000;
}

namespace detail {

inline SolverConfig problem_default_solver(const std::string& problem) {
    if (problem == "toy2d") return toy2d_default_config();
    if (problem.rfind("norm:", 0) == 0) {
        const std::size_t d = parse_count(problem.substr(5), "problem");
        if (d < 1) throw std::runtime_error("norm problem dimension must be >= 1");
        return norm_default_config(d);
    }
    if (problem.rfind("file:", 0) == 0) {
        SolverConfig cfg;  // dimension-dependent fields filled at load time
        cfg.p = 0.9;
        cfg.mu0 = 1.0;
        cfg.lambda0 = 10.0;
        cfg.bundle.prox_start = 50.0;
        cfg.bundle.prox_restart = 50.0;
        cfg.bundle.max_planes = 30;
        return cfg;
    }
    throw std::runtime_error("unknown problem selector '" + problem +
                             "' (expected toy2d, norm:<d>, or file:<path>)");
}

inline Vector problem_default_window(const std::string& problem) {
    if (problem == "toy2d") return {-1.0, 3.0, -1.0, 3.0};
    if (problem.rfind("norm:", 0) == 0) return {0.0, 5.0, 0.0, 5.0};
    return {-2.0, 2.0, -2.0, 2.0};
}

}  // namespace detail

/**
 * Builds the effective configuration: problem-family defaults first, then
 * every key in order. Throws naming the offending key on unknown keys or
 * malformed values.
 */
inline RunConfig materialize_config(const KeyValueList& kvs) {
    RunConfig cfg;
    for (const auto& [key, value] : kvs)
        if (key == "problem") cfg.problem = value;
    cfg.solver = detail::problem_default_solver(cfg.problem);
    cfg.n_scenarios = default_scenario_count(cfg.problem);
    cfg.window = detail::problem_default_window(cfg.problem);

    bool start_given = false;
    double start_eta = kNaN;
    for (const auto& [key, value] : kvs) {
        if (key == "problem") {
        } else if (key == "n_scenarios") {
            cfg.n_scenarios = detail::parse_count(value, key);
        } else if (key == "header") {
            cfg.scenario_header = detail::parse_bool(value, key);
        } else if (key == "template_a") {
            cfg.template_a = detail::parse_vector(value, key);
        } else if (key == "toy2d_w") {
            const Vector w = detail::parse_vector(value, key);
            if (w.size() != 2)
                throw std::runtime_error("config key 'toy2d_w': expected two entries");
            cfg.toy2d_w = {w[0], w[1]};
        } else if (key == "p") {
            cfg.solver.p = detail::parse_num(value, key);
        } else if (key == "pen1") {
            cfg.solver.mu0 = detail::parse_num(value, key);
        } else if (key == "pen2") {
            cfg.solver.lambda0 = detail::parse_num(value, key);
        } else if (key == "pen1_factor") {
            cfg.solver.mu_factor = detail::parse_num(value, key);
        } else if (key == "pen2_factor") {
            cfg.solver.lambda_factor = detail::parse_num(value, key);
        } else if (key == "enforce_theory_ratio") {
            cfg.solver.enforce_theory_ratio = detail::parse_bool(value, key);
        } else if (key == "rho") {
            cfg.solver.rho = detail::parse_num(value, key);
        } else if (key == "outer_max") {
            cfg.solver.outer_max = detail::parse_count(value, key);
        } else if (key == "feasibility_tol") {
            cfg.solver.feasibility_tol = detail::parse_num(value, key);
        } else if (key == "seed") {
            cfg.solver.seed = static_cast<std::uint64_t>(detail::parse_count(value, key));
        } else if (key == "start") {
            Vector x = detail::parse_vector(value, key);
            start_given = true;
            cfg.solver.start = std::move(x);
        } else if (key == "start_eta") {
            start_eta = detail::parse_num(value, key);
        } else if (key == "bund_mu_start") {
            cfg.solver.bundle.prox_start = detail::parse_num(value, key);
        } else if (key == "bund_mu_low") {
            cfg.solver.bundle.prox_low = detail::parse_num(value, key);
        } else if (key == "bund_mu_high") {
            cfg.solver.bundle.prox_high = detail::parse_num(value, key);
        } else if (key == "bund_mu_up_factor") {
            cfg.solver.bundle.prox_up = detail::parse_num(value, key);
        } else if (key == "bund_mu_down_factor") {
            cfg.solver.bundle.prox_down = detail::parse_num(value, key);
        } else if (key == "bund_mu_restart") {
            cfg.solver.bundle.prox_restart = detail::parse_num(value, key);
        } else if (key == "bund_kappa") {
            cfg.solver.bundle.kappa = detail::parse_num(value, key);
        } else if (key == "bund_max_size_bundle_set") {
            cfg.solver.bundle.max_planes = detail::parse_count(value, key);
        } else if (key == "bund_stop_tol") {
            cfg.solver.bundle.stop_tol = detail::parse_num(value, key);
        } else if (key == "bund_max_iter") {
            cfg.solver.bundle.max_iterations = detail::parse_count(value, key);
        } else if (key == "bund_qp_max_iter") {
            cfg.solver.bundle.qp_max_iterations = detail::parse_count(value, key);
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "log_iterates") {
            cfg.log_iterates = detail::parse_bool(value, key);
        } else if (key == "log_levelsets") {
            cfg.log_levelsets = detail::parse_bool(value, key);
        } else if (key == "wall_clock") {
            cfg.wall_clock = detail::parse_bool(value, key);
        } else if (key == "verbose") {
            cfg.verbose = detail::parse_bool(value, key);
        } else if (key == "window") {
            cfg.window = detail::parse_vector(value, key);
            if (cfg.window.size() != 4)
                throw std::runtime_error("config key 'window': expected four entries");
        } else if (key == "grid_resolution") {
            cfg.grid_resolution = detail::parse_count(value, key);
        } else {
            throw std::runtime_error("unknown config key '" + key + "'");
        }
    }

    // `start` is the x-part; eta rides as the trailing coordinate.
    if (start_given) {
        if (!std::isnan(start_eta))
            cfg.solver.start.push_back(start_eta);
        else if (!cfg.solver.start.empty())
            cfg.solver.start.push_back(cfg.solver.start.back());
    } else if (!std::isnan(start_eta) && !cfg.solver.start.empty()) {
        cfg.solver.start.back() = start_eta;
    }
    return cfg;
}

/// Canonical text form; parse(serialize(cfg)) reproduces cfg exactly.
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    const auto put = [&](const std::string& key, const std::string& value) {
        out << key << " = " << value << '\n';
    };
    put("problem", cfg.problem);
    put("n_scenarios", std::to_string(cfg.n_scenarios));
    put("header", cfg.scenario_header ? "1" : "0");
    if (!cfg.template_a.empty()) put("template_a", detail::format_vector(cfg.template_a));
    put("toy2d_w", detail::format_vector(Vector{cfg.toy2d_w[0], cfg.toy2d_w[1]}));
    put("p", format_double(cfg.solver.p));
    put("pen1", format_double(cfg.solver.mu0));
    put("pen2", format_double(cfg.solver.lambda0));
    put("pen1_factor", format_double(cfg.solver.mu_factor));
    put("pen2_factor", format_double(cfg.solver.lambda_factor));
    put("enforce_theory_ratio", cfg.solver.enforce_theory_ratio ? "1" : "0");
    put("rho", format_double(cfg.solver.rho));
    put("outer_max", std::to_string(cfg.solver.outer_max));
    put("feasibility_tol", format_double(cfg.solver.feasibility_tol));
    put("seed", std::to_string(cfg.solver.seed));
    if (!cfg.solver.start.empty()) {
        put("start", detail::format_vector(
                         ConstVecView(cfg.solver.start.data(), cfg.solver.start.size() - 1)));
        put("start_eta", format_double(cfg.solver.start.back()));
    }
    put("bund_mu_start", format_double(cfg.solver.bundle.prox_start));
    put("bund_mu_low", format_double(cfg.solver.bundle.prox_low));
    put("bund_mu_high", format_double(cfg.solver.bundle.prox_high));
    put("bund_mu_up_factor", format_double(cfg.solver.bundle.prox_up));
    put("bund_mu_down_factor", format_double(cfg.solver.bundle.prox_down));
    put("bund_mu_restart", format_double(cfg.solver.bundle.prox_restart));
    put("bund_kappa", format_double(cfg.solver.bundle.kappa));
    put("bund_max_size_bundle_set", std::to_string(cfg.solver.bundle.max_planes));
    put("bund_stop_tol", format_double(cfg.solver.bundle.stop_tol));
    put("bund_max_iter", std::to_string(cfg.solver.bundle.max_iterations));
    put("bund_qp_max_iter", std::to_string(cfg.solver.bundle.qp_max_iterations));
    put("out_dir", cfg.out_dir);
    put("log_iterates", cfg.log_iterates ? "1" : "0");
    put("log_levelsets", cfg.log_levelsets ? "1" : "0");
    put("wall_clock", cfg.wall_clock ? "1" : "0");
    put("verbose", cfg.verbose ? "1" : "0");
    put("window", detail::format_vector(cfg.window));
    put("grid_resolution", std::to_string(cfg.grid_resolution));
    return out.str();
}

/// Builds the benchmark/file instance described by the configuration.
inline BenchmarkInstance instantiate_problem(const RunConfig& cfg) {
    if (cfg.problem == "toy2d") {
        BenchmarkInstance inst = toy2d(cfg.solver.seed, cfg.n_scenarios, cfg.toy2d_w);
        inst.config = cfg.solver;
        inst.p = cfg.solver.p;
        return inst;
    }
    if (cfg.problem.rfind("norm:", 0) == 0) {
        const std::size_t d = detail::parse_count(cfg.problem.substr(5), "problem");
        BenchmarkInstance inst = norm_problem(d, cfg.solver.seed, cfg.n_scenarios);
        inst.config = cfg.solver;
        inst.p = cfg.solver.p;
        inst.known_opt = norm_problem_opt_value(d, cfg.solver.p);
        return inst;
    }
    if (cfg.problem.rfind("file:", 0) == 0) {
        ScenarioSet scen = load_scenarios(cfg.problem.substr(5), cfg.scenario_header);
        const std::size_t d = scen.dim();
        Vector a = cfg.template_a;
        a.resize(d, 0.0);

        ProblemOracles prob;
        prob.dim = d;
        prob.objective = [a](ConstVecView x) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double diff = x[j] - a[j];
                s += diff * diff;
            }
            return s;
        };
        prob.objective_gradient = [a](ConstVecView x, VecView out) {
            for (std::size_t j = 0; j < x.size(); ++j) out[j] = 2.0 * (x[j] - a[j]);
        };
        prob.constraint = [](ConstVecView x, ConstVecView z) { return dot(x, z); };
        prob.constraint_gradient_acc = [](ConstVecView, ConstVecView z, double c, VecView acc) {
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += c * z[j];
        };
        prob.box = BoxConstraints::unbounded(d);
        prob.scenarios = std::move(scen);

        BenchmarkInstance inst{cfg.problem, std::move(prob), cfg.solver.p, std::nullopt,
                               cfg.solver};
        if (inst.config.start.size() != d + 1) inst.config.start.assign(d + 1, 0.0);
        return inst;
    }
    throw std::runtime_error("unknown problem selector '" + cfg.problem + "'");
}

}  // namespace ccp
