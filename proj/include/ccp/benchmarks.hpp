#pragma once

#include <array>
#include <optional>
#include <string>
#include <thread>

#include "ccp/gamma.hpp"
#include "ccp/problem.hpp"
#include "ccp/rng.hpp"
#include "ccp/solver.hpp"

namespace ccp {

/// A built-in problem instance plus the run settings known to work for it.
struct BenchmarkInstance {
    std::string name;
    ProblemOracles prob;
    double p;
    std::optional<double> known_opt;  // analytic optimum, norm family only
    SolverConfig config;
};

/// Settings used for the 2-d toy problem runs. The lambda escalation lets
/// the outer loop walk out of penalized stationary points that violate the
/// chance constraint (at p = 0.008 the value function is small, so the
/// starting lambda alone does not penalize exactly).
inline SolverConfig toy2d_default_config() {
    SolverConfig cfg;
    cfg.p = 0.008;
    cfg.mu0 = 400.0;
    cfg.lambda0 = 600.0;
    cfg.lambda_factor = 2.0;
    cfg.outer_max = 12;
    cfg.start = {0.5, 1.5, 0.01};
    cfg.bundle.prox_start = 38.0;
    cfg.bundle.prox_restart = 38.0;
    cfg.bundle.prox_low = 1e-3;
    cfg.bundle.prox_high = 1e3;
    cfg.bundle.prox_up = 1.05;
    cfg.bundle.prox_down = 0.95;
    cfg.bundle.kappa = 1e-4;
    cfg.bundle.max_planes = 20;
    cfg.bundle.stop_tol = 1e-7;
    return cfg;
}

/// Penalty level that worked best per dimension in the norm-family runs.
inline double norm_problem_lambda(std::size_t d) {
    if (d <= 2) return 1.75;
    if (d <= 50) return 1.5;
    return 2.0;
}

/// Settings used for the d-dimensional norm-problem runs.
inline SolverConfig norm_default_config(std::size_t d) {
    SolverConfig cfg;
    cfg.p = 0.8;
    cfg.mu0 = 10.0;
    cfg.lambda0 = norm_problem_lambda(d);
    cfg.start.assign(d + 1, 0.1);
    cfg.bundle.prox_start = 60.0;
    cfg.bundle.prox_restart = 60.0;
    cfg.bundle.prox_low = 1e-4;
    cfg.bundle.prox_high = 1e5;
    cfg.bundle.prox_up = 1.01;
    cfg.bundle.prox_down = 0.99;
    cfg.bundle.kappa = 1e-4;
    cfg.bundle.max_planes = 300;
    cfg.bundle.stop_tol = 1e-7;
    return cfg;
}

/**
 * Two-dimensional quadratic objective with a nonconvex chance constraint:
 *
 *   f(x) = 0.5 (x-a)' Q (x-a),        a = (2,2), Q = [[5.5,4.5],[4.5,5.5]]
 *   g(x,z) = z' W(x) z + w' z,        W(x) = diag(x1^2 + 0.5, |x2-1|^3 + 1)
 *   xi ~ N((1,1), diag(20,20)),       p = 0.008.
 *
 * The linear coefficient defaults to w = (2,2). With w = 0 the quadratic form
 * would be positive for every scenario, so P[g <= 0] would be identically
 * zero and no point would be feasible at any positive level; w = (2,2) keeps
 * the unconstrained minimizer a infeasible at p = 0.008 while the constrained
 * optimum sits on the boundary nearby.
 */
inline BenchmarkInstance toy2d(std::uint64_t seed, std::size_t n,
                               std::array<double, 2> w = {2.0, 2.0}) {
    Rng rng(seed);
    Vector data(n * 2);
    const double sigma = std::sqrt(20.0);
    for (std::size_t i = 0; i < n; ++i) {
        data[2 * i] = 1.0 + sigma * rng.normal();
        data[2 * i + 1] = 1.0 + sigma * rng.normal();
    }

    static constexpr std::array<double, 4> Q{5.5, 4.5, 4.5, 5.5};
    static constexpr std::array<double, 2> a{2.0, 2.0};

    ProblemOracles prob;
    prob.dim = 2;
    prob.objective = [](ConstVecView x) {
        const double d0 = x[0] - a[0], d1 = x[1] - a[1];
        return 0.5 * (Q[0] * d0 * d0 + 2.0 * Q[1] * d0 * d1 + Q[3] * d1 * d1);
    };
    prob.objective_gradient = [](ConstVecView x, VecView out) {
        const double d0 = x[0] - a[0], d1 = x[1] - a[1];
        out[0] = Q[0] * d0 + Q[1] * d1;
        out[1] = Q[2] * d0 + Q[3] * d1;
    };
    prob.constraint = [w](ConstVecView x, ConstVecView z) {
        const double t = x[1] - 1.0;
        const double w11 = x[0] * x[0] + 0.5;
        const double w22 = std::abs(t) * t * t + 1.0;  // |x2-1|^3 + 1
        return w11 * z[0] * z[0] + w22 * z[1] * z[1] + w[0] * z[0] + w[1] * z[1];
    };
    prob.constraint_gradient_acc = [](ConstVecView x, ConstVecView z, double c, VecView acc) {
        const double t = x[1] - 1.0;
        const double sign = (t > 0.0) - (t < 0.0);
        acc[0] += c * 2.0 * x[0] * z[0] * z[0];
        acc[1] += c * 3.0 * t * t * sign * z[1] * z[1];
    };
    prob.box = BoxConstraints::unbounded(2);
    prob.scenarios = ScenarioSet(n, 2, std::move(data));

    SolverConfig cfg = toy2d_default_config();
    cfg.seed = seed;
    return {"toy2d", std::move(prob), 0.008, std::nullopt, std::move(cfg)};
}

/**
 * Analytic optimal value of the d-dimensional norm problem,
 *
 *   f* = -10 d / sqrt(F^{-1}_{chi^2_d}(p^{1/10})),
 *
 * with the chi-squared quantile obtained from the regularized incomplete
 * gamma function.
 */
inline double norm_problem_opt_value(std::size_t d, double p) {
    if (d < 1) throw std::invalid_argument("norm_problem_opt_value requires d >= 1");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("norm_problem_opt_value requires 0 < p < 1");
    const double q = chi_squared_quantile(std::pow(p, 0.1), d);
    return -10.0 * static_cast<double>(d) / std::sqrt(q);
}

/**
 * The d-dimensional norm problem family:
 *
 *   f(x) = -sum_j x_j  (equals -||x||_1 on the box x >= 0)
 *   g(x,Z) = max_{i<=10} sum_j Z_{i,j}^2 x_j^2 - 100,   Z in R^{10 x d},
 *
 * with all Z entries i.i.d. standard normal and p = 0.8. Subgradients of the
 * max pick the lowest maximizing row. Each scenario row stores Z flattened
 * row-major (length 10 d).
 */
inline BenchmarkInstance norm_problem(std::size_t d, std::uint64_t seed, std::size_t n) {
    if (d < 1) throw std::invalid_argument("norm_problem requires d >= 1");
    Rng rng(seed);
    Vector data(n * 10 * d);
    for (auto& v : data) v = rng.normal();

    ProblemOracles prob;
    prob.dim = d;
    prob.objective = [](ConstVecView x) {
        double s = 0.0;
        for (double v : x) s -= v;
        return s;
    };
    prob.objective_gradient = [](ConstVecView, VecView out) {
        for (auto& v : out) v = -1.0;
    };
    const auto max_row = [d](ConstVecView x, ConstVecView z, double& best) {
        best = -kInf;
        std::size_t row = 0;
        for (std::size_t i = 0; i < 10; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double zz = z[i * d + j];
                s += zz * zz * x[j] * x[j];
            }
            if (s > best) {
                best = s;
                row = i;
            }
        }
        return row;
    };
    prob.constraint = [max_row](ConstVecView x, ConstVecView z) {
        double best;
        max_row(x, z, best);
        return best - 100.0;
    };
    prob.constraint_gradient_acc = [max_row, d](ConstVecView x, ConstVecView z, double c,
                                                VecView acc) {
        double best;
        const std::size_t i = max_row(x, z, best);
        for (std::size_t j = 0; j < d; ++j) {
            const double zz = z[i * d + j];
            acc[j] += c * 2.0 * zz * zz * x[j];
        }
    };
    prob.box = BoxConstraints::nonnegative(d);
    prob.scenarios = ScenarioSet(n, 10 * d, std::move(data));

    SolverConfig cfg = norm_default_config(d);
    cfg.seed = seed;
    return {"norm:" + std::to_string(d), std::move(prob), 0.8,
            norm_problem_opt_value(d, 0.8), std::move(cfg)};
}

struct GridWindow {
    Vector lo;
    Vector hi;
};

struct LevelSetRow {
    double x1;
    double x2;
    double f;
    double prob;
};

struct GridOracleResult {
    bool feasible_found = false;
    Vector best_x;
    double best_f = kInf;
    std::vector<LevelSetRow> table;
};

/**
 * Exhaustive reference search for instances with d <= 2: evaluates f and the
 * empirical probability on a regular grid with `resolution` cells per axis
 * and returns the best feasible point. Grid rows are processed in parallel;
 * the winner is selected by an index-ordered scan, so the result does not
 * depend on the thread count. The scan data doubles as level-set export.
 */
inline GridOracleResult grid_oracle(const BenchmarkInstance& inst, const GridWindow& window,
                                    std::size_t resolution, bool collect_table = false) {
    const std::size_t d = inst.prob.dim;
    if (d < 1 || d > 2)
        throw std::invalid_argument("grid_oracle supports decision dimensions 1 and 2 only");
    const std::size_t pts0 = resolution + 1;
    const std::size_t pts1 = (d == 2) ? resolution + 1 : 1;
    const auto coord = [&](std::size_t axis, std::size_t i) {
        return window.lo[axis] +
               (window.hi[axis] - window.lo[axis]) * static_cast<double>(i) /
                   static_cast<double>(resolution);
    };

    std::vector<double> fs(pts0 * pts1), probs(pts0 * pts1);
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t nthreads = std::min(hw, pts0);
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        workers.emplace_back([&, t]() {
            Vector x(d);
            Vector gvals(inst.prob.scenarios.size());
            for (std::size_t i = t; i < pts0; i += nthreads) {
                x[0] = coord(0, i);
                for (std::size_t j = 0; j < pts1; ++j) {
                    if (d == 2) x[1] = coord(1, j);
                    constraint_values(inst.prob, x, gvals);
                    fs[i * pts1 + j] = inst.prob.objective(x);
                    probs[i * pts1 + j] = empirical_probability(gvals);
                }
            }
        });
    }
    for (auto& th : workers) th.join();

    GridOracleResult out;
    if (collect_table) out.table.reserve(pts0 * pts1);
    for (std::size_t i = 0; i < pts0; ++i) {
        for (std::size_t j = 0; j < pts1; ++j) {
            const double f = fs[i * pts1 + j];
            const double pr = probs[i * pts1 + j];
            if (collect_table)
                out.table.push_back({coord(0, i), d == 2 ? coord(1, j) : 0.0, f, pr});
            if (pr >= inst.p && f < out.best_f) {
                out.best_f = f;
                out.best_x = {coord(0, i)};
                if (d == 2) out.best_x.push_back(coord(1, j));
                out.feasible_found = true;
            }
        }
    }
    return out;
}

}  // namespace ccp
