#pragma once

#include <chrono>
#include <cstdint>

#include "ccp/bundle.hpp"
#include "ccp/penalty.hpp"
#include "ccp/problem.hpp"

namespace ccp {

/**
 * Configuration of the double penalization driver. The defaults mirror the
 * fixed-penalty operating mode (factors 1, theory ratio off); setting
 * `enforce_theory_ratio` additionally keeps lambda above mu/delta so the
 * inner penalization stays exact.
 */
struct SolverConfig {
    double p = 0.8;
    double mu0 = 10.0;           // starting mu (penalty on max(eta,0))
    double lambda0 = 1.5;        // starting lambda (penalty on h)
    double mu_factor = 1.0;      // >= 1, multiplies mu each outer iteration
    double lambda_factor = 1.0;  // >= 1, multiplies lambda each outer iteration
    bool enforce_theory_ratio = false;
    double rho = 1e-2;           // smoothing parameter of phi2~
    std::size_t outer_max = 5;
    double feasibility_tol = 0.0;
    BundleConfig bundle;
    Vector start;  // d+1 (x, eta)
    std::uint64_t seed = 1;

    void validate() const {
        detail::check_probability_level(p);
        if (!(mu0 > 0.0) || !(lambda0 > 0.0))
            throw std::invalid_argument("penalties mu0, lambda0 must be positive");
        if (mu_factor < 1.0 || lambda_factor < 1.0)
            throw std::invalid_argument("penalty factors must be >= 1");
        if (outer_max < 1) throw std::invalid_argument("outer_max must be >= 1");
        bundle.validate();
    }
};

/// One row of the iterate log, emitted at every accepted serious step.
struct IterateRow {
    std::size_t iter;  // cumulative bundle iteration count
    double time_s;
    double f;
    double prob;
    double h;
    double eta;
};

/// Per-outer-iteration summary, the input of check_monotonicity.
struct OuterRecord {
    double mu;
    double lambda;
    double f;
    double eta;
    double prob;
    double h;
    BundleStatus status;
    std::size_t bundle_iterations;
    std::size_t serious_steps;
};

struct SolveReport {
    Vector solution;  // d
    double eta = 0.0;
    double objective = 0.0;
    double empirical_prob = 0.0;
    std::size_t outer_iterations = 0;
    bool hit_iteration_limit = false;
    std::vector<IterateRow> rows;
    std::vector<OuterRecord> outer;

    bool feasible(double p, double tol = 0.0) const { return empirical_prob >= p - tol; }
};

/// Hooks controlling log emission; wall_clock=false writes a zero time column
/// so logs from identically seeded runs are byte-identical.
struct SolveOptions {
    bool log_rows = true;
    bool wall_clock = true;
    std::function<void(const IterateRow&)> on_row;  // optional streaming sink
};

/**
 * Double penalization scheme: repeatedly minimizes the DC objective of
 * (P_{lambda_k, mu_k}) with the bundle method, warm-started at the previous
 * center (with eta refreshed to the p-quantile whenever the center is
 * chance-feasible), multiplying both penalties between rounds. Stops early
 * once the inner run terminates by its distance criterion at an empirically
 * feasible point.
 */
inline SolveReport solve(const ProblemOracles& prob, const SolverConfig& config,
                         const SolveOptions& options = {}) {
    config.validate();
    if (config.start.size() != prob.dim + 1)
        throw std::invalid_argument("solver start point must have dimension d+1");

    const std::size_t n = prob.scenarios.size();
    const double dlt = delta(n, config.p);
    double mu = config.mu0;
    double lambda = config.lambda0;
    const auto apply_ratio = [&]() {
        if (config.enforce_theory_ratio) lambda = std::max(lambda, (1.0 + 1e-6) * mu / dlt);
    };
    apply_ratio();

    SolveReport report;
    Vector u = config.start;
    prob.box.project(VecView(u.data(), prob.dim));
    BundleConfig bundle_config = config.bundle;

    const auto t0 = std::chrono::steady_clock::now();
    std::size_t iter_base = 0;
    for (std::size_t k = 0; k < config.outer_max; ++k) {
        const PenaltyParams params{config.p, mu, lambda, config.rho};

        if (k > 0) {
            // Warm-start trick: reset eta to the p-quantile when feasible.
            Vector gvals = constraint_values(prob, ConstVecView(u.data(), prob.dim));
            if (empirical_probability(gvals) >= config.p)
                u.back() = quantile(Sample{std::move(gvals)}, config.p);
        }

        SeriousStepCallback on_serious;
        if (options.log_rows || options.on_row)
            on_serious = [&](const SeriousStepInfo& info) {
                double elapsed = 0.0;
                if (options.wall_clock)
                    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                  .count();
                IterateRow row{iter_base + info.iteration, elapsed, info.f,
                               info.prob,                  info.h,  info.eta};
                if (options.log_rows) report.rows.push_back(row);
                if (options.on_row) options.on_row(row);
            };

        BundleResult res = run_bundle(prob, params, u, bundle_config, on_serious);
        iter_base += res.iterations;
        u = res.point;
        report.outer.push_back({mu, lambda, prob.objective(ConstVecView(u.data(), prob.dim)),
                                u.back(), res.empirical_prob, res.h, res.status, res.iterations,
                                res.serious_steps});
        report.outer_iterations = k + 1;
        if (res.status == BundleStatus::iteration_limit) report.hit_iteration_limit = true;

        if (res.empirical_prob >= config.p - config.feasibility_tol &&
            res.status == BundleStatus::converged)
            break;

        const double lambda_before = lambda;
        mu *= config.mu_factor;
        lambda *= config.lambda_factor;
        apply_ratio();
        // The inner objective scales with lambda; scaling the prox family
        // along keeps the master subproblems in the same geometric regime.
        const double growth = lambda / lambda_before;
        if (growth > 1.0) {
            bundle_config.prox_start *= growth;
            bundle_config.prox_restart *= growth;
            bundle_config.prox_low *= growth;
            bundle_config.prox_high *= growth;
        }
    }

    report.solution.assign(u.begin(), u.end() - 1);
    report.eta = u.back();
    report.objective = prob.objective(report.solution);
    report.empirical_prob =
        empirical_probability(constraint_values(prob, ConstVecView(report.solution)));
    return report;
}

/// Advisory monotonicity diagnostic for the fully penalized outer sequence.
struct MonotonicityReport {
    std::size_t objective_violations = 0;  // f(x_k) <= f(x_{k+1}) + tol broken
    std::size_t eta_violations = 0;        // max(eta_k,0) >= max(eta_{k+1},0) - tol broken

    std::size_t total() const { return objective_violations + eta_violations; }
};

/**
 * Counts violations of the theoretical monotonicity of the penalty sequence:
 * objective values increase and max(eta, 0) decreases along outer iterations.
 * Advisory only, since inner solves are approximate.
 */
inline MonotonicityReport check_monotonicity(const std::vector<OuterRecord>& outer) {
    MonotonicityReport rep;
    for (std::size_t k = 0; k + 1 < outer.size(); ++k) {
        const double tol = 1e-6 * (1.0 + std::abs(outer[k].f));
        if (!(outer[k].f <= outer[k + 1].f + tol)) ++rep.objective_violations;
        if (!(std::max(outer[k].eta, 0.0) >= std::max(outer[k + 1].eta, 0.0) - tol))
            ++rep.eta_violations;
    }
    return rep;
}

}  // namespace ccp
