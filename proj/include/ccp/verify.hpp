#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <string>

#include "ccp/benchmarks.hpp"
#include "ccp/penalty.hpp"
#include "ccp/rng.hpp"

namespace ccp::verify {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

// ---------------------------------------------------------------------------
// Independent oracles. These re-derive reference values by brute force and
// never call the closed-form implementation paths they are used to check.
// ---------------------------------------------------------------------------

struct GridMinimum {
    double min_value;
    double arg_lo;  // smallest grid point attaining the minimum (tol 1e-9)
    double arg_hi;  // largest such grid point
    double cell;
};

/// Direct minimization of eta + (1/(1-p)) * mean(max(v_i - eta, 0)). The
/// objective is convex piecewise linear with kinks exactly at the sample
/// values, so scanning grid points plus all kinks yields the exact minimum.
inline GridMinimum grid_min_rockafellar(ConstVecView values, double p, std::size_t npts = 4001) {
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double pad = 1.0 + (hi - lo);
    lo -= pad;
    hi += pad;
    const double cell = (hi - lo) / static_cast<double>(npts - 1);
    const auto objective = [&](double eta) {
        double acc = 0.0;
        for (double v : values) acc += std::max(v - eta, 0.0);
        return eta + acc / ((1.0 - p) * static_cast<double>(values.size()));
    };
    GridMinimum out{kInf, kInf, -kInf, cell};
    for (double v : values) out.min_value = std::min(out.min_value, objective(v));
    const auto consider = [&](double eta) {
        if (objective(eta) <= out.min_value + 1e-9) {
            out.arg_lo = std::min(out.arg_lo, eta);
            out.arg_hi = std::max(out.arg_hi, eta);
        }
    };
    for (std::size_t i = 0; i < npts; ++i) consider(lo + cell * static_cast<double>(i));
    for (double v : values) consider(v);
    return out;
}

/// Central finite differences of a scalar function of a (d+1)-vector.
inline Vector central_difference(const std::function<double(ConstVecView)>& fn, ConstVecView u,
                                 double step = 1e-6) {
    Vector grad(u.size());
    Vector work(u.begin(), u.end());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double saved = work[k];
        work[k] = saved + step;
        const double fp = fn(work);
        work[k] = saved - step;
        const double fm = fn(work);
        work[k] = saved;
        grad[k] = (fp - fm) / (2.0 * step);
    }
    return grad;
}

inline bool gradients_match(ConstVecView fd, ConstVecView an, double tol = 1e-5) {
    for (std::size_t k = 0; k < fd.size(); ++k)
        if (std::abs(fd[k] - an[k]) > tol * (1.0 + std::max(std::abs(fd[k]), std::abs(an[k]))))
            return false;
    return true;
}

/// Dense zooming search for the capped-simplex maximizer, n <= 3 only.
inline Vector brute_force_capped_simplex(ConstVecView gvals, const PenaltyParams& params) {
    const std::size_t n = gvals.size();
    const double nd = static_cast<double>(n);
    const double cap = params.cap(n);
    const auto objective = [&](ConstVecView q) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dev = q[i] - 1.0 / nd;
            s += q[i] * gvals[i] - 0.5 * params.rho * dev * dev;
        }
        return s;
    };
    if (n == 1) return {1.0};
    if (n == 2) {
        double lo = std::max(0.0, 1.0 - cap), hi = std::min(cap, 1.0);
        Vector best{0.0, 0.0};
        double best_val = -kInf;
        for (int stage = 0; stage < 6; ++stage) {
            const double step = (hi - lo) / 2000.0;
            double arg = lo;
            for (int i = 0; i <= 2000; ++i) {
                const double q1 = lo + step * i;
                const Vector q{q1, 1.0 - q1};
                const double val = objective(q);
                if (val > best_val) {
                    best_val = val;
                    best = q;
                    arg = q1;
                }
            }
            lo = std::max(std::max(0.0, 1.0 - cap), arg - 2.0 * step);
            hi = std::min(std::min(cap, 1.0), arg + 2.0 * step);
        }
        return best;
    }
    // n == 3: zoom on (q1, q2); q3 = 1 - q1 - q2.
    double lo1 = 0.0, hi1 = cap, lo2 = 0.0, hi2 = cap;
    Vector best{1.0 / 3, 1.0 / 3, 1.0 / 3};
    double best_val = -kInf;
    for (int stage = 0; stage < 6; ++stage) {
        const double s1 = (hi1 - lo1) / 120.0, s2 = (hi2 - lo2) / 120.0;
        double a1 = lo1, a2 = lo2;
        for (int i = 0; i <= 120; ++i) {
            for (int j = 0; j <= 120; ++j) {
                const double q1 = lo1 + s1 * i, q2 = lo2 + s2 * j;
                const double q3 = 1.0 - q1 - q2;
                if (q1 > cap || q2 > cap || q3 < 0.0 || q3 > cap) continue;
                const Vector q{q1, q2, q3};
                const double val = objective(q);
                if (val > best_val) {
                    best_val = val;
                    best = q;
                    a1 = q1;
                    a2 = q2;
                }
            }
        }
        lo1 = std::max(0.0, a1 - 2.0 * s1);
        hi1 = std::min(cap, a1 + 2.0 * s1);
        lo2 = std::max(0.0, a2 - 2.0 * s2);
        hi2 = std::min(cap, a2 + 2.0 * s2);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Random smooth-point sampling on the two benchmark families.
// ---------------------------------------------------------------------------

namespace detail {

struct SmoothPoint {
    Vector x;
    double eta;
    Vector gvals;
};

/// Draws (x, eta) keeping eta away from every g-value, from zero, and the
/// quantile neighborhood well separated, so phi1/phi2 are differentiable there.
inline bool sample_smooth_point(const BenchmarkInstance& inst, Rng& rng, double p,
                                ConstVecView xlo, ConstVecView xhi, SmoothPoint& out,
                                double margin = 1e-3) {
    const std::size_t d = inst.prob.dim;
    for (int attempt = 0; attempt < 400; ++attempt) {
        Vector x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = rng.uniform(xlo[k], xhi[k]);
        Vector gvals = constraint_values(inst.prob, x);

        // Max-of-rows ties (norm family) spoil differentiability of g itself.
        bool ok = true;
        if (inst.name.rfind("norm", 0) == 0) {
            const std::size_t rows = 10, dd = d;
            for (std::size_t i = 0; i < gvals.size() && ok; ++i) {
                const auto z = inst.prob.scenarios.row(i);
                double best = -kInf, second = -kInf;
                for (std::size_t r = 0; r < rows; ++r) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < dd; ++j) {
                        const double zz = z[r * dd + j];
                        s += zz * zz * x[j] * x[j];
                    }
                    if (s > best) {
                        second = best;
                        best = s;
                    } else {
                        second = std::max(second, s);
                    }
                }
                ok = best - second > margin * (1.0 + std::abs(best));
            }
        }
        if (!ok) continue;

        Vector sorted = gvals;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t k = ccp::detail::quantile_rank(gvals.size(), p);
        const double q = sorted[k - 1];
        if (k > 1 && q - sorted[k - 2] <= margin) continue;
        if (k < sorted.size() && sorted[k] - q <= margin) continue;

        const double span = sorted.back() - sorted.front() + 1.0;
        double eta = rng.uniform(sorted.front() - 0.2 * span, sorted.back() + 0.2 * span);
        bool eta_ok = std::abs(eta) > margin;
        for (double g : gvals) eta_ok = eta_ok && std::abs(g - eta) > margin;
        if (!eta_ok) continue;

        out = {std::move(x), eta, std::move(gvals)};
        return true;
    }
    return false;
}

inline BenchmarkInstance make_family(int which, std::uint64_t seed, std::size_t n) {
    if (which == 0) return toy2d(seed, n);
    return norm_problem(3, seed, n);
}

inline void family_window(int which, Vector& lo, Vector& hi) {
    if (which == 0) {
        lo = {-1.0, -1.0};
        hi = {3.0, 3.0};
    } else {
        lo = {0.5, 0.5, 0.5};
        hi = {3.0, 3.0, 3.0};
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites.
// ---------------------------------------------------------------------------

/// Lemma-1 style checks of the quantile machinery against the grid oracle.
inline std::vector<CheckResult> suite_quantiles(std::uint64_t seed = 20240901) {
    std::vector<CheckResult> results;
    Rng rng(seed);

    std::size_t lemma_fail = 0, qmin_fail = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        Vector values(n);
        for (auto& v : values) v = rng.uniform(-5.0, 5.0) + (rng.below(3) == 0 ? 0.0 : rng.normal());
        const double p = rng.uniform() * 0.99;
        Sample s{values};
        const auto grid = grid_min_rockafellar(values, p);
        const double sq = superquantile(s, p);
        worst = std::max(worst, std::abs(grid.min_value - sq));
        if (std::abs(grid.min_value - sq) > 1e-8) ++lemma_fail;
        const double at_q = rockafellar_objective(s, p, quantile(s, p));
        if (at_q > grid.min_value + 1e-8) ++qmin_fail;
    }
    results.push_back({"lemma1.grid_min_equals_superquantile (200 samples)", lemma_fail == 0,
                       "max |grid - closed form| = " + format_double(worst)});
    results.push_back({"lemma1.quantile_is_minimizer", qmin_fail == 0,
                       std::to_string(qmin_fail) + " failures"});

    std::size_t prop_fail = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(30);
        Vector values(n);
        for (auto& v : values) v = std::floor(rng.uniform(-4.0, 4.0) * 4.0) / 4.0;  // force ties
        const double p = rng.uniform() * 0.999;
        Sample s{values};
        if (!(ecdf(s, quantile(s, p)) >= p)) ++prop_fail;
        if (!(superquantile(s, p) >= quantile(s, p) - 1e-12)) ++prop_fail;
        const double p2 = p + (1.0 - p) * rng.uniform() * 0.999;
        if (quantile(s, p2) < quantile(s, p) - 1e-12) ++prop_fail;
        if (superquantile(s, p2) < superquantile(s, p) - 1e-10) ++prop_fail;
    }
    results.push_back({"quantiles.order_properties (ecdf/monotonicity)", prop_fail == 0,
                       std::to_string(prop_fail) + " failures"});
    return results;
}

/// Finite-difference and convexity validation of the phi1/phi2 oracles.
inline std::vector<CheckResult> suite_subgradients(std::uint64_t seed = 20240902) {
    std::vector<CheckResult> results;
    for (int which = 0; which < 2; ++which) {
        Rng rng(seed + which);
        BenchmarkInstance inst = detail::make_family(which, seed + 7 * which, which == 0 ? 60 : 40);
        Vector lo, hi;
        detail::family_window(which, lo, hi);
        const PenaltyParams params{inst.p, 2.0, 3.0, 1e-2};

        std::size_t fd1_fail = 0, fd2_fail = 0, sampled = 0;
        for (int trial = 0; trial < 300 && sampled < 100; ++trial) {
            detail::SmoothPoint pt;
            if (!detail::sample_smooth_point(inst, rng, params.p, lo, hi, pt)) continue;
            ++sampled;
            Vector u = pt.x;
            u.push_back(pt.eta);
            const auto f1 = [&](ConstVecView v) {
                return phi1(inst.prob, params, v.first(inst.prob.dim), v.back()).value;
            };
            const auto f2 = [&](ConstVecView v) {
                return phi2(inst.prob, params, v.first(inst.prob.dim), v.back()).value;
            };
            const DCOracleOutput o1 = phi1(inst.prob, params, pt.x, pt.eta);
            const DCOracleOutput o2 = phi2(inst.prob, params, pt.x, pt.eta);
            if (!gradients_match(central_difference(f1, u), o1.subgradient)) ++fd1_fail;
            if (!gradients_match(central_difference(f2, u), o2.subgradient)) ++fd2_fail;
        }
        const std::string fam = which == 0 ? "toy2d" : "norm";
        results.push_back({"subgradients.phi1_fd." + fam, fd1_fail == 0 && sampled >= 100,
                           std::to_string(sampled) + " points, " + std::to_string(fd1_fail) +
                               " failures"});
        results.push_back({"subgradients.phi2_fd." + fam, fd2_fail == 0 && sampled >= 100,
                           std::to_string(fd2_fail) + " failures"});

        // Convexity: phi(v) >= phi(u) + <s(u), v-u> - 1e-8 over random pairs.
        std::size_t cvx_fail = 0;
        for (int trial = 0; trial < 100; ++trial) {
            Vector ua(inst.prob.dim + 1), ub(inst.prob.dim + 1);
            for (std::size_t k = 0; k < inst.prob.dim; ++k) {
                ua[k] = rng.uniform(lo[k], hi[k]);
                ub[k] = rng.uniform(lo[k], hi[k]);
            }
            ua.back() = rng.uniform(-50.0, 150.0);
            ub.back() = rng.uniform(-50.0, 150.0);
            const auto oa1 = phi1(inst.prob, params, ConstVecView(ua).first(inst.prob.dim),
                                  ua.back());
            const auto oa2 = phi2(inst.prob, params, ConstVecView(ua).first(inst.prob.dim),
                                  ua.back());
            const auto ob1 = phi1(inst.prob, params, ConstVecView(ub).first(inst.prob.dim),
                                  ub.back());
            const auto ob2 = phi2(inst.prob, params, ConstVecView(ub).first(inst.prob.dim),
                                  ub.back());
            Vector diff(ua.size());
            for (std::size_t k = 0; k < ua.size(); ++k) diff[k] = ub[k] - ua[k];
            if (ob1.value < oa1.value + dot(oa1.subgradient, diff) - 1e-8) ++cvx_fail;
            if (ob2.value < oa2.value + dot(oa2.subgradient, diff) - 1e-8) ++cvx_fail;
        }
        results.push_back({"subgradients.convexity." + fam, cvx_fail == 0,
                           std::to_string(cvx_fail) + " failures"});
    }
    return results;
}

/// Smoothing approximation: gradient correctness, sandwich bound, projection.
inline std::vector<CheckResult> suite_smoothing(std::uint64_t seed = 20240903) {
    std::vector<CheckResult> results;
    for (int which = 0; which < 2; ++which) {
        Rng rng(seed + which);
        BenchmarkInstance inst = detail::make_family(which, seed + 3 * which, which == 0 ? 60 : 40);
        Vector lo, hi;
        detail::family_window(which, lo, hi);
        const PenaltyParams params{inst.p, 2.0, 3.0, 1e-2};

        std::size_t fd_fail = 0, sandwich_fail = 0, sampled = 0;
        double min_margin = kInf;
        for (int trial = 0; trial < 300 && sampled < 100; ++trial) {
            detail::SmoothPoint pt;
            if (!detail::sample_smooth_point(inst, rng, params.p, lo, hi, pt)) continue;
            ++sampled;
            Vector u = pt.x;
            u.push_back(pt.eta);
            const auto fs = [&](ConstVecView v) {
                return smoothed_phi2(inst.prob, params, v.first(inst.prob.dim), v.back()).value;
            };
            const SmoothedPhi2 sm = smoothed_phi2(inst.prob, params, pt.x, pt.eta);
            if (!gradients_match(central_difference(fs, u), sm.gradient)) ++fd_fail;

            const double exact = phi2(inst.prob, params, pt.x, pt.eta).value;
            const double lo_margin = exact - sm.value;                          // >= 0
            const double hi_margin = sm.value + params.lambda * params.rho / 2.0 - exact;
            min_margin = std::min({min_margin, lo_margin, hi_margin});
            if (lo_margin < -1e-10 || hi_margin < -1e-10) ++sandwich_fail;
        }
        const std::string fam = which == 0 ? "toy2d" : "norm";
        results.push_back({"smoothing.gradient_fd." + fam, fd_fail == 0 && sampled >= 100,
                           std::to_string(sampled) + " points, " + std::to_string(fd_fail) +
                               " failures"});
        results.push_back({"smoothing.sandwich." + fam, sandwich_fail == 0,
                           "min margin = " + format_double(min_margin)});
    }

    // Capped-simplex projection against dense brute force (n <= 3) and
    // feasibility at large n.
    Rng rng(seed + 11);
    std::size_t bf_fail = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng.below(3);
        Vector gvals(n);
        for (auto& g : gvals) g = rng.uniform(-3.0, 3.0);
        const PenaltyParams params{rng.uniform() * 0.9, 1.0, 1.0,
                                   std::pow(10.0, rng.uniform(-2.0, 1.0))};
        const Vector mine = capped_simplex_argmax(gvals, params);
        const Vector brute = brute_force_capped_simplex(gvals, params);
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(mine[i] - brute[i]) > 1e-6) ++bf_fail;
    }
    results.push_back({"smoothing.capped_simplex_brute_force (n<=3)", bf_fail == 0,
                       std::to_string(bf_fail) + " component mismatches"});

    std::size_t feas_fail = 0;
    double worst_sum = 0.0;
    for (std::size_t n : {100UL, 10000UL, 100000UL}) {
        Vector gvals(n);
        for (auto& g : gvals) g = rng.normal() * 10.0;
        const PenaltyParams params{0.8, 1.0, 1.0, 1e-2};
        const Vector q = capped_simplex_argmax(gvals, params);
        double sum = 0.0, comp = 0.0;
        for (double v : q) {
            if (v < -1e-12 || v > params.cap(n) + 1e-12) ++feas_fail;
            const double y = v - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        if (std::abs(sum - 1.0) > 1e-12) ++feas_fail;
    }
    results.push_back({"smoothing.capped_simplex_feasibility (n up to 1e5)", feas_fail == 0,
                       "max |sum q - 1| = " + format_double(worst_sum)});
    return results;
}

/// Uniform error bound h >= delta * dist(eta, S(x)) across random
/// configurations, with the solution set cross-checked by grid minimization,
/// plus the vanishing-slope diagnostic under a continuous sampler.
inline std::vector<CheckResult> suite_errorbound(std::uint64_t seed = 20240904,
                                                 std::size_t configs = 500) {
    std::vector<CheckResult> results;
    Rng rng(seed);
    const std::size_t ns[3] = {4, 10, 50};

    std::size_t bound_fail = 0, interval_fail = 0, zero_fail = 0, done = 0;
    double min_ratio = kInf;
    for (std::size_t trial = 0; trial < configs; ++trial) {
        const int which = static_cast<int>(trial % 2);
        const std::size_t n = ns[trial % 3];
        BenchmarkInstance inst = detail::make_family(which, seed ^ (trial * 2654435761ULL), n);
        Vector lo, hi;
        detail::family_window(which, lo, hi);
        Vector x(inst.prob.dim);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = rng.uniform(lo[k], hi[k]);

        // The bound needs p <= (n-1)/n: beyond that the quantile saturates at
        // the sample maximum and h grows only at unit rate above it.
        double p;
        if (rng.below(2) == 0) {
            p = static_cast<double>(rng.below(n)) / static_cast<double>(n);  // p in I_n
        } else {
            p = rng.uniform() * (static_cast<double>(n - 1) / static_cast<double>(n));
        }
        const PenaltyParams params{p, 1.0, 1.0, 1e-2};
        const Vector gvals = constraint_values(inst.prob, x);
        Sample s{gvals};
        const double span = s.max() - s.min() + 1.0;
        const double eta = rng.uniform(s.min() - span, s.max() + span);

        const double h = value_function_from_sample(params, s, eta);
        const Interval S = argmin_interval(s, p);
        const double dist = S.distance(eta);
        const double dlt = delta(n, p);
        ++done;
        if (h < dlt * dist - 1e-10) ++bound_fail;
        if (dist > 1e-9 && dlt * dist > 1e-14) min_ratio = std::min(min_ratio, h / (dlt * dist));
        if (dist <= 1e-12 && h > 1e-10) ++zero_fail;  // h vanishes on S

        // Cross-check the interval against the grid minimizers of Eq-style
        // objective: every grid minimizer must lie within one cell of S.
        const auto grid = grid_min_rockafellar(s.sorted(), p, 2001);
        if (grid.arg_lo < S.lo - 2.0 * grid.cell || grid.arg_hi > S.hi + 2.0 * grid.cell)
            ++interval_fail;
    }
    results.push_back({"errorbound.theorem2 (" + std::to_string(done) + " configs)",
                       bound_fail == 0,
                       "min ratio h/(delta*dist) = " + format_double(min_ratio)});
    results.push_back({"errorbound.argmin_interval_grid_crosscheck", interval_fail == 0,
                       std::to_string(interval_fail) + " failures"});
    results.push_back({"errorbound.h_zero_on_interval", zero_fail == 0,
                       std::to_string(zero_fail) + " failures"});

    // Continuous-density diagnostic: the symmetric difference quotient of
    // h(x, .) at the quantile, step 1/sqrt(n), decays as n grows.
    Rng crng(seed + 77);
    double quotients[3];
    const std::size_t sizes[3] = {100, 1000, 10000};
    for (int idx = 0; idx < 3; ++idx) {
        const std::size_t n = sizes[idx];
        Vector gvals(n);
        for (auto& g : gvals) g = 0.3 - crng.normal();  // g(x, xi) = x - xi at x = 0.3
        Sample s{gvals};
        const PenaltyParams params{0.5, 1.0, 1.0, 1e-2};
        const double q = quantile(s, params.p);
        const double step = 1.0 / std::sqrt(static_cast<double>(n));
        const double hp = value_function_from_sample(params, s, q + step);
        const double hm = value_function_from_sample(params, s, q - step);
        quotients[idx] = std::abs(hp - hm) / (2.0 * step);
    }
    const bool decays = quotients[1] <= 3.0 * quotients[0] &&
                        quotients[2] <= 3.0 * quotients[1] && quotients[2] < quotients[0];
    results.push_back({"errorbound.continuous_limit_diagnostic", decays,
                       "quotients " + format_double(quotients[0]) + " -> " +
                           format_double(quotients[1]) + " -> " + format_double(quotients[2])});
    return results;
}

/// Exact penalization on a 1-d, 4-scenario instance: above the lambda
/// threshold every grid minimizer of the penalized objective is feasible for
/// the lower level; far below it, that is expected to break.
inline std::vector<CheckResult> suite_penalization(std::uint64_t /*seed*/ = 0) {
    std::vector<CheckResult> results;
    const Vector xis{1.0, 2.0, 3.0, 4.0};
    const double p = 0.5;
    const double mu = 1.0;
    const double dlt = delta(xis.size(), p);  // 0.5 -> threshold mu/delta = 2

    const auto run_case = [&](double lambda, double& worst_h, double& threshold) {
        const PenaltyParams params{p, mu, lambda, 1e-2};
        const double xlo = 0.0, xhi = 6.0, elo = -3.0, ehi = 5.0;
        const std::size_t nx = 1201, ne = 1601;
        const double cx = (xhi - xlo) / (nx - 1), ce = (ehi - elo) / (ne - 1);
        Vector gvals(xis.size());
        const auto objective = [&](double x, double eta) {
            for (std::size_t k = 0; k < xis.size(); ++k) gvals[k] = x - xis[k];
            Sample s{gvals};
            const double h = lower_objective_value(params, gvals, eta) - superquantile(s, p);
            return 0.5 * (x - 5.0) * (x - 5.0) + lambda * h + mu * std::max(eta, 0.0);
        };
        double best = kInf;
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ne; ++j)
                best = std::min(best, objective(xlo + cx * static_cast<double>(i),
                                                elo + ce * static_cast<double>(j)));
        std::vector<std::pair<double, double>> argmins;
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ne; ++j) {
                const double x = xlo + cx * static_cast<double>(i);
                const double eta = elo + ce * static_cast<double>(j);
                if (objective(x, eta) <= best + 1e-9) argmins.emplace_back(x, eta);
            }
        // Lipschitz bound of the penalized objective over the window.
        const double L = 5.0 + 3.0 * lambda + mu;
        threshold = 5.0 * L * std::max(cx, ce);
        worst_h = 0.0;
        for (const auto& [x, eta] : argmins) {
            Vector g(xis.size());
            for (std::size_t k = 0; k < xis.size(); ++k) g[k] = x - xis[k];
            Sample s{g};
            worst_h = std::max(worst_h,
                               lower_objective_value(params, g, eta) - superquantile(s, p));
        }
    };

    double worst_h = 0.0, threshold = 0.0;
    run_case(2.0 * mu / dlt, worst_h, threshold);  // lambda = 4 > mu/delta = 2
    results.push_back({"penalization.exact_above_threshold (lambda=2*mu/delta)",
                       worst_h <= threshold,
                       "max h at minimizers = " + format_double(worst_h) +
                           ", allowance = " + format_double(threshold)});

    run_case(0.01 * mu / dlt, worst_h, threshold);
    results.push_back({"penalization.loose_below_threshold (lambda=0.01*mu/delta)",
                       worst_h > threshold,
                       "max h at minimizers = " + format_double(worst_h) +
                           " exceeds allowance " + format_double(threshold) +
                           " as expected"});
    return results;
}

// ---------------------------------------------------------------------------
// Runner.
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_suite(const std::string& name) {
    if (name == "quantiles") return suite_quantiles();
    if (name == "subgradients") return suite_subgradients();
    if (name == "smoothing") return suite_smoothing();
    if (name == "errorbound") return suite_errorbound();
    if (name == "penalization") return suite_penalization();
    if (name == "all") {
        std::vector<CheckResult> all;
        for (const char* s : {"quantiles", "subgradients", "smoothing", "errorbound",
                              "penalization"}) {
            auto part = run_suite(s);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw std::invalid_argument("unknown verification suite '" + name +
                                "' (expected errorbound, subgradients, smoothing, penalization, "
                                "quantiles, or all)");
}

/// Prints one line per check and returns the failure count.
inline std::size_t report(const std::vector<CheckResult>& results, std::FILE* out = stdout) {
    std::size_t failures = 0;
    for (const auto& r : results) {
        failures += !r.passed;
        std::fprintf(out, "[%s] %-55s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                     r.detail.c_str());
    }
    return failures;
}

}  // namespace ccp::verify
