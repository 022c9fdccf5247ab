#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <functional>
#include <utility>

#include "ccp/penalty.hpp"
#include "ccp/problem.hpp"
#include "ccp/types.hpp"

namespace ccp {

/// One linearization of phi1: the plane u -> value + <slope, u - anchor>.
struct CuttingPlane {
    Vector anchor;  // d+1
    double value;   // phi1 at the anchor
    Vector slope;   // subgradient of phi1 at the anchor

    double evaluate(ConstVecView u) const {
        double v = value;
        for (std::size_t k = 0; k < slope.size(); ++k) v += slope[k] * (u[k] - anchor[k]);
        return v;
    }
};

struct BundleConfig {
    double prox_start = 60.0;
    double prox_low = 1e-4;
    double prox_high = 1e5;
    double prox_up = 1.01;            // applied after serious steps
    double prox_down = 0.99;          // applied after null steps
    double prox_restart = 60.0;       // applied when the bundle overflows
    double kappa = 1e-4;              // sufficient-decrease constant in (0,1)
    std::size_t max_planes = 300;
    double stop_tol = 1e-7;           // on ||candidate - center||
    std::size_t max_iterations = 10000;
    std::size_t qp_max_iterations = 10000;

    void validate() const {
        if (!(prox_low > 0.0 && prox_low <= prox_high))
            throw std::invalid_argument("bundle prox bounds must satisfy 0 < low <= high");
        if (!(kappa > 0.0 && kappa < 1.0))
            throw std::invalid_argument("bundle kappa must lie in (0,1)");
        if (max_planes < 1) throw std::invalid_argument("bundle needs max_planes >= 1");
        if (!(stop_tol > 0.0)) throw std::invalid_argument("bundle stop_tol must be positive");
    }
};

namespace detail {
inline std::string scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}
}  // namespace detail

/// Thrown when the master QP cannot reach its optimality tolerance.
struct MasterQpError : std::runtime_error {
    Vector best_point;
    double residual;

    MasterQpError(Vector point, double res)
        : std::runtime_error("master subproblem failed to reach KKT tolerance (residual " +
                             detail::scientific(res) + ")"),
          best_point(std::move(point)),
          residual(res) {}
};

struct MasterResult {
    Vector point;        // candidate u
    double model_part;   // max_j plane_j(u) - <phi2_grad, u - center>
    double kkt_residual; // scaled duality gap of the master QP
};

namespace detail {

/// Dense linear solve with partial pivoting; returns false on singularity.
inline bool solve_dense(std::vector<Vector>& A, Vector& b) {
    const std::size_t m = b.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        const double inv = 1.0 / A[col][col];
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = A[r][col] * inv;
            if (f == 0.0) continue;
            for (std::size_t cc = col; cc < m; ++cc) A[r][cc] -= f * A[col][cc];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t col = m; col-- > 0;) {
        double s = b[col];
        for (std::size_t cc = col + 1; cc < m; ++cc) s -= A[col][cc] * b[cc];
        b[col] = s / A[col][col];
    }
    return true;
}

}  // namespace detail

/// Active-set state carried between consecutive master solves (the optimal
/// face changes little from one bundle iteration to the next).
struct MasterWarmStart {
    std::vector<std::size_t> free_vars;
};

/**
 * Solves the proximal master problem
 *
 *   min_u max_j plane_j(u) - <phi2_grad, u - center> + (prox/2) ||u - center||^2
 *   s.t.  box bounds on the x-part of u (eta is unconstrained),
 *
 * through its exact dual: simplex weights on the cuts plus nonnegative
 * multipliers for the finite box bounds, a dense concave QP of size
 * (bundle size + #finite bounds). A primal active-set loop solves it to
 * machine-precision KKT; the returned residual is the scaled duality gap,
 * required to be <= 1e-8. Throws MasterQpError carrying the best iterate
 * when the iteration cap is hit first. `warm`, when given, carries the
 * active face between consecutive calls.
 */
inline MasterResult master_subproblem(const std::vector<CuttingPlane>& planes, ConstVecView center,
                                      ConstVecView phi2_grad, double prox,
                                      const BoxConstraints& box,
                                      std::size_t max_iterations = 10000,
                                      MasterWarmStart* warm = nullptr) {
    assert(!planes.empty());
    const std::size_t J = planes.size();
    const std::size_t D = center.size();  // d+1
    const std::size_t d = D - 1;

    // Dual variables: cut weights first, then one multiplier per finite bound.
    struct BoundVar {
        std::size_t coord;
        double sign;  // -1 lower bound, +1 upper bound
        double lin;
    };
    std::vector<BoundVar> bounds;
    for (std::size_t k = 0; k < d; ++k) {
        if (std::isfinite(box.lower[k])) bounds.push_back({k, -1.0, box.lower[k] - center[k]});
        if (std::isfinite(box.upper[k])) bounds.push_back({k, +1.0, center[k] - box.upper[k]});
    }
    const std::size_t B = bounds.size();
    const std::size_t total = J + B;

    Vector lin(total);
    for (std::size_t j = 0; j < J; ++j) lin[j] = planes[j].evaluate(center);
    for (std::size_t b = 0; b < B; ++b) lin[J + b] = bounds[b].lin;

    const auto gram = [&](std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        if (j < J) return dot(planes[i].slope, planes[j].slope);
        if (i < J) return bounds[j - J].sign * planes[i].slope[bounds[j - J].coord];
        return bounds[i - J].coord == bounds[j - J].coord
                   ? bounds[i - J].sign * bounds[j - J].sign
                   : 0.0;
    };

    Vector theta(total, 0.0), w(D), grad_all(total);
    const auto refresh = [&]() {
        // v = R theta - phi2_grad; w = -v/prox; gradient_i = lin_i + r_i'w.
        Vector v(D);
        for (std::size_t k = 0; k < D; ++k) v[k] = -phi2_grad[k];
        for (std::size_t j = 0; j < J; ++j)
            if (theta[j] != 0.0)
                for (std::size_t k = 0; k < D; ++k) v[k] += theta[j] * planes[j].slope[k];
        for (std::size_t b = 0; b < B; ++b)
            if (theta[J + b] != 0.0) v[bounds[b].coord] += theta[J + b] * bounds[b].sign;
        for (std::size_t k = 0; k < D; ++k) w[k] = -v[k] / prox;
        for (std::size_t j = 0; j < J; ++j) grad_all[j] = lin[j] + dot(planes[j].slope, w);
        for (std::size_t b = 0; b < B; ++b)
            grad_all[J + b] = lin[J + b] + bounds[b].sign * w[bounds[b].coord];
    };

    // Plane values are evaluated center-relatively (lin_j + slope_j'w) so the
    // gap does not drown in cancellation against faraway anchors.
    Vector wproj(D);
    const auto project_w = [&]() {
        for (std::size_t k = 0; k < D; ++k) {
            wproj[k] = w[k];
            if (k < d)
                wproj[k] = std::min(std::max(wproj[k], box.lower[k] - center[k]),
                                    box.upper[k] - center[k]);
        }
    };
    const auto finish = [&](double residual) {
        project_w();
        MasterResult res;
        res.point.assign(center.begin(), center.end());
        for (std::size_t k = 0; k < D; ++k) res.point[k] += wproj[k];
        box.project(VecView(res.point.data(), d));  // exact bound satisfaction
        double mx = -kInf;
        for (std::size_t j = 0; j < J; ++j)
            mx = std::max(mx, lin[j] + dot(planes[j].slope, wproj));
        res.model_part = mx - dot(phi2_grad, wproj);
        res.kkt_residual = residual;
        return res;
    };
    double data_scale = 1.0;
    for (std::size_t j = 0; j < J; ++j) data_scale = std::max(data_scale, std::abs(lin[j]));
    const auto scaled_gap = [&]() {
        // Duality gap of the master QP at (u(theta), theta), relative to the
        // magnitude of the model data.
        project_w();
        double mx = -kInf;
        for (std::size_t j = 0; j < J; ++j)
            mx = std::max(mx, lin[j] + dot(planes[j].slope, wproj));
        const double primal =
            mx - dot(phi2_grad, wproj) + 0.5 * prox * dot(wproj, wproj);
        double dualv = -0.5 * prox * dot(w, w);  // lin'theta - |v|^2/(2 prox)
        for (std::size_t i = 0; i < total; ++i) dualv += theta[i] * lin[i];
        return (primal - dualv) / (data_scale + std::abs(primal));
    };

    if (J == 1 && B == 0) {
        theta[0] = 1.0;
        refresh();
        return finish(0.0);
    }

    std::vector<std::size_t> free_vars;
    std::vector<char> is_free(total, 0);
    std::vector<Vector> M;
    Vector rhs, theta_star;

    const auto reset_face = [&]() {
        for (std::size_t i = 0; i < total; ++i) {
            theta[i] = 0.0;
            is_free[i] = 0;
        }
        std::size_t bestj = 0;
        for (std::size_t j = 1; j < J; ++j)
            if (lin[j] > lin[bestj]) bestj = j;
        free_vars.assign(1, bestj);
        is_free[bestj] = 1;
        theta[bestj] = 1.0;
    };

    // Attempt 0 seeds the face from the previous call; attempt 1 retries from
    // scratch when the warm-started path stalls short of the tolerance.
    for (int attempt = 0; attempt < 2; ++attempt) {
    reset_face();
    if (attempt == 0 && warm != nullptr && !warm->free_vars.empty()) {
        for (std::size_t i : warm->free_vars)
            if (i < total && !is_free[i]) {
                free_vars.push_back(i);
                is_free[i] = 1;
            }
    }

    bool restarted = attempt > 0;
    for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iterations, 10); ++iter) {
        // Equality-constrained solve on the free face (bordered KKT system),
        // with a stabilizing regularization whose error is removed afterwards
        // by iterative refinement against the unregularized matrix.
        const std::size_t m = free_vars.size();
        double diag_scale = 0.0;
        for (std::size_t a = 0; a < m; ++a)
            diag_scale = std::max(diag_scale, gram(free_vars[a], free_vars[a]) / prox);
        std::vector<Vector> M0(m + 1, Vector(m + 1, 0.0));
        Vector b(m + 1, 0.0);
        for (std::size_t a = 0; a < m; ++a) {
            const std::size_t i = free_vars[a];
            for (std::size_t c = 0; c < m; ++c) M0[a][c] = gram(i, free_vars[c]) / prox;
            M0[a][m] = (i < J) ? 1.0 : 0.0;
            M0[m][a] = M0[a][m];
            double rg = 0.0;  // r_i' phi2_grad
            if (i < J)
                rg = dot(planes[i].slope, phi2_grad);
            else
                rg = bounds[i - J].sign * phi2_grad[bounds[i - J].coord];
            b[a] = lin[i] + rg / prox;
        }
        b[m] = 1.0;
        bool solved = false;
        Vector x;
        for (double reg_rel : {1e-13, 1e-10, 1e-7}) {
            const double reg = reg_rel * (1.0 + diag_scale);
            const auto regularized_solve = [&](const Vector& rhs_in, Vector& out) {
                M = M0;
                for (std::size_t a = 0; a < m; ++a) M[a][a] += reg;
                out = rhs_in;
                bool ok = detail::solve_dense(M, out);
                for (std::size_t a = 0; ok && a <= m; ++a) ok = std::isfinite(out[a]);
                return ok;
            };
            if (!regularized_solve(b, x)) continue;
            Vector resid(m + 1), delta;
            for (int round = 0; round < 2; ++round) {
                for (std::size_t a = 0; a <= m; ++a) {
                    double s = b[a];
                    for (std::size_t c = 0; c <= m; ++c) s -= M0[a][c] * x[c];
                    resid[a] = s;
                }
                if (!regularized_solve(resid, delta)) break;
                for (std::size_t a = 0; a <= m; ++a) x[a] += delta[a];
            }
            solved = true;
            for (std::size_t a = 0; solved && a <= m; ++a) solved = std::isfinite(x[a]);
            if (solved) break;
        }
        rhs = x;
        if (!solved) {
            if (m > 1) {  // shed the most recent addition and retry
                theta[free_vars.back()] = 0.0;
                is_free[free_vars.back()] = 0;
                free_vars.pop_back();
                continue;
            }
            break;
        }
        theta_star.assign(total, 0.0);
        for (std::size_t a = 0; a < m; ++a) theta_star[free_vars[a]] = rhs[a];
        const double nu = rhs[m];

        double min_component = 0.0;
        for (std::size_t a = 0; a < m; ++a)
            min_component = std::min(min_component, theta_star[free_vars[a]]);

        if (min_component >= -1e-12) {
            for (std::size_t a = 0; a < m; ++a)
                theta[free_vars[a]] = std::max(theta_star[free_vars[a]], 0.0);
            for (std::size_t i = 0; i < total; ++i)
                if (!is_free[i]) theta[i] = 0.0;
            refresh();

            // Optimality: pinned cuts need grad <= nu, pinned bounds grad <= 0.
            double worst = 0.0;
            std::size_t worst_idx = total;
            double gscale = 1.0 + std::abs(nu);
            for (std::size_t i = 0; i < total; ++i)
                gscale = std::max(gscale, std::abs(grad_all[i]));
            for (std::size_t i = 0; i < total; ++i) {
                if (is_free[i]) continue;
                const double viol = grad_all[i] - (i < J ? nu : 0.0);
                if (viol > worst) {
                    worst = viol;
                    worst_idx = i;
                }
            }
            if (worst_idx == total || worst <= 1e-11 * gscale) {
                const double residual = scaled_gap();
                if (residual <= 1e-8 || !restarted) {
                    if (residual <= 1e-8) {
                        if (warm != nullptr) warm->free_vars = free_vars;
                        return finish(residual);
                    }
                    restarted = true;  // suspicious stationary face: start over
                    reset_face();
                    continue;
                }
                break;
            }
            free_vars.push_back(worst_idx);
            is_free[worst_idx] = 1;
        } else {
            // Ratio test toward theta_star; pin the first blocking variable.
            double tau = 1.0;
            std::size_t blocker = total;
            for (std::size_t a = 0; a < m; ++a) {
                const std::size_t i = free_vars[a];
                const double dir = theta_star[i] - theta[i];
                if (dir < 0.0 && theta_star[i] < 0.0) {
                    const double ti = theta[i] / (-dir);
                    if (ti < tau) {
                        tau = ti;
                        blocker = i;
                    }
                }
            }
            for (std::size_t a = 0; a < m; ++a) {
                const std::size_t i = free_vars[a];
                theta[i] += tau * (theta_star[i] - theta[i]);
                if (theta[i] < 0.0) theta[i] = 0.0;
            }
            if (blocker == total) {  // numerical dead end: start over once
                if (restarted) break;
                restarted = true;
                reset_face();
                continue;
            }
            theta[blocker] = 0.0;
            is_free[blocker] = 0;
            free_vars.erase(std::find(free_vars.begin(), free_vars.end(), blocker));
        }
    }

    refresh();
    const double residual = scaled_gap();
    if (residual <= 1e-8) {
        if (warm != nullptr) warm->free_vars = free_vars;
        return finish(residual);
    }
    }  // attempt loop

    // Last resort: pairwise coordinate ascent on the dual. Each step solves a
    // one-dimensional quadratic exactly, so the dual value increases
    // monotonically and small residual gaps grind down reliably.
    refresh();
    {
        Vector dw(D);
        for (std::size_t step = 0; step < 50000; ++step) {
            if (step % 16 == 0 && scaled_gap() <= 1e-9) break;
            std::size_t hi = 0;
            for (std::size_t j = 1; j < J; ++j)
                if (grad_all[j] > grad_all[hi]) hi = j;
            std::size_t lo = total;
            for (std::size_t j = 0; j < J; ++j)
                if (theta[j] > 0.0 && (lo == total || grad_all[j] < grad_all[lo])) lo = j;
            double improved = 0.0;
            if (lo != total && lo != hi) {
                double rr = 0.0;
                for (std::size_t k = 0; k < D; ++k) {
                    const double diff = planes[hi].slope[k] - planes[lo].slope[k];
                    dw[k] = diff;
                    rr += diff * diff;
                }
                if (rr > 0.0) {
                    double tau = prox * (grad_all[hi] - grad_all[lo]) / rr;
                    tau = std::min(tau, theta[lo]);
                    if (tau > 0.0) {
                        theta[hi] += tau;
                        theta[lo] -= tau;
                        for (std::size_t k = 0; k < D; ++k) w[k] -= tau * dw[k] / prox;
                        for (std::size_t i = 0; i < J; ++i)
                            grad_all[i] -= tau * dot(planes[i].slope, dw) / prox;
                        for (std::size_t b = 0; b < B; ++b)
                            grad_all[J + b] -=
                                tau * bounds[b].sign * dw[bounds[b].coord] / prox;
                        improved = tau;
                    }
                }
            }
            for (std::size_t b = 0; b < B; ++b) {
                double tau = prox * grad_all[J + b];  // ||r_b|| = 1
                tau = std::max(tau, -theta[J + b]);
                if (std::abs(tau) <= 0.0) continue;
                theta[J + b] += tau;
                const std::size_t k = bounds[b].coord;
                w[k] -= tau * bounds[b].sign / prox;
                for (std::size_t i = 0; i < J; ++i)
                    grad_all[i] -= tau * bounds[b].sign * planes[i].slope[k] / prox;
                for (std::size_t c = 0; c < B; ++c)
                    if (bounds[c].coord == k)
                        grad_all[J + c] -= tau * bounds[b].sign * bounds[c].sign / prox;
                improved += std::abs(tau);
            }
            if (improved == 0.0) break;
        }
        refresh();
        const double residual = scaled_gap();
        if (residual <= 100.0 * 1e-8) {
            // Degraded but usable: the bundle tolerates inexact candidates.
            if (warm != nullptr) warm->free_vars.clear();
            return finish(residual);
        }
    }

    MasterResult res = finish(scaled_gap());
    throw MasterQpError(std::move(res.point), res.kkt_residual);
}

enum class StepKind { serious, null_step };

/**
 * Serious-step test: accept the candidate when the achieved decrease reaches
 * the kappa-fraction of the decrease predicted by the cutting-plane model
 * (and is strictly positive; zero-decrease candidates are null steps).
 */
inline StepKind descent_test(double center_value, double candidate_value,
                             double predicted_decrease, double kappa) {
    const double achieved = center_value - candidate_value;
    if (achieved <= 0.0) return StepKind::null_step;
    return achieved >= kappa * predicted_decrease ? StepKind::serious : StepKind::null_step;
}

enum class BundleStatus { converged, iteration_limit };

struct BundleResult {
    Vector point;  // d+1
    double value;  // phi1 - phi2~ at the point
    BundleStatus status;
    std::size_t iterations = 0;
    std::size_t serious_steps = 0;
    double empirical_prob = 0.0;
    double h = 0.0;
    double final_prox = 0.0;
};

/// Reported once per serious step (the accepted stability centers).
struct SeriousStepInfo {
    std::size_t iteration;  // bundle iteration at which the step was accepted
    ConstVecView point;     // new center, (x, eta)
    double f;
    double prob;
    double h;
    double eta;
    double dc_value;
};
using SeriousStepCallback = std::function<void(const SeriousStepInfo&)>;

namespace detail {

struct CenterState {
    Vector u;          // d+1
    Vector gvals;      // g(x, xi_i)
    DCOracleOutput p1;
    SmoothedPhi2 p2;
    double value = 0.0;

    void refresh_value() { value = p1.value - p2.value; }
    ConstVecView x() const { return {u.data(), u.size() - 1}; }
    double eta() const { return u.back(); }
};

inline CenterState evaluate_center(const ProblemOracles& prob, const PenaltyParams& params,
                                   Vector u) {
    CenterState c;
    c.u = std::move(u);
    c.gvals = constraint_values(prob, c.x());
    c.p1 = phi1_from_gvals(prob, params, c.x(), c.eta(), c.gvals);
    c.p2 = smoothed_phi2_from_gvals(prob, params, c.x(), c.gvals, /*with_gradient=*/true);
    c.refresh_value();
    return c;
}

}  // namespace detail

/**
 * Proximal bundle method for min phi1 - phi2~ over the box (on x; eta free).
 *
 * Each iteration solves the master problem built from the phi1 cutting
 * planes and the gradient of phi2~ frozen at the stability center. Serious
 * steps move the center, empty the bundle and increase the prox parameter;
 * null steps add the candidate's cut and decrease it. When the bundle
 * overflows max_planes it is emptied, the prox parameter is reset, and a
 * chance-feasible center gets its eta coordinate replaced by the p-quantile
 * of its constraint values (which can only decrease the objective).
 * Terminates when ||candidate - center|| <= stop_tol.
 */
inline BundleResult run_bundle(const ProblemOracles& prob, const PenaltyParams& params,
                               ConstVecView start, const BundleConfig& config,
                               const SeriousStepCallback& on_serious = {}) {
    params.validate();
    config.validate();
    if (start.size() != prob.dim + 1)
        throw std::invalid_argument("bundle start point must have dimension d+1");

    Vector u0(start.begin(), start.end());
    prob.box.project(VecView(u0.data(), prob.dim));
    auto center = detail::evaluate_center(prob, params, std::move(u0));

    double prox = std::clamp(config.prox_start, config.prox_low, config.prox_high);
    std::vector<CuttingPlane> planes{{center.u, center.p1.value, center.p1.subgradient}};

    const auto clamp_prox = [&](double v) {
        return std::clamp(v, config.prox_low, config.prox_high);
    };

    BundleResult res;
    res.status = BundleStatus::iteration_limit;
    MasterWarmStart warm;
    std::size_t iter = 0;
    while (iter < config.max_iterations) {
        ++iter;
        MasterResult master = master_subproblem(planes, center.u, center.p2.gradient, prox,
                                                prob.box, config.qp_max_iterations, &warm);
        if (std::sqrt(squared_distance(master.point, center.u)) <= config.stop_tol) {
            res.status = BundleStatus::converged;
            break;
        }

        Vector cand_u = master.point;
        const ConstVecView cand_x(cand_u.data(), prob.dim);
        const double cand_eta = cand_u.back();
        Vector cand_gvals = constraint_values(prob, cand_x);
        DCOracleOutput cand_p1 = phi1_from_gvals(prob, params, cand_x, cand_eta, cand_gvals);
        SmoothedPhi2 cand_p2 =
            smoothed_phi2_from_gvals(prob, params, cand_x, cand_gvals, /*with_gradient=*/false);
        const double cand_value = cand_p1.value - cand_p2.value;

        const double predicted = center.p1.value - master.model_part;
        if (descent_test(center.value, cand_value, predicted, config.kappa) ==
            StepKind::serious) {
            center.u = std::move(cand_u);
            center.gvals = std::move(cand_gvals);
            center.p1 = std::move(cand_p1);
            center.p2 = std::move(cand_p2);
            // The phi2~ linearization lives at the stability center only;
            // compute its gradient now that the candidate was promoted.
            center.p2.gradient.assign(prob.dim + 1, 0.0);
            VecView xpart(center.p2.gradient.data(), prob.dim);
            for (std::size_t i = 0; i < center.gvals.size(); ++i)
                if (center.p2.weights[i] != 0.0)
                    prob.constraint_gradient_acc(center.x(), prob.scenarios.row(i),
                                                 params.lambda * center.p2.weights[i], xpart);
            center.refresh_value();
            planes.assign(1, {center.u, center.p1.value, center.p1.subgradient});
            warm.free_vars.clear();
            prox = clamp_prox(prox * config.prox_up);
            ++res.serious_steps;
            if (on_serious) {
                Sample gs{center.gvals};
                SeriousStepInfo info{iter,
                                     center.u,
                                     prob.objective(center.x()),
                                     empirical_probability(center.gvals),
                                     value_function_from_sample(params, gs, center.eta()),
                                     center.eta(),
                                     center.value};
                on_serious(info);
            }
        } else {
            planes.push_back({std::move(cand_u), cand_p1.value, std::move(cand_p1.subgradient)});
            prox = clamp_prox(prox * config.prox_down);
            if (planes.size() > config.max_planes) {
                // Bundle overflow: restart, and exploit feasibility if available.
                prox = clamp_prox(config.prox_restart);
                if (empirical_probability(center.gvals) >= params.p) {
                    Sample gs{center.gvals};
                    center.u.back() = quantile(gs, params.p);
                    center.p1 = phi1_from_gvals(prob, params, center.x(), center.eta(),
                                                center.gvals);
                    center.refresh_value();
                }
                planes.assign(1, {center.u, center.p1.value, center.p1.subgradient});
                warm.free_vars.clear();
            }
        }
    }

    res.point = center.u;
    res.value = center.value;
    res.iterations = iter;
    res.empirical_prob = empirical_probability(center.gvals);
    res.h = value_function_from_sample(params, Sample{center.gvals}, center.eta());
    res.final_prox = prox;
    return res;
}

}  // namespace ccp
