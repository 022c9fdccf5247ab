#pragma once

#include <algorithm>
#include <cmath>

#include "ccp/empirical.hpp"
#include "ccp/problem.hpp"
#include "ccp/types.hpp"

namespace ccp {

/**
 * Parameters of the doubly penalized problem
 *
 *   min f(x) + lambda * (G(x,eta) - min_s G(x,s)) + mu * max(eta, 0)
 *
 * and of the smoothed second DC component (rho).
 */
struct PenaltyParams {
    double p;
    double mu;
    double lambda;
    double rho;

    void validate() const {
        detail::check_probability_level(p);
        if (!(mu > 0.0) || !(lambda > 0.0) || !(rho > 0.0))
            throw std::invalid_argument("penalty parameters mu, lambda, rho must be positive");
    }

    double tail_scale(std::size_t n) const { return 1.0 / ((1.0 - p) * static_cast<double>(n)); }
    double cap(std::size_t n) const { return tail_scale(n); }
};

/**
 * Growth constant of the uniform error bound h(x,eta) >= delta * dist(eta, S(x)):
 * 1/(n(1-p)) when p lies on the grid I_n = {i/n : 0 <= i <= n-1} (within 1e-12),
 * dist(p, I_n)/(1-p) otherwise.
 */
inline double delta(std::size_t n, double p) {
    if (n < 1) throw std::invalid_argument("delta requires n >= 1");
    detail::check_probability_level(p);
    const double nd = static_cast<double>(n);
    double i = std::round(p * nd);
    i = std::min(std::max(i, 0.0), nd - 1.0);
    const double dist = std::abs(p - i / nd);
    if (dist <= 1e-12) return 1.0 / (nd * (1.0 - p));
    return dist / (1.0 - p);
}

/// Indicator counts of g-values against a threshold, with tie tolerance 1e-12.
struct ThresholdCounts {
    std::size_t above = 0;  // g_i > t (strictly, beyond tolerance)
    std::size_t equal = 0;  // |g_i - t| <= tolerance
};

inline ThresholdCounts count_against(ConstVecView gvals, double t, double tol = kAtomTol) {
    ThresholdCounts c;
    for (double g : gvals) {
        if (g > t + tol)
            ++c.above;
        else if (g >= t - tol)
            ++c.equal;
    }
    return c;
}

/// G(x, s) = s + (1/((1-p)n)) * sum_i max(g_i - s, 0), from precomputed g-values.
inline double lower_objective_value(const PenaltyParams& params, ConstVecView gvals, double s) {
    double acc = 0.0;
    for (double g : gvals) acc += std::max(g - s, 0.0);
    return s + acc * params.tail_scale(gvals.size());
}

/// Lower objective G of the bilevel reformulation; min_s G(x,s) is the
/// p-superquantile of the constraint values at x.
inline double lower_objective(const ProblemOracles& prob, const PenaltyParams& params,
                              ConstVecView x, double s) {
    return lower_objective_value(params, constraint_values(prob, x), s);
}

/// h(x, eta) = G(x, eta) - min_s G(x, s), from a sorted sample of g-values.
inline double value_function_from_sample(const PenaltyParams& params, const Sample& gsample,
                                         double eta) {
    const double g_at_eta = lower_objective_value(params, gsample.sorted(), eta);
    const double g_min = superquantile(gsample, params.p);
    const double h = g_at_eta - g_min;
    return (h < 0.0 && h > -1e-12) ? 0.0 : h;
}

/**
 * Value function of the lower problem, h(x, eta) = G(x, eta) - min_s G(x, s).
 * The inner minimum is evaluated in closed form as the p-superquantile
 * (never by iterative minimization). Nonnegative; zero exactly on the
 * solution set of the lower problem.
 */
inline double value_function(const ProblemOracles& prob, const PenaltyParams& params,
                             ConstVecView x, double eta) {
    return value_function_from_sample(params, Sample(constraint_values(prob, x)), eta);
}

/// Value and one subgradient of a convex component, laid out as (x-part, eta-part).
struct DCOracleOutput {
    double value;
    Vector subgradient;  // size d+1

    double eta_component() const { return subgradient.back(); }
    ConstVecView x_component() const { return {subgradient.data(), subgradient.size() - 1}; }
};

/**
 * First convex component phi1(x, eta) = f(x) + lambda * G(x, eta)
 * + mu * max(eta, 0), with subgradient
 *
 *   x-part:   grad f + (lambda/(n(1-p))) * sum_{i in I_{>eta}} grad g_i
 *   eta-part: lambda + mu * 1{eta > 0} - lambda * #I_{>eta} / (n(1-p)),
 *
 * where I_{>eta} = {i : g(x, xi_i) > eta}. Ties within 1e-12 of eta count as
 * "=" and stay out of I_{>eta}; any choice in [0,1] for them is a valid
 * subgradient weight.
 */
inline DCOracleOutput phi1_from_gvals(const ProblemOracles& prob, const PenaltyParams& params,
                                      ConstVecView x, double eta, ConstVecView gvals) {
    const std::size_t n = gvals.size();
    const double scale = params.tail_scale(n);

    double tail = 0.0;
    for (double g : gvals) tail += std::max(g - eta, 0.0);
    const double value = prob.objective(x) + params.lambda * (eta + scale * tail) +
                         params.mu * std::max(eta, 0.0);

    DCOracleOutput out{value, Vector(prob.dim + 1, 0.0)};
    VecView xpart(out.subgradient.data(), prob.dim);
    prob.objective_gradient(x, xpart);
    std::size_t above = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gvals[i] > eta + kAtomTol) {
            prob.constraint_gradient_acc(x, prob.scenarios.row(i), params.lambda * scale, xpart);
            ++above;
        }
    }
    out.subgradient[prob.dim] = params.lambda * (1.0 - scale * static_cast<double>(above)) +
                                (eta > 0.0 ? params.mu : 0.0);
    return out;
}

inline DCOracleOutput phi1(const ProblemOracles& prob, const PenaltyParams& params, ConstVecView x,
                           double eta) {
    return phi1_from_gvals(prob, params, x, eta, constraint_values(prob, x));
}

/**
 * Second convex component phi2(x, eta) = lambda * min_s G(x, s)
 * = lambda * superquantile_p(g(x, xi)), with subgradient
 *
 *   x-part: (lambda/(n(1-p))) * (sum_{i in I_{>q}} grad g_i
 *                                + alpha * sum_{i in I_{=q}} grad g_i)
 *   eta-part: 0,
 *
 * where q = Q_p(g(x, xi)) and alpha = (n(1-p) - #I_{>q}) / #I_{=q}, i.e. the
 * tie weight that zeroes the eta-component of the chosen element of dG.
 * alpha is clamped to [0,1].
 */
inline DCOracleOutput phi2_from_gvals(const ProblemOracles& prob, const PenaltyParams& params,
                                      ConstVecView x, ConstVecView gvals) {
    const std::size_t n = gvals.size();
    Sample gsample{Vector(gvals.begin(), gvals.end())};
    const double q = quantile(gsample, params.p);

    double tol = kAtomTol;
    ThresholdCounts c = count_against(gvals, q, tol);
    if (c.equal == 0) {
        // q is always an attained sample value; retry with a relative tolerance.
        tol = 1e-9 * (1.0 + std::abs(q));
        c = count_against(gvals, q, tol);
        if (c.equal == 0)
            throw std::logic_error("phi2: no g-value matches its own quantile within tolerance");
    }
    const double scale = params.tail_scale(n);
    double alpha = ((1.0 - params.p) * static_cast<double>(n) - static_cast<double>(c.above)) /
                   static_cast<double>(c.equal);
    alpha = std::min(std::max(alpha, 0.0), 1.0);

    DCOracleOutput out{params.lambda * superquantile(gsample, params.p),
                       Vector(prob.dim + 1, 0.0)};
    VecView xpart(out.subgradient.data(), prob.dim);
    for (std::size_t i = 0; i < n; ++i) {
        double w = 0.0;
        if (gvals[i] > q + tol)
            w = 1.0;
        else if (gvals[i] >= q - tol)
            w = alpha;
        if (w != 0.0)
            prob.constraint_gradient_acc(x, prob.scenarios.row(i), params.lambda * scale * w,
                                         xpart);
    }
    return out;
}

inline DCOracleOutput phi2(const ProblemOracles& prob, const PenaltyParams& params, ConstVecView x,
                           double /*eta*/) {
    return phi2_from_gvals(prob, params, x, constraint_values(prob, x));
}

/**
 * Argmax of sum_i q_i g_i - (rho/2) (q_i - 1/n)^2 over the capped simplex
 * {0 <= q_i <= 1/(n(1-p)), sum q_i = 1}. The maximizer has the form
 * q_i = clamp(1/n + (g_i - theta)/rho, 0, U) with theta the unique root of
 * sum_i q_i(theta) = 1, located by an exact breakpoint scan (bisection as a
 * safeguard). Feasibility of the result holds to 1e-12.
 */
inline Vector capped_simplex_argmax(ConstVecView gvals, const PenaltyParams& params) {
    params.validate();
    const std::size_t n = gvals.size();
    const double nd = static_cast<double>(n);
    const double rho = params.rho;
    const double cap = params.cap(n);
    if (n == 1) return Vector{1.0};

    const auto weight = [&](double g, double theta) {
        return std::min(std::max(1.0 / nd + (g - theta) / rho, 0.0), cap);
    };
    const auto total = [&](double theta) {
        double s = 0.0, comp = 0.0;  // Kahan summation
        for (double g : gvals) {
            const double y = weight(g, theta) - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        return s;
    };

    // Event list: q_i leaves its cap at theta = g_i - rho*(cap - 1/n) and
    // reaches zero at theta = g_i + rho/n. The total sum(theta) is continuous,
    // nonincreasing and piecewise linear with slope -(#active)/rho; scan the
    // segments in ascending theta, maintaining counts and the active-g sum
    // incrementally, until the segment containing sum = 1 is found.
    struct Event {
        double theta;
        int kind;  // 0: cap -> active, 1: active -> zero
        double g;
    };
    std::vector<Event> events;
    events.reserve(2 * n);
    for (double g : gvals) {
        events.push_back({g - rho * (cap - 1.0 / nd), 0, g});
        events.push_back({g + rho / nd, 1, g});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.theta < b.theta; });

    double theta = events.front().theta - 1.0;
    bool found = nd * cap <= 1.0 + 1e-12;  // p = 0: the uniform vector is the only point
    if (!found) {
        double capped = nd, active = 0.0, sum_g = 0.0;
        const auto segment_sum = [&](double t) {
            return cap * capped + active / nd + (sum_g - active * t) / rho;
        };
        for (std::size_t e = 0; e < events.size() && !found; ++e) {
            if (events[e].kind == 0) {
                capped -= 1.0;
                active += 1.0;
                sum_g += events[e].g;
            } else {
                active -= 1.0;
                sum_g -= events[e].g;
            }
            if (e + 1 < events.size() && events[e + 1].theta == events[e].theta)
                continue;  // fold coincident events into one segment boundary
            const double seg_lo = events[e].theta;
            const double seg_hi = (e + 1 < events.size()) ? events[e + 1].theta : seg_lo + 1.0;
            const double s_lo = segment_sum(seg_lo);
            const double s_hi = segment_sum(seg_hi);
            if (s_lo >= 1.0 - 1e-12 && s_hi <= 1.0 + 1e-12) {
                theta = (active > 0.0) ? (cap * capped + active / nd + sum_g / rho - 1.0) * rho /
                                             active
                                       : 0.5 * (seg_lo + seg_hi);
                found = true;
            }
        }
    }

    if (!found) {
        // Safeguarded bisection over the full breakpoint range.
        double lo = events.front().theta - 1.0, hi = events.back().theta + 1.0;
        for (int it = 0; it < 200; ++it) {
            theta = 0.5 * (lo + hi);
            (total(theta) > 1.0 ? lo : hi) = theta;
        }
    }

    // Newton polish on the (piecewise linear, nonincreasing) total.
    for (int it = 0; it < 3; ++it) {
        const double resid = total(theta) - 1.0;
        if (std::abs(resid) <= 1e-14) break;
        double slope = 0.0;
        for (double g : gvals) {
            const double raw = 1.0 / nd + (g - theta) / rho;
            if (raw > 0.0 && raw < cap) slope -= 1.0 / rho;
        }
        if (slope == 0.0) break;
        theta -= resid / slope;
    }

    Vector q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = weight(gvals[i], theta);
    return q;
}

/// Value, gradient and inner weights of the smoothed second component.
struct SmoothedPhi2 {
    double value;
    Vector gradient;  // size d+1, eta-component exactly 0
    Vector weights;   // the maximizing q
};

/**
 * Smooth global approximation of phi2 obtained by subtracting the proximity
 * penalty (rho/2)||q - 1/n||^2 inside the superquantile's dual representation;
 * satisfies phi2~ <= phi2 <= phi2~ + lambda*rho/2 and
 * grad phi2~ = (lambda * sum_i q_i grad g_i, 0).
 */
inline SmoothedPhi2 smoothed_phi2_from_gvals(const ProblemOracles& prob,
                                             const PenaltyParams& params, ConstVecView x,
                                             ConstVecView gvals, bool with_gradient = true) {
    const std::size_t n = gvals.size();
    Vector q = capped_simplex_argmax(gvals, params);
    double value = 0.0;
    const double uniform = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = q[i] - uniform;
        value += q[i] * gvals[i] - 0.5 * params.rho * dev * dev;
    }
    SmoothedPhi2 out{params.lambda * value, Vector(prob.dim + 1, 0.0), std::move(q)};
    if (with_gradient) {
        VecView xpart(out.gradient.data(), prob.dim);
        for (std::size_t i = 0; i < n; ++i)
            if (out.weights[i] != 0.0)
                prob.constraint_gradient_acc(x, prob.scenarios.row(i),
                                             params.lambda * out.weights[i], xpart);
    }
    return out;
}

inline SmoothedPhi2 smoothed_phi2(const ProblemOracles& prob, const PenaltyParams& params,
                                  ConstVecView x, double /*eta*/) {
    return smoothed_phi2_from_gvals(prob, params, x, constraint_values(prob, x));
}

/**
 * The penalized DC objective phi1 - phi2 (or phi1 - phi2~ when `smoothed`),
 * equal to f(x) + lambda*h(x,eta) + mu*max(eta,0) up to the smoothing gap.
 * The returned direction is the difference of the two components' (sub)gradients.
 */
inline DCOracleOutput penalized_objective(const ProblemOracles& prob, const PenaltyParams& params,
                                          ConstVecView x, double eta, bool smoothed) {
    const Vector gvals = constraint_values(prob, x);
    DCOracleOutput out = phi1_from_gvals(prob, params, x, eta, gvals);
    if (smoothed) {
        const SmoothedPhi2 s2 = smoothed_phi2_from_gvals(prob, params, x, gvals);
        out.value -= s2.value;
        for (std::size_t k = 0; k < out.subgradient.size(); ++k)
            out.subgradient[k] -= s2.gradient[k];
    } else {
        const DCOracleOutput p2 = phi2_from_gvals(prob, params, x, gvals);
        out.value -= p2.value;
        for (std::size_t k = 0; k < out.subgradient.size(); ++k)
            out.subgradient[k] -= p2.subgradient[k];
    }
    return out;
}

}  // namespace ccp
