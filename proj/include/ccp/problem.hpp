#pragma once

#include <functional>
#include <string>

#include "ccp/scenarios.hpp"
#include "ccp/types.hpp"

namespace ccp {

/**
 * First-order description of the chance-constrained program
 *
 *   min f(x)  s.t.  P[g(x, xi) <= 0] >= p,  x in box,
 *
 * over a finite scenario set. f and g(., xi) are convex in x (caller
 * contract); the gradient callbacks may return any subgradient at nonsmooth
 * points. `constraint_gradient_acc` accumulates w * dg(x, xi)/dx into `acc`
 * so scenario sums avoid per-scenario allocations.
 */
struct ProblemOracles {
    std::size_t dim;
    std::function<double(ConstVecView x)> objective;
    std::function<void(ConstVecView x, VecView grad_out)> objective_gradient;
    std::function<double(ConstVecView x, ConstVecView xi)> constraint;
    std::function<void(ConstVecView x, ConstVecView xi, double w, VecView acc)>
        constraint_gradient_acc;
    BoxConstraints box;
    ScenarioSet scenarios;

    std::size_t scenario_count() const { return scenarios.size(); }

    Vector objective_grad(ConstVecView x) const {
        Vector g(dim, 0.0);
        objective_gradient(x, g);
        return g;
    }
};

/// Evaluates g(x, xi_i) for every scenario, in index order.
inline void constraint_values(const ProblemOracles& prob, ConstVecView x, VecView out) {
    for (std::size_t i = 0; i < prob.scenarios.size(); ++i) {
        const double v = prob.constraint(x, prob.scenarios.row(i));
        if (!std::isfinite(v))
            throw std::runtime_error("constraint oracle returned non-finite value at scenario " +
                                     std::to_string(i));
        out[i] = v;
    }
}

inline Vector constraint_values(const ProblemOracles& prob, ConstVecView x) {
    Vector out(prob.scenarios.size());
    constraint_values(prob, x, out);
    return out;
}

/// Empirical probability P[g <= 0]: the fraction of nonpositive entries.
inline double empirical_probability(ConstVecView vals) {
    std::size_t count = 0;
    for (double v : vals) count += (v <= 0.0);
    return static_cast<double>(count) / static_cast<double>(vals.size());
}

}  // namespace ccp
