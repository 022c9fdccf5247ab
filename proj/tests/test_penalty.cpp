#include <catch2/catch_amalgamated.hpp>

#include "ccp/penalty.hpp"
#include "ccp/rng.hpp"
#include "ccp/verify.hpp"

using namespace ccp;
using Catch::Approx;

namespace {

/// d-dimensional problem with f = 0 and g(x, xi) = x'xi.
ProblemOracles zero_objective_linear(ScenarioSet scen) {
    ProblemOracles prob;
    prob.dim = scen.dim();
    prob.objective = [](ConstVecView) { return 0.0; };
    prob.objective_gradient = [](ConstVecView, VecView out) {
        for (auto& v : out) v = 0.0;
    };
    prob.constraint = [](ConstVecView x, ConstVecView z) { return dot(x, z); };
    prob.constraint_gradient_acc = [](ConstVecView, ConstVecView z, double c, VecView acc) {
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += c * z[j];
    };
    prob.box = BoxConstraints::unbounded(scen.dim());
    prob.scenarios = std::move(scen);
    return prob;
}

/// Scalar problem g(x, xi) = x - xi over the given realizations.
ProblemOracles shift_problem(Vector xis) {
    const std::size_t n = xis.size();
    ProblemOracles prob;
    prob.dim = 1;
    prob.objective = [](ConstVecView) { return 0.0; };
    prob.objective_gradient = [](ConstVecView, VecView out) { out[0] = 0.0; };
    prob.constraint = [](ConstVecView x, ConstVecView z) { return x[0] - z[0]; };
    prob.constraint_gradient_acc = [](ConstVecView, ConstVecView, double c, VecView acc) {
        acc[0] += c;
    };
    prob.box = BoxConstraints::unbounded(1);
    prob.scenarios = ScenarioSet(n, 1, std::move(xis));
    return prob;
}

}  // namespace

TEST_CASE("delta constant") {
    CHECK(delta(10, 0.8) == Approx(0.5).margin(1e-15));
    CHECK(delta(10, 0.85) == Approx(1.0 / 3).margin(1e-12));
    CHECK(delta(4, 0.5) == Approx(0.5).margin(1e-15));
    CHECK(delta(4, 0.0) == Approx(0.25).margin(1e-15));  // 0 is on the grid
    CHECK(delta(5, 0.99) == Approx((0.99 - 0.8) / 0.01).margin(1e-9));
    CHECK_THROWS_AS(delta(3, 1.0), std::invalid_argument);
}

TEST_CASE("lower objective G") {
    auto prob = shift_problem({0.0, -10.0});  // g-values at x=0: {0, 10}
    const PenaltyParams params{0.5, 1.0, 1.0, 1e-2};
    CHECK(lower_objective(prob, params, Vector{0.0}, 0.0) == Approx(10.0));

    const Vector gv{1, 2, 3, 4};
    CHECK(lower_objective_value(params, gv, 5.0) == Approx(5.0));
    CHECK(lower_objective_value(params, gv, 2.0) == Approx(3.5));  // 2 + 2*(0+0+1+2)/4

    // G at eta equals the rockafellar objective of the g-value sample.
    Sample s{gv};
    for (double eta : {-1.0, 0.7, 2.5, 9.0})
        CHECK(lower_objective_value(params, gv, eta) ==
              Approx(rockafellar_objective(s, 0.5, eta)).margin(1e-12));
}

TEST_CASE("value function h") {
    const PenaltyParams params{0.5, 1.0, 1.0, 1e-2};
    Sample s{Vector{1, 2, 3, 4}};
    CHECK(value_function_from_sample(params, s, 2.5) == 0.0);
    CHECK(value_function_from_sample(params, s, 4.0) == Approx(0.5).margin(1e-12));
    // Frozen from the eta-grid oracle: G(0) = 5, min G = 3.5.
    const auto grid = verify::grid_min_rockafellar(s.sorted(), 0.5, 20001);
    CHECK(lower_objective_value(params, s.sorted(), 0.0) == Approx(5.0).margin(1e-12));
    CHECK(value_function_from_sample(params, s, 0.0) ==
          Approx(lower_objective_value(params, s.sorted(), 0.0) - grid.min_value).margin(1e-9));
    CHECK(value_function_from_sample(params, s, 0.0) == Approx(1.5).margin(1e-9));

    // Nonnegative; zero exactly on the argmin interval.
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(20);
        Vector values(n);
        for (auto& v : values) v = rng.uniform(-5.0, 5.0);
        const double p = rng.uniform() * 0.99;
        Sample samp{values};
        const double eta = rng.uniform(samp.min() - 5.0, samp.max() + 5.0);
        const PenaltyParams pp{p, 1.0, 1.0, 1e-2};
        const double h = value_function_from_sample(pp, samp, eta);
        CHECK(h >= 0.0);
        const Interval S = argmin_interval(samp, p);
        if (S.distance(eta) <= 1e-12) CHECK(h <= 1e-10);
        if (h <= 1e-12) CHECK(S.distance(eta) <= 1e-6);
    }
}

TEST_CASE("phi1 value and subgradient on the two-scenario shift instance") {
    auto prob = shift_problem({0.0, 1.0});
    const PenaltyParams params{0.5, 1.0, 1.0, 1e-2};

    const DCOracleOutput out = phi1(prob, params, Vector{2.0}, 0.0);
    CHECK(out.value == Approx(3.0).margin(1e-12));
    CHECK(out.subgradient[0] == Approx(2.0).margin(1e-12));
    CHECK(out.eta_component() == Approx(-1.0).margin(1e-12));

    // Finite differences at a genuinely smooth nearby point (eta away from
    // the max(eta,0) kink and from every g-value).
    const Vector u{2.0, -0.3};
    const auto f1 = [&](ConstVecView v) {
        return phi1(prob, params, v.first(1), v.back()).value;
    };
    const DCOracleOutput smooth = phi1(prob, params, u, -0.3);
    const Vector fd = verify::central_difference(f1, u);
    CHECK(verify::gradients_match(fd, smooth.subgradient));

    // eta above all g-values and positive: indicator set empty.
    const DCOracleOutput above = phi1(prob, params, Vector{2.0}, 5.0);
    CHECK(above.eta_component() == Approx(params.lambda + params.mu).margin(1e-12));

    // eta below all g-values and negative: all indicators on.
    const DCOracleOutput below = phi1(prob, params, Vector{2.0}, -3.0);
    CHECK(below.eta_component() == Approx(-params.lambda).margin(1e-12));
}

TEST_CASE("phi2 subgradient: linear constraint, ties, and the p=0 mean case") {
    Rng rng(23);
    ScenarioSet scen(6, 2, [&] {
        Vector d(12);
        for (auto& v : d) v = rng.normal();
        return d;
    }());
    auto prob = zero_objective_linear(std::move(scen));
    const PenaltyParams params{0.55, 1.0, 2.0, 1e-2};

    for (int trial = 0; trial < 20; ++trial) {
        const Vector x{rng.uniform(0.5, 2.0), rng.uniform(-2.0, -0.5)};
        Vector u = x;
        u.push_back(0.0);
        const auto f2 = [&](ConstVecView v) {
            return phi2(prob, params, v.first(2), v.back()).value;
        };
        const DCOracleOutput out = phi2(prob, params, x, 0.0);
        CHECK(out.eta_component() == 0.0);
        CHECK(verify::gradients_match(verify::central_difference(f2, u), out.subgradient));
    }

    // All g-values equal: the subgradient is the lambda-scaled mean gradient.
    auto flat = zero_objective_linear(ScenarioSet(3, 1, {1.0, 1.0, 1.0}));
    const PenaltyParams pflat{0.4, 1.0, 2.0, 1e-2};
    const DCOracleOutput oflat = phi2(flat, pflat, Vector{3.0}, 0.0);
    CHECK(oflat.value == Approx(pflat.lambda * 3.0).margin(1e-12));
    CHECK(oflat.subgradient[0] == Approx(pflat.lambda * 1.0).margin(1e-12));

    // p = 0: superquantile reduces to the mean, gradient to the mean gradient.
    auto lin = zero_objective_linear(ScenarioSet(4, 1, {1.0, 2.0, 3.0, 4.0}));
    const PenaltyParams p0{0.0, 1.0, 2.0, 1e-2};
    const DCOracleOutput o0 = phi2(lin, p0, Vector{2.0}, 0.0);
    CHECK(o0.value == Approx(p0.lambda * 5.0).margin(1e-12));          // mean g = 5
    CHECK(o0.subgradient[0] == Approx(p0.lambda * 2.5).margin(1e-12)); // mean xi = 2.5
}

TEST_CASE("capped simplex maximizer") {
    CHECK(capped_simplex_argmax(Vector{0, 0}, {0.5, 1, 1, 1.0}) == Vector{0.5, 0.5});

    const Vector q1 = capped_simplex_argmax(Vector{0, 10}, {0.5, 1, 1, 1.0});
    CHECK(q1[0] == Approx(0.0).margin(1e-12));
    CHECK(q1[1] == Approx(1.0).margin(1e-12));

    const Vector q2 = capped_simplex_argmax(Vector{0, 10}, {0.25, 1, 1, 1.0});
    CHECK(q2[0] == Approx(1.0 / 3).margin(1e-10));
    CHECK(q2[1] == Approx(2.0 / 3).margin(1e-10));

    // Brute-force cross-check on random small instances.
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.below(3);
        Vector gvals(n);
        for (auto& g : gvals) g = rng.uniform(-4.0, 4.0);
        const PenaltyParams params{rng.uniform() * 0.9, 1.0, 1.0,
                                   std::pow(10.0, rng.uniform(-2.0, 1.0))};
        const Vector mine = capped_simplex_argmax(gvals, params);
        const Vector brute = verify::brute_force_capped_simplex(gvals, params);
        for (std::size_t i = 0; i < n; ++i) CHECK(mine[i] == Approx(brute[i]).margin(1e-6));
    }

    // Feasibility at larger sizes, including p on the grid I_n.
    for (double p : {0.0, 0.5, 0.8, 0.9371}) {
        Vector gvals(1000);
        for (auto& g : gvals) g = rng.normal() * 7.0;
        const PenaltyParams params{p, 1.0, 1.0, 1e-2};
        const Vector q = capped_simplex_argmax(gvals, params);
        double sum = 0.0;
        for (double v : q) {
            CHECK(v >= -1e-12);
            CHECK(v <= params.cap(q.size()) + 1e-12);
            sum += v;
        }
        CHECK(sum == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("smoothed phi2: heavy regularization recovers the mean") {
    Rng rng(37);
    ScenarioSet scen(8, 1, [&] {
        Vector d(8);
        for (auto& v : d) v = rng.normal();
        return d;
    }());
    auto prob = zero_objective_linear(std::move(scen));
    const PenaltyParams params{0.6, 1.0, 2.0, 1e6};

    const Vector x{1.3};
    const Vector gvals = constraint_values(prob, x);
    double mean = 0.0;
    for (double g : gvals) mean += g / static_cast<double>(gvals.size());

    const SmoothedPhi2 sm = smoothed_phi2(prob, params, x, 0.0);
    for (double w : sm.weights) CHECK(w == Approx(1.0 / 8).margin(1e-5));
    CHECK(sm.value == Approx(params.lambda * mean).margin(1e-3));
    CHECK(sm.gradient.back() == 0.0);
}

TEST_CASE("smoothing sandwich and gradient against finite differences") {
    Rng rng(41);
    ScenarioSet scen(12, 2, [&] {
        Vector d(24);
        for (auto& v : d) v = rng.normal();
        return d;
    }());
    auto prob = zero_objective_linear(std::move(scen));
    const PenaltyParams params{0.7, 1.0, 2.0, 1e-2};

    for (int trial = 0; trial < 25; ++trial) {
        const Vector x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        Vector u = x;
        u.push_back(0.0);
        const SmoothedPhi2 sm = smoothed_phi2(prob, params, x, 0.0);
        const double exact = phi2(prob, params, x, 0.0).value;
        CHECK(sm.value <= exact + 1e-10);
        CHECK(exact <= sm.value + params.lambda * params.rho / 2.0 + 1e-10);

        const auto fs = [&](ConstVecView v) {
            return smoothed_phi2(prob, params, v.first(2), v.back()).value;
        };
        CHECK(verify::gradients_match(verify::central_difference(fs, u), sm.gradient, 1e-4));
    }
}

TEST_CASE("penalized objective composes the pieces") {
    auto prob = shift_problem({1.0, 2.0, 3.0, 4.0});
    const PenaltyParams params{0.5, 2.0, 3.0, 1e-2};

    // g-values at x = 0 are {-1,-2,-3,-4} + ... actually x - xi; at x = 0.5:
    // {-0.5,-1.5,-2.5,-3.5}; the argmin interval is [Q_p, successor] and
    // contains eta = -2 with eta <= 0, so the unsmoothed value reduces to f.
    const Vector x{0.5};
    Sample s{constraint_values(prob, x)};
    const Interval S = argmin_interval(s, params.p);
    const double eta = 0.5 * (S.lo + S.hi);
    REQUIRE(eta <= 0.0);
    const DCOracleOutput exact = penalized_objective(prob, params, x, eta, false);
    CHECK(exact.value == Approx(prob.objective(x)).margin(1e-12));

    // Cross-check of the two computation paths at random points.
    Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector xx{rng.uniform(-3.0, 6.0)};
        const double et = rng.uniform(-6.0, 6.0);
        const DCOracleOutput dc = penalized_objective(prob, params, xx, et, false);
        const double direct = prob.objective(xx) + params.lambda * value_function(prob, params, xx, et) +
                              params.mu * std::max(et, 0.0);
        CHECK(dc.value == Approx(direct).margin(1e-10));

        // Smoothed variant stays within the smoothing gap.
        const DCOracleOutput sm = penalized_objective(prob, params, xx, et, true);
        CHECK(sm.value >= dc.value - 1e-10);
        CHECK(sm.value <= dc.value + params.lambda * params.rho / 2.0 + 1e-10);
    }
}

TEST_CASE("theorem-2 error bound on random shift instances") {
    Rng rng(47);
    std::size_t checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(30);
        Vector xis(n);
        for (auto& v : xis) v = rng.uniform(-4.0, 4.0);
        auto prob = shift_problem(xis);
        // Stay within the bound's regime p <= (n-1)/n; above it the quantile
        // saturates at the sample maximum and the inequality degrades to rate 1.
        const double p = (trial % 2 == 0)
                             ? static_cast<double>(rng.below(n)) / static_cast<double>(n)
                             : rng.uniform() * (static_cast<double>(n - 1) / static_cast<double>(n));
        const PenaltyParams params{p, 1.0, 1.0, 1e-2};
        const Vector x{rng.uniform(-3.0, 3.0)};
        Sample s{constraint_values(prob, x)};
        const double eta = rng.uniform(s.min() - 4.0, s.max() + 4.0);
        const double h = value_function_from_sample(params, s, eta);
        const double dist = argmin_interval(s, p).distance(eta);
        CHECK(h >= delta(n, p) * dist - 1e-10);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("penalty parameter validation") {
    CHECK_THROWS_AS((PenaltyParams{0.5, 0.0, 1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PenaltyParams{1.0, 1.0, 1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PenaltyParams{0.5, 1.0, 1.0, 0.0}.validate()), std::invalid_argument);
}
