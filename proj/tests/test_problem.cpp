#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ccp/benchmarks.hpp"
#include "ccp/empirical.hpp"
#include "ccp/problem.hpp"
#include "ccp/rng.hpp"
#include "ccp/scenarios.hpp"

using namespace ccp;
using Catch::Approx;

namespace {

ProblemOracles linear_problem(ScenarioSet scen) {
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

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("constraint_values evaluates scenario-wise") {
    auto prob = linear_problem(ScenarioSet(2, 2, {1, 2, 3, 4}));
    CHECK(constraint_values(prob, Vector{1, 0}) == Vector{1, 3});
    CHECK(constraint_values(prob, Vector{0, 0}) == Vector{0, 0});

    auto norm = norm_problem(2, 7, 5);
    const Vector at_zero = constraint_values(norm.prob, Vector{0, 0});
    for (double v : at_zero) CHECK(v == -100.0);
}

TEST_CASE("constraint_values reports the failing scenario") {
    auto prob = linear_problem(ScenarioSet(2, 1, {1, 2}));
    prob.constraint = [](ConstVecView, ConstVecView z) {
        return z[0] > 1.5 ? kInf : 0.0;
    };
    try {
        constraint_values(prob, Vector{0.0});
        FAIL("expected an evaluation error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("scenario 1") != std::string::npos);
    }
}

TEST_CASE("empirical probability counts nonpositive values inclusively") {
    CHECK(empirical_probability(Vector{-1, -1, 1, 1}) == 0.5);
    CHECK(empirical_probability(Vector{-1, -2, -3}) == 1.0);
    CHECK(empirical_probability(Vector{0.0, 0.0001}) == 0.5);
}

TEST_CASE("empirical probability agrees with the ecdf at zero") {
    Rng rng(5);
    auto prob = linear_problem(ScenarioSet(2, 2, {1, 2, 3, 4}));
    for (int trial = 0; trial < 20; ++trial) {
        const Vector x{rng.normal(), rng.normal()};
        const Vector vals = constraint_values(prob, x);
        CHECK(empirical_probability(vals) == ecdf(Sample{vals}, 0.0));
    }
}

TEST_CASE("scenario files parse, reject malformed input, and round-trip") {
    const auto path = temp_file("ccp_scen_basic.csv");
    std::ofstream(path) << "1,2\n3,4\n";
    const ScenarioSet s = load_scenarios(path.string());
    CHECK(s.size() == 2);
    CHECK(s.dim() == 2);
    CHECK(s.row(1)[0] == 3.0);

    std::ofstream(path) << "a,b\n1,2\n";
    const ScenarioSet withhdr = load_scenarios(path.string(), true);
    CHECK(withhdr.size() == 1);

    std::ofstream(path) << "1,2\n3\n";
    try {
        load_scenarios(path.string());
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    std::ofstream(path) << "1,zzz\n";
    CHECK_THROWS_AS(load_scenarios(path.string()), std::runtime_error);

    std::ofstream(path) << "";
    CHECK_THROWS_AS(load_scenarios(path.string()), std::runtime_error);

    // Round-trip idempotence on the numeric payload.
    Rng rng(11);
    Vector data(6 * 3);
    for (auto& v : data) v = rng.normal() * std::pow(10.0, rng.uniform(-8.0, 8.0));
    const ScenarioSet original(6, 3, data);
    save_scenarios(path.string(), original);
    const ScenarioSet reloaded = load_scenarios(path.string());
    REQUIRE(reloaded.size() == original.size());
    REQUIRE(reloaded.dim() == original.dim());
    for (std::size_t i = 0; i < data.size(); ++i)
        CHECK(reloaded.flat()[i] == original.flat()[i]);  // bit-exact

    std::filesystem::remove(path);
}

TEST_CASE("scenario set validation") {
    CHECK_THROWS_AS(ScenarioSet(0, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioSet(1, 2, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioSet(1, 1, {kInf}), std::invalid_argument);
    CHECK(ScenarioSet(3, 1, {1, 2, 3}).probability() == Approx(1.0 / 3));
}
