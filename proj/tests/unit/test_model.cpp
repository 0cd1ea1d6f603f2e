#include "doctest.h"

#include "oracle_values.hpp"

#include "tunnel/errors.hpp"
#include "tunnel/model.hpp"
#include "tunnel/numerics.hpp"

#include <cmath>
#include <limits>

using namespace tunnel;
using doctest::Approx;

TEST_CASE("builtin models: wells, limits and the epsilon = 0 reduction") {
    const Model a = builtin_model("ModelA");
    CHECK(a.V(-1.0) == 0.0);
    CHECK(a.V(1.0) == 0.0);
    CHECK(a.a(0.0) == 0.0);
    CHECK(a.a(1e4) == Approx(1.0).epsilon(1e-7));
    CHECK(a.x_right == -a.x_left);
    CHECK_FALSE(a.b.xi_dependent);

    const Model b0 = builtin_model("ModelB", 0.0);
    for (double x : {-3.1, -1.0, 0.2, 2.7})
        for (double xi : {-4.0, 0.0, 0.5})
            CHECK(b0.b(x, xi) == a.b(x, xi));

    const Model b = builtin_model("ModelB");
    CHECK(b.b.xi_dependent);
    for (double x : {-2.0, -0.3, 0.9}) {
        CHECK(b.b(x, 0.0) == a.V(x));
        CHECK(b.b.xi_derivative(x, 0.0) == Approx(0.2 * x / (1 + x * x)).epsilon(1e-14));
        CHECK(b.b(-x, -0.7) == Approx(b.b(x, 0.7)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(builtin_model("ModelC"), IdentifierError);
}

TEST_CASE("validation passes for the builtin models") {
    for (auto name : {"ModelA", "ModelB"}) {
        const auto rep = validate_model(builtin_model(name));
        for (const auto& c : rep.checks) {
            INFO(name << " " << c.name << ": " << c.detail);
            CHECK(c.passed);
        }
    }
}

TEST_CASE("validation rejects a periodic kinetic symbol") {
    const Model m = expression_model("1 - cos(xi)", "(x^2-1)^2/(1+x^4)", -1.0);
    const auto rep = validate_model(m);
    REQUIRE(rep.find("a_unique_minimum"));
    CHECK_FALSE(rep.find("a_unique_minimum")->passed);
    CHECK_FALSE(rep.all_passed());
}

TEST_CASE("validation rejects an unbounded potential") {
    const Model m = expression_model("xi^2/(1+xi^2)", "(x^2-1)^2", -1.0);
    const auto rep = validate_model(m);
    REQUIRE(rep.find("boundedness"));
    CHECK_FALSE(rep.find("boundedness")->passed);
}

TEST_CASE("validation reports the offending point of a non-finite symbol") {
    const Model m = expression_model("xi^2/(1+xi^2)", "(x^2-1)^2*sqrt(x+4)", -1.0);
    try {
        validate_model(m);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.x() < -4.0);
    }
}

TEST_CASE("far-field limit of ModelA") {
    CHECK(estimate_b_inf(builtin_model("ModelA")) == Approx(1.0).epsilon(1e-4));
}

TEST_CASE("derived constants of ModelA against the symbolic oracle") {
    const auto c = derived_constants(builtin_model("ModelA"));
    CHECK(c.a2 == Approx(oracle::a2).epsilon(1e-10));
    CHECK(c.V2 == Approx(oracle::V2).epsilon(1e-10));
    CHECK(c.c0 == Approx(oracle::c0).epsilon(1e-10));
    CHECK(c.kappa == Approx(oracle::kappa).epsilon(1e-10));
    CHECK(c.S == Approx(oracle::S).epsilon(1e-13));
    CHECK(c.V0 == 1.0);
    CHECK(c.b_inf > 0.0);
    // the 1e-4 limit substitution in the prefactor integral costs ~1e-8
    CHECK(c.log_I == Approx(oracle::log_I).epsilon(1e-7));
    CHECK(c.A == Approx(oracle::A).epsilon(1e-7));
    CHECK(c.c0 == Approx(std::sqrt(c.a2 * c.V2) / 2).epsilon(1e-10));
}

TEST_CASE("action is stable under quadrature refinement") {
    const Model m = builtin_model("ModelA");
    const auto c = derived_constants(m);
    auto root_v = [&](double s) { return std::sqrt(m.V(s)); };
    const double scale = std::sqrt(2.0 / c.a2);
    const double s1 = scale * num::integrate_fixed(root_v, -1, 1, 64);
    const double s2 = scale * num::integrate_fixed(root_v, -1, 1, 128);
    CHECK(std::abs(s2 - s1) / s2 < 1e-10);
    CHECK(std::abs(s2 - c.S) / c.S < 1e-10);
}

TEST_CASE("ModelB shares every constant with ModelA") {
    const auto a = derived_constants(builtin_model("ModelA"));
    const auto b = derived_constants(builtin_model("ModelB"));
    CHECK(a.a2 == b.a2);
    CHECK(a.V2 == b.V2);
    CHECK(a.kappa == b.kappa);
    CHECK(a.S == b.S);
    CHECK(a.A == b.A);
}
