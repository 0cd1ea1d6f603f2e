#include "doctest.h"

#include "common.hpp"
#include "oracle_values.hpp"

#include "tunnel/errors.hpp"
#include "tunnel/tunneling.hpp"

#include <cmath>

using namespace tunnel;
using doctest::Approx;

namespace {

struct Point {
    OperatorMatrix L;
    SplitMeasurement split;
    std::vector<Eigenpair> one;
    InteractionReport rep;
};

const Point& point_h005(const SweepContext& ctx) {
    auto build = [&] {
        Point p;
        const Grid g = make_grid(8, 512, 0.05);
        p.L = assemble_L(ctx.model, g);
        p.split = measured_splitting(p.L);
        p.one = lowest_eigenpairs(assemble_onewell(ctx.model, g, Side::left, ctx.seal), 3);
        p.rep = interaction_term(p.L, p.split, p.one[0], ctx.cutoffs);
        return p;
    };
    if (&ctx == &testing::model_a_context()) {
        static const Point a = build();
        return a;
    }
    static const Point b = build();
    return b;
}

}  // namespace

TEST_CASE("cutoff pair") {
    const auto c = make_cutoffs(3.2, 1.0, 0.4);
    CHECK(c.chi_left(-1.0) == 1.0);
    CHECK(c.chi_left(-3.2) == 1.0);
    CHECK(c.chi_left(0.2) == 1.0);
    CHECK(c.chi_left(0.6) == 0.0);
    CHECK(c.chi_left(-6.4) == 0.0);
    for (double x : {-5.0, -0.3, 0.4, 0.55})
        CHECK(c.chi_right(x) == c.chi_left(-x));
    for (double x = -7.0; x < 1.0; x += 0.013) {
        CHECK(c.chi_left(x) >= 0.0);
        CHECK(c.chi_left(x) <= 1.0);
    }
    CHECK_THROWS_AS(make_cutoffs(0.1, 1.0, 0.6), ConfigError);
}

TEST_CASE("measured splitting at h = 0.05") {
    const auto& p = point_h005(testing::model_a_context());
    CHECK(p.split.lambda1 == Approx(oracle::lambda1_h005).epsilon(1e-12));
    CHECK(p.split.gap12 == Approx(oracle::gap12_h005).epsilon(1e-9));
    CHECK(p.split.gap12 > 0.0);
    CHECK_FALSE(p.split.precision_flag);
    CHECK(p.split.gap23 / std::pow(0.05, 1.5) >= 1.0);
    CHECK(p.split.pairs.size() == 3u);
}

TEST_CASE("double-well ground level sits below the one-well level by less than the gap") {
    const auto& p = point_h005(testing::model_a_context());
    CHECK(p.one[0].value == Approx(oracle::onewell1_h005).epsilon(1e-11));
    CHECK(p.split.lambda1 <= p.one[0].value);
    CHECK(p.one[0].value - p.split.lambda1 < p.split.gap12);
}

TEST_CASE("interaction term against the measured gap") {
    const auto& ctx = testing::model_a_context();
    const auto& p = point_h005(ctx);
    const double S = ctx.constants.S;
    CHECK(std::abs(2 * std::abs(p.rep.w_h) / p.split.gap12 - 1.0) <= 0.3);
    CHECK(std::abs(p.rep.overlap) <= std::exp(-0.8 * S / std::sqrt(0.05)));
    // ModelA has a real symmetric matrix, so w_h is real
    CHECK(std::abs(p.rep.w_h.imag()) <= 1e-12 * std::abs(p.rep.w_h));
    CHECK(p.rep.mu == p.one[0].value);
    CHECK(p.rep.measured_gap == p.split.gap12);
}

TEST_CASE("ModelB interaction term is real") {
    // the reflection U commutes with L_h and f_r = U f_l, so <(L - mu) f_l, U f_l>
    // is real whenever L is Hermitian and U-invariant
    const auto& ctx = testing::model_b_context();
    const auto& p = point_h005(ctx);
    CHECK(std::abs(p.rep.w_h.imag()) <= 1e-12 * std::abs(p.rep.w_h));
    CHECK(std::abs(2 * std::abs(p.rep.w_h) / p.split.gap12 - 1.0) <= 0.3);
}

TEST_CASE("Gram reduction") {
    const auto& p = point_h005(testing::model_a_context());
    const auto& gr = p.rep.gram;
    CHECK(std::abs(gr.G(0, 0).real() - 1.0) <= 0.01);
    CHECK((gr.G - gr.G.adjoint()).norm() == 0.0);
    CHECK((gr.L - gr.L.adjoint()).norm() == 0.0);
    CHECK(std::abs(gr.gap / p.split.gap12 - 1.0) <= 0.05);

    const Eigen::VectorXcd f = p.one[0].vector;
    CHECK_THROWS_AS(gram_reduction(f, f, p.split.pairs, p.L, p.rep.mu), DegeneracyError);
    const std::vector<Eigenpair> only_one(p.split.pairs.begin(), p.split.pairs.begin() + 1);
    CHECK_THROWS_AS(gram_reduction(f, f, only_one, p.L, p.rep.mu), ShapeError);
}

TEST_CASE("effective-operator prediction at h = 0.05") {
    const auto& ctx = testing::model_a_context();
    const double thm = predicted_splitting_theorem(ctx.model, ctx.constants.a2, 8, 1024, 0.05);
    CHECK(thm == Approx(oracle::thm_pred_h005).epsilon(1e-9));
    const double ratio = point_h005(ctx).split.gap12 / thm;
    CHECK(ratio >= 0.7);
    CHECK(ratio <= 1.3);

    const double formula = 0.05 * classical_splitting_formula(ctx.constants, std::sqrt(0.05));
    CHECK(std::abs(thm / formula - 1.0) <= 0.4);
}

TEST_CASE("interaction asymptotic") {
    const auto& c = testing::model_a_context().constants;
    for (double h : {0.09, 0.05, 0.02})
        CHECK(2 * interaction_asymptotic(c, h) ==
              Approx(h * classical_splitting_formula(c, std::sqrt(h))).epsilon(1e-12));

    // log(w / h^{5/4}) is linear in 1/sqrt h with slope -S
    auto y = [&](double h) { return std::log(interaction_asymptotic(c, h) / std::pow(h, 1.25)); };
    const double slope = (y(0.02) - y(0.09)) / (1 / std::sqrt(0.02) - 1 / std::sqrt(0.09));
    CHECK(-slope == Approx(c.S).epsilon(0.01));

    const auto& cb = testing::model_b_context().constants;
    CHECK(interaction_asymptotic(cb, 0.05) == interaction_asymptotic(c, 0.05));
}
