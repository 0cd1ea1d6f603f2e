#include "doctest.h"

#include "common.hpp"
#include "oracle_values.hpp"

#include "tunnel/errors.hpp"
#include "tunnel/spectra.hpp"
#include "tunnel/wkb.hpp"

#include <cmath>
#include <utility>
#include <vector>

using namespace tunnel;
using doctest::Approx;

namespace {

std::vector<double> samples(double lo, double hi, int n, double avoid, double radius) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        if (std::abs(x - avoid) >= radius) xs.push_back(x);
    }
    return xs;
}

}  // namespace

TEST_CASE("sealing function shape and validation") {
    const Model m = builtin_model("ModelA");
    const auto k = sealing_function(m, 0.4, 2.0);
    CHECK(k(1.0) == Approx(2.0 * std::exp(-1.0)));
    CHECK(k(0.6) == 0.0);
    CHECK(k(1.4) == 0.0);
    CHECK(k(-1.0) == 0.0);
    CHECK(k(3.0) == 0.0);
    CHECK(k.support_lo() == Approx(0.6));
    CHECK(sealing_function(m).height == Approx(2.0 * m.V(0.0)));

    // the sealed potential vanishes only at the left well
    for (double x = -5; x <= 5; x += 1e-3)
        if (std::abs(x + 1.0) > 0.05) CHECK(sealed_potential(m, k, Side::left, x) > 1e-4);
    CHECK(sealed_potential(m, k, Side::left, -1.0) == 0.0);
    CHECK(sealed_potential(m, k, Side::right, 1.0) == 0.0);

    CHECK_THROWS_AS(sealing_function(m, 0.4, 1e-6), ConstructionError);
    CHECK_THROWS_AS(sealing_function(m, 1.5), ConfigError);
    CHECK_THROWS_AS(sealing_function(m, 0.4, -1.0), ConfigError);
}

TEST_CASE("one-well operators") {
    const auto& ctx = testing::model_a_context();
    const Grid g = make_grid(8, 512, 0.05);
    const auto Ml = assemble_onewell(ctx.model, g, Side::left, ctx.seal);
    const auto Mr = assemble_onewell(ctx.model, g, Side::right, ctx.seal);
    const auto el = lowest_eigenpairs(Ml, 4);
    const auto er = lowest_eigenpairs(Mr, 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(el[i].value - er[i].value) <= 1e-10);
    CHECK(el[0].value == Approx(oracle::onewell1_h005).epsilon(1e-11));
    CHECK(el[1].value == Approx(oracle::onewell2_h005).epsilon(1e-11));
    CHECK(el[2].value == Approx(oracle::onewell3_h005).epsilon(1e-11));

    SealingFunction flat = ctx.seal;
    flat.height = 0.0;
    const auto M0 = assemble_onewell(ctx.model, g, Side::left, flat);
    CHECK((M0.entries - assemble_L(ctx.model, g).entries).norm() == 0.0);

    // form monotonicity
    const auto ed = lowest_eigenpairs(assemble_L(ctx.model, g), 4);
    for (int i = 0; i < 4; ++i) CHECK(ed[i].value <= el[i].value);
}

TEST_CASE("agmon phase against the quadrature oracle") {
    const auto& ctx = testing::model_a_context();
    const AgmonPhase& ph = *ctx.phase;
    CHECK(ph(-1.0) == 0.0);
    CHECK(ph(1.0) == Approx(oracle::phi_xr).epsilon(1e-12));
    CHECK(ph.A_window() == Approx(oracle::A_window).epsilon(1e-10));
    CHECK(ph.second_derivative_at_well() == Approx(std::sqrt(2.0)).epsilon(1e-12));

    // the seal vanishes on [x_l, x_r - eta], so Phi there is the unsealed action
    const double unsealed =
        std::sqrt(2.0 / ctx.constants.a2) *
        num::integrate([&](double s) { return std::sqrt(ctx.model.V(s)); }, -1.0, 0.6).value;
    CHECK(ph(0.6) == Approx(unsealed).epsilon(1e-12));
    // and the sealed action exceeds S
    CHECK(ph(1.0) > ctx.constants.S);

    // Phi exceeds Phi(x_r) outside the window and nowhere inside it on the left
    CHECK(ph(-ph.A_window() - 1e-6) > ph(1.0));
    CHECK(ph(-ph.A_window() + 1e-6) < ph(1.0));

    const AgmonPhase right(ctx.model, ctx.constants, ctx.seal, Side::right);
    for (double x : {-2.3, -0.4, 0.0, 1.0, 3.1}) CHECK(right(x) == ph(-x));
    CHECK(right.x_well() == 1.0);
}

TEST_CASE("eikonal identity on the grid") {
    const auto& ctx = testing::model_a_context();
    const Grid g = make_grid(8, 512, 0.05);
    CHECK(eikonal_residual(*ctx.phase, g.x) <= 1e-8);
    const AgmonPhase right(ctx.model, ctx.constants, ctx.seal, Side::right);
    CHECK(eikonal_residual(right, g.x) <= 1e-8);
}

TEST_CASE("truncated phase properties") {
    const auto& ctx = testing::model_a_context();
    const AgmonPhase& ph = *ctx.phase;
    const double A = ph.A_window();
    const Grid g = make_grid(8, 512, 0.05);
    for (double x : g.x) {
        const double t = ph.truncated(x);
        CHECK(t <= ph(x) + 1e-13);
        const double dt = num::derivative1([&](double s) { return ph.truncated(s); }, x, 1e-3);
        const double dp = ph.derivative(x);
        CHECK(std::abs(dt) <= std::abs(dp) + 1e-8);
        CHECK((x + 1.0) * dt >= -1e-8);
        if (std::abs(x) <= A) CHECK(t == Approx(ph(x)).epsilon(1e-12));
    }
    CHECK(ph.truncated(2 * A + 0.1) == Approx(ph.truncated(2 * A + 3.0)).epsilon(1e-13));
    CHECK(ph.truncated(-2 * A - 0.1) == Approx(ph.truncated(-2 * A - 3.0)).epsilon(1e-13));
}

TEST_CASE("leading amplitude") {
    const auto& a = testing::model_a_context();
    const auto& b = testing::model_b_context();
    const LeadingAmplitude& ua = *a.amplitude;
    const LeadingAmplitude& ub = *b.amplitude;
    const double pref = std::pow(std::sqrt(2.0) / M_PI, 0.25);
    CHECK(ua(-1.0).real() == Approx(pref).epsilon(1e-14));
    CHECK(ua(-1.0).imag() == 0.0);
    CHECK(std::abs(ua(0.0)) == Approx(oracle::u0_abs).epsilon(1e-8));
    CHECK(std::arg(ub(0.0)) == Approx(oracle::u0_argB).epsilon(1e-12));
    const Grid g = make_grid(8, 512, 0.05);
    for (double x : g.x) {
        CHECK(ua(x).imag() == 0.0);
        CHECK(std::abs(std::abs(ub(x)) - std::abs(ua(x))) <= 1e-10 * std::abs(ua(x)));
    }
    CHECK(leading_amplitude(a.model, *a.phase, 0.3) == ua(0.3));
}

TEST_CASE("quantization condition") {
    const auto& ctx = testing::model_a_context();
    const double lam3 = ctx.constants.c0;  // n = 1
    const double q = lam3 / (ctx.constants.a2 * ctx.phase->second_derivative_at_well()) - 0.5;
    CHECK(std::abs(q) <= 1e-10);
    const double lam3_n3 = 5 * ctx.constants.c0;
    CHECK(lam3_n3 / (ctx.constants.a2 * ctx.phase->second_derivative_at_well()) - 0.5 ==
          Approx(2.0).epsilon(1e-10));
}

TEST_CASE("transport equation") {
    for (const auto* ctx : {&testing::model_a_context(), &testing::model_b_context()}) {
        const auto xs = samples(-1.8, -0.2, 161, -1.0, 1e-3);
        const double r = transport_residual(ctx->model, ctx->constants, *ctx->phase, xs);
        INFO(ctx->model.name);
        CHECK(r <= 1e-6);

        // a non-solution leaves a residual of order c0 near the well
        auto one = [](double) { return cd(1.0); };
        const double bad = transport_residual(ctx->model, ctx->constants, *ctx->phase, one, xs);
        CHECK(bad >= 0.1 * ctx->constants.c0);

        // linearity
        const LeadingAmplitude& u = *ctx->amplitude;
        auto twice = [&](double x) { return 2.0 * u(x); };
        const double r2 = transport_residual(ctx->model, ctx->constants, *ctx->phase, twice, xs);
        const double r1 = transport_residual(ctx->model, ctx->constants, *ctx->phase,
                                             [&](double x) { return u(x); }, xs);
        CHECK(r2 == Approx(2.0 * r1).epsilon(1e-9));
    }
}

TEST_CASE("interaction flux is constant between the wells") {
    for (const auto* ctx : {&testing::model_a_context(), &testing::model_b_context()}) {
        const AgmonPhase right(ctx->model, ctx->constants, ctx->seal, Side::right);
        const LeadingAmplitude ur(ctx->model, right);
        const LeadingAmplitude& ul = *ctx->amplitude;
        const double eta = ctx->seal.eta;
        const cd ref = ctx->phase->derivative(0.0) * ul(0.0) * std::conj(ur(0.0));
        double worst = 0.0;
        for (double x : samples(-1.0 + eta + 1e-3, 1.0 - eta - 1e-3, 201, 1e9, 0.0)) {
            const cd v = ctx->phase->derivative(x) * ul(x) * std::conj(ur(x));
            worst = std::max(worst, std::abs(v - ref) / std::abs(ref));
        }
        INFO(ctx->model.name);
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("wkb eigenvalue ladder") {
    const auto& c = testing::model_a_context().constants;
    CHECK(wkb_eigenvalue(c, 0.04, 1) == Approx(std::sqrt(2.0) * 0.008).epsilon(1e-10));
    CHECK(wkb_eigenvalue(c, 0.04, 1) == Approx(0.011314).epsilon(1e-4));
    CHECK(wkb_eigenvalue(c, 0.04, 2) == Approx(3 * wkb_eigenvalue(c, 0.04, 1)));
    CHECK_THROWS_AS(wkb_eigenvalue(c, 0.04, 0), ConfigError);
}

TEST_CASE("quasimode normalization and localization") {
    const auto& ctx = testing::model_a_context();
    const double h = 0.05;
    const Grid g = make_grid(8, 512, h);
    const auto q = wkb_quasimode(ctx.constants, g, *ctx.phase, *ctx.amplitude);
    CHECK(q.norm_raw == Approx(oracle::norm_raw_h005).epsilon(1e-7));
    CHECK(std::abs(grid_norm(q.vector, g.dx) - 1.0) <= 1e-12);
    CHECK(q.lambda_wkb == Approx(ctx.constants.c0 * std::pow(h, 1.5)));
    // |norm_raw - 1| shrinks with h
    double prev = 1e9;
    for (double hh : {0.09, 0.05, 0.02}) {
        const Grid gh = make_grid(8, auto_n(8, hh, 3), hh);
        const double dev = std::abs(wkb_quasimode(ctx.constants, gh, *ctx.phase, *ctx.amplitude).norm_raw - 1.0);
        CHECK(dev < prev);
        prev = dev;
    }
    const double bound = std::exp(-2.0 * (*ctx.phase)(-0.5) * 0.9 / std::sqrt(h));
    CHECK(spatial_tail(q.vector, g, {-1.0}, 0.5) <= bound);
}

TEST_CASE("quasimode residual and overlap") {
    const auto& ctx = testing::model_a_context();
    std::vector<double> hs = {0.1, 0.05, 0.02}, res;
    double prev_overlap = 0.0;
    for (double h : hs) {
        const Grid g = make_grid(8, auto_n(8, h, 3), h);
        const auto M = assemble_onewell(ctx.model, g, Side::left, ctx.seal);
        const auto q = wkb_quasimode(ctx.constants, g, *ctx.phase, *ctx.amplitude);
        res.push_back(quasimode_residual(M, q));
        const auto one = lowest_eigenpairs(M, 1);
        const double ov = std::abs(inner(q.vector, one[0].vector, g.dx));
        CHECK(ov >= 1.0 - 2.0 * std::sqrt(h));
        CHECK(ov > prev_overlap);
        prev_overlap = ov;

        WkbQuasimode exact;
        exact.vector = one[0].vector;
        exact.lambda_wkb = one[0].value;
        CHECK(quasimode_residual(M, exact) <= 1e-10);
        CHECK_THROWS_AS(quasimode_residual(M, WkbQuasimode{Eigen::VectorXcd::Ones(4), 0.0, 1.0}), ShapeError);
    }
    for (std::size_t i = 1; i < res.size(); ++i) CHECK(res[i] < res[i - 1]);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        lx.push_back(std::log(hs[i]));
        ly.push_back(std::log(res[i]));
    }
    CHECK(num::linear_fit(lx, ly).slope >= 1.8);
}

TEST_CASE("discrete window below b_inf h / 2") {
    // the window fills as h decreases; at h = 0.05 only the ground state is
    // below it (the oracle levels are 0.0130, 0.0255, 0.0320 against 0.025)
    const auto& ctx = testing::model_a_context();
    CHECK(oracle::onewell1_h005 < 0.025);
    CHECK(oracle::onewell2_h005 > 0.025);
    const std::pair<double, int> expect[] = {{0.05, 1}, {0.02, 3}, {0.01, 3}};
    for (auto [h, n] : expect) {
        const Grid g = make_grid(8, auto_n(8, h, 3), h);
        const auto one = lowest_eigenpairs(assemble_onewell(ctx.model, g, Side::left, ctx.seal), 8);
        int count = 0;
        for (const auto& p : one)
            if (p.value < 0.5 * ctx.constants.b_inf * h) ++count;
        CHECK(count == n);
    }
}
