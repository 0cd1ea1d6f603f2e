#pragma once

#include <functional>
#include <string>
#include <vector>

namespace tunnel {

struct SymbolA {
    std::function<double(double)> eval;
    double second_derivative_at_zero = 0.0;  // a''(0)

    double operator()(double xi) const { return eval(xi); }
};

struct SymbolB {
    std::function<double(double, double)> eval;
    std::function<double(double, double)> xi_derivative;
    bool xi_dependent = true;  // false enables the split assembly path

    double operator()(double x, double xi) const { return eval(x, xi); }
};

struct Model {
    std::string name;
    SymbolA a;
    SymbolB b;
    double x_left = -1.0;
    double x_right = 1.0;

    double V(double x) const { return b.eval(x, 0.0); }
};

struct ModelConstants {
    double a2 = 0.0;     // a''(0)
    double V2 = 0.0;     // V''(x_left)
    double c0 = 0.0;     // sqrt(a2 V2 / 4)
    double kappa = 0.0;  // (sqrt V)'(x_left)
    double S = 0.0;      // sqrt(2/a2) int_{x_l}^{x_r} sqrt V
    double A = 0.0;      // splitting prefactor
    double b_inf = 0.0;  // far-field limit of V
    double V0 = 0.0;     // V(0)
    double log_I = 0.0;  // int_{x_l}^0 ((sqrt V)' - kappa)/sqrt V
};

/// "ModelA" or "ModelB"; ModelB takes the coupling epsilon.
Model builtin_model(const std::string& name, double epsilon = 0.2);

/// Model from symbol expressions in x and xi (see Expression). The xi
/// derivative of b is taken by finite differences.
Model expression_model(const std::string& a_expr, const std::string& b_expr, double x_left);

struct ValidationConfig {
    double x_window = 5.0;      // sampling |x| <= x_window
    double xi_window = 20.0;    // sampling |xi| <= xi_window
    int samples = 2001;
    double xi_far = 5.0;        // far field for a: |xi| in [xi_far, 20 xi_far]
    double a_far_min = 1e-3;    // inf of a over the far field must exceed this
    double a_min_gap = 1e-6;    // a(xi) > a_min_gap for |xi| >= 0.05
    double even_tol = 1e-12;
    double zero_tol = 1e-10;    // |V(x_well)| and nonnegativity slack
    double well_radius = 0.05;  // V may be small only this close to a well
    double far_lo = 5.0;        // far field for b_inf: |x| in [far_lo, far_hi]
    double far_hi = 50.0;
    int far_samples = 1000;
    double growth_factor = 10.0;  // far-field sup / core sup bound
};

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_passed() const;
    const ValidationCheck* find(const std::string& name) const;
};

ValidationReport validate_model(const Model& m, const ValidationConfig& cfg = {});

/// Far-field limit of V: intercept of a least-squares fit of V against 1/x^2
/// over the far window (both sides).
double estimate_b_inf(const Model& m, const ValidationConfig& cfg = {});

ModelConstants derived_constants(const Model& m, const ValidationConfig& cfg = {});

}  // namespace tunnel
