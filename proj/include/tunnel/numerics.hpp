#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace tunnel::num {

using cd = std::complex<double>;

// ---------------------------------------------------------------------------
// Finite differences. Five-point centered stencils refined by two levels of
// Richardson extrapolation (step, step/2, step/4).
// ---------------------------------------------------------------------------

double derivative1(const std::function<double(double)>& f, double x, double step = 1e-2);
double derivative2(const std::function<double(double)>& f, double x, double step = 1e-2);

/// Plain five-point first derivative, no extrapolation. Works for complex f.
cd derivative1_5pt(const std::function<cd(double)>& f, double x, double step);

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (31 point) on [a, b]. Throws NumericError when the
/// estimated error stays above max(abs_tol, rel_tol*|value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-13, double abs_tol = 1e-15);

/// Fixed-order composite Gauss-Legendre on `panels` equal panels (order 10 per
/// panel). Deterministic cost; used where an integral is evaluated many times.
double integrate_fixed(const std::function<double(double)>& f, double a, double b, int panels);

/// Cumulative integral x -> int_{anchor}^{x} f, tabulated at breakpoints so
/// repeated evaluation only integrates the last partial panel.
class AnchoredIntegral {
public:
    AnchoredIntegral() = default;
    AnchoredIntegral(std::function<double(double)> f, double anchor, double lo, double hi,
                     double spacing = 0.05, double rel_tol = 1e-13, double abs_tol = 1e-15,
                     std::vector<double> jumps = {});

    double operator()(double x) const;
    double anchor() const noexcept { return anchor_; }

private:
    std::function<double(double)> f_;
    double anchor_ = 0.0;
    double lo_ = 0.0;
    double spacing_ = 0.0;
    std::vector<double> jumps_;  // known discontinuities of f, integrated around
    double rel_tol_ = 1e-13, abs_tol_ = 1e-15;
    double piece(double a, double b, bool adaptive) const;
    std::vector<double> breaks_;
    std::vector<double> cumulative_;  // int_{anchor}^{breaks_[i]} f
};

// ---------------------------------------------------------------------------
// Smooth cutoffs. Everything derives from the compactly supported bump
// t -> exp(-1/(1-t^2)) on (-1, 1).
// ---------------------------------------------------------------------------

double bump(double t);

/// Normalised primitive of the bump: 0 for t <= -1, 1 for t >= 1, C-infinity.
double smooth_step(double t);

/// Smooth plateau: 1 on [inner_lo, inner_hi], 0 outside (outer_lo, outer_hi).
/// Requires outer_lo < inner_lo <= inner_hi < outer_hi.
double plateau(double x, double outer_lo, double inner_lo, double inner_hi, double outer_hi);

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    int n_points = 0;
};

/// Ordinary least squares y = slope*x + intercept. Needs at least two points.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Root of a continuous function bracketed by [a, b] (TOMS 748).
double find_root(const std::function<double(double)>& f, double a, double b);

}  // namespace tunnel::num
