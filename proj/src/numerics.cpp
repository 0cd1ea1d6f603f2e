#include "tunnel/numerics.hpp"

#include "tunnel/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tunnel::num {

namespace {

template <class F>
auto five_point_d1(const F& f, double x, double s) {
    return (f(x - 2 * s) - 8.0 * f(x - s) + 8.0 * f(x + s) - f(x + 2 * s)) / (12.0 * s);
}

template <class F>
auto five_point_d2(const F& f, double x, double s) {
    return (-f(x - 2 * s) + 16.0 * f(x - s) - 30.0 * f(x) + 16.0 * f(x + s) - f(x + 2 * s)) /
           (12.0 * s * s);
}

// Both stencils have error expansions in even powers starting at s^4.
template <class D>
double richardson(const D& d, double step) {
    const double d0 = d(step);
    const double d1 = d(step / 2);
    const double d2 = d(step / 4);
    const double r01 = d1 + (d1 - d0) / 15.0;
    const double r12 = d2 + (d2 - d1) / 15.0;
    return r12 + (r12 - r01) / 63.0;
}

}  // namespace

double derivative1(const std::function<double(double)>& f, double x, double step) {
    return richardson([&](double s) { return five_point_d1(f, x, s); }, step);
}

double derivative2(const std::function<double(double)>& f, double x, double step) {
    return richardson([&](double s) { return five_point_d2(f, x, s); }, step);
}

cd derivative1_5pt(const std::function<cd(double)>& f, double x, double step) {
    return five_point_d1(f, x, step);
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double abs_tol) {
    if (a == b) return {};
    // Boost's stopping rule is relative to the running estimate and never
    // triggers on slivers whose integral is at rounding level
    if (std::abs(b - a) <= 1e-12 * std::max(1.0, std::abs(a))) return {f(0.5 * (a + b)) * (b - a), 0.0};
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, 15, rel_tol, &err);
    if (!std::isfinite(v) || err > std::max(abs_tol, 10.0 * rel_tol * std::abs(v))) {
        std::ostringstream os;
        os << "adaptive quadrature on [" << a << ", " << b << "] did not converge (error "
           << err << ")";
        throw NumericError(os.str(), err);
    }
    return {v, err};
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b, int panels) {
    const double w = (b - a) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        total += boost::math::quadrature::gauss<double, 10>::integrate(f, a + i * w, a + (i + 1) * w);
    }
    return total;
}

AnchoredIntegral::AnchoredIntegral(std::function<double(double)> f, double anchor, double lo,
                                   double hi, double spacing, double rel_tol, double abs_tol,
                                   std::vector<double> jumps)
    : f_(std::move(f)), anchor_(anchor), lo_(lo), spacing_(spacing), jumps_(std::move(jumps)),
      rel_tol_(rel_tol), abs_tol_(abs_tol) {
    std::sort(jumps_.begin(), jumps_.end());
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / spacing)));
    breaks_.resize(n + 1);
    for (int i = 0; i <= n; ++i) breaks_[i] = lo + i * spacing;

    std::vector<double> panel(n);
    for (int i = 0; i < n; ++i) panel[i] = piece(breaks_[i], breaks_[i + 1], true);

    const int i0 = std::clamp(static_cast<int>(std::lround((anchor - lo) / spacing)), 0, n);
    cumulative_.assign(n + 1, 0.0);
    cumulative_[i0] = piece(anchor, breaks_[i0], true);
    for (int i = i0 + 1; i <= n; ++i) cumulative_[i] = cumulative_[i - 1] + panel[i - 1];
    for (int i = i0 - 1; i >= 0; --i) cumulative_[i] = cumulative_[i + 1] - panel[i];
}

double AnchoredIntegral::piece(double a, double b, bool adaptive) const {
    const double sign = a <= b ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    double total = 0.0, left = lo;
    auto part = [&](double u, double v) {
        if (adaptive) return integrate(f_, u, v, rel_tol_, abs_tol_).value;
        return boost::math::quadrature::gauss<double, 20>::integrate(f_, u, v);
    };
    for (double j : jumps_) {
        if (j <= left || j >= hi) continue;
        total += part(left, j);
        left = j;
    }
    total += part(left, hi);
    return sign * total;
}

double AnchoredIntegral::operator()(double x) const {
    const int n = static_cast<int>(breaks_.size()) - 1;
    const int i = std::clamp(static_cast<int>(std::lround((x - lo_) / spacing_)), 0, n);
    // fixed rule on the partial panel keeps the result smooth in x
    return cumulative_[i] + piece(breaks_[i], x, false);
}

double bump(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

double smooth_step(double t) {
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    static const AnchoredIntegral primitive([](double s) { return bump(s); }, -1.0, -1.0, 1.0,
                                            1.0 / 32.0);
    static const double total = primitive(1.0);
    return std::clamp(primitive(t) / total, 0.0, 1.0);
}

double plateau(double x, double outer_lo, double inner_lo, double inner_hi, double outer_hi) {
    const double rise = smooth_step(2.0 * (x - outer_lo) / (inner_lo - outer_lo) - 1.0);
    // smooth_step(-t) = 1 - smooth_step(t) without the cancellation
    const double fall = smooth_step(1.0 - 2.0 * (x - inner_hi) / (outer_hi - inner_hi));
    return rise * fall;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw AnalyticsError("linear fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw AnalyticsError("linear fit with degenerate abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n_points = static_cast<int>(n);
    return fit;
}

double find_root(const std::function<double(double)>& f, double a, double b) {
    std::uintmax_t max_iter = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        f, a, b, boost::math::tools::eps_tolerance<double>(50), max_iter);
    return 0.5 * (lo + hi);
}

}  // namespace tunnel::num
