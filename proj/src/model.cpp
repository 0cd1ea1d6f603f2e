#include "tunnel/model.hpp"

#include "tunnel/errors.hpp"
#include "tunnel/expression.hpp"
#include "tunnel/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tunnel {

namespace {

double quartic_well(double x) {
    const double x2 = x * x;
    return (x2 - 1.0) * (x2 - 1.0) / (1.0 + x2 * x2);
}

double checked(double v, const char* what, double x, double xi) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << what << " is not finite at (x, xi) = (" << x << ", " << xi << ")";
        throw EvaluationError(os.str(), x, xi);
    }
    return v;
}

double eval_a(const Model& m, double xi) { return checked(m.a(xi), "a", 0.0, xi); }
double eval_b(const Model& m, double x, double xi) { return checked(m.b(x, xi), "b", x, xi); }

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// sgn(x - x_l) sqrt V: smooth through the left well
double smooth_branch(const Model& m, double x) {
    const double r = std::sqrt(std::max(m.V(x), 0.0));
    return x < m.x_left ? -r : r;
}

}  // namespace

Model builtin_model(const std::string& name, double epsilon) {
    Model m;
    m.name = name;
    m.a.eval = [](double xi) { return xi * xi / (1.0 + xi * xi); };
    m.a.second_derivative_at_zero = num::derivative2(m.a.eval, 0.0);
    m.x_left = -1.0;
    m.x_right = 1.0;
    if (name == "ModelA") {
        m.b.eval = [](double x, double) { return quartic_well(x); };
        m.b.xi_derivative = [](double, double) { return 0.0; };
        m.b.xi_dependent = false;
    } else if (name == "ModelB") {
        m.b.eval = [epsilon](double x, double xi) {
            return quartic_well(x) + epsilon * x * xi / ((1.0 + x * x) * (1.0 + xi * xi));
        };
        m.b.xi_derivative = [epsilon](double x, double xi) {
            const double q = 1.0 + xi * xi;
            return epsilon * x / (1.0 + x * x) * (1.0 - xi * xi) / (q * q);
        };
        m.b.xi_dependent = epsilon != 0.0;
    } else {
        throw IdentifierError("unknown model '" + name + "' (expected ModelA or ModelB)");
    }
    return m;
}

Model expression_model(const std::string& a_expr, const std::string& b_expr, double x_left) {
    const Expression a = Expression::parse(a_expr);
    const Expression b = Expression::parse(b_expr);
    Model m;
    m.name = "custom";
    m.a.eval = [a](double xi) { return a(0.0, xi); };
    m.a.second_derivative_at_zero = num::derivative2(m.a.eval, 0.0);
    m.b.eval = [b](double x, double xi) { return b(x, xi); };
    m.b.xi_derivative = [b](double x, double xi) {
        return num::derivative1([&](double t) { return b(x, t); }, xi);
    };
    // a plain textual test is enough: "xi" cannot appear inside another identifier
    m.b.xi_dependent = b_expr.find("xi") != std::string::npos;
    m.x_left = x_left;
    m.x_right = -x_left;
    return m;
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

double estimate_b_inf(const Model& m, const ValidationConfig& cfg) {
    std::vector<double> u, v;
    u.reserve(2 * cfg.far_samples);
    v.reserve(2 * cfg.far_samples);
    for (double x : linspace(cfg.far_lo, cfg.far_hi, cfg.far_samples)) {
        for (double s : {-x, x}) {
            u.push_back(1.0 / (s * s));
            v.push_back(eval_b(m, s, 0.0));
        }
    }
    return num::linear_fit(u, v).intercept;
}

ValidationReport validate_model(const Model& m, const ValidationConfig& cfg) {
    ValidationReport rep;
    auto add = [&](std::string name, bool ok, std::string detail) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    const auto xs = linspace(-cfg.x_window, cfg.x_window, cfg.samples);
    const auto xis = linspace(-cfg.xi_window, cfg.xi_window, cfg.samples);

    // a: zero at the origin, positive elsewhere, bounded away from 0 at infinity
    {
        const double a0 = eval_a(m, 0.0);
        double worst = INFINITY;
        double worst_at = 0.0;
        for (double xi : xis) {
            if (std::abs(xi) < 0.05) continue;
            const double v = eval_a(m, xi) - a0;
            if (v < worst) worst = v, worst_at = xi;
        }
        double far_inf = INFINITY;
        for (double t : linspace(cfg.xi_far, 20.0 * cfg.xi_far, cfg.samples)) {
            far_inf = std::min({far_inf, eval_a(m, t), eval_a(m, -t)});
        }
        const double a2 = m.a.second_derivative_at_zero;
        const bool ok = std::abs(a0) <= cfg.zero_tol && a2 > 0.0 && worst > cfg.a_min_gap &&
                        far_inf > cfg.a_far_min;
        add("a_unique_minimum", ok,
            "a(0)=" + fmt(a0) + " a''(0)=" + fmt(a2) + " min a(xi)-a(0) off origin=" + fmt(worst) +
                " at xi=" + fmt(worst_at) + " far-field inf=" + fmt(far_inf));
    }

    // evenness of a and of b under (x, xi) -> (-x, -xi)
    {
        double da = 0.0;
        for (double xi : xis) da = std::max(da, std::abs(eval_a(m, xi) - eval_a(m, -xi)));
        double db = 0.0;
        const auto xc = linspace(-cfg.x_window, cfg.x_window, 81);
        const auto xic = linspace(-cfg.xi_window / 4, cfg.xi_window / 4, 81);
        for (double x : xc)
            for (double xi : xic) db = std::max(db, std::abs(eval_b(m, x, xi) - eval_b(m, -x, -xi)));
        add("evenness", da <= cfg.even_tol && db <= cfg.even_tol,
            "max|a(xi)-a(-xi)|=" + fmt(da) + " max|b(x,xi)-b(-x,-xi)|=" + fmt(db));
    }

    // b(., 0) >= 0
    double v_core_max = 0.0;
    {
        double vmin = INFINITY;
        double at = 0.0;
        for (double x : xs) {
            const double v = eval_b(m, x, 0.0);
            v_core_max = std::max(v_core_max, std::abs(v));
            if (v < vmin) vmin = v, at = x;
        }
        add("nonnegativity", vmin >= -cfg.zero_tol,
            "min V=" + fmt(vmin) + " at x=" + fmt(at));
    }

    // zeros exactly at the two wells
    {
        const bool placed = m.x_left < 0.0 && std::abs(m.x_right + m.x_left) <= 1e-14;
        const double vl = eval_b(m, m.x_left, 0.0);
        const double vr = eval_b(m, m.x_right, 0.0);
        const double small = 1e-4;
        int stray = 0;
        double stray_at = 0.0;
        for (double x : xs) {
            const double dist = std::min(std::abs(x - m.x_left), std::abs(x - m.x_right));
            if (dist > cfg.well_radius && eval_b(m, x, 0.0) < small) {
                if (stray++ == 0) stray_at = x;
            }
        }
        std::string detail = "V(x_l)=" + fmt(vl) + " V(x_r)=" + fmt(vr);
        if (stray) detail += " near-zero samples away from wells: " + std::to_string(stray) +
                             " (first at x=" + fmt(stray_at) + ")";
        if (!placed) detail += " wells not placed symmetrically with x_l<0";
        add("two_zeros",
            placed && std::abs(vl) <= cfg.zero_tol && std::abs(vr) <= cfg.zero_tol && stray == 0,
            detail);
    }

    // nondegenerate minima
    {
        auto V = [&](double x) { return eval_b(m, x, 0.0); };
        const double v2l = num::derivative2(V, m.x_left);
        const double v2r = num::derivative2(V, m.x_right);
        add("nondegeneracy", v2l > 1e-8 && v2r > 1e-8,
            "V''(x_l)=" + fmt(v2l) + " V''(x_r)=" + fmt(v2r));
    }

    // bounded symbols: far-field samples do not outgrow the core window
    {
        double a_core = 0.0, a_far = 0.0;
        for (double xi : xis) a_core = std::max(a_core, std::abs(eval_a(m, xi)));
        for (double t : linspace(cfg.xi_far, 20.0 * cfg.xi_far, cfg.samples))
            a_far = std::max({a_far, std::abs(eval_a(m, t)), std::abs(eval_a(m, -t))});
        double b_far = 0.0;
        for (double x : linspace(cfg.far_lo, cfg.far_hi, cfg.far_samples))
            for (double xi : {0.0, 1.0, -1.0, cfg.xi_window, -cfg.xi_window})
                b_far = std::max({b_far, std::abs(eval_b(m, x, xi)), std::abs(eval_b(m, -x, xi))});
        const bool ok = a_far <= cfg.growth_factor * std::max(a_core, 1e-300) &&
                        b_far <= cfg.growth_factor * std::max(v_core_max, 1e-300);
        add("boundedness", ok,
            "sup|a| core=" + fmt(a_core) + " far=" + fmt(a_far) + "; sup|b| core=" +
                fmt(v_core_max) + " far=" + fmt(b_far));
    }

    {
        const double binf = estimate_b_inf(m, cfg);
        add("b_inf_positive", binf > 0.0, "b_inf=" + fmt(binf));
    }
    return rep;
}

ModelConstants derived_constants(const Model& m, const ValidationConfig& cfg) {
    ModelConstants c;
    c.a2 = num::derivative2(m.a.eval, 0.0);
    auto V = [&](double x) { return eval_b(m, x, 0.0); };
    c.V2 = num::derivative2(V, m.x_left);
    c.c0 = std::sqrt(c.a2 * c.V2 / 4.0);

    auto g = [&](double x) { return smooth_branch(m, x); };
    c.kappa = num::derivative1(g, m.x_left);

    auto sqrtV = [&](double s) { return std::sqrt(std::max(V(s), 0.0)); };
    c.S = std::sqrt(2.0 / c.a2) * num::integrate(sqrtV, m.x_left, m.x_right).value;

    // removable singularity at x_l: inside the small ball the integrand is
    // replaced by its limit g''(x_l)/g'(x_l)
    const double cut = 1e-4;
    const double limit = num::derivative2(g, m.x_left) / c.kappa;
    auto integrand = [&](double s) {
        return (num::derivative1(g, s) - c.kappa) / g(s);
    };
    c.log_I = limit * cut + num::integrate(integrand, m.x_left + cut, 0.0, 1e-11, 1e-13).value;

    c.V0 = V(0.0);
    c.b_inf = estimate_b_inf(m, cfg);
    c.A = 4.0 * std::pow(c.a2 / 2.0, 0.25) * std::sqrt(c.kappa / M_PI) * std::sqrt(c.V0) *
          std::exp(-c.log_I);
    return c;
}

}  // namespace tunnel
