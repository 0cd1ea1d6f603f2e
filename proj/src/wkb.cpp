#include "tunnel/wkb.hpp"

#include "tunnel/errors.hpp"
#include "tunnel/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tunnel {

double SealingFunction::operator()(double x) const {
    return height * num::bump((x - center) / eta);
}

SealingFunction sealing_function(const Model& m, double eta, std::optional<double> height) {
    if (!(eta > 0.0 && eta < m.x_right))
        throw ConfigError("seal width must satisfy 0 < eta < x_r");
    SealingFunction k;
    k.center = m.x_right;
    k.eta = eta;
    k.height = height.value_or(2.0 * m.V(0.0));
    if (!(k.height > 0.0)) throw ConfigError("seal height must be positive");

    // the sealed landscape may come close to zero only near the left well
    const double radius = 0.05;
    const double floor = 1e-4;
    const int n = 8001;
    const double w = std::max(5.0, 4.0 * m.x_right);
    for (int i = 0; i < n; ++i) {
        const double x = -w + 2.0 * w * i / (n - 1);
        if (std::abs(x - m.x_left) <= radius) continue;
        const double v = m.V(x) + k(x);
        if (v < floor) {
            std::ostringstream os;
            os << "sealed potential nearly vanishes at x = " << x << " (value " << v
               << "); the left well is not the unique global minimum, increase the seal height";
            throw ConstructionError(os.str());
        }
    }
    if (std::abs(m.V(m.x_left)) > 1e-10)
        throw ConstructionError("sealed potential does not vanish at the left well");
    return k;
}

double sealed_potential(const Model& m, const SealingFunction& seal, Side side, double x) {
    return side == Side::left ? m.V(x) + seal(x) : m.V(x) + seal(-x);
}

OperatorMatrix assemble_onewell(const Model& m, const Grid& g, Side side, const SealingFunction& seal) {
    OperatorMatrix M = assemble_L(m, g);
    for (int j = 0; j < g.n; ++j) {
        const double x = side == Side::left ? g.x[j] : -g.x[j];
        M.entries(j, j) += g.h * seal(x);
    }
    return M;
}

// ---------------------------------------------------------------------------

struct AgmonPhase::Tables {
    Model model;
    SealingFunction seal;
    double a2 = 0.0;
    double scale = 0.0;  // sqrt(2/a2)
    double x_well = 0.0;
    double A = 0.0;
    double phi2_well = 0.0;
    num::AnchoredIntegral phi;
    num::AnchoredIntegral phi_tilde;

    double branch(double s) const {
        const double r = std::sqrt(std::max(model.V(s) + seal(s), 0.0));
        return s < x_well ? -r : r;
    }
    double chi0(double s) const { return num::plateau(s, -2 * A, -A, A, 2 * A); }
};

AgmonPhase::AgmonPhase(const Model& m, const ModelConstants& c, const SealingFunction& seal,
                       Side side, double range)
    : side_(side) {
    auto t = std::make_shared<Tables>();
    t->model = m;
    t->seal = seal;
    t->a2 = c.a2;
    t->scale = std::sqrt(2.0 / c.a2);
    t->x_well = m.x_left;
    t->phi2_well = std::sqrt(c.V2 / c.a2);
    const Tables* tp = t.get();
    t->phi = num::AnchoredIntegral([tp](double s) { return tp->branch(s); }, m.x_left, -range, range);

    auto phi = [tp](double x) { return tp->scale * std::abs(tp->phi(x)); };
    const double target = phi(m.x_right);
    if (phi(-range) <= target)
        throw NumericError("Agmon phase does not exceed its inter-well value inside the table", phi(-range));
    const double left = num::find_root([&](double x) { return phi(x) - target; }, -range, m.x_left - 1e-9);
    t->A = std::max(-left, m.x_right);
    if (2 * t->A >= range) throw NumericError("phase table too short for the truncation window", t->A);

    t->phi_tilde = num::AnchoredIntegral([tp](double s) { return tp->chi0(s) * tp->branch(s); },
                                         m.x_left, -range, range);
    t_ = std::move(t);
}

double AgmonPhase::x_well() const { return side_ == Side::left ? t_->x_well : -t_->x_well; }
double AgmonPhase::A_window() const { return t_->A; }
double AgmonPhase::a2() const { return t_->a2; }

double AgmonPhase::operator()(double x) const {
    const double y = side_ == Side::left ? x : -x;
    return t_->scale * std::abs(t_->phi(y));
}

double AgmonPhase::truncated(double x) const {
    const double y = side_ == Side::left ? x : -x;
    return t_->scale * std::abs(t_->phi_tilde(y));
}

double AgmonPhase::derivative(double x) const {
    return side_ == Side::left ? t_->scale * t_->branch(x) : -t_->scale * t_->branch(-x);
}

double AgmonPhase::second_derivative(double x) const {
    const double y = side_ == Side::left ? x : -x;
    const Tables* tp = t_.get();
    return tp->scale * num::derivative1([tp](double s) { return tp->branch(s); }, y);
}

double AgmonPhase::second_derivative_at_well() const { return t_->phi2_well; }

double AgmonPhase::sealed_b(double x) const {
    const double y = side_ == Side::left ? x : -x;
    return t_->model.V(y) + t_->seal(y);
}

double AgmonPhase::chi0(double x) const { return t_->chi0(x); }

// ---------------------------------------------------------------------------

struct LeadingAmplitude::Tables {
    double prefactor = 0.0;
    num::AnchoredIntegral real_part;
    num::AnchoredIntegral imag_part;
};

LeadingAmplitude::LeadingAmplitude(const Model& m, const AgmonPhase& phase) : side_(phase.side()) {
    // always built for the left well; the right amplitude is its reflection.
    // g is the left phase derivative Phi_l'; the integrand is scale invariant.
    const double xl = m.x_left;
    const double a2 = phase.a2();
    auto g = [phase](double s) {
        return phase.side() == Side::left ? phase.derivative(s) : -phase.derivative(-s);
    };
    const double g1 = num::derivative1(g, xl);
    const double g2 = num::derivative2(g, xl);
    const double cut = 1e-4;
    auto real_integrand = [g, g1, g2, xl, cut](double s) {
        if (std::abs(s - xl) < cut) return g2 / (2.0 * g1);
        return (num::derivative1(g, s) - g1) / (2.0 * g(s));
    };
    auto imag_integrand = [m, a2](double s) { return m.b.xi_derivative(s, 0.0) / a2; };

    auto t = std::make_shared<Tables>();
    t->prefactor = std::pow(phase.second_derivative_at_well() / M_PI, 0.25);
    // the real integrand carries finite-difference noise near 1e-13
    t->real_part = num::AnchoredIntegral(real_integrand, xl, -16.0, 16.0, 0.05, 1e-10, 1e-12,
                                         {xl - cut, xl + cut});
    t->imag_part = num::AnchoredIntegral(imag_integrand, xl, -16.0, 16.0);
    t_ = std::move(t);
}

cd LeadingAmplitude::operator()(double x) const {
    const double y = side_ == Side::left ? x : -x;
    return t_->prefactor * std::exp(-cd(t_->real_part(y), t_->imag_part(y)));
}

cd leading_amplitude(const Model& m, const AgmonPhase& phase, double x) {
    return LeadingAmplitude(m, phase)(x);
}

// ---------------------------------------------------------------------------

double quasimode_cutoff(const AgmonPhase& phase, double x) {
    const double A = phase.A_window();
    return num::plateau(x, -3 * A, -2 * A, 2 * A, 3 * A);
}

WkbQuasimode wkb_quasimode(const ModelConstants& c, const Grid& g, const AgmonPhase& phase,
                           const LeadingAmplitude& u) {
    WkbQuasimode q;
    q.vector.resize(g.n);
    const double sh = std::sqrt(g.h);
    const double pre = std::pow(g.h, -0.125);
    for (int j = 0; j < g.n; ++j) {
        const double x = g.x[j];
        q.vector[j] = pre * quasimode_cutoff(phase, x) * u(x) * std::exp(-phase(x) / sh);
    }
    q.norm_raw = grid_norm(q.vector, g.dx);
    q.vector /= q.norm_raw;
    q.lambda_wkb = wkb_eigenvalue(c, g.h, 1);
    return q;
}

double wkb_eigenvalue(const ModelConstants& c, double h, int n) {
    if (n < 1) throw ConfigError("eigenvalue index must be >= 1");
    return (2 * n - 1) * c.c0 * std::pow(h, 1.5);
}

double transport_residual(const Model& m, const ModelConstants& c, const AgmonPhase& phase,
                          const std::function<cd(double)>& u, const std::vector<double>& xs,
                          double du) {
    const double sgn = phase.side() == Side::left ? 1.0 : -1.0;
    double worst = 0.0;
    for (double x : xs) {
        const double p1 = phase.derivative(x);
        const double p2 = phase.second_derivative(x);
        // the seal does not depend on xi, so d_xi b_side = d_xi b (reflected)
        const double bxi = sgn * m.b.xi_derivative(sgn * x, 0.0);
        const cd ux = u(x);
        const cd dux = num::derivative1_5pt(u, x, du);
        const cd r = cd(0.0, 1.0) * p1 * bxi * ux + 0.5 * c.a2 * p2 * ux + c.a2 * p1 * dux - c.c0 * ux;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double transport_residual(const Model& m, const ModelConstants& c, const AgmonPhase& phase,
                          const std::vector<double>& xs) {
    const LeadingAmplitude amp(m, phase);
    return transport_residual(m, c, phase, [&](double x) { return amp(x); }, xs);
}

double eikonal_residual(const AgmonPhase& phase, const std::vector<double>& xs) {
    double worst = 0.0;
    for (double x : xs) {
        // the seal bump has steep derivatives near its edges; a 1e-2 stencil
        // leaves ~2e-8 truncation error there
        const double d = num::derivative1([&](double s) { return phase(s); }, x, 2e-3);
        worst = std::max(worst, std::abs(d * d - 2.0 / phase.a2() * phase.sealed_b(x)));
    }
    return worst;
}

double quasimode_residual(const OperatorMatrix& M, const WkbQuasimode& q) {
    if (q.vector.size() != M.entries.rows()) throw ShapeError("quasimode and operator grids differ");
    const Eigen::VectorXcd r = M.entries * q.vector - q.lambda_wkb * q.vector;
    return r.norm() / q.vector.norm();
}

}  // namespace tunnel
