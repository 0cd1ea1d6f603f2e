#include "tunnel/effective.hpp"

#include "tunnel/errors.hpp"

#include <cmath>

namespace tunnel {

EffectiveOperator assemble_Mhbar(const Model& m, double a2, const Grid& g) {
    if (!(g.h > 0.0)) throw ConfigError("hbar must be positive");
    EffectiveOperator E;
    E.hbar = g.h;
    E.matrix.grid = g;
    E.matrix.entries = fourier_multiplier_matrix([a2](double eta) { return 0.5 * a2 * eta * eta; }, g);
    for (int j = 0; j < g.n; ++j) {
        const double v = m.V(g.x[j]);
        if (!std::isfinite(v)) throw EvaluationError("potential is not finite", g.x[j], 0.0);
        E.matrix.entries(j, j) += v;
    }
    E.matrix.hermiticity_defect = (E.matrix.entries - E.matrix.entries.adjoint()).norm();
    E.matrix.entries = 0.5 * (E.matrix.entries + E.matrix.entries.adjoint()).eval();
    return E;
}

EffectiveSpectrum effective_spectrum(const EffectiveOperator& M, int k) {
    EffectiveSpectrum out;
    const auto pairs = lowest_eigenpairs(M.matrix, k);
    for (const auto& p : pairs) {
        out.lambda.push_back(p.value);
        out.max_residual = std::max(out.max_residual, p.residual);
    }
    if (k >= 2) {
        out.gap12 = out.lambda[1] - out.lambda[0];
        out.precision_flag = out.gap12 < 100.0 * out.max_residual;
    }
    return out;
}

double gap_Mhbar(const Model& m, double a2, const Grid& g) {
    return effective_spectrum(assemble_Mhbar(m, a2, g), 2).gap12;
}

double classical_splitting_formula(const ModelConstants& c, double hbar) {
    return c.A * std::sqrt(hbar) * std::exp(-c.S / hbar);
}

}  // namespace tunnel
