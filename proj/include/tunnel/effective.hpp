#pragma once

#include "tunnel/model.hpp"
#include "tunnel/quantize.hpp"
#include "tunnel/spectra.hpp"

#include <vector>

namespace tunnel {

// -hbar^2 (a2/2) d^2/dx^2 + V(x) on a periodic grid whose momentum lattice is
// built with h := hbar, so the kinetic part is the multiplier (a2/2) eta^2.
struct EffectiveOperator {
    double hbar = 0.0;
    OperatorMatrix matrix;
};

EffectiveOperator assemble_Mhbar(const Model& m, double a2, const Grid& g);

struct EffectiveSpectrum {
    std::vector<double> lambda;  // lowest eigenvalues, ascending
    double gap12 = 0.0;
    double max_residual = 0.0;
    bool precision_flag = false;  // gap below 100x the eigen-residual
};

EffectiveSpectrum effective_spectrum(const EffectiveOperator& M, int k = 4);

/// lambda_2 - lambda_1 of M_hbar on g (g.h is hbar).
double gap_Mhbar(const Model& m, double a2, const Grid& g);

/// A hbar^{1/2} exp(-S/hbar)
double classical_splitting_formula(const ModelConstants& c, double hbar);

}  // namespace tunnel
