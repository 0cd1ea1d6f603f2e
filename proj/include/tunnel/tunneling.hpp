#pragma once

#include "tunnel/effective.hpp"
#include "tunnel/spectra.hpp"
#include "tunnel/wkb.hpp"

#include <functional>

namespace tunnel {

// chi_left = 1 on [-A, x_r - 2 eta], 0 outside (-2A, x_r - eta);
// chi_right(x) = chi_left(-x).
struct CutoffPair {
    std::function<double(double)> chi_left;
    std::function<double(double)> chi_right;
};

CutoffPair make_cutoffs(double A_window, double x_right, double eta);

struct SplitMeasurement {
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double gap12 = 0.0;
    double gap23 = 0.0;
    double max_residual = 0.0;
    bool precision_flag = false;      // gap12 below 100x the eigen-residual
    std::vector<Eigenpair> pairs;     // lowest three eigenpairs of L_h
};

SplitMeasurement measured_splitting(const OperatorMatrix& L);
SplitMeasurement measured_splitting(const Model& m, const Grid& g);

struct GramReduction {
    Eigen::Matrix2cd G;
    Eigen::Matrix2cd L;  // quadratic form of (L_h - mu) on (g_l, g_r)
    double gap = 0.0;    // eigenvalue gap of G^{-1/2} L G^{-1/2}
};

/// g_* = Pi f_* with Pi the orthogonal projector onto the first two
/// eigenvectors of L_h. Throws DegeneracyError if G is not positive definite.
GramReduction gram_reduction(const Eigen::VectorXcd& f_left, const Eigen::VectorXcd& f_right,
                             const std::vector<Eigenpair>& low_pairs, const OperatorMatrix& M, double mu);

struct InteractionReport {
    double h = 0.0;
    double mu = 0.0;
    cd w_h = 0.0;
    cd overlap = 0.0;
    GramReduction gram;
    double gram_eigen_gap = 0.0;
    double measured_gap = 0.0;
    double thm_prediction = 0.0;
    double formula_prediction = 0.0;
};

/// f_l = chi_l psi_l, f_r = U f_l, w_h = <(L_h - mu) f_l, f_r>, plus the Gram
/// reduction. psi_l is the dx-normalized one-well ground state with value mu.
InteractionReport interaction_term(const OperatorMatrix& L, const SplitMeasurement& split,
                                   const Eigenpair& psi_left, const CutoffPair& cut);

/// h (lambda_2 - lambda_1)(M_{sqrt h}) on the effective grid (L_eff, N_eff).
double predicted_splitting_theorem(const Model& m, double a2, double L_eff, int N_eff, double h);

/// 2 (a2/2)^{1/4} h^{5/4} sqrt(V0) (kappa/pi)^{1/2} exp(-I) exp(-S/sqrt h)
double interaction_asymptotic(const ModelConstants& c, double h);

}  // namespace tunnel
