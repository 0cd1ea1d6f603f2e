#include "tunnel/tunneling.hpp"

#include "tunnel/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace tunnel {

CutoffPair make_cutoffs(double A_window, double x_right, double eta) {
    const double A = A_window;
    const double in_hi = x_right - 2 * eta;
    const double out_hi = x_right - eta;
    if (!(-A < in_hi)) throw ConfigError("cutoff plateau is empty: need x_r - 2 eta > -A");
    CutoffPair c;
    c.chi_left = [A, in_hi, out_hi](double x) { return num::plateau(x, -2 * A, -A, in_hi, out_hi); };
    c.chi_right = [f = c.chi_left](double x) { return f(-x); };
    return c;
}

SplitMeasurement measured_splitting(const OperatorMatrix& L) {
    SplitMeasurement s;
    s.pairs = lowest_eigenpairs(L, 3);
    s.lambda1 = s.pairs[0].value;
    s.lambda2 = s.pairs[1].value;
    s.lambda3 = s.pairs[2].value;
    s.gap12 = s.lambda2 - s.lambda1;
    s.gap23 = s.lambda3 - s.lambda2;
    for (const auto& p : s.pairs) s.max_residual = std::max(s.max_residual, p.residual);
    s.precision_flag = s.gap12 < 100.0 * s.max_residual;
    return s;
}

SplitMeasurement measured_splitting(const Model& m, const Grid& g) {
    return measured_splitting(assemble_L(m, g));
}

GramReduction gram_reduction(const Eigen::VectorXcd& f_left, const Eigen::VectorXcd& f_right,
                             const std::vector<Eigenpair>& low_pairs, const OperatorMatrix& M, double mu) {
    if (low_pairs.size() < 2) throw ShapeError("gram reduction needs two eigenpairs");
    const double dx = M.grid.dx;
    const Eigen::Index n = M.entries.rows();
    if (f_left.size() != n || f_right.size() != n) throw ShapeError("cutoff states and operator differ in size");

    auto project = [&](const Eigen::VectorXcd& f) {
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(n);
        for (int i = 0; i < 2; ++i) g += inner(f, low_pairs[i].vector, dx) * low_pairs[i].vector;
        return g;
    };
    const Eigen::VectorXcd gs[2] = {project(f_left), project(f_right)};
    Eigen::VectorXcd Lg[2];
    for (int a = 0; a < 2; ++a) Lg[a] = M.entries * gs[a] - mu * gs[a];

    GramReduction r;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            r.G(a, b) = inner(gs[b], gs[a], dx);
            r.L(a, b) = inner(Lg[b], gs[a], dx);
        }
    // both forms are Hermitian by construction; remove rounding asymmetry
    r.G = (0.5 * (r.G + r.G.adjoint())).eval();
    r.L = (0.5 * (r.L + r.L.adjoint())).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eg(r.G);
    const auto& ev = eg.eigenvalues();
    if (!(ev[0] > 0.0))
        throw DegeneracyError("Gram matrix of the two-well basis is not positive definite", ev[0]);
    const Eigen::Matrix2cd Gm12 = eg.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                                  eg.eigenvectors().adjoint();
    Eigen::Matrix2cd K = Gm12 * r.L * Gm12;
    K = (0.5 * (K + K.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> ek(K, Eigen::EigenvaluesOnly);
    r.gap = ek.eigenvalues()[1] - ek.eigenvalues()[0];
    return r;
}

InteractionReport interaction_term(const OperatorMatrix& L, const SplitMeasurement& split,
                                   const Eigenpair& psi_left, const CutoffPair& cut) {
    const Grid& g = L.grid;
    if (psi_left.vector.size() != g.n) throw ShapeError("one-well state and operator differ in size");
    InteractionReport r;
    r.h = g.h;
    r.mu = psi_left.value;
    Eigen::VectorXcd fl(g.n);
    for (int j = 0; j < g.n; ++j) fl[j] = cut.chi_left(g.x[j]) * psi_left.vector[j];
    const Eigen::VectorXcd fr = reflect(fl);

    const Eigen::VectorXcd Lf = L.entries * fl - r.mu * fl;
    r.w_h = inner(Lf, fr, g.dx);
    r.overlap = inner(fl, fr, g.dx);
    r.gram = gram_reduction(fl, fr, split.pairs, L, r.mu);
    r.gram_eigen_gap = r.gram.gap;
    r.measured_gap = split.gap12;
    return r;
}

double predicted_splitting_theorem(const Model& m, double a2, double L_eff, int N_eff, double h) {
    const double hbar = std::sqrt(h);
    return h * gap_Mhbar(m, a2, make_grid(L_eff, N_eff, hbar));
}

double interaction_asymptotic(const ModelConstants& c, double h) {
    return 2.0 * std::pow(c.a2 / 2.0, 0.25) * std::pow(h, 1.25) * std::sqrt(c.V0) *
           std::sqrt(c.kappa / M_PI) * std::exp(-c.log_I) * std::exp(-c.S / std::sqrt(h));
}

}  // namespace tunnel
