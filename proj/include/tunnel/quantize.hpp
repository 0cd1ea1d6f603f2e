#pragma once

#include "tunnel/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace tunnel {

using cd = std::complex<double>;

// Periodic grid x_j = -L/2 + j dx on [-L/2, L/2) with the matched momentum
// lattice eta_m = 2 pi h m / L, m = -N/2 .. N/2-1.
struct Grid {
    int n = 0;
    double length = 0.0;
    double h = 0.0;
    double dx = 0.0;
    std::vector<double> x;
    std::vector<double> eta;  // eta[i] belongs to m = i - N/2

    double cutoff() const;  // Xi = pi h N / L
    // momentum of FFT bin k (k < N/2 -> m = k, else m = k - N)
    double eta_of_bin(int k) const;
};

Grid make_grid(double length, int n, double h, double xi_min = 0.0);

/// Smallest power of two N >= n_floor with pi h N / L >= xi_min.
int auto_n(double length, double h, double xi_min, int n_floor = 512);

struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    double hermiticity_defect = 0.0;  // ||M - M*||_F before symmetrization
    bool warning = false;             // defect above tolerance
    Grid grid;
};

using SymbolFn = std::function<double(double, double)>;

/// Weyl quantization of p on g, assembled per anti-diagonal with one FFT each.
/// Entries with |j-k| > N/2 use the periodic minimal-image midpoint, and the
/// unpaired Nyquist mode uses the average of p at +-Xi; together they make
/// the result exactly covariant under x -> -x for even symbols.
OperatorMatrix weyl_matrix(const SymbolFn& p, const Grid& g, double defect_tol = 1e-9);

/// Same algorithm, single thread. Kept as the reference for the OpenMP kernel.
OperatorMatrix weyl_matrix_serial(const SymbolFn& p, const Grid& g, double defect_tol = 1e-9);

/// Direct O(N^3) summation of the same discrete rule. Test oracle only.
Eigen::MatrixXcd weyl_matrix_direct(const SymbolFn& p, const Grid& g);

/// Dense matrix of the Fourier multiplier xi -> a(xi) on g.
Eigen::MatrixXcd fourier_multiplier_matrix(const std::function<double(double)>& a, const Grid& g);

/// (a + h b)^w. Uses the split multiplier + diagonal form when b does not
/// depend on xi.
OperatorMatrix assemble_L(const Model& m, const Grid& g);

/// FFT -> multiply by a(eta) -> inverse FFT.
Eigen::VectorXcd apply_fourier_multiplier(const SymbolA& a, const Grid& g, const Eigen::VectorXcd& v);

/// Binary dump: "PDOW", u32 N, f64 h, then row-major complex128, little endian.
void dump_matrix(const OperatorMatrix& M, const std::string& path);

/// ||P M P - M||_F / ||M||_F with P the index reversal j -> (N - j) mod N.
double parity_covariance_defect(const Eigen::MatrixXcd& M);

/// Index reversal j -> (N - j) mod N, i.e. x -> -x on the periodic grid.
Eigen::VectorXcd reflect(const Eigen::VectorXcd& v);

}  // namespace tunnel
