#pragma once

#include "tunnel/quantize.hpp"

#include <functional>
#include <vector>

namespace tunnel {

struct Eigenpair {
    double value = 0.0;
    Eigen::VectorXcd vector;  // sum |v_j|^2 dx = 1, largest entry real positive
    double residual = 0.0;    // ||M v - value v|| for the unit (l2) vector
};

/// k smallest eigenpairs of a Hermitian matrix, ascending (LAPACK zheevr).
/// Throws NumericError when a residual exceeds 1e-10 ||M||_1.
std::vector<Eigenpair> lowest_eigenpairs(const OperatorMatrix& M, int k);
std::vector<Eigenpair> lowest_eigenpairs(const Eigen::MatrixXcd& M, double dx, int k);

/// <u, v> = sum u_j conj(v_j) dx
cd inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v, double dx);
double grid_norm(const Eigen::VectorXcd& v, double dx);

/// Re <v, U v> with U the reflection x -> -x.
double parity_of(const Eigen::VectorXcd& v, const Grid& g);

/// Fraction of |v^|^2 carried by momenta |eta| > xi_cut.
double fourier_tail(const Eigen::VectorXcd& v, const Grid& g, double xi_cut);

/// Fraction of |v|^2 outside the union of closed balls B(center, radius).
double spatial_tail(const Eigen::VectorXcd& v, const Grid& g, const std::vector<double>& centers,
                    double radius);

struct AgmonNorm {
    double value = 0.0;      // ||exp((1-eps) phi/sqrt h) v||, +inf on overflow
    double log_value = 0.0;  // always finite
    bool overflow = false;   // some nodal contribution above exp(700)
};

/// Weighted norm with weight exp((1 - eps) phi(x) / sqrt h), evaluated in log
/// space. phi is the truncated Agmon phase of the relevant well.
AgmonNorm agmon_weighted_norm(const Eigen::VectorXcd& v, const Grid& g,
                              const std::function<double(double)>& phi, double eps);

/// x -> min(phi(x), phi(x - L), phi(x + L)): a phase on the line read on the
/// periodic grid, where a node is reached from the well both ways round.
std::function<double(double)> minimal_image(std::function<double(double)> phi, double length);

}  // namespace tunnel
