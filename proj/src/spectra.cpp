#include "tunnel/spectra.hpp"

#include "tunnel/errors.hpp"
#include "tunnel/fft.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tunnel {

std::vector<Eigenpair> lowest_eigenpairs(const OperatorMatrix& M, int k) {
    return lowest_eigenpairs(M.entries, M.grid.dx, k);
}

std::vector<Eigenpair> lowest_eigenpairs(const Eigen::MatrixXcd& M, double dx, int k) {
    const lapack_int n = static_cast<lapack_int>(M.rows());
    if (M.cols() != n) throw ShapeError("eigenproblem needs a square matrix");
    if (k < 1 || k > n) throw ShapeError("requested " + std::to_string(k) + " eigenpairs of a " +
                                         std::to_string(n) + "x" + std::to_string(n) + " matrix");

    Eigen::MatrixXcd A = M;  // zheevr overwrites its input
    std::vector<double> w(n);
    Eigen::MatrixXcd Z(n, k);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(k));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, A.data(), n, 0.0, 0.0,
                                           1, k, 0.0, &found, w.data(), Z.data(), n, isuppz.data());
    if (info != 0 || found != k) {
        throw NumericError("zheevr failed (info " + std::to_string(info) + ", found " +
                               std::to_string(found) + " of " + std::to_string(k) + ")",
                           std::numeric_limits<double>::infinity());
    }

    const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
    std::vector<Eigenpair> out(k);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXcd v = Z.col(i);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::conj(v[imax]) / std::abs(v[imax]);
        v[imax] = std::abs(v[imax]);
        v /= v.norm();
        const double res = (M * v - w[i] * v).norm();
        if (res > 1e-10 * norm1) {
            std::ostringstream os;
            os << "eigenpair " << i << " residual " << res << " above 1e-10*||M||_1 = " << 1e-10 * norm1;
            throw NumericError(os.str(), res);
        }
        out[i].value = w[i];
        out[i].vector = v / std::sqrt(dx);
        out[i].residual = res;
    }
    return out;
}

cd inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v, double dx) {
    if (u.size() != v.size()) throw ShapeError("inner product of vectors of different length");
    // Eigen's dot conjugates the first argument
    return v.dot(u) * dx;
}

double grid_norm(const Eigen::VectorXcd& v, double dx) { return v.norm() * std::sqrt(dx); }

double parity_of(const Eigen::VectorXcd& v, const Grid& g) {
    if (v.size() != g.n) throw ShapeError("vector length does not match the grid");
    return inner(v, reflect(v), g.dx).real();
}

double fourier_tail(const Eigen::VectorXcd& v, const Grid& g, double xi_cut) {
    if (v.size() != g.n) throw ShapeError("vector length does not match the grid");
    std::vector<cd> buf(v.data(), v.data() + g.n);
    fft::forward(buf, buf);
    double tail = 0.0, total = 0.0;
    for (int k = 0; k < g.n; ++k) {
        const double p = std::norm(buf[k]);
        total += p;
        // the Nyquist bin stands for both +-Xi
        const double eta = k == g.n / 2 ? g.cutoff() : std::abs(g.eta_of_bin(k));
        if (eta > xi_cut) tail += p;
    }
    return total > 0.0 ? tail / total : 0.0;
}

double spatial_tail(const Eigen::VectorXcd& v, const Grid& g, const std::vector<double>& centers,
                    double radius) {
    if (v.size() != g.n) throw ShapeError("vector length does not match the grid");
    double tail = 0.0, total = 0.0;
    for (int j = 0; j < g.n; ++j) {
        const double p = std::norm(v[j]);
        total += p;
        const bool inside = std::any_of(centers.begin(), centers.end(),
                                        [&](double c) { return std::abs(g.x[j] - c) <= radius; });
        if (!inside) tail += p;
    }
    return total > 0.0 ? tail / total : 0.0;
}

AgmonNorm agmon_weighted_norm(const Eigen::VectorXcd& v, const Grid& g,
                              const std::function<double(double)>& phi, double eps) {
    if (v.size() != g.n) throw ShapeError("vector length does not match the grid");
    const double scale = (1.0 - eps) / std::sqrt(g.h);
    std::vector<double> t;
    t.reserve(g.n);
    AgmonNorm out;
    for (int j = 0; j < g.n; ++j) {
        const double a = std::abs(v[j]);
        if (a == 0.0) continue;
        // log of |v_j| exp(scale phi): one nodal contribution to the norm
        const double lj = std::log(a) + scale * phi(g.x[j]);
        if (lj > 700.0) out.overflow = true;
        t.push_back(2.0 * lj);
    }
    if (t.empty()) return out;
    const double tmax = *std::max_element(t.begin(), t.end());
    double s = 0.0;
    for (double x : t) s += std::exp(x - tmax);
    out.log_value = 0.5 * (tmax + std::log(s * g.dx));
    out.value = out.overflow ? std::numeric_limits<double>::infinity() : std::exp(out.log_value);
    return out;
}

std::function<double(double)> minimal_image(std::function<double(double)> phi, double length) {
    return [phi = std::move(phi), length](double x) {
        return std::min({phi(x), phi(x - length), phi(x + length)});
    };
}

}  // namespace tunnel
