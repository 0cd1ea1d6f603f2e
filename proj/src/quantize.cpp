#include "tunnel/quantize.hpp"

#include "tunnel/errors.hpp"
#include "tunnel/fft.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tunnel {

double Grid::cutoff() const { return M_PI * h * n / length; }

double Grid::eta_of_bin(int k) const {
    const int m = k < n / 2 ? k : k - n;
    return 2.0 * M_PI * h * m / length;
}

Grid make_grid(double length, int n, double h, double xi_min) {
    if (!(length > 0.0)) throw ConfigError("grid length must be positive");
    if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n)))
        throw ConfigError("grid size " + std::to_string(n) + " is not a power of two >= 2");
    if (!(h > 0.0 && h <= 1.0)) throw ConfigError("semiclassical parameter must lie in (0, 1]");
    const double xi = M_PI * h * n / length;
    if (xi < xi_min) {
        std::ostringstream os;
        os << "momentum cutoff " << xi << " below required " << xi_min << " (L=" << length
           << ", N=" << n << ", h=" << h << "); minimal admissible N is "
           << auto_n(length, h, xi_min, 2);
        throw ConfigError(os.str());
    }
    Grid g;
    g.n = n;
    g.length = length;
    g.h = h;
    g.dx = length / n;
    g.x.resize(n);
    g.eta.resize(n);
    for (int j = 0; j < n; ++j) g.x[j] = -length / 2 + j * g.dx;
    for (int i = 0; i < n; ++i) g.eta[i] = 2.0 * M_PI * h * (i - n / 2) / length;
    return g;
}

int auto_n(double length, double h, double xi_min, int n_floor) {
    int n = 2;
    while (n < n_floor || M_PI * h * n / length < xi_min) {
        if (n > (1 << 28)) throw ConfigError("no admissible grid size below 2^28");
        n *= 2;
    }
    return n;
}

namespace {

double checked_symbol(const SymbolFn& p, double x, double xi) {
    const double v = p(x, xi);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "symbol is not finite at (x, xi) = (" << x << ", " << xi << ")";
        throw EvaluationError(os.str(), x, xi);
    }
    return v;
}

// p at a midpoint of the fundamental domain; the seam -L/2 ~ L/2 is shared,
// so the two one-sided values are averaged there
double symbol_at(const SymbolFn& p, const Grid& g, double mid, double xi) {
    const double half = g.length / 2;
    if (std::abs(mid + half) < 1e-12 * g.length)
        return 0.5 * (checked_symbol(p, -half, xi) + checked_symbol(p, half, xi));
    return checked_symbol(p, mid, xi);
}

// c[d mod N] = (1/N) sum_m p(mid, eta_m) exp(2 pi i m d / N)
void kernel_row(const SymbolFn& p, const Grid& g, double mid, std::vector<cd>& buf) {
    const int n = g.n;
    const double xi_max = g.cutoff();
    for (int k = 0; k < n; ++k) {
        if (k == n / 2) {
            buf[k] = 0.5 * (symbol_at(p, g, mid, -xi_max) + symbol_at(p, g, mid, xi_max));
        } else {
            buf[k] = symbol_at(p, g, mid, g.eta_of_bin(k));
        }
    }
    fft::backward(buf, buf);
    const double inv = 1.0 / n;
    for (auto& c : buf) c *= inv;
}

void fill_antidiagonal(const SymbolFn& p, const Grid& g, int s, Eigen::MatrixXcd& M,
                       std::vector<cd>& near, std::vector<cd>& far) {
    const int n = g.n;
    const double half = g.length / 2;
    const int j0 = std::max(0, s - (n - 1));
    const int j1 = std::min(s, n - 1);
    const int dmax = std::max(std::abs(2 * j0 - s), std::abs(2 * j1 - s));

    const double mid1 = -half + s * g.dx / 2;
    kernel_row(p, g, mid1, near);
    if (dmax >= n / 2) {
        double mid2 = mid1 + half;
        if (mid2 >= half) mid2 -= g.length;
        kernel_row(p, g, mid2, far);
    }
    for (int j = j0; j <= j1; ++j) {
        const int k = s - j;
        const int d = j - k;
        const int idx = ((d % n) + n) % n;
        const int ad = std::abs(d);
        if (ad < n / 2) M(j, k) = near[idx];
        else if (ad > n / 2) M(j, k) = far[idx];
        else M(j, k) = 0.5 * (near[idx] + far[idx]);
    }
}

OperatorMatrix finish(Eigen::MatrixXcd M, const Grid& g, double defect_tol) {
    OperatorMatrix out;
    out.hermiticity_defect = (M - M.adjoint()).norm();
    const double norm = M.norm();
    out.warning = out.hermiticity_defect > defect_tol * norm;
    out.entries = 0.5 * (M + M.adjoint());
    out.grid = g;
    return out;
}

}  // namespace

OperatorMatrix weyl_matrix(const SymbolFn& p, const Grid& g, double defect_tol) {
    const int n = g.n;
    Eigen::MatrixXcd M(n, n);
    // exceptions cannot leave an OpenMP region; capture the first one
    std::exception_ptr error;
#pragma omp parallel
    {
        std::vector<cd> near(n), far(n);
#pragma omp for schedule(dynamic, 8)
        for (int s = 0; s < 2 * n - 1; ++s) {
            try {
                fill_antidiagonal(p, g, s, M, near, far);
            } catch (...) {
#pragma omp critical(tunnel_weyl_error)
                if (!error) error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);
    return finish(std::move(M), g, defect_tol);
}

OperatorMatrix weyl_matrix_serial(const SymbolFn& p, const Grid& g, double defect_tol) {
    const int n = g.n;
    Eigen::MatrixXcd M(n, n);
    std::vector<cd> near(n), far(n);
    for (int s = 0; s < 2 * n - 1; ++s) fill_antidiagonal(p, g, s, M, near, far);
    return finish(std::move(M), g, defect_tol);
}

Eigen::MatrixXcd weyl_matrix_direct(const SymbolFn& p, const Grid& g) {
    const int n = g.n;
    const double half = g.length / 2;
    const double xi_max = g.cutoff();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    auto symbol_row = [&](double mid, int m) {
        if (m == -n / 2) return 0.5 * (symbol_at(p, g, mid, -xi_max) + symbol_at(p, g, mid, xi_max));
        return symbol_at(p, g, mid, 2.0 * M_PI * g.h * m / g.length);
    };
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const int d = j - k;
            const double mid1 = 0.5 * (g.x[j] + g.x[k]);
            double mid2 = mid1 + half;
            if (mid2 >= half) mid2 -= g.length;
            cd near = 0.0, far = 0.0;
            for (int m = -n / 2; m < n / 2; ++m) {
                const cd e = std::polar(1.0, 2.0 * M_PI * m * d / n);
                if (std::abs(d) <= n / 2) near += symbol_row(mid1, m) * e;
                if (std::abs(d) >= n / 2) far += symbol_row(mid2, m) * e;
            }
            if (std::abs(d) < n / 2) M(j, k) = near;
            else if (std::abs(d) > n / 2) M(j, k) = far;
            else M(j, k) = 0.5 * (near + far);
        }
    }
    return M / static_cast<double>(n);
}

Eigen::MatrixXcd fourier_multiplier_matrix(const std::function<double(double)>& a, const Grid& g) {
    const int n = g.n;
    std::vector<cd> c(n);
    const double xi_max = g.cutoff();
    for (int k = 0; k < n; ++k) {
        c[k] = k == n / 2 ? 0.5 * (a(-xi_max) + a(xi_max)) : a(g.eta_of_bin(k));
        if (!std::isfinite(c[k].real())) {
            const double xi = g.eta_of_bin(k);
            throw EvaluationError("multiplier is not finite at xi = " + std::to_string(xi), 0.0, xi);
        }
    }
    fft::backward(c, c);
    Eigen::MatrixXcd M(n, n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) M(j, k) = c[((j - k) % n + n) % n] / static_cast<double>(n);
    return M;
}

OperatorMatrix assemble_L(const Model& m, const Grid& g) {
    if (m.b.xi_dependent) {
        const double h = g.h;
        return weyl_matrix([&](double x, double xi) { return m.a(xi) + h * m.b(x, xi); }, g);
    }
    Eigen::MatrixXcd M = fourier_multiplier_matrix(m.a.eval, g);
    for (int j = 0; j < g.n; ++j) {
        const double v = m.V(g.x[j]);
        if (!std::isfinite(v)) throw EvaluationError("b is not finite", g.x[j], 0.0);
        M(j, j) += g.h * v;
    }
    return finish(std::move(M), g, 1e-9);
}

Eigen::VectorXcd apply_fourier_multiplier(const SymbolA& a, const Grid& g, const Eigen::VectorXcd& v) {
    const int n = g.n;
    if (v.size() != n)
        throw ShapeError("vector of length " + std::to_string(v.size()) + " on a grid of " +
                         std::to_string(n) + " points");
    std::vector<cd> buf(v.data(), v.data() + n);
    fft::forward(buf, buf);
    const double xi_max = g.cutoff();
    for (int k = 0; k < n; ++k) {
        const double mult = k == n / 2 ? 0.5 * (a(-xi_max) + a(xi_max)) : a(g.eta_of_bin(k));
        buf[k] *= mult / n;
    }
    fft::backward(buf, buf);
    return Eigen::Map<Eigen::VectorXcd>(buf.data(), n);
}

void dump_matrix(const OperatorMatrix& M, const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "dump format is little endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    const std::uint32_t n = static_cast<std::uint32_t>(M.entries.rows());
    const double h = M.grid.h;
    out.write("PDOW", 4);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    for (Eigen::Index j = 0; j < M.entries.rows(); ++j)
        for (Eigen::Index k = 0; k < M.entries.cols(); ++k) {
            const cd z = M.entries(j, k);
            const double re = z.real(), im = z.imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof re);
            out.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
    if (!out) throw ConfigError("write to " + path + " failed");
}

double parity_covariance_defect(const Eigen::MatrixXcd& M) {
    const Eigen::Index n = M.rows();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < n; ++j)
            acc += std::norm(M((n - j) % n, (n - k) % n) - M(j, k));
    return std::sqrt(acc) / M.norm();
}

Eigen::VectorXcd reflect(const Eigen::VectorXcd& v) {
    const Eigen::Index n = v.size();
    Eigen::VectorXcd r(n);
    for (Eigen::Index j = 0; j < n; ++j) r[j] = v[(n - j) % n];
    return r;
}

}  // namespace tunnel
