#pragma once

#include "tunnel/model.hpp"
#include "tunnel/numerics.hpp"
#include "tunnel/quantize.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace tunnel {

enum class Side { left, right };

// Nonnegative bump closing the right well:
// k(x) = height exp(-1/(1-t^2)), t = (x - x_r)/eta.
struct SealingFunction {
    double center = 1.0;
    double eta = 0.4;
    double height = 2.0;

    double operator()(double x) const;
    double support_lo() const { return center - eta; }
    double support_hi() const { return center + eta; }
};

/// Builds the left seal and checks that V + k has x_left as its only global
/// minimum (ConstructionError otherwise). height defaults to 2 V(0).
SealingFunction sealing_function(const Model& m, double eta = 0.4,
                                 std::optional<double> height = std::nullopt);

/// b_side(x, 0) = V(x) + k(x) for the left well, V(x) + k(-x) for the right.
double sealed_potential(const Model& m, const SealingFunction& seal, Side side, double x);

/// assemble_L + h diag(k) with k reflected for the right well.
OperatorMatrix assemble_onewell(const Model& m, const Grid& g, Side side, const SealingFunction& seal);

// Agmon phase of one well, sqrt(2/a2) |int_{x_w}^x sqrt(b_side(s,0)) ds|,
// tabulated once on [-range, range]. The right phase is the reflection of the
// left one. Copies share the tables.
class AgmonPhase {
public:
    AgmonPhase(const Model& m, const ModelConstants& c, const SealingFunction& seal, Side side,
               double range = 16.0);

    Side side() const noexcept { return side_; }
    double x_well() const;
    double A_window() const;
    double a2() const;

    double operator()(double x) const;  // Phi
    double truncated(double x) const;   // Phi~
    double derivative(double x) const;  // Phi' (smooth branch, exact)
    double second_derivative(double x) const;
    double second_derivative_at_well() const;  // sqrt(V2/a2)
    double sealed_b(double x) const;           // b_side(x, 0)

    // chi0 used in Phi~: 1 on [-A, A], 0 outside [-2A, 2A]
    double chi0(double x) const;

private:
    struct Tables;
    std::shared_ptr<const Tables> t_;
    Side side_;
};

// u_{1,0} of the left well (reflected for the right), tabulated like the phase.
class LeadingAmplitude {
public:
    LeadingAmplitude(const Model& m, const AgmonPhase& phase);

    cd operator()(double x) const;

private:
    struct Tables;
    std::shared_ptr<const Tables> t_;
    Side side_;
};

cd leading_amplitude(const Model& m, const AgmonPhase& phase, double x);

struct WkbQuasimode {
    Eigen::VectorXcd vector;  // dx-normalized
    double lambda_wkb = 0.0;
    double norm_raw = 0.0;
};

/// Cutoff of the quasimode: 1 on [-2A, 2A], supported in [-3A, 3A].
double quasimode_cutoff(const AgmonPhase& phase, double x);

WkbQuasimode wkb_quasimode(const ModelConstants& c, const Grid& g, const AgmonPhase& phase,
                           const LeadingAmplitude& u);

double wkb_eigenvalue(const ModelConstants& c, double h, int n);

/// max over xs of |i Phi' d_xi b u + (a2/2) Phi'' u + a2 Phi' u' - c0 u|,
/// u' by a five-point difference with step du.
double transport_residual(const Model& m, const ModelConstants& c, const AgmonPhase& phase,
                          const std::function<cd(double)>& u, const std::vector<double>& xs,
                          double du = 1e-3);
double transport_residual(const Model& m, const ModelConstants& c, const AgmonPhase& phase,
                          const std::vector<double>& xs);

/// max over xs of |Phi'(x)^2 - (2/a2) b_side(x,0)| with Phi' obtained by
/// differentiating the tabulated quadrature.
double eikonal_residual(const AgmonPhase& phase, const std::vector<double>& xs);

/// ||(M - lambda_wkb) q|| / ||q||
double quasimode_residual(const OperatorMatrix& M, const WkbQuasimode& q);

}  // namespace tunnel
