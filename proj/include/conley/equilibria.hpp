#pragma once

// Equilibria of the Lorenz system, their linear type, and detection of the
// pitchfork, homoclinic, heteroclinic-absorption and Hopf parameter values.

#include "conley/flow.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace conley {

enum class Stability { Attractor, Saddle, Repeller, Nonhyperbolic };
enum class EquilibriumLabel { Origin, C1, C2, Other };

std::string to_string(Stability s);
std::string to_string(EquilibriumLabel l);

/// Real parts within this band of zero count as non-hyperbolic.
inline constexpr double kHyperbolicDeadBand = 1e-9;

struct Equilibrium {
    StateVec state;
    std::vector<std::complex<double>> eigenvalues;
    int unstable_dim = 0;
    Stability classification = Stability::Nonhyperbolic;
    EquilibriumLabel label = EquilibriumLabel::Other;
    double residual = 0.0;  ///< ||F(state)||
};

/// Roots of the monic cubic x^3 + a2 x^2 + a1 x + a0 (Cardano, then one
/// Newton polish per root).  Real roots come first, in ascending order.
std::array<std::complex<double>, 3> cubic_roots(double a2, double a1, double a0);

/// Eigenvalues of a 3x3 matrix through its characteristic cubic.
std::array<std::complex<double>, 3> eigenvalues3(const Jacobian& m);

/// Eigenvalues of the model's linearization at x.  Lorenz (any 3-D field)
/// uses the characteristic cubic; the normal form is read off analytically.
std::vector<std::complex<double>> linearization_spectrum(const VectorField& model, const StateVec& x);

Stability classify(const std::vector<std::complex<double>>& eigenvalues, int* unstable_dim = nullptr);
Stability classify(const Equilibrium& eq);

/// Origin and, for r > 1, C1 = (+s, +s, r-1) and C2 = (-s, -s, r-1) with
/// s = sqrt(b (r - 1)), Newton-refined.
std::vector<Equilibrium> find_equilibria(const LorenzParams& p);

/// The origin of the normal form.
Equilibrium normal_form_origin(const NormalFormParams& p);

/// Unit eigenvector for a real eigenvalue of a 3x3 matrix, oriented so that
/// its first nonzero component is positive.
StateVec real_eigenvector3(const Jacobian& m, double eigenvalue);

enum class Side { Plus, Minus };

/// Branch of the one-dimensional unstable manifold of `eq`, integrated over
/// [0, cfg.max_time] from eq.state +/- epsilon * v_u.  Non-positive epsilon
/// selects the default 1e-6 * (trapping box diameter).
Trajectory unstable_manifold_branch(const LorenzModel& model, const Equilibrium& eq, Side side, double epsilon,
                                    const IntegratorConfig& cfg);

enum class ThresholdKind { Pitchfork, Homoclinic, Heteroclinic, Hopf };
std::string to_string(ThresholdKind k);

struct CriterionSample {
    double r;
    int sign;
    double value;
};

struct ThresholdResult {
    ThresholdKind kind = ThresholdKind::Pitchfork;
    double r_star = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    std::vector<CriterionSample> criterion_log;
};

void to_json(nlohmann::json& j, const ThresholdResult& t);

struct ThresholdOptions {
    LorenzParams base;  ///< sigma and b; r is swept
    std::pair<double, double> bracket{0.0, 0.0};
    IntegratorConfig integrator = IntegratorConfig::precise(1e-12);
    double horizon = 500.0;       ///< heteroclinic settle time T
    double settle_radius = 1e-3;  ///< heteroclinic settle ball

    static ThresholdOptions defaults(ThresholdKind kind);
};

/// Eigenvalue of the origin's linearization nearest zero.  Changes sign at r = 1.
double pitchfork_criterion(const LorenzParams& p);
/// Largest real part among the eigenvalues of C1.  Changes sign at the Hopf value.
double hopf_criterion(const LorenzParams& p);
/// x at the second descending crossing of z = r - 1 by the + branch of the
/// origin's unstable manifold, counted after it leaves the unit ball.  The
/// first descent belongs to the initial loop around C1 and is positive for
/// every r near r_H; the second is positive while the branch stays on its
/// own lobe and negative once it switches.
double homoclinic_criterion(const LorenzParams& p, const IntegratorConfig& cfg);

enum class SettleOutcome { Settles, Wanders, Inconclusive };
struct SettleResult {
    SettleOutcome outcome;
    double min_distance;  ///< closest approach to C1 or C2
    double settle_time;   ///< time of entering the settle ball, or horizon
};
/// Does the + branch of the origin's unstable manifold enter the settle
/// ball around C1 or C2 within the horizon?
SettleResult heteroclinic_criterion(const LorenzParams& p, const IntegratorConfig& cfg, double horizon,
                                    double settle_radius);

ThresholdResult pitchfork_threshold(double tol, const ThresholdOptions& opts = ThresholdOptions::defaults(ThresholdKind::Pitchfork));
ThresholdResult hopf_threshold(double tol, const ThresholdOptions& opts = ThresholdOptions::defaults(ThresholdKind::Hopf));
ThresholdResult homoclinic_threshold(double tol, const ThresholdOptions& opts = ThresholdOptions::defaults(ThresholdKind::Homoclinic));
ThresholdResult heteroclinic_threshold(double tol, const ThresholdOptions& opts = ThresholdOptions::defaults(ThresholdKind::Heteroclinic));

}  // namespace conley
