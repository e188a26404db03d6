#include "conley/equilibria.hpp"
#include "conley/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conley {

std::string to_string(Stability s)
{
    switch (s) {
    case Stability::Attractor: return "attractor";
    case Stability::Saddle: return "saddle";
    case Stability::Repeller: return "repeller";
    case Stability::Nonhyperbolic: return "nonhyperbolic";
    }
    return "unknown";
}

std::string to_string(EquilibriumLabel l)
{
    switch (l) {
    case EquilibriumLabel::Origin: return "origin";
    case EquilibriumLabel::C1: return "C1";
    case EquilibriumLabel::C2: return "C2";
    case EquilibriumLabel::Other: return "other";
    }
    return "unknown";
}

std::string to_string(ThresholdKind k)
{
    switch (k) {
    case ThresholdKind::Pitchfork: return "pitchfork";
    case ThresholdKind::Homoclinic: return "homoclinic";
    case ThresholdKind::Heteroclinic: return "heteroclinic";
    case ThresholdKind::Hopf: return "hopf";
    }
    return "unknown";
}

std::array<std::complex<double>, 3> cubic_roots(double a2, double a1, double a0)
{
    using cplx = std::complex<double>;
    // Depressed cubic t^3 + p t + q with x = t - a2/3.
    const double shift = a2 / 3.0;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    std::array<cplx, 3> roots;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + sq);
        const double v = std::cbrt(-q / 2.0 - sq);
        const double re = -(u + v) / 2.0 - shift;
        const double im = std::sqrt(3.0) / 2.0 * (u - v);
        roots = {cplx(u + v - shift, 0.0), cplx(re, std::abs(im)), cplx(re, -std::abs(im))};
    } else if (p == 0.0) {
        roots = {cplx(-shift), cplx(-shift), cplx(-shift)};
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            roots[k] = cplx(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift, 0.0);
        }
        std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) { return a.real() < b.real(); });
    }

    // One Newton polish per root.
    for (auto& z : roots) {
        const cplx f = ((z + a2) * z + a1) * z + a0;
        const cplx df = (3.0 * z + 2.0 * a2) * z + a1;
        if (std::abs(df) > 1e-300) {
            const cplx nz = z - f / df;
            if (std::isfinite(nz.real()) && std::isfinite(nz.imag())) {
                z = z.imag() == 0.0 ? cplx(nz.real(), 0.0) : nz;
            }
        }
    }
    return roots;
}

std::array<std::complex<double>, 3> eigenvalues3(const Jacobian& m)
{
    if (m.rows() != 3 || m.cols() != 3) {
        throw ContractViolation("eigenvalues3 requires a 3x3 matrix");
    }
    const double tr = m.trace();
    const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                          m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double det = m.determinant();
    return cubic_roots(-tr, minors, -det);
}

std::vector<std::complex<double>> linearization_spectrum(const VectorField& model, const StateVec& x)
{
    if (const auto* nf = dynamic_cast<const NormalFormModel*>(&model)) {
        const auto& p = nf->params();
        const double rad2 = x.head(p.k).squaredNorm();
        std::vector<std::complex<double>> ev;
        // Radial direction lambda - 3|x_u|^2, tangential lambda - |x_u|^2.
        if (rad2 > 0.0) {
            ev.emplace_back(p.lambda - 3.0 * rad2);
            for (int i = 1; i < p.k; ++i) {
                ev.emplace_back(p.lambda - rad2);
            }
        } else {
            for (int i = 0; i < p.k; ++i) {
                ev.emplace_back(p.lambda);
            }
        }
        for (int i = p.k; i < p.n; ++i) {
            ev.emplace_back(-1.0);
        }
        return ev;
    }
    if (model.dimension() != 3) {
        throw ContractViolation("linearization_spectrum supports 3-D fields and the normal form");
    }
    const auto ev = eigenvalues3(eval_jacobian(model, x));
    return {ev.begin(), ev.end()};
}

Stability classify(const std::vector<std::complex<double>>& eigenvalues, int* unstable_dim)
{
    int pos = 0;
    int neg = 0;
    bool flat = false;
    for (const auto& ev : eigenvalues) {
        if (std::abs(ev.real()) <= kHyperbolicDeadBand) {
            flat = true;
        } else if (ev.real() > 0.0) {
            ++pos;
        } else {
            ++neg;
        }
    }
    if (unstable_dim) {
        *unstable_dim = pos;
    }
    if (flat) {
        return Stability::Nonhyperbolic;
    }
    if (pos == 0) {
        return Stability::Attractor;
    }
    if (neg == 0) {
        return Stability::Repeller;
    }
    return Stability::Saddle;
}

Stability classify(const Equilibrium& eq) { return classify(eq.eigenvalues); }

namespace {

Equilibrium make_equilibrium(const VectorField& model, StateVec state, EquilibriumLabel label)
{
    Equilibrium eq;
    eq.state = std::move(state);
    eq.label = label;
    eq.eigenvalues = linearization_spectrum(model, eq.state);
    eq.classification = classify(eq.eigenvalues, &eq.unstable_dim);
    eq.residual = eval_field(model, eq.state).norm();
    return eq;
}

StateVec newton_refine(const VectorField& model, StateVec x)
{
    constexpr int kMaxIter = 50;
    for (int it = 0; it < kMaxIter; ++it) {
        const StateVec f = eval_field(model, x);
        if (f.norm() <= 1e-12) {
            return x;
        }
        const Jacobian jac = eval_jacobian(model, x);
        const StateVec dx = jac.fullPivLu().solve(f);
        if (!all_finite(dx)) {
            break;
        }
        x -= dx;
    }
    if (eval_field(model, x).norm() <= 1e-12) {
        return x;
    }
    throw NumericalFailure("Newton refinement of an equilibrium did not converge in 50 iterations");
}

}  // namespace

std::vector<Equilibrium> find_equilibria(const LorenzParams& p)
{
    p.validate();
    const LorenzModel model(p);
    std::vector<Equilibrium> out;
    out.push_back(make_equilibrium(model, make_state({0.0, 0.0, 0.0}), EquilibriumLabel::Origin));
    if (p.r > 1.0) {
        const double s = std::sqrt(p.b * (p.r - 1.0));
        out.push_back(make_equilibrium(model, newton_refine(model, make_state({s, s, p.r - 1.0})), EquilibriumLabel::C1));
        out.push_back(
            make_equilibrium(model, newton_refine(model, make_state({-s, -s, p.r - 1.0})), EquilibriumLabel::C2));
    }
    return out;
}

Equilibrium normal_form_origin(const NormalFormParams& p)
{
    const NormalFormModel model(p);
    return make_equilibrium(model, StateVec::Zero(p.n), EquilibriumLabel::Origin);
}

StateVec real_eigenvector3(const Jacobian& m, double eigenvalue)
{
    Jacobian a = m;
    a.diagonal().array() -= eigenvalue;
    // The null vector is orthogonal to every row; take the best-conditioned
    // cross product of two rows.
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const Eigen::Vector3d ri = a.row(i).transpose();
            const Eigen::Vector3d rj = a.row(j).transpose();
            const Eigen::Vector3d c = ri.cross(rj);
            if (c.norm() > best.norm()) {
                best = c;
            }
        }
    }
    if (best.norm() == 0.0) {
        throw NumericalFailure("eigenvector of a degenerate eigenvalue is not unique");
    }
    best.normalize();
    for (int i = 0; i < 3; ++i) {
        if (std::abs(best[i]) > 1e-14) {
            if (best[i] < 0.0) {
                best = -best;
            }
            break;
        }
    }
    return make_state({best[0], best[1], best[2]});
}

Trajectory unstable_manifold_branch(const LorenzModel& model, const Equilibrium& eq, Side side, double epsilon,
                                    const IntegratorConfig& cfg)
{
    if (eq.unstable_dim != 1 || eq.classification != Stability::Saddle) {
        throw ContractViolation("unstable_manifold_branch requires a saddle with one unstable direction");
    }
    double lead = 0.0;
    for (const auto& ev : eq.eigenvalues) {
        if (ev.real() > kHyperbolicDeadBand) {
            lead = ev.real();
        }
    }
    const StateVec v = real_eigenvector3(eval_jacobian(model, eq.state), lead);
    if (!(epsilon > 0.0)) {
        epsilon = 1e-6 * trapping_box(model).diameter();
    }
    const double sign = side == Side::Plus ? 1.0 : -1.0;
    return integrate(model, eq.state + sign * epsilon * v, 0.0, cfg.max_time, cfg);
}

void to_json(nlohmann::json& j, const ThresholdResult& t)
{
    nlohmann::json iters = nlohmann::json::array();
    for (const auto& s : t.criterion_log) {
        iters.push_back({{"r", s.r}, {"sign", s.sign}, {"value", s.value}});
    }
    j = nlohmann::json{{"kind", to_string(t.kind)},
                       {"r_star", t.r_star},
                       {"bracket", {t.bracket.first, t.bracket.second}},
                       {"iterations", iters}};
}

ThresholdOptions ThresholdOptions::defaults(ThresholdKind kind)
{
    ThresholdOptions o;
    switch (kind) {
    case ThresholdKind::Pitchfork: o.bracket = {0.5, 1.5}; break;
    case ThresholdKind::Hopf: o.bracket = {20.0, 30.0}; break;
    case ThresholdKind::Homoclinic: o.bracket = {13.0, 14.5}; break;
    case ThresholdKind::Heteroclinic: o.bracket = {23.5, 24.5}; break;
    }
    return o;
}

double pitchfork_criterion(const LorenzParams& p)
{
    const LorenzModel model(p);
    const auto ev = linearization_spectrum(model, make_state({0.0, 0.0, 0.0}));
    auto nearest = *std::min_element(ev.begin(), ev.end(),
                                     [](const auto& a, const auto& b) { return std::abs(a) < std::abs(b); });
    return nearest.real();
}

double hopf_criterion(const LorenzParams& p)
{
    if (!(p.r > 1.0)) {
        throw ContractViolation("hopf_criterion requires r > 1");
    }
    const auto eqs = find_equilibria(p);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& ev : eqs[1].eigenvalues) {
        best = std::max(best, ev.real());
    }
    return best;
}

namespace {

Equilibrium origin_saddle(const LorenzParams& p)
{
    auto eqs = find_equilibria(p);
    if (eqs.front().classification != Stability::Saddle) {
        throw ContractViolation("origin must be a saddle (r > 1) for manifold shooting");
    }
    return eqs.front();
}

StateVec branch_start(const LorenzModel& model, const Equilibrium& origin)
{
    double lead = 0.0;
    for (const auto& ev : origin.eigenvalues) {
        lead = std::max(lead, ev.real());
    }
    const StateVec v = real_eigenvector3(eval_jacobian(model, origin.state), lead);
    return origin.state + 1e-6 * trapping_box(model).diameter() * v;
}

}  // namespace

double homoclinic_criterion(const LorenzParams& p, const IntegratorConfig& cfg)
{
    const LorenzModel model(p);
    const Equilibrium origin = origin_saddle(p);
    const StateVec x0 = branch_start(model, origin);
    const double level = p.r - 1.0;
    bool left_ball = false;
    int descents = 0;
    std::optional<double> value;
    StateVec last;
    integrate_observed(model, x0, 0.0, cfg.max_time, cfg,
                       [&](const Step& s) {
                           if (!left_ball) {
                               left_ball = s.x1.norm() > 1.0;
                               return true;
                           }
                           // The first descent closes the initial excursion
                           // around C1; the second one decides the lobe.
                           if (s.x0[2] > level && s.x1[2] <= level && ++descents == 2) {
                               value = refine_plane_crossing(model, s, 2, level, cfg).state[0];
                               return false;
                           }
                           return true;
                       },
                       last);
    if (!value) {
        throw NoCrossingError("unstable branch has no second descending crossing of z = r - 1 within max_time");
    }
    return *value;
}

SettleResult heteroclinic_criterion(const LorenzParams& p, const IntegratorConfig& cfg, double horizon,
                                    double settle_radius)
{
    const LorenzModel model(p);
    const Equilibrium origin = origin_saddle(p);
    const auto eqs = find_equilibria(p);
    const StateVec c1 = eqs[1].state;
    const StateVec c2 = eqs[2].state;
    const StateVec x0 = branch_start(model, origin);

    SettleResult res{SettleOutcome::Wanders, std::numeric_limits<double>::infinity(), horizon};
    // Closest approach over the final fifth of the window separates slow
    // convergence from wandering.
    double tail_max = 0.0;
    const double tail_start = 0.8 * horizon;
    StateVec last;
    integrate_observed(model, x0, 0.0, horizon, cfg,
                       [&](const Step& s) {
                           const double d = std::min((s.x1 - c1).norm(), (s.x1 - c2).norm());
                           res.min_distance = std::min(res.min_distance, d);
                           if (s.t1 >= tail_start) {
                               tail_max = std::max(tail_max, d);
                           }
                           if (d < settle_radius) {
                               res.outcome = SettleOutcome::Settles;
                               res.settle_time = s.t1;
                               return false;
                           }
                           return true;
                       },
                       last);
    if (res.outcome != SettleOutcome::Settles && tail_max < 1.0) {
        res.outcome = SettleOutcome::Inconclusive;
    }
    return res;
}

namespace {

// Bisection on a sign criterion.  `sign_at(r, value)` returns +1/-1 and the
// criterion value.
template <typename F>
ThresholdResult bisect(ThresholdKind kind, double tol, std::pair<double, double> bracket, F&& sign_at)
{
    if (!(tol > 0.0)) {
        throw ContractViolation("threshold tolerance must be positive");
    }
    ThresholdResult res;
    res.kind = kind;
    double lo = bracket.first;
    double hi = bracket.second;
    if (!(lo < hi)) {
        throw ContractViolation("threshold bracket must satisfy lo < hi");
    }
    auto probe = [&](double r) {
        double value = 0.0;
        const int s = sign_at(r, value);
        res.criterion_log.push_back({r, s, value});
        return s;
    };
    const int s_lo = probe(lo);
    const int s_hi = probe(hi);
    if (s_lo == s_hi || s_lo == 0 || s_hi == 0) {
        throw BracketFailure(to_string(kind) + " criterion does not change sign on [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const int s = probe(mid);
        if (s == s_lo) {
            lo = mid;
        } else if (s == s_hi) {
            hi = mid;
        } else {
            // Exact zero of the criterion.
            lo = hi = mid;
        }
    }
    res.bracket = {lo, hi};
    res.r_star = 0.5 * (lo + hi);
    return res;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

LorenzParams at_r(const LorenzParams& base, double r)
{
    LorenzParams p = base;
    p.r = r;
    return p;
}

}  // namespace

ThresholdResult pitchfork_threshold(double tol, const ThresholdOptions& opts)
{
    return bisect(ThresholdKind::Pitchfork, tol, opts.bracket, [&](double r, double& value) {
        value = pitchfork_criterion(at_r(opts.base, r));
        return sign_of(value);
    });
}

ThresholdResult hopf_threshold(double tol, const ThresholdOptions& opts)
{
    return bisect(ThresholdKind::Hopf, tol, opts.bracket, [&](double r, double& value) {
        value = hopf_criterion(at_r(opts.base, r));
        return sign_of(value);
    });
}

ThresholdResult homoclinic_threshold(double tol, const ThresholdOptions& opts)
{
    return bisect(ThresholdKind::Homoclinic, tol, opts.bracket, [&](double r, double& value) {
        value = homoclinic_criterion(at_r(opts.base, r), opts.integrator);
        return sign_of(value);
    });
}

ThresholdResult heteroclinic_threshold(double tol, const ThresholdOptions& opts)
{
    return bisect(ThresholdKind::Heteroclinic, tol, opts.bracket, [&](double r, double& value) {
        const SettleResult s = heteroclinic_criterion(at_r(opts.base, r), opts.integrator, opts.horizon,
                                                      opts.settle_radius);
        if (s.outcome == SettleOutcome::Inconclusive) {
            throw InconclusiveError("settle-or-wander criterion unresolved at r = " + std::to_string(r), r);
        }
        value = s.min_distance;
        // +1: settles onto C1/C2, -1: wanders.
        return s.outcome == SettleOutcome::Settles ? 1 : -1;
    });
}

}  // namespace conley
