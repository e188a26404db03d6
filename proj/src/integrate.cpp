#include "conley/errors.hpp"
#include "conley/flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace conley {

void IntegratorConfig::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw ContractViolation("integrator tolerances must be positive");
    }
    if (!(max_step > 0.0)) {
        throw ContractViolation("integrator max_step must be positive");
    }
    if (!(max_time > 0.0)) {
        throw ContractViolation("integrator max_time must be positive");
    }
    if (guard) {
        guard->validate();
    }
}

IntegratorConfig IntegratorConfig::precise(double tol)
{
    IntegratorConfig cfg;
    cfg.method = Method::AdaptiveRK45;
    cfg.abs_tol = tol;
    cfg.rel_tol = tol;
    cfg.max_step = 0.05;
    return cfg;
}

IntegratorConfig IntegratorConfig::grid(double step)
{
    IntegratorConfig cfg;
    cfg.method = Method::FixedRK4;
    cfg.abs_tol = 1e-7;
    cfg.rel_tol = 1e-7;
    cfg.max_step = step;
    return cfg;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat, the embedded error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

std::vector<double> to_vector(const StateVec& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

void check_state(const StateVec& x, double t, const IntegratorConfig& cfg)
{
    if (!all_finite(x)) {
        throw DivergenceError("non-finite state during integration", t);
    }
    if (cfg.guard && !cfg.guard->contains(x)) {
        throw DivergenceError("trajectory left the divergence guard box", t);
    }
}

double integrate_rk4(const VectorField& model, const StateVec& x0, double t0, double t1, const IntegratorConfig& cfg,
                     const StepObserver& observer, StateVec& out)
{
    const int n = model.dimension();
    StateVec x = x0;
    StateVec next(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double span = t1 - t0;
    const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(span / cfg.max_step - 1e-9)));
    const double h = span / static_cast<double>(steps);
    double t = t0;
    for (long long s = 0; s < steps; ++s) {
        model.eval(x, k1);
        tmp = x + 0.5 * h * k1;
        model.eval(tmp, k2);
        tmp = x + 0.5 * h * k2;
        model.eval(tmp, k3);
        tmp = x + h * k3;
        model.eval(tmp, k4);
        next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double tn = (s + 1 == steps) ? t1 : t0 + static_cast<double>(s + 1) * h;
        check_state(next, tn, cfg);
        const bool go_on = !observer || observer(Step{t, x, tn, next});
        x = next;
        t = tn;
        if (!go_on) {
            break;
        }
    }
    out = x;
    return t;
}

double integrate_rk45(const VectorField& model, const StateVec& x0, double t0, double t1, const IntegratorConfig& cfg,
                      const StepObserver& observer, StateVec& out)
{
    const int n = model.dimension();
    StateVec x = x0;
    StateVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), next(n), err(n);
    model.eval(x, k1);

    double t = t0;
    double h = std::min(cfg.max_step, t1 - t0);
    {
        // Initial step from the size of the derivative (Hairer-Norsett-Wanner).
        const double scale = cfg.abs_tol + cfg.rel_tol * x.lpNorm<Eigen::Infinity>();
        const double d0 = x.lpNorm<Eigen::Infinity>() / scale;
        const double d1 = k1.lpNorm<Eigen::Infinity>() / scale;
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, std::max(h0, 1e-12));
    }

    while (t < t1) {
        if (t + h > t1) {
            h = t1 - t;
        }
        tmp = x + h * a21 * k1;
        model.eval(tmp, k2);
        tmp = x + h * (a31 * k1 + a32 * k2);
        model.eval(tmp, k3);
        tmp = x + h * (a41 * k1 + a42 * k2 + a43 * k3);
        model.eval(tmp, k4);
        tmp = x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        model.eval(tmp, k5);
        tmp = x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        model.eval(tmp, k6);
        next = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        model.eval(next, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(x.lpNorm<Eigen::Infinity>(),
                                                                   next.lpNorm<Eigen::Infinity>());
        const double ratio = err.lpNorm<Eigen::Infinity>() / scale;

        if (!std::isfinite(ratio)) {
            h *= 0.1;
        } else if (ratio <= 1.0) {
            const double tn = (t + h >= t1) ? t1 : t + h;
            check_state(next, tn, cfg);
            const bool go_on = !observer || observer(Step{t, x, tn, next});
            x = next;
            k1 = k7;
            t = tn;
            if (!go_on) {
                break;
            }
            const double grow = ratio == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(ratio, -0.2));
            h = std::min(cfg.max_step, h * grow);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(ratio, -0.2));
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw IntegrationFailure("step size underflow", t, to_vector(x));
        }
    }
    out = x;
    return t;
}

}  // namespace

double integrate_observed(const VectorField& model, const StateVec& x0, double t0, double t1,
                          const IntegratorConfig& cfg, const StepObserver& observer, StateVec& out)
{
    cfg.validate();
    if (x0.size() != model.dimension()) {
        throw ContractViolation("initial state dimension does not match model");
    }
    if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) {
        throw ContractViolation("time span must be finite with t1 >= t0");
    }
    check_state(x0, t0, cfg);
    if (t1 == t0) {
        out = x0;
        return t0;
    }
    if (cfg.method == Method::FixedRK4) {
        return integrate_rk4(model, x0, t0, t1, cfg, observer, out);
    }
    return integrate_rk45(model, x0, t0, t1, cfg, observer, out);
}

Trajectory integrate(const VectorField& model, const StateVec& x0, double t0, double t1, const IntegratorConfig& cfg)
{
    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(x0);
    StateVec last;
    integrate_observed(model, x0, t0, t1, cfg,
                       [&](const Step& s) {
                           traj.times.push_back(s.t1);
                           traj.states.push_back(s.x1);
                           return true;
                       },
                       last);
    return traj;
}

StateVec time_tau_map(const VectorField& model, const StateVec& x, double tau, const IntegratorConfig& cfg)
{
    if (!(tau > 0.0)) {
        throw ContractViolation("time_tau_map requires tau > 0");
    }
    StateVec out;
    integrate_observed(model, x, 0.0, tau, cfg, nullptr, out);
    return out;
}

namespace {

// Classical RK4 on raw arrays; f(u, du) evaluates the field.
template <typename F>
void raw_rk4(int n, F&& f, StateVec& x, long long steps, double h)
{
    double u[kMaxDim], k1[kMaxDim], k2[kMaxDim], k3[kMaxDim], k4[kMaxDim], t[kMaxDim];
    for (int i = 0; i < n; ++i) {
        u[i] = x[i];
    }
    const double hh = 0.5 * h;
    const double h6 = h / 6.0;
    for (long long s = 0; s < steps; ++s) {
        f(u, k1);
        for (int i = 0; i < n; ++i) {
            t[i] = u[i] + hh * k1[i];
        }
        f(t, k2);
        for (int i = 0; i < n; ++i) {
            t[i] = u[i] + hh * k2[i];
        }
        f(t, k3);
        for (int i = 0; i < n; ++i) {
            t[i] = u[i] + h * k3[i];
        }
        f(t, k4);
        for (int i = 0; i < n; ++i) {
            u[i] += h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    for (int i = 0; i < n; ++i) {
        x[i] = u[i];
    }
}

}  // namespace

void rk4_advance(const VectorField& model, StateVec& x, double tau, double step)
{
    const int n = model.dimension();
    const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(tau / step - 1e-9)));
    const double h = tau / static_cast<double>(steps);
    if (const auto* lorenz = dynamic_cast<const LorenzModel*>(&model)) {
        const LorenzParams& p = lorenz->params();
        raw_rk4(
            3,
            [&](const double* u, double* du) {
                du[0] = p.sigma * (u[1] - u[0]);
                du[1] = p.r * u[0] - u[1] - u[0] * u[2];
                du[2] = u[0] * u[1] - p.b * u[2];
            },
            x, steps, h);
        return;
    }
    if (const auto* nf = dynamic_cast<const NormalFormModel*>(&model)) {
        const NormalFormParams& p = nf->params();
        raw_rk4(
            p.n,
            [&](const double* u, double* du) {
                double sq = 0.0;
                for (int i = 0; i < p.k; ++i) {
                    sq += u[i] * u[i];
                }
                const double radial = p.lambda - sq;
                for (int i = 0; i < p.k; ++i) {
                    du[i] = radial * u[i];
                }
                for (int i = p.k; i < p.n; ++i) {
                    du[i] = -u[i];
                }
            },
            x, steps, h);
        return;
    }
    StateVec k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (long long s = 0; s < steps; ++s) {
        model.eval(x, k1);
        tmp = x + 0.5 * h * k1;
        model.eval(tmp, k2);
        tmp = x + 0.5 * h * k2;
        model.eval(tmp, k3);
        tmp = x + h * k3;
        model.eval(tmp, k4);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

std::vector<StateVec> omega_limit_sample(const VectorField& model, const StateVec& x0, double t_transient,
                                         double t_collect, const IntegratorConfig& cfg)
{
    if (!(t_transient > 0.0) || !(t_collect > 0.0)) {
        throw ContractViolation("omega_limit_sample requires positive transient and collection times");
    }
    IntegratorConfig run = cfg;
    if (!run.guard) {
        const bool known = dynamic_cast<const LorenzModel*>(&model) || dynamic_cast<const NormalFormModel*>(&model);
        if (known) {
            TrappingBox box = trapping_box(model);
            // The start point may lie outside the trapping box; widen to include it.
            for (Eigen::Index i = 0; i < x0.size(); ++i) {
                box.lo[i] = std::min(box.lo[i], x0[i]);
                box.hi[i] = std::max(box.hi[i], x0[i]);
            }
            run.guard = box.scaled(2.0);
        }
    }
    StateVec at_transient;
    integrate_observed(model, x0, 0.0, t_transient, run, nullptr, at_transient);
    std::vector<StateVec> cloud;
    cloud.push_back(at_transient);
    StateVec last;
    integrate_observed(model, at_transient, t_transient, t_transient + t_collect, run,
                       [&](const Step& s) {
                           cloud.push_back(s.x1);
                           return true;
                       },
                       last);
    return cloud;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
    os << "t";
    if (n == 3) {
        os << ",x,y,z";
    } else {
        for (int i = 0; i < n; ++i) {
            os << ",x" << (i + 1);
        }
    }
    os << '\n';
    os << std::setprecision(17);
    for (std::size_t s = 0; s < traj.size(); ++s) {
        os << traj.times[s];
        for (int i = 0; i < n; ++i) {
            os << ',' << traj.states[s][i];
        }
        os << '\n';
    }
}

}  // namespace conley

namespace conley {

PlaneCrossing refine_plane_crossing(const VectorField& model, const Step& step, int axis, double level,
                                    const IntegratorConfig& cfg, double time_tol)
{
    const double g0 = step.x0[axis] - level;
    const double g1 = step.x1[axis] - level;
    if (g0 == 0.0) {
        return PlaneCrossing{step.t0, step.x0};
    }
    if (g1 == 0.0) {
        return PlaneCrossing{step.t1, step.x1};
    }
    if ((g0 > 0.0) == (g1 > 0.0)) {
        throw ContractViolation("refine_plane_crossing: step does not straddle the plane");
    }
    IntegratorConfig local = cfg;
    local.guard.reset();
    const double h = step.t1 - step.t0;
    double lo = 0.0;
    double hi = h;
    const bool rising = g0 < 0.0;
    double tau = h * g0 / (g0 - g1);
    StateVec x = step.x0;
    StateVec dx(model.dimension());
    for (int it = 0; it < 100; ++it) {
        if (tau <= lo || tau >= hi) {
            tau = 0.5 * (lo + hi);
        }
        integrate_observed(model, step.x0, 0.0, tau, local, nullptr, x);
        const double g = x[axis] - level;
        if (g == 0.0) {
            break;
        }
        if ((g < 0.0) == rising) {
            lo = tau;
        } else {
            hi = tau;
        }
        model.eval(x, dx);
        double next = dx[axis] != 0.0 ? tau - g / dx[axis] : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double delta = std::abs(next - tau);
        tau = next;
        if (delta <= time_tol || hi - lo <= time_tol) {
            integrate_observed(model, step.x0, 0.0, tau, local, nullptr, x);
            break;
        }
    }
    return PlaneCrossing{step.t0 + tau, x};
}

}  // namespace conley
