#pragma once

// Parametrized vector fields, numerical integration and trapping regions.

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace conley {

/// Largest state dimension supported.  Tangent-augmented Lorenz states
/// (3 + 3x3) need 12.
inline constexpr int kMaxDim = 12;

using StateVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

StateVec make_state(std::initializer_list<double> coords);
bool all_finite(const StateVec& x);

struct LorenzParams {
    double sigma = 10.0;
    double b = 8.0 / 3.0;
    double r = 28.0;

    void validate() const;
};

/// Radial normal form: x_u' = lambda x_u - |x_u|^2 x_u on the first k
/// coordinates, x_s' = -x_s on the remaining n - k.
struct NormalFormParams {
    int n = 3;
    int k = 2;
    double lambda = 0.25;

    void validate() const;
};

class VectorField {
public:
    virtual ~VectorField() = default;

    virtual int dimension() const = 0;
    virtual void eval(const StateVec& x, StateVec& dx) const = 0;
    virtual void jacobian(const StateVec& x, Jacobian& jac) const = 0;
    virtual std::string describe() const = 0;
};

class LorenzModel final : public VectorField {
public:
    explicit LorenzModel(LorenzParams p = {});

    int dimension() const override { return 3; }
    void eval(const StateVec& x, StateVec& dx) const override;
    void jacobian(const StateVec& x, Jacobian& jac) const override;
    std::string describe() const override;

    const LorenzParams& params() const noexcept { return p_; }

private:
    LorenzParams p_;
};

class NormalFormModel final : public VectorField {
public:
    explicit NormalFormModel(NormalFormParams p);

    int dimension() const override { return p_.n; }
    void eval(const StateVec& x, StateVec& dx) const override;
    void jacobian(const StateVec& x, Jacobian& jac) const override;
    std::string describe() const override;

    const NormalFormParams& params() const noexcept { return p_; }

private:
    NormalFormParams p_;
};

/// x' = rate * x.  Test model; rate 0 gives the constant zero field.
class LinearModel final : public VectorField {
public:
    LinearModel(int n, double rate);

    int dimension() const override { return n_; }
    void eval(const StateVec& x, StateVec& dx) const override;
    void jacobian(const StateVec& x, Jacobian& jac) const override;
    std::string describe() const override;

private:
    int n_;
    double rate_;
};

/// Base field augmented with `columns` tangent vectors: state = [x; V(:)],
/// V' = DF(x) V.  V is stored column-major after x.
class TangentModel final : public VectorField {
public:
    TangentModel(const VectorField& base, int columns);

    int dimension() const override { return n_ * (1 + cols_); }
    void eval(const StateVec& x, StateVec& dx) const override;
    void jacobian(const StateVec& x, Jacobian& jac) const override;
    std::string describe() const override;

private:
    const VectorField& base_;
    int n_;
    int cols_;
};

StateVec eval_field(const VectorField& model, const StateVec& x);
Jacobian eval_jacobian(const VectorField& model, const StateVec& x);

struct TrappingBox {
    StateVec lo;
    StateVec hi;

    int dimension() const { return static_cast<int>(lo.size()); }
    bool contains(const StateVec& x) const;
    double diameter() const { return (hi - lo).norm(); }
    StateVec center() const { return 0.5 * (lo + hi); }
    /// Box with the same center and every side scaled by `factor`.
    TrappingBox scaled(double factor) const;
    void validate() const;
};

enum class Method { FixedRK4, AdaptiveRK45 };

struct IntegratorConfig {
    Method method = Method::AdaptiveRK45;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Step bound for RK45; the step itself for RK4.
    double max_step = 0.05;
    /// Horizon used by open-ended operations (manifold branches, searches).
    double max_time = 1000.0;
    /// Leaving this box aborts with DivergenceError.
    std::optional<TrappingBox> guard;

    void validate() const;

    /// Tight tolerances used for threshold detection.
    static IntegratorConfig precise(double tol = 1e-10);
    /// Fixed-step RK4, bitwise reproducible, for grid work.
    static IntegratorConfig grid(double step = 0.01);
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVec> states;

    std::size_t size() const { return times.size(); }
    const StateVec& back() const { return states.back(); }
};

/// One accepted step, handed to observers.
struct Step {
    double t0;
    const StateVec& x0;
    double t1;
    const StateVec& x1;
};

/// Return false to stop the integration after this step.
using StepObserver = std::function<bool(const Step&)>;

/// Integrates from (t0, x0) towards t1, calling `observer` after every
/// accepted step.  Returns the final time reached (t1 unless stopped) and
/// stores the final state in `out`.
double integrate_observed(const VectorField& model, const StateVec& x0, double t0, double t1,
                          const IntegratorConfig& cfg, const StepObserver& observer, StateVec& out);

Trajectory integrate(const VectorField& model, const StateVec& x0, double t0, double t1,
                     const IntegratorConfig& cfg);

StateVec time_tau_map(const VectorField& model, const StateVec& x, double tau, const IntegratorConfig& cfg);

/// Fixed-step RK4 advance of `x` by `tau` in place, no allocation, no guard.
/// Used by the cubical engine's inner loop.
void rk4_advance(const VectorField& model, StateVec& x, double tau, double step);

/// Samples of the trajectory of x0 on [t_transient, t_transient + t_collect].
/// When cfg.guard is unset the guard defaults to twice the trapping box of
/// Lorenz and normal-form models.
std::vector<StateVec> omega_limit_sample(const VectorField& model, const StateVec& x0, double t_transient,
                                         double t_collect, const IntegratorConfig& cfg);

/// Largest value of V = r x^2 + sigma y^2 + sigma (z - 2r)^2 on the region
/// where dV/dt >= 0.  Any level above it bounds a forward-invariant ellipsoid.
double lorenz_ellipsoid_bound(const LorenzParams& p);

/// Safety factor applied to lorenz_ellipsoid_bound.
inline constexpr double kEllipsoidSafety = 1.2;

/// Axis-aligned forward-invariant box for Lorenz and normal-form models,
/// certified by sampling.  Throws CertificationFailure or ContractViolation.
TrappingBox trapping_box(const VectorField& model);

struct PlaneCrossing {
    double time;
    StateVec state;
};

/// Locates the time within `step` at which coordinate `axis` equals `level`.
/// The step endpoints must straddle the level.  Safeguarded Newton in time,
/// each evaluation a short re-integration from the step start.
PlaneCrossing refine_plane_crossing(const VectorField& model, const Step& step, int axis, double level,
                                    const IntegratorConfig& cfg, double time_tol = 1e-12);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace conley
