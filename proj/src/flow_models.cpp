#include "conley/errors.hpp"
#include "conley/flow.hpp"

#include <cmath>
#include <sstream>

namespace conley {

StateVec make_state(std::initializer_list<double> coords)
{
    StateVec x(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (double c : coords) {
        x[i++] = c;
    }
    return x;
}

bool all_finite(const StateVec& x)
{
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            return false;
        }
    }
    return true;
}

void LorenzParams::validate() const
{
    if (!(sigma > 0.0) || !(b > 0.0) || !(r > 0.0)) {
        throw ContractViolation("Lorenz parameters must be positive");
    }
}

void NormalFormParams::validate() const
{
    if (n < 2 || n > kMaxDim) {
        throw ContractViolation("normal form dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
    }
    if (k < 1 || k > n) {
        throw ContractViolation("normal form unstable dimension must satisfy 1 <= k <= n");
    }
    if (!std::isfinite(lambda)) {
        throw ContractViolation("normal form lambda must be finite");
    }
}

namespace {

void check_dim(const VectorField& model, const StateVec& x)
{
    if (x.size() != model.dimension()) {
        throw ContractViolation("state dimension " + std::to_string(x.size()) + " does not match model dimension " +
                                std::to_string(model.dimension()));
    }
}

}  // namespace

LorenzModel::LorenzModel(LorenzParams p) : p_(p) { p_.validate(); }

void LorenzModel::eval(const StateVec& x, StateVec& dx) const
{
    dx.resize(3);
    dx[0] = p_.sigma * (x[1] - x[0]);
    dx[1] = p_.r * x[0] - x[1] - x[0] * x[2];
    dx[2] = x[0] * x[1] - p_.b * x[2];
}

void LorenzModel::jacobian(const StateVec& x, Jacobian& jac) const
{
    jac.resize(3, 3);
    jac << -p_.sigma, p_.sigma, 0.0,
           p_.r - x[2], -1.0, -x[0],
           x[1], x[0], -p_.b;
}

std::string LorenzModel::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << "lorenz(sigma=" << p_.sigma << ", b=" << p_.b << ", r=" << p_.r << ")";
    return os.str();
}

NormalFormModel::NormalFormModel(NormalFormParams p) : p_(p) { p_.validate(); }

void NormalFormModel::eval(const StateVec& x, StateVec& dx) const
{
    dx.resize(p_.n);
    const double radial = p_.lambda - x.head(p_.k).squaredNorm();
    for (int i = 0; i < p_.k; ++i) {
        dx[i] = radial * x[i];
    }
    for (int i = p_.k; i < p_.n; ++i) {
        dx[i] = -x[i];
    }
}

void NormalFormModel::jacobian(const StateVec& x, Jacobian& jac) const
{
    const int n = p_.n;
    const int k = p_.k;
    jac.setZero(n, n);
    const double radial = p_.lambda - x.head(k).squaredNorm();
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            jac(i, j) = -2.0 * x[i] * x[j];
        }
        jac(i, i) += radial;
    }
    for (int i = k; i < n; ++i) {
        jac(i, i) = -1.0;
    }
}

std::string NormalFormModel::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << "normal_form(n=" << p_.n << ", k=" << p_.k << ", lambda=" << p_.lambda << ")";
    return os.str();
}

LinearModel::LinearModel(int n, double rate) : n_(n), rate_(rate)
{
    if (n < 1 || n > kMaxDim) {
        throw ContractViolation("linear model dimension out of range");
    }
}

void LinearModel::eval(const StateVec& x, StateVec& dx) const { dx = rate_ * x; }

void LinearModel::jacobian(const StateVec&, Jacobian& jac) const
{
    jac.setZero(n_, n_);
    jac.diagonal().setConstant(rate_);
}

std::string LinearModel::describe() const
{
    std::ostringstream os;
    os << "linear(n=" << n_ << ", rate=" << rate_ << ")";
    return os.str();
}

TangentModel::TangentModel(const VectorField& base, int columns)
    : base_(base), n_(base.dimension()), cols_(columns)
{
    if (columns < 1 || n_ * (1 + columns) > kMaxDim) {
        throw ContractViolation("tangent model exceeds the supported state dimension");
    }
}

void TangentModel::eval(const StateVec& x, StateVec& dx) const
{
    dx.resize(dimension());
    StateVec base_x = x.head(n_);
    StateVec base_dx(n_);
    base_.eval(base_x, base_dx);
    dx.head(n_) = base_dx;
    Jacobian jac;
    base_.jacobian(base_x, jac);
    for (int c = 0; c < cols_; ++c) {
        dx.segment(n_ * (1 + c), n_) = jac * x.segment(n_ * (1 + c), n_);
    }
}

void TangentModel::jacobian(const StateVec&, Jacobian&) const
{
    throw ContractViolation("TangentModel has no Jacobian");
}

std::string TangentModel::describe() const
{
    return "tangent(" + base_.describe() + ", columns=" + std::to_string(cols_) + ")";
}

StateVec eval_field(const VectorField& model, const StateVec& x)
{
    check_dim(model, x);
    StateVec dx(model.dimension());
    model.eval(x, dx);
    return dx;
}

Jacobian eval_jacobian(const VectorField& model, const StateVec& x)
{
    check_dim(model, x);
    Jacobian jac;
    model.jacobian(x, jac);
    return jac;
}

bool TrappingBox::contains(const StateVec& x) const
{
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(x[i] >= lo[i] && x[i] <= hi[i])) {
            return false;
        }
    }
    return true;
}

TrappingBox TrappingBox::scaled(double factor) const
{
    const StateVec c = center();
    const StateVec half = 0.5 * factor * (hi - lo);
    return TrappingBox{c - half, c + half};
}

void TrappingBox::validate() const
{
    if (lo.size() != hi.size() || lo.size() == 0) {
        throw ContractViolation("box corners must have equal, positive dimension");
    }
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
            throw ContractViolation("box must satisfy lo < hi componentwise");
        }
    }
}

}  // namespace conley
