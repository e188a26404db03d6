#include "conley/errors.hpp"
#include "conley/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace conley {

namespace {

// Golden-section maximization of a unimodal function on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::max({fc, fd, f(0.5 * (a + b))});
}

// Coarse scan for the best sample, then golden-section on its neighbourhood.
double maximize_periodic(const std::function<double(double)>& f)
{
    constexpr int kScan = 720;
    const double step = 2.0 * std::numbers::pi / kScan;
    int best = 0;
    double best_val = f(0.0);
    for (int i = 1; i < kScan; ++i) {
        const double v = f(i * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    return std::max(best_val, golden_max(f, (best - 1) * step, (best + 1) * step));
}

}  // namespace

double lorenz_ellipsoid_bound(const LorenzParams& p)
{
    p.validate();
    const double r = p.r;
    const double s = p.sigma;
    const double b = p.b;
    // dV/dt = 2 sigma (b r^2 - r x^2 - y^2 - b (z - r)^2); V is maximized on
    // the boundary of the region where this is non-negative.  Lagrange
    // stationarity forces x = 0 or y = 0 unless sigma = 1, so the maximum lies
    // on one of two boundary ellipses.
    auto V = [&](double x, double y, double z) { return r * x * x + s * y * y + s * (z - 2 * r) * (z - 2 * r); };
    const double ax = std::sqrt(b * r);  // semi-axis in x
    const double ay = r * std::sqrt(b);  // semi-axis in y
    const double az = r;                 // semi-axis in z, centered at z = r
    const double slice_x0 = maximize_periodic([&](double th) { return V(0.0, ay * std::sin(th), r + az * std::cos(th)); });
    const double slice_y0 = maximize_periodic([&](double th) { return V(ax * std::sin(th), 0.0, r + az * std::cos(th)); });
    double best = std::max(slice_x0, slice_y0);
    // Coarse sweep of the full boundary guards the sigma = 1 case.
    constexpr int kLat = 90;
    constexpr int kLon = 180;
    for (int i = 0; i <= kLat; ++i) {
        const double th = std::numbers::pi * i / kLat;
        for (int j = 0; j < kLon; ++j) {
            const double ph = 2.0 * std::numbers::pi * j / kLon;
            best = std::max(best, V(ax * std::sin(th) * std::cos(ph), ay * std::sin(th) * std::sin(ph),
                                    r + az * std::cos(th)));
        }
    }
    return best;
}

namespace {

TrappingBox lorenz_box(const LorenzModel& model)
{
    const LorenzParams& p = model.params();
    const double level = kEllipsoidSafety * lorenz_ellipsoid_bound(p);
    const double hx = std::sqrt(level / p.r);
    const double hyz = std::sqrt(level / p.sigma);
    TrappingBox box{make_state({-hx, -hyz, 2 * p.r - hyz}), make_state({hx, hyz, 2 * p.r + hyz})};

    // Certify: dV/dt < 0 at every lattice point of the doubled box lying
    // outside the ellipsoid {V <= level}.
    const TrappingBox shell = box.scaled(2.0);
    constexpr int kLattice = 50;
    StateVec x(3);
    StateVec dx(3);
    for (int i = 0; i < kLattice; ++i) {
        for (int j = 0; j < kLattice; ++j) {
            for (int k = 0; k < kLattice; ++k) {
                x[0] = shell.lo[0] + (shell.hi[0] - shell.lo[0]) * i / (kLattice - 1);
                x[1] = shell.lo[1] + (shell.hi[1] - shell.lo[1]) * j / (kLattice - 1);
                x[2] = shell.lo[2] + (shell.hi[2] - shell.lo[2]) * k / (kLattice - 1);
                const double zc = x[2] - 2 * p.r;
                const double v = p.r * x[0] * x[0] + p.sigma * x[1] * x[1] + p.sigma * zc * zc;
                if (v <= level) {
                    continue;
                }
                model.eval(x, dx);
                const double vdot = 2 * p.r * x[0] * dx[0] + 2 * p.sigma * x[1] * dx[1] + 2 * p.sigma * zc * dx[2];
                if (!(vdot < 0.0)) {
                    throw CertificationFailure("Lyapunov derivative is non-negative outside the trapping ellipsoid");
                }
            }
        }
    }
    return box;
}

TrappingBox normal_form_box(const NormalFormModel& model)
{
    const NormalFormParams& p = model.params();
    const double hu = p.lambda > 0.0 ? 2.0 * std::sqrt(p.lambda) : 1.0;
    StateVec lo(p.n);
    StateVec hi(p.n);
    for (int i = 0; i < p.n; ++i) {
        const double h = i < p.k ? hu : 1.0;
        lo[i] = -h;
        hi[i] = h;
    }
    TrappingBox box{lo, hi};

    // Certify: the field points strictly inward on a lattice of every face.
    constexpr int kLattice = 50;
    StateVec x(p.n);
    StateVec dx(p.n);
    for (int face = 0; face < p.n; ++face) {
        for (int side = 0; side < 2; ++side) {
            // Sample the two axes following `face` (cyclically); remaining
            // coordinates sit at the box corners and centre in turn.
            const int u = (face + 1) % p.n;
            const int v = (face + 2) % p.n;
            for (int i = 0; i < kLattice; ++i) {
                for (int j = 0; j < kLattice; ++j) {
                    for (int fill = 0; fill < 3; ++fill) {
                        for (int c = 0; c < p.n; ++c) {
                            x[c] = fill == 0 ? lo[c] : (fill == 1 ? hi[c] : 0.0);
                        }
                        x[face] = side == 0 ? lo[face] : hi[face];
                        x[u] = lo[u] + (hi[u] - lo[u]) * i / (kLattice - 1);
                        if (v != face) {
                            x[v] = lo[v] + (hi[v] - lo[v]) * j / (kLattice - 1);
                        }
                        model.eval(x, dx);
                        const double outward = side == 0 ? -dx[face] : dx[face];
                        if (!(outward < 0.0)) {
                            throw CertificationFailure("normal form field is not inward on the box boundary");
                        }
                    }
                }
            }
        }
    }
    return box;
}

}  // namespace

TrappingBox trapping_box(const VectorField& model)
{
    if (const auto* lorenz = dynamic_cast<const LorenzModel*>(&model)) {
        return lorenz_box(*lorenz);
    }
    if (const auto* nf = dynamic_cast<const NormalFormModel*>(&model)) {
        return normal_form_box(*nf);
    }
    throw ContractViolation("trapping_box supports Lorenz and normal-form models only");
}

}  // namespace conley
