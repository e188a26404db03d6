#include "conley/equilibria.hpp"
#include "conley/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace conley;

namespace {

// Routh-Hurwitz: the characteristic cubic at C1 is
// x^3 + (sigma + b + 1) x^2 + b (sigma + r) x + 2 sigma b (r - 1), with a
// purely imaginary pair exactly when a2 a1 = a0.
double routh_hurwitz_hopf(double sigma, double b)
{
    return sigma * (sigma + b + 3.0) / (sigma - b - 1.0);
}

}  // namespace

TEST_CASE("C1 and C2 at r=28 follow the closed form")
{
    LorenzParams p;
    p.r = 28.0;
    const auto eqs = find_equilibria(p);
    REQUIRE(eqs.size() == 3);
    const double s = std::sqrt(72.0);
    CHECK(eqs[0].label == EquilibriumLabel::Origin);
    CHECK(std::abs(eqs[1].state[0] - s) <= 1e-8);
    CHECK(std::abs(eqs[1].state[1] - s) <= 1e-8);
    CHECK(std::abs(eqs[1].state[2] - 27.0) <= 1e-8);
    CHECK(std::abs(eqs[2].state[0] + s) <= 1e-8);
    for (const auto& e : eqs) {
        CHECK(e.residual <= 1e-12);
    }
}

TEST_CASE("only the origin below r=1")
{
    LorenzParams p;
    p.r = 0.5;
    const auto eqs = find_equilibria(p);
    REQUIRE(eqs.size() == 1);
    CHECK(classify(eqs[0]) == Stability::Attractor);
}

TEST_CASE("eigenvalues solve the characteristic cubic")
{
    for (double r : {0.5, 2.0, 15.0, 24.0, 28.0}) {
        LorenzParams p;
        p.r = r;
        for (const auto& e : find_equilibria(p)) {
            LorenzModel m(p);
            const Jacobian j = eval_jacobian(m, e.state);
            for (const auto& lam : e.eigenvalues) {
                Eigen::Matrix3cd a = j.cast<std::complex<double>>();
                a -= lam * Eigen::Matrix3cd::Identity();
                CHECK(std::abs(a.determinant()) < 1e-6 * (1.0 + std::pow(std::abs(lam), 3)));
            }
        }
    }
}

TEST_CASE("cubic roots of a factored cubic")
{
    // (x - 1)(x + 2)(x - 3) = x^3 - 2x^2 - 5x + 6
    const auto roots = cubic_roots(-2.0, -5.0, 6.0);
    CHECK(roots[0].real() == doctest::Approx(-2.0));
    CHECK(roots[1].real() == doctest::Approx(1.0));
    CHECK(roots[2].real() == doctest::Approx(3.0));
    // (x + 1)(x^2 + 4)
    const auto c = cubic_roots(1.0, 4.0, 4.0);
    CHECK(c[0].real() == doctest::Approx(-1.0));
    CHECK(std::abs(c[1].imag()) == doctest::Approx(2.0));
}

TEST_CASE("classification across the known regimes")
{
    LorenzParams p;
    p.r = 15.0;
    auto eqs = find_equilibria(p);
    CHECK(eqs[0].unstable_dim == 1);
    CHECK(eqs[1].classification == Stability::Attractor);
    p.r = 28.0;
    eqs = find_equilibria(p);
    CHECK(eqs[1].unstable_dim == 2);
}

TEST_CASE("pitchfork threshold at r=1")
{
    const ThresholdResult t = pitchfork_threshold(1e-9);
    CHECK(std::abs(t.r_star - 1.0) <= 1e-8);
    CHECK(t.bracket.first <= 1.0);
    CHECK(t.bracket.second >= 1.0);
}

TEST_CASE("Hopf threshold agrees with the Routh-Hurwitz value")
{
    const double oracle = routh_hurwitz_hopf(10.0, 8.0 / 3.0);
    CHECK(std::abs(oracle - 470.0 / 19.0) < 1e-12);
    const ThresholdResult t = hopf_threshold(1e-8);
    CHECK(std::abs(t.r_star - oracle) <= 1e-6);
    CHECK(std::abs(t.r_star - 24.74) <= 0.005);
}

TEST_CASE("Hopf threshold follows sigma and b")
{
    ThresholdOptions o = ThresholdOptions::defaults(ThresholdKind::Hopf);
    o.base.sigma = 16.0;
    o.base.b = 4.0;
    o.bracket = {20.0, 80.0};
    const ThresholdResult t = hopf_threshold(1e-8, o);
    CHECK(std::abs(t.r_star - routh_hurwitz_hopf(16.0, 4.0)) <= 1e-6);
}

TEST_CASE("the homoclinic criterion changes sign across 13.93")
{
    const IntegratorConfig cfg = IntegratorConfig::precise(1e-10);
    LorenzParams p;
    p.r = 13.5;
    const double below = homoclinic_criterion(p, cfg);
    p.r = 14.5;
    const double above = homoclinic_criterion(p, cfg);
    CHECK(below * above < 0.0);
}

TEST_CASE("unstable manifold branches are mirror images")
{
    LorenzParams p;
    p.r = 15.0;
    LorenzModel m(p);
    const auto eqs = find_equilibria(p);
    IntegratorConfig cfg = IntegratorConfig::precise(1e-11);
    cfg.max_time = 2.0;
    const Trajectory plus = unstable_manifold_branch(m, eqs[0], Side::Plus, -1.0, cfg);
    const Trajectory minus = unstable_manifold_branch(m, eqs[0], Side::Minus, -1.0, cfg);
    CHECK(plus.back()[0] == doctest::Approx(-minus.back()[0]).epsilon(1e-6));
    CHECK(plus.back()[2] == doctest::Approx(minus.back()[2]).epsilon(1e-6));
}

TEST_CASE("threshold contracts")
{
    LorenzParams p;
    p.r = 0.5;
    CHECK_THROWS_AS(hopf_criterion(p), ContractViolation);
    ThresholdOptions o = ThresholdOptions::defaults(ThresholdKind::Pitchfork);
    o.bracket = {2.0, 3.0};
    CHECK_THROWS(pitchfork_threshold(1e-6, o));
}
