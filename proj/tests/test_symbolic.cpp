#include "conley/equilibria.hpp"
#include "conley/errors.hpp"
#include "conley/symbolic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace conley;

namespace {

SectionCrossing crossing(double x, Direction d = Direction::Descending)
{
    return SectionCrossing{0.0, make_state({x, x, 14.0}), d};
}

LorenzModel lorenz(double r)
{
    LorenzParams p;
    p.r = r;
    return LorenzModel(p);
}

}  // namespace

TEST_CASE("S marks x > 0, T marks x < 0, swap exchanges them")
{
    const std::vector<SectionCrossing> cs{crossing(1.0), crossing(-2.0), crossing(3.0)};
    CHECK(encode_symbols(cs).str() == "STS");
    CHECK(encode_symbols(cs, true).str() == "TST");
    CHECK(encode_symbols({}).size() == 0);
}

TEST_CASE("encoding rejects ascending crossings and the dead band")
{
    CHECK_THROWS_AS(encode_symbols({crossing(1.0, Direction::Ascending)}), ContractViolation);
    CHECK_THROWS_AS(encode_symbols({crossing(1.0), crossing(1e-12)}), AmbiguityError);
    CHECK_NOTHROW(encode_symbols({crossing(1e-12)}, false, 0.0));
}

TEST_CASE("crossings lie on the section and alternate in direction")
{
    const LorenzModel m = lorenz(28.0);
    const auto cs = section_crossings(m, make_state({1.0, 1.0, 20.0}), 30.0, IntegratorConfig::precise(1e-10));
    REQUIRE(cs.size() > 10);
    for (std::size_t i = 0; i < cs.size(); ++i) {
        CHECK(std::abs(cs[i].state[2] - 27.0) < 1e-8);
        const double zdot = eval_field(m, cs[i].state)[2];
        CHECK((cs[i].direction == Direction::Descending) == (zdot < 0.0));
        if (i > 0) {
            CHECK(cs[i].direction != cs[i - 1].direction);
            CHECK(cs[i].time > cs[i - 1].time);
        }
    }
}

TEST_CASE("the mirror symmetry exchanges S and T")
{
    const LorenzModel m = lorenz(28.0);
    const IntegratorConfig cfg = IntegratorConfig::precise(1e-11);
    const StateVec x0 = make_state({0.3, 1.2, 21.0});
    auto descending = [](std::vector<SectionCrossing> cs) {
        cs.erase(std::remove_if(cs.begin(), cs.end(),
                                [](const SectionCrossing& c) { return c.direction != Direction::Descending; }),
                 cs.end());
        return cs;
    };
    const auto a = descending(section_crossings(m, x0, 15.0, cfg));
    const auto b = descending(section_crossings(m, lorenz_mirror(x0), 15.0, cfg));
    REQUIRE(a.size() == b.size());
    CHECK(encode_symbols(a).str() == encode_symbols(b, true).str());
}

TEST_CASE("seed sets are nested")
{
    const LorenzModel m = lorenz(15.0);
    const auto few = section_seeds(m, 10, 0.01);
    const auto more = section_seeds(m, 50, 0.01);
    for (std::size_t i = 0; i < few.size(); ++i) {
        CHECK(few[i] == more[i]);
    }
    const double xc = std::sqrt(8.0 / 3.0 * 14.0);
    for (const auto& s : more) {
        CHECK(std::abs(s[0]) <= 0.01 * xc + 1e-15);
        CHECK(s[0] == s[1]);
        CHECK(s[2] == 14.0);
    }
}

TEST_CASE("at r=10 orbits settle: few words of length 3")
{
    SymbolConfig cfg;
    cfg.seeds = 2000;
    const WordReport w = verify_word_realization(lorenz(10.0), 3, cfg);
    CHECK(w.total == 8);
    CHECK(w.words_found < 8);
    CHECK(w.words.size() == w.words_found);
}

TEST_CASE("word report contracts")
{
    SymbolConfig cfg;
    cfg.seeds = 10;
    CHECK_THROWS_AS(verify_word_realization(lorenz(15.0), 9, cfg), ContractViolation);
    cfg.dead_band = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
}

TEST_CASE("return map derivative matches finite differences")
{
    const LorenzModel m = lorenz(15.0);
    const IntegratorConfig cfg = IntegratorConfig::precise(1e-12);
    const StateVec p = make_state({0.5, 0.5, 14.0});
    const ReturnHit h = return_map(m, p, cfg);
    for (int c = 0; c < 2; ++c) {
        StateVec a = p;
        StateVec b = p;
        a[c] += 1e-6;
        b[c] -= 1e-6;
        const StateVec d = (return_map(m, a, cfg).point - return_map(m, b, cfg).point) / 2e-6;
        CHECK(h.jacobian(0, c) == doctest::Approx(d[0]).epsilon(1e-4));
        CHECK(h.jacobian(1, c) == doctest::Approx(d[1]).epsilon(1e-4));
    }
}

TEST_CASE("periodic orbits S and T at r=15 are mirror images")
{
    SymbolConfig cfg;
    const LorenzModel m = lorenz(15.0);
    const PeriodicOrbitResult s = find_periodic_orbit(m, "S", cfg);
    const PeriodicOrbitResult t = find_periodic_orbit(m, "T", cfg);
    CHECK(s.residual <= 1e-8);
    CHECK(t.residual <= 1e-8);
    CHECK(s.point[0] > 0.0);
    CHECK((lorenz_mirror(s.point) - t.point).norm() <= 1e-6);
    CHECK(s.period == doctest::Approx(t.period).epsilon(1e-8));
    CHECK_THROWS_AS(find_periodic_orbit(m, "SX", cfg), ContractViolation);
}

TEST_CASE("largest Lyapunov exponent: chaotic at r=28, negative at r=10")
{
    // Reference value for the classical parameters is about 0.906.
    const LyapunovResult chaotic = largest_lyapunov(lorenz(28.0), make_state({1.0, 1.0, 20.0}), 400.0);
    CHECK(chaotic.exponent == doctest::Approx(0.906).epsilon(0.1));
    const LyapunovResult stable = largest_lyapunov(lorenz(10.0), make_state({1.0, 1.0, 20.0}), 200.0);
    CHECK(stable.exponent < 0.0);
    CHECK_THROWS_AS(largest_lyapunov(lorenz(28.0), make_state({1.0, 1.0, 20.0}), 50.0), ContractViolation);
}

TEST_CASE("crossings CSV marks ascending rows without a symbol")
{
    const LorenzModel m = lorenz(28.0);
    const auto cs = section_crossings(m, make_state({1.0, 1.0, 20.0}), 5.0, IntegratorConfig::precise(1e-10));
    std::ostringstream os;
    write_crossings_csv(os, cs);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,y,z,direction,symbol");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const bool ascending = line.find("ascending") != std::string::npos;
        CHECK((line.back() == ',') == ascending);
    }
    CHECK(rows == cs.size());
}
