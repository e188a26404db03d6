#include "conley/cubical.hpp"
#include "conley/errors.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace conley;

namespace {

Grid unit_grid(int n, int depth)
{
    StateVec lo = StateVec::Constant(n, -1.0);
    StateVec hi = StateVec::Constant(n, 1.0);
    return Grid(TrappingBox{lo, hi}, std::vector<int>(n, depth));
}

}  // namespace

TEST_CASE("cube ids and multi-indices round trip")
{
    Grid g(TrappingBox{make_state({0, 0, 0}), make_state({1, 2, 4})}, {2, 3, 1});
    CHECK(g.size() == 4 * 8 * 2);
    for (CubeId c = 0; c < g.size(); ++c) {
        CHECK(g.id(g.multi_index(c)) == c);
        CHECK(g.locate(g.cube_center(c)) == c);
    }
    CHECK(g.width(1) == doctest::Approx(0.25));
    CHECK_FALSE(g.locate(make_state({-0.1, 0, 0})).has_value());
    // Upper faces belong to the last cube.
    CHECK(g.locate(make_state({1, 2, 4})) == g.size() - 1);
}

TEST_CASE("grid budget is enforced")
{
    CHECK_THROWS_AS(unit_grid(3, 8), BudgetExceeded);
    CHECK_NOTHROW(Grid(TrappingBox{StateVec::Constant(3, -1.0), StateVec::Constant(3, 1.0)}, {8, 8, 8},
                       std::size_t{1} << 24));
}

TEST_CASE("samples: corners, center and face centers")
{
    const Grid g = unit_grid(3, 2);
    const auto s = cube_samples(g, 5);
    CHECK(s.size() == 8 + 6 + 1);
    const TrappingBox b = g.cube_box(5);
    for (const auto& p : s) {
        CHECK(b.contains(p));
    }
}

TEST_CASE("zero field: every cube maps onto itself and its neighbours")
{
    const Grid g = unit_grid(2, 3);
    LinearModel zero(2, 0.0);
    OuterMapConfig cfg;
    cfg.tau = 0.5;
    const TransitionGraph tg = build_transition_graph(g, zero, cfg, 1);
    for (CubeId c = 0; c < g.size(); ++c) {
        CHECK(tg.has_self_loop(c));
        const auto succ = tg.successors(c);
        CHECK(succ.size() <= 9);
        CHECK(std::is_sorted(succ.begin(), succ.end()));
    }
}

TEST_CASE("outer map covers the true time-tau image")
{
    // Contracting and expanding linear flows, checked against a precise
    // integration from random points.
    for (double rate : {-0.8, 0.3}) {
        const Grid g = unit_grid(3, 4);
        LinearModel m(3, rate);
        OuterMapConfig cfg;
        cfg.tau = 0.4;
        const TransitionGraph tg = build_transition_graph(g, m, cfg, 1);
        const CoverageReport rep = check_coverage(g, tg, m, cfg, 2000, 5);
        CHECK(rep.trials == 2000);
        CHECK(rep.violations == 0);
    }
}

TEST_CASE("outer map covers the normal-form flow")
{
    NormalFormParams p;
    p.n = 3;
    p.k = 2;
    p.lambda = 0.25;
    NormalFormModel m(p);
    const Grid g(trapping_box(m), {5, 5, 3});
    OuterMapConfig cfg;
    cfg.tau = 8.0;
    cfg.rk4_step = 0.05;
    const TransitionGraph tg = build_transition_graph(g, m, cfg, 1);
    const CoverageReport rep = check_coverage(g, tg, m, cfg, 2000, 5);
    CHECK(rep.trials == 2000);
    CHECK(rep.violations == 0);
}

TEST_CASE("expanding flow: boundary cubes escape")
{
    const Grid g = unit_grid(2, 3);
    LinearModel m(2, 1.0);
    OuterMapConfig cfg;
    cfg.tau = 1.0;
    const TransitionGraph tg = build_transition_graph(g, m, cfg, 1);
    CHECK(tg.escapes(0));
    const auto succ = tg.successors(0);
    CHECK(succ.back() == tg.out_node());
}

TEST_CASE("transition graphs do not depend on the thread count")
{
    LorenzParams p;
    p.r = 15.0;
    LorenzModel m(p);
    const Grid g(trapping_box(m), {4, 4, 4});
    OuterMapConfig cfg;
    const auto a = build_transition_graph(g, m, cfg, 1);
    const auto b = build_transition_graph(g, m, cfg, 3);
    CHECK(graph_digest(g, a) == graph_digest(g, b));
    std::ostringstream sa;
    std::ostringstream sb;
    write_graph_binary(sa, g, a);
    write_graph_binary(sb, g, b);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("edge iteration agrees with successor_at and out_degree")
{
    LorenzModel m;
    const Grid g(trapping_box(m), {3, 3, 3});
    const auto tg = build_transition_graph(g, m, OuterMapConfig{}, 1);
    std::size_t total = 0;
    for (CubeId c = 0; c < g.size(); ++c) {
        const auto succ = tg.successors(c);
        CHECK(succ.size() == tg.out_degree(c));
        for (std::size_t k = 0; k < succ.size(); ++k) {
            CHECK(tg.successor_at(c, k) == succ[k]);
        }
        total += succ.size();
    }
    CHECK(total == tg.edge_count());
}

TEST_CASE("text dump lists one line per cube")
{
    const Grid g = unit_grid(1, 2);
    LinearModel zero(1, 0.0);
    const auto tg = build_transition_graph(g, zero, OuterMapConfig{}, 1);
    std::ostringstream os;
    write_graph_text(os, tg);
    CHECK(os.str() == "0: 0 1 out\n1: 0 1 2\n2: 1 2 3\n3: 2 3 out\n");
}

TEST_CASE("outer map configuration contracts")
{
    OuterMapConfig cfg;
    cfg.tau = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg.tau = 0.2;
    cfg.bloat = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
}
