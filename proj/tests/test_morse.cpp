#include "conley/errors.hpp"
#include "conley/experiments.hpp"
#include "conley/morse.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace conley;

namespace {

// Random image boxes on a small 2-D grid.
TransitionGraph random_graph(const Grid& g, std::mt19937& rng, int max_extent)
{
    const std::size_t n = g.size();
    std::vector<std::uint16_t> lo(2 * n);
    std::vector<std::uint16_t> hi(2 * n);
    std::vector<std::uint8_t> flags(n, 0);
    std::uniform_int_distribution<int> ext(0, max_extent);
    std::uniform_int_distribution<int> coin(0, 9);
    for (std::size_t c = 0; c < n; ++c) {
        for (int a = 0; a < 2; ++a) {
            std::uniform_int_distribution<int> pos(0, static_cast<int>(g.count(a)) - 1);
            const int l = pos(rng);
            lo[2 * c + a] = static_cast<std::uint16_t>(l);
            hi[2 * c + a] = static_cast<std::uint16_t>(std::min<int>(l + ext(rng), g.count(a) - 1));
        }
        if (coin(rng) == 0) {
            flags[c] |= TransitionGraph::kEscapes;
        }
        if (coin(rng) == 1) {
            flags[c] |= TransitionGraph::kPruned;
        }
    }
    return TransitionGraph(g, lo, hi, flags);
}

std::vector<std::vector<char>> brute_reach(const TransitionGraph& tg)
{
    const std::size_t n = tg.num_cubes();
    std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<CubeId> stack{static_cast<CubeId>(s)};
        while (!stack.empty()) {
            const CubeId v = stack.back();
            stack.pop_back();
            tg.for_each_successor(v, [&](CubeId t) {
                if (t != tg.out_node() && !r[s][t]) {
                    r[s][t] = 1;
                    stack.push_back(t);
                }
            });
        }
    }
    return r;
}

}  // namespace

TEST_CASE("Morse nodes match brute-force recurrence on random graphs")
{
    const Grid g(TrappingBox{make_state({0, 0}), make_state({1, 1})}, {3, 3});
    std::mt19937 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const TransitionGraph tg = random_graph(g, rng, trial % 3);
        const auto reach = brute_reach(tg);
        const std::size_t n = g.size();

        // Oracle: recurrent cubes grouped by mutual reachability.
        std::map<CubeId, std::set<CubeId>> classes;
        std::vector<int> oracle_node(n, -1);
        std::vector<std::set<CubeId>> oracle;
        for (CubeId v = 0; v < n; ++v) {
            if (tg.pruned(v) || !reach[v][v] || oracle_node[v] >= 0) {
                continue;
            }
            std::set<CubeId> cls;
            for (CubeId w = 0; w < n; ++w) {
                if (reach[v][w] && reach[w][v]) {
                    cls.insert(w);
                }
            }
            for (CubeId w : cls) {
                oracle_node[w] = static_cast<int>(oracle.size());
            }
            oracle.push_back(cls);
        }

        const MorseGraph mg = compute_morse_graph(tg);
        REQUIRE(mg.size() == oracle.size());
        for (std::size_t i = 0; i < mg.size(); ++i) {
            const auto& cubes = mg.nodes[i].cubes;
            CHECK(std::is_sorted(cubes.begin(), cubes.end()));
            const int o = oracle_node[cubes.front()];
            REQUIRE(o >= 0);
            CHECK(std::set<CubeId>(cubes.begin(), cubes.end()) == oracle[o]);
            for (std::size_t j = 0; j < mg.size(); ++j) {
                if (i == j) {
                    continue;
                }
                const bool expect = reach[cubes.front()][mg.nodes[j].cubes.front()] != 0;
                CHECK(mg.reaches(static_cast<int>(i), static_cast<int>(j)) == expect);
            }
        }
        // Edges form the transitive reduction, and point to lower ids.
        for (const auto& [u, l] : mg.edges) {
            CHECK(u > l);
            CHECK(mg.reaches(u, l));
            for (std::size_t k = 0; k < mg.size(); ++k) {
                const int m = static_cast<int>(k);
                CHECK_FALSE((m != u && m != l && mg.reaches(u, m) && mg.reaches(m, l)));
            }
        }
    }
}

TEST_CASE("Hausdorff distance matches brute force")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<StateVec> a(1 + trial * 7);
        std::vector<StateVec> b(1 + trial * 5);
        for (auto& p : a) {
            p = make_state({u(rng), u(rng), u(rng)});
        }
        for (auto& p : b) {
            p = make_state({u(rng) * 0.5, u(rng), u(rng) + 1.0});
        }
        CHECK(hausdorff_distance(a, b) == hausdorff_distance_brute(a, b));
        CHECK(hausdorff_distance(a, b) == hausdorff_distance(b, a));
        CHECK(hausdorff_distance(a, a) == 0.0);
    }
    CHECK_THROWS_AS(hausdorff_distance({}, {make_state({0.0})}), ContractViolation);
}

TEST_CASE("Morse equations for the displayed presentations")
{
    const auto r2 = morse_equations({Polynomial{1}, Polynomial{1}, Polynomial{0, 1}}, Polynomial{1});
    CHECK(r2.valid);
    CHECK(r2.equation() == "2+t=1+(1+t)");
    const auto r28 = morse_equations({Polynomial{1, 2}, Polynomial{0, 0, 1}, Polynomial{0, 0, 1}}, Polynomial{1});
    CHECK(r28.valid);
    CHECK(r28.equation() == "1+2t+2t^2=1+(1+t)2t");
    const auto mid = morse_equations({Polynomial{1, 2}, Polynomial{1}, Polynomial{1}, Polynomial{0, 1, 1},
                                      Polynomial{0, 1, 1}},
                                     Polynomial{1});
    CHECK(mid.valid);
    CHECK(mid.q == Polynomial{2, 2});
    const auto bad = morse_equations({Polynomial{1}, Polynomial{0, 0, 1}}, Polynomial{1});
    CHECK_FALSE(bad.valid);
}

TEST_CASE("transition equations from Betti numbers")
{
    const TravelEquations t = travel_equations({1, 2}, {2, 0});
    CHECK(t.repeller_attractor.equation() == "2+t=1+(1+t)");
    CHECK(t.middle.equation() == "3+4t+2t^2=1+(1+t)(2+2t)");
    CHECK(t.attractor_repeller.equation() == "1+2t+2t^2=1+(1+t)2t");
    CHECK(t.repeller_attractor.q == Polynomial{1});
    CHECK(t.middle.q == Polynomial{2, 2});
    CHECK(t.attractor_repeller.q == Polynomial{0, 2});

    const TravelEquations p = travel_equations({1}, {1});
    CHECK(p.repeller_attractor.valid);
    CHECK(p.repeller_attractor.q.is_zero());
}

TEST_CASE("transition equations: Q has non-negative coefficients whenever division is exact")
{
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> rank(0, 3);
    int exact = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::int64_t> k{1 + rank(rng), rank(rng), rank(rng)};
        std::vector<std::int64_t> c{1 + rank(rng), rank(rng)};
        const TravelEquations t = travel_equations(k, c);
        for (const auto* r : {&t.repeller_attractor, &t.middle, &t.attractor_repeller}) {
            if (r->remainder.is_zero() && r->q.is_nonnegative()) {
                CHECK(r->valid);
                ++exact;
            } else {
                CHECK_FALSE(r->valid);
            }
            // Independent check of the identity itself.
            CHECK(r->rhs_base + Polynomial{1, 1} * r->q + r->remainder == r->lhs);
        }
    }
    CHECK(exact > 0);
}

TEST_CASE("pitchfork equation for k unstable directions")
{
    CHECK(pitchfork_equations(2).equation() == "1+t+t^2=1+(1+t)t");
    CHECK(pitchfork_equations(1).valid);
    CHECK_THROWS_AS(pitchfork_equations(0), ContractViolation);
}

TEST_CASE("DOT output names every node and edge")
{
    const Grid g(TrappingBox{make_state({0, 0}), make_state({1, 1})}, {3, 3});
    std::mt19937 rng(2);
    const MorseGraph mg = compute_morse_graph(random_graph(g, rng, 1));
    std::ostringstream os;
    write_dot(os, mg);
    const std::string s = os.str();
    CHECK(s.rfind("digraph", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '>')) == mg.edges.size());
}

TEST_CASE("Lorenz r=2 with tau=2: origin saddle above the two attractors")
{
    const MorseRun run = run_lorenz_morse(2.0, {7, 7, 7}, 2.0, 0);
    REQUIRE(run.graph.size() == 3);
    const auto origin = run.graph.find_label("origin");
    REQUIRE(origin.has_value());
    CHECK(run.indices[*origin] == Polynomial{0, 1});
    for (const char* name : {"C1", "C2"}) {
        const auto n = run.graph.find_label(name);
        REQUIRE(n.has_value());
        CHECK(run.indices[*n] == Polynomial{1});
        CHECK(run.graph.reaches(*origin, *n));
    }
    const auto eq = run.equation();
    REQUIRE(eq.has_value());
    CHECK(eq->equation() == "2+t=1+(1+t)");
    CHECK(run.graph.edges.size() == 2);
}
