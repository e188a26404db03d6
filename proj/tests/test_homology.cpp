#include "conley/errors.hpp"
#include "conley/homology.hpp"
#include "conley/morse.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>

using namespace conley;

namespace {

// Laplace expansion; fine for the small sizes used here.
long long det(const std::vector<std::vector<long long>>& m)
{
    const std::size_t n = m.size();
    if (n == 1) {
        return m[0][0];
    }
    long long s = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (m[0][c] == 0) {
            continue;
        }
        std::vector<std::vector<long long>> sub(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            for (std::size_t k = 0; k < n; ++k) {
                if (k != c) {
                    sub[r - 1].push_back(m[r][k]);
                }
            }
        }
        s += (c % 2 == 0 ? 1 : -1) * m[0][c] * det(sub);
    }
    return s;
}

// Invariant factors d_k / d_(k-1), d_k the gcd of all k x k minors.
std::vector<long long> oracle_factors(const std::vector<std::vector<long long>>& a)
{
    const int rows = static_cast<int>(a.size());
    const int cols = static_cast<int>(a[0].size());
    std::vector<long long> out;
    long long prev = 1;
    for (int k = 1; k <= std::min(rows, cols); ++k) {
        long long g = 0;
        for (unsigned rm = 0; rm < (1u << rows); ++rm) {
            if (std::popcount(rm) != k) {
                continue;
            }
            for (unsigned cm = 0; cm < (1u << cols); ++cm) {
                if (std::popcount(cm) != k) {
                    continue;
                }
                std::vector<std::vector<long long>> sub;
                for (int r = 0; r < rows; ++r) {
                    if (!(rm >> r & 1u)) {
                        continue;
                    }
                    sub.emplace_back();
                    for (int c = 0; c < cols; ++c) {
                        if (cm >> c & 1u) {
                            sub.back().push_back(a[r][c]);
                        }
                    }
                }
                g = std::gcd(g, det(sub));
            }
        }
        if (g == 0) {
            break;
        }
        out.push_back(g / prev);
        prev = g;
    }
    return out;
}

CubicalComplex square_block(int w, int h, const std::vector<std::pair<int, int>>& holes = {})
{
    CubicalComplex x({w, h});
    for (int i = 0; i < w; ++i) {
        for (int j = 0; j < h; ++j) {
            if (std::find(holes.begin(), holes.end(), std::make_pair(i, j)) != holes.end()) {
                continue;
            }
            const int lower[2] = {i, j};
            x.add_unit_cube(lower);
        }
    }
    return x;
}

}  // namespace

TEST_CASE("Smith normal form matches determinantal divisors on random matrices")
{
    std::mt19937 rng(101);
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_int_distribution<int> entry(-2, 2);
    for (int trial = 0; trial < 150; ++trial) {
        const int rows = dim(rng);
        const int cols = dim(rng);
        const int inner = dim(rng);
        std::vector<std::vector<long long>> l(rows, std::vector<long long>(inner));
        std::vector<std::vector<long long>> r(inner, std::vector<long long>(cols));
        for (auto& row : l) {
            for (auto& v : row) {
                v = entry(rng);
            }
        }
        for (auto& row : r) {
            for (auto& v : row) {
                v = entry(rng);
            }
        }
        std::vector<std::vector<long long>> a(rows, std::vector<long long>(cols, 0));
        IntMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                for (int k = 0; k < inner; ++k) {
                    a[i][j] += l[i][k] * r[k][j];
                }
                m(i, j) = a[i][j];
            }
        }
        const auto want = oracle_factors(a);
        const SmithResult got = smith_normal_form(m);
        REQUIRE(got.factors.size() == want.size());
        CHECK(got.rank == want.size());
        for (std::size_t k = 0; k < want.size(); ++k) {
            CHECK(got.factors[k] == want[k]);
        }
    }
}

TEST_CASE("Smith normal form of a matrix with torsion")
{
    const SmithResult s = smith_normal_form(IntMatrix{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}});
    REQUIRE(s.factors.size() == 3);
    CHECK(s.factors[0] == 2);
    CHECK(s.factors[1] == 6);
    CHECK(s.factors[2] == 12);
}

TEST_CASE("figure eight has Betti numbers (1, 2)")
{
    const CubicalComplex eight = square_block(5, 3, {{1, 1}, {3, 1}});
    const BettiResult h = homology(eight);
    CHECK(h.betti == std::vector<std::int64_t>{1, 2});
    CHECK(eight.boundary_squared_vanishes());
    CHECK(eight.euler_characteristic() == h.euler_characteristic());
}

TEST_CASE("hollow cube is a sphere")
{
    CubicalComplex s({3, 3, 3});
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                if (i == 1 && j == 1 && k == 1) {
                    continue;
                }
                const int lower[3] = {i, j, k};
                s.add_unit_cube(lower);
            }
        }
    }
    CHECK(homology(s).betti == std::vector<std::int64_t>{1, 0, 1});
}

TEST_CASE("saddle index pair has Betti numbers (0, 1)")
{
    const CubicalComplex n = square_block(3, 3);
    CubicalComplex e({3, 3});
    for (int j = 0; j < 3; ++j) {
        for (int i : {0, 2}) {
            const int lower[2] = {i, j};
            e.add_unit_cube(lower);
        }
    }
    const BettiResult h = relative_homology(n, e);
    CHECK(h.betti == std::vector<std::int64_t>{0, 1});
    CHECK(n.euler_characteristic() - e.euler_characteristic() == h.euler_characteristic());
}

TEST_CASE("relative homology of a disc modulo its boundary circle")
{
    const CubicalComplex disc = square_block(3, 3);
    CubicalComplex ring = square_block(3, 3, {{1, 1}});
    // The ring is not a subcomplex of the boundary, but (disc, ring) is a
    // pair; H(disc, ring) = H(disc, circle) = t^2 by excision.
    const BettiResult h = relative_homology(disc, ring);
    CHECK(h.betti == std::vector<std::int64_t>{0, 0, 1});
}

TEST_CASE("boundary of a boundary vanishes and Euler characteristics agree on random cube sets")
{
    std::mt19937 rng(41);
    std::bernoulli_distribution keep(0.45);
    for (int trial = 0; trial < 40; ++trial) {
        CubicalComplex x({4, 4, 3});
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                for (int k = 0; k < 3; ++k) {
                    if (keep(rng)) {
                        const int lower[3] = {i, j, k};
                        x.add_unit_cube(lower);
                    }
                }
            }
        }
        CHECK(x.is_closed());
        CHECK(x.boundary_squared_vanishes());
        const BettiResult h = homology(x);
        CHECK(h.euler_characteristic() == x.euler_characteristic());
    }
}

TEST_CASE("cube sets on a grid: Betti numbers of an annulus")
{
    const Grid g(TrappingBox{make_state({0, 0}), make_state({1, 1})}, {2, 2});
    CubeSet ring;
    for (CubeId c = 0; c < g.size(); ++c) {
        const auto idx = g.multi_index(c);
        if (!((idx[0] == 1 || idx[0] == 2) && (idx[1] == 1 || idx[1] == 2))) {
            ring.push_back(c);
        }
    }
    CHECK(betti_of_cubeset(ring, g).betti == std::vector<std::int64_t>{1, 1});
}

TEST_CASE("Conley indices of linear attractors and repellers")
{
    const Grid g(TrappingBox{make_state({-1, -1}), make_state({1, 1})}, {4, 4});
    OuterMapConfig cfg;
    cfg.tau = 1.0;
    for (double rate : {-1.0, 1.0}) {
        LinearModel m(2, rate);
        const TransitionGraph tg = build_transition_graph(g, m, cfg, 1);
        const MorseGraph mg = compute_morse_graph(tg);
        const auto cube = g.locate(make_state({0.01, 0.01}));
        REQUIRE(cube.has_value());
        const auto node = mg.node_of(*cube);
        REQUIRE(node.has_value());
        const NodeIndex idx = node_conley_index(mg, *node, tg, g);
        CHECK(idx.polynomial == (rate < 0 ? Polynomial{1} : Polynomial{0, 0, 1}));
    }
}

TEST_CASE("dual repeller index shifts reduced homology up one degree")
{
    const Grid g(TrappingBox{make_state({0, 0}), make_state({1, 1})}, {2, 2});
    CubeSet two_points{g.id(std::vector<int>{0, 0}), g.id(std::vector<int>{3, 3})};
    CHECK(dual_repeller_index(two_points, g).poincare() == Polynomial{0, 1});
    CHECK(dual_repeller_index({}, g).poincare() == Polynomial{1});
    CHECK(dual_repeller_index({g.id(std::vector<int>{1, 1})}, g).poincare().is_zero());
}

TEST_CASE("index pair contracts")
{
    const Grid g(TrappingBox{make_state({-1, -1}), make_state({1, 1})}, {3, 3});
    LinearModel m(2, 0.0);
    const TransitionGraph tg = build_transition_graph(g, m, OuterMapConfig{}, 1);
    const MorseGraph mg = compute_morse_graph(tg);
    CHECK_THROWS_AS(build_index_pair(mg, static_cast<int>(mg.size()), tg, g), ContractViolation);
}
