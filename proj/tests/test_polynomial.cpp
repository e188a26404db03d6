#include "conley/errors.hpp"
#include "conley/polynomial.hpp"

#include <doctest.h>

#include <random>

using namespace conley;

TEST_CASE("polynomials print like the displayed Morse equations")
{
    CHECK(Polynomial{}.to_string() == "0");
    CHECK(Polynomial{1, 2, 2}.to_string() == "1+2t+2t^2");
    CHECK(Polynomial{0, 1}.to_string() == "t");
    CHECK(Polynomial{0, 0, 1}.to_string() == "t^2");
    CHECK(Polynomial{2, 1}.to_string() == "2+t");
    CHECK(Polynomial{1, 0, 0}.degree() == 0);
}

TEST_CASE("arithmetic and evaluation at -1")
{
    const Polynomial a{1, 2};
    const Polynomial b{0, 1, 1};
    CHECK(a + b == Polynomial{1, 3, 1});
    CHECK(a * b == Polynomial{0, 1, 3, 2});
    CHECK(a - a == Polynomial{});
    CHECK(Polynomial{3, 4, 2}.at_minus_one() == 1);
}

TEST_CASE("division by 1+t reconstructs the dividend")
{
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> len(0, 6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::int64_t> c(len(rng));
        for (auto& v : c) {
            v = coeff(rng);
        }
        const Polynomial p(c);
        const DivisionResult d = divide_by_one_plus_t(p);
        CHECK(Polynomial{1, 1} * d.quotient + d.remainder == p);
        CHECK(d.remainder.degree() <= 0);
        // The remainder is p(-1).
        CHECK(d.remainder[0] == p.at_minus_one());
    }
}

TEST_CASE("poincare rejects negative ranks")
{
    CHECK(poincare({1, 0, 2}) == Polynomial{1, 0, 2});
    CHECK_THROWS_AS(poincare({1, -1}), ContractViolation);
}
