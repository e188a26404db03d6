#pragma once

// Integer polynomials in t, used for Poincare polynomials and Morse equations.

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace conley {

/// Coefficient of t^k at position k; trailing zeros trimmed, so the zero
/// polynomial has no coefficients.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<std::int64_t> coeffs);
    explicit Polynomial(std::vector<std::int64_t> coeffs);

    static Polynomial monomial(std::int64_t c, int k);

    const std::vector<std::int64_t>& coefficients() const noexcept { return c_; }
    std::int64_t operator[](std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0; }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }
    bool is_nonnegative() const noexcept;
    /// Value at t = -1.
    std::int64_t at_minus_one() const noexcept;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    bool operator==(const Polynomial& o) const = default;

    /// Written as in "1+2t+2t^2"; zero prints "0".
    std::string to_string() const;

private:
    void trim();
    std::vector<std::int64_t> c_;
};

/// Polynomial with non-negative coefficients (ranks).  Throws
/// ContractViolation otherwise.
Polynomial poincare(std::vector<std::int64_t> ranks);

struct DivisionResult {
    Polynomial quotient;
    Polynomial remainder;  ///< constant: the division is by the monic 1 + t
};

/// p = (1 + t) q + rem.
DivisionResult divide_by_one_plus_t(const Polynomial& p);

void to_json(nlohmann::json& j, const Polynomial& p);

}  // namespace conley
