#include "conley/polynomial.hpp"
#include "conley/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace conley {

Polynomial::Polynomial(std::initializer_list<std::int64_t> coeffs) : c_(coeffs) { trim(); }

Polynomial::Polynomial(std::vector<std::int64_t> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::monomial(std::int64_t c, int k)
{
    if (k < 0) {
        throw ContractViolation("monomial degree must be non-negative");
    }
    std::vector<std::int64_t> v(static_cast<std::size_t>(k) + 1, 0);
    v[k] = c;
    return Polynomial(std::move(v));
}

void Polynomial::trim()
{
    while (!c_.empty() && c_.back() == 0) {
        c_.pop_back();
    }
}

bool Polynomial::is_nonnegative() const noexcept
{
    return std::all_of(c_.begin(), c_.end(), [](std::int64_t v) { return v >= 0; });
}

std::int64_t Polynomial::at_minus_one() const noexcept
{
    std::int64_t s = 0;
    for (std::size_t k = 0; k < c_.size(); ++k) {
        s += (k % 2 == 0) ? c_[k] : -c_[k];
    }
    return s;
}

Polynomial Polynomial::operator+(const Polynomial& o) const
{
    std::vector<std::int64_t> v(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = (*this)[k] + o[k];
    }
    return Polynomial(std::move(v));
}

Polynomial Polynomial::operator-(const Polynomial& o) const
{
    std::vector<std::int64_t> v(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = (*this)[k] - o[k];
    }
    return Polynomial(std::move(v));
}

Polynomial Polynomial::operator*(const Polynomial& o) const
{
    if (is_zero() || o.is_zero()) {
        return {};
    }
    std::vector<std::int64_t> v(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        for (std::size_t j = 0; j < o.c_.size(); ++j) {
            v[i + j] += c_[i] * o.c_[j];
        }
    }
    return Polynomial(std::move(v));
}

std::string Polynomial::to_string() const
{
    if (c_.empty()) {
        return "0";
    }
    std::string out;
    for (std::size_t k = 0; k < c_.size(); ++k) {
        const std::int64_t v = c_[k];
        if (v == 0) {
            continue;
        }
        const std::int64_t mag = v < 0 ? -v : v;
        if (v < 0) {
            out += '-';
        } else if (!out.empty()) {
            out += '+';
        }
        if (k == 0 || mag != 1) {
            out += std::to_string(mag);
        }
        if (k >= 1) {
            out += 't';
        }
        if (k >= 2) {
            out += '^' + std::to_string(k);
        }
    }
    return out;
}

Polynomial poincare(std::vector<std::int64_t> ranks)
{
    for (const auto v : ranks) {
        if (v < 0) {
            throw ContractViolation("ranks must be non-negative");
        }
    }
    return Polynomial(std::move(ranks));
}

DivisionResult divide_by_one_plus_t(const Polynomial& p)
{
    // Synthetic division from the top coefficient down.
    const auto& c = p.coefficients();
    if (c.size() <= 1) {
        return {Polynomial{}, p};
    }
    std::vector<std::int64_t> q(c.size() - 1, 0);
    std::int64_t carry = c.back();
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        q[k - 1] = carry;
        carry = c[k - 1] - carry;
    }
    return {Polynomial(std::move(q)), Polynomial{carry}};
}

void to_json(nlohmann::json& j, const Polynomial& p)
{
    j = nlohmann::json{{"coefficients", p.coefficients()}, {"text", p.to_string()}};
}

}  // namespace conley
