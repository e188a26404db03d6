#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conley {

/// Base of every error raised by the toolkit.  `category()` is used by the
/// CLI to choose an exit code.
class Error : public std::runtime_error {
public:
    enum class Category { Contract, Numerical, Io };

    Error(Category cat, const std::string& what) : std::runtime_error(what), cat_(cat) {}
    Category category() const noexcept { return cat_; }

private:
    Category cat_;
};

/// A precondition of an operation was violated by the caller.
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error(Category::Contract, what) {}
};

class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& what) : Error(Category::Numerical, what) {}
};

/// Step size underflow in the adaptive integrator.
class IntegrationFailure : public NumericalFailure {
public:
    IntegrationFailure(const std::string& what, double t, std::vector<double> last_good)
        : NumericalFailure(what), time_(t), last_good_(std::move(last_good)) {}
    double time() const noexcept { return time_; }
    const std::vector<double>& last_good_state() const noexcept { return last_good_; }

private:
    double time_;
    std::vector<double> last_good_;
};

/// Non-finite state or exit from the divergence guard.
class DivergenceError : public NumericalFailure {
public:
    DivergenceError(const std::string& what, double t) : NumericalFailure(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class BracketFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class NoCrossingError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Neither outcome of a two-way numerical criterion could be established.
class InconclusiveError : public NumericalFailure {
public:
    InconclusiveError(const std::string& what, double param) : NumericalFailure(what), param_(param) {}
    double parameter() const noexcept { return param_; }

private:
    double param_;
};

class CertificationFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class BudgetExceeded : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

/// The grid is too coarse to isolate a Morse set.  Retry at larger depth.
class IsolationFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class AmbiguityError : public NumericalFailure {
public:
    AmbiguityError(const std::string& what, std::size_t index) : NumericalFailure(what), index_(index) {}
    std::size_t crossing_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class NotFoundError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(Category::Io, what) {}
};

}  // namespace conley
