#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qgevrey {

using cplx = std::complex<double>;

/// Input outside the domain where an operation is defined (origin, poles,
/// Theta zeros, points outside a chart).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Violated precondition on a parameter pack (intervals, tolerances, hypotheses).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Overflow while rescaling Theta; carries the reduction exponent m.
class ThetaRangeError : public std::range_error {
public:
    ThetaRangeError(const std::string& what, long m) : std::range_error(what), m_(m) {}
    long exponent() const noexcept { return m_; }

private:
    long m_;
};

/// Quadrature refinement budget exhausted; carries the last two estimates.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, cplx last, cplx previous)
        : std::runtime_error(what), last_(last), previous_(previous) {}
    cplx last() const noexcept { return last_; }
    cplx previous() const noexcept { return previous_; }

private:
    cplx last_;
    cplx previous_;
};

} // namespace qgevrey
