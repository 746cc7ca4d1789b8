#include "qgevrey/theta.hpp"

#include <cmath>
#include <string>

namespace qgevrey {

namespace {

using ld = long double;
using cld = std::complex<ld>;

/// Two-sided sum on the fundamental annulus, stopping once a geometric
/// majorant of the remaining terms drops below tol. Summed in extended
/// precision: at oblique arguments the terms cancel by an order of magnitude
/// or more.
cplx reduced_sum(cld x0, const QBase& base, const ThetaSettings& s, int& terms)
{
    const cld q(base.q().real(), base.q().imag());
    const cld inv_q = ld(1) / q;
    const ld ax = std::abs(x0);
    const ld aq = std::abs(q);
    const ld tol = s.tol;

    cld sum = 1; // n = 0
    terms = 1;

    // n >= 1: term_{n+1} = term_n * x0 q^{-n}
    cld term = 1;
    cld ratio = x0;
    ld rmod = ax;
    for (int n = 0; n < s.max_terms; ++n) {
        term *= ratio;
        sum += term;
        ++terms;
        ratio *= inv_q;
        rmod /= aq;
        if (rmod < 0.5L && std::abs(term) * rmod / (1 - rmod) < tol)
            break;
        if (n + 1 == s.max_terms)
            throw ParameterError("theta: max_terms exhausted on the positive side");
    }

    // n <= -1: term_{-(m+1)} = term_{-m} * q^{-(m+1)} / x0
    term = 1;
    ratio = inv_q / x0;
    rmod = 1 / (aq * ax);
    for (int m = 0; m < s.max_terms; ++m) {
        term *= ratio;
        sum += term;
        ++terms;
        ratio *= inv_q;
        rmod /= aq;
        if (rmod < 0.5L && std::abs(term) * rmod / (1 - rmod) < tol)
            break;
        if (m + 1 == s.max_terms)
            throw ParameterError("theta: max_terms exhausted on the negative side");
    }
    return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

} // namespace

void ThetaSettings::validate() const
{
    if (!(tol > 0.0))
        throw ParameterError("theta settings: tol must be positive");
    if (max_terms < 8)
        throw ParameterError("theta settings: max_terms must be at least 8");
}

ThetaParts theta_parts(std::complex<long double> x, const QBase& base,
                       const ThetaSettings& settings)
{
    settings.validate();
    if (x == cld(0))
        throw DomainError("theta: x = 0");
    const cld q(base.q().real(), base.q().imag());
    const cld log_q = std::log(q);
    const ld L = log_q.real();
    long m = static_cast<long>(std::floor(std::log(std::abs(x)) / L));
    cld x0 = x * std::exp(-static_cast<ld>(m) * log_q);
    // rounding can leave |x0| a hair outside [1, |q|)
    if (std::abs(x0) < 1) {
        --m;
        x0 *= q;
    } else if (std::abs(x0) >= std::abs(q)) {
        ++m;
        x0 /= q;
    }
    int terms = 0;
    const cplx red = reduced_sum(x0, base, settings, terms);
    const ld md = static_cast<ld>(m);
    const cld log_factor = ld(0.5) * md * (md + 1) * log_q + md * std::log(x0);
    return {red, cplx(static_cast<double>(log_factor.real()), static_cast<double>(log_factor.imag())),
            m, terms};
}

ThetaParts theta_parts(cplx x, const QBase& base, const ThetaSettings& settings)
{
    return theta_parts(cld(x.real(), x.imag()), base, settings);
}

cplx theta(cplx x, const QBase& base, const ThetaSettings& settings)
{
    const ThetaParts p = theta_parts(x, base, settings);
    const double mag = p.log_factor.real() + std::log(std::abs(p.reduced));
    if (mag > 700.0)
        throw ThetaRangeError("theta: rescaling factor overflows at m = " + std::to_string(p.m), p.m);
    return p.reduced * std::exp(p.log_factor);
}

double log_abs_theta(cplx x, const QBase& base, const ThetaSettings& settings)
{
    const ThetaParts p = theta_parts(x, base, settings);
    return p.log_factor.real() + std::log(std::abs(p.reduced));
}

cplx pi_q(const QBase& base)
{
    const cplx inv_q = 1.0 / base.q();
    cplx p = inv_q;
    cplx prod = 1.0;
    for (int n = 0; n < 100000; ++n) {
        const cplx update = 1.0 / (1.0 - p);
        prod *= update;
        if (std::abs(update - 1.0) < 1e-15)
            break;
        p *= inv_q;
    }
    return base.log_q() * prod;
}

double theta_lower_ratio(cplx x, const QBase& base, double xi, const ThetaSettings& settings)
{
    const double la = std::log(std::abs(x));
    return std::exp(log_abs_theta(x, base, settings) - xi * la * la / (2.0 * base.log_abs()));
}

} // namespace qgevrey
