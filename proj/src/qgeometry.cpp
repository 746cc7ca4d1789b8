#include "qgevrey/qgeometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qgevrey {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

/// Is there an integer k with the open intervals (j1, j2) and (b1 + k, b2 + k) overlapping?
bool overlaps_mod1(double j1, double j2, const Interval& band)
{
    if (j2 - j1 >= 1.0)
        return band.length() > 0.0;
    double k = std::ceil(j1 - band.hi);
    if (k == j1 - band.hi)
        k += 1.0;
    return k < j2 - band.lo;
}

bool spiral_hit(cplx tau, const ContinuousBase& v, const QBase& base, bool one_sided)
{
    if (tau == cplx(0.0))
        throw DomainError("continuous spiral membership: tau = 0");
    const double L = base.log_abs();
    const double lt = std::log(std::abs(tau));
    double la = (lt - std::log(v.modulus.hi)) / L;
    double lb = (lt - std::log(v.modulus.lo)) / L;
    if (one_sided) {
        if (lb < 0.0)
            return false;
        la = std::max(la, 0.0);
    }
    const double a = std::arg(tau) / two_pi;
    const double theta = base.turn_rate();
    if (theta == 0.0)
        return v.arg.contains_mod1(a);
    const double j1 = theta > 0 ? a - lb * theta : a - la * theta;
    const double j2 = theta > 0 ? a - la * theta : a - lb * theta;
    if (one_sided && la == 0.0 && v.contains(tau))
        return true;
    return overlaps_mod1(j1, j2, v.arg);
}

} // namespace

QBase::QBase(cplx q) : q_(q)
{
    if (!(std::abs(q) > 1.0) || !std::isfinite(q.real()) || !std::isfinite(q.imag()))
        throw ParameterError("QBase: |q| must exceed 1");
    log_q_ = std::log(q);
}

double QBase::turn_rate() const noexcept { return log_q_.imag() / two_pi; }

bool Interval::contains_mod1(double x) const noexcept
{
    const double shift = std::floor(x - lo);
    const double y = x - shift;
    return contains(y) || contains(y - 1.0) || contains(y + 1.0);
}

void ChartBase::validate() const
{
    if (!(i1.length() > 0.0 && i1.length() < 0.25))
        throw ParameterError("chart: u-interval length must lie in (0, 1/4)");
    if (!(i2.length() > 0.0 && i2.length() < 0.25))
        throw ParameterError("chart: v-interval length must lie in (0, 1/4)");
}

void ContinuousBase::validate() const
{
    if (!(modulus.lo > 0.0 && modulus.hi > modulus.lo && std::isfinite(modulus.hi)))
        throw ParameterError("continuous base: modulus interval must satisfy 0 < lo < hi < inf");
    if (!(arg.length() > 0.0))
        throw ParameterError("continuous base: empty argument interval");
}

bool ContinuousBase::contains(cplx tau) const
{
    const double r = std::abs(tau);
    return modulus.contains(r) && arg.contains_mod1(std::arg(tau) / two_pi);
}

ChartCoords chart_coords(cplx x, const QBase& base)
{
    if (x == cplx(0.0))
        throw DomainError("chart coordinates: point at the origin");
    const double v = std::log(std::abs(x)) / base.log_abs();
    const double u = frac((std::arg(x) - v * base.log_q().imag()) / two_pi);
    return {u, v};
}

cplx qpow(const QBase& base, double t) { return std::exp(t * base.log_q()); }

bool in_discrete_spiral_coords(const ChartCoords& c, const ChartBase& chart)
{
    if (!chart.i1.contains_mod1(c.u))
        return false;
    // v + n must land in i2 for a natural n
    const double n_min = std::max(0.0, std::floor(chart.i2.lo - c.v));
    const double n_max = std::ceil(chart.i2.hi - c.v) + 1.0;
    for (double n = n_min; n <= n_max; n += 1.0)
        if (chart.i2.contains(c.v + n))
            return true;
    return false;
}

bool in_discrete_spiral(cplx eps, const ChartBase& chart, const QBase& base)
{
    if (eps == cplx(0.0))
        throw DomainError("discrete spiral membership: eps = 0");
    return in_discrete_spiral_coords(chart_coords(eps, base), chart);
}

bool in_continuous_spiral(cplx tau, const ContinuousBase& v, const QBase& base)
{
    return spiral_hit(tau, v, base, true);
}

bool in_two_sided_spiral(cplx tau, const ContinuousBase& v, const QBase& base)
{
    return spiral_hit(tau, v, base, false);
}

double theta_safe_distance(cplx z, cplx lambda, const QBase& base, double delta)
{
    if (z == cplx(0.0) || lambda == cplx(0.0))
        throw DomainError("theta-safe test: z and lambda must be nonzero");
    if (!(delta > 0.0 && delta < 1.0))
        throw ParameterError("theta-safe test: delta must lie in (0, 1)");

    // |1 + w| <= delta forces | |w| - 1 | <= delta, so only this modulus band matters
    const double w_lo = std::max(1.0 - 3.0 * delta, 0.5 * (1.0 - delta));
    const double w_hi = 1.0 + 3.0 * delta;
    const cplx w0 = lambda / z;
    const double L = base.log_abs();
    const double lw = std::log(std::abs(w0));
    const double k_lo = (lw - std::log(w_hi)) / L;
    const double k_hi = (lw - std::log(w_lo)) / L;

    auto w_at = [&](double k) { return w0 * std::exp(-k * base.log_q()); };
    auto dist = [&](double k) { return std::abs(1.0 + w_at(k)); };
    // sign of d/dk |1 + w(k)|^2
    auto slope = [&](double k) {
        const cplx w = w_at(k);
        return std::real(std::conj(1.0 + w) * (-base.log_q() * w));
    };

    const double h_target = 1e-3;
    const auto steps = static_cast<long>(std::ceil((k_hi - k_lo) / h_target));
    const double h = (k_hi - k_lo) / static_cast<double>(std::max(steps, 1L));
    const cplx ratio = std::exp(-h * base.log_q());

    cplx w = w_at(k_lo);
    double best = std::abs(1.0 + w);
    long best_i = 0;
    for (long i = 1; i <= steps; ++i) {
        w *= ratio;
        const double d = std::abs(1.0 + w);
        if (d < best) {
            best = d;
            best_i = i;
        }
    }

    double a = k_lo + h * static_cast<double>(best_i - 1);
    double b = k_lo + h * static_cast<double>(best_i + 1);
    if (slope(a) < 0.0 && slope(b) > 0.0) {
        for (int it = 0; it < 40; ++it) {
            const double m = 0.5 * (a + b);
            (slope(m) < 0.0 ? a : b) = m;
        }
        best = std::min(best, dist(0.5 * (a + b)));
    }
    return best;
}

bool in_theta_safe(cplx z, cplx lambda, const QBase& base, double delta)
{
    return theta_safe_distance(z, lambda, base, delta) > delta;
}

} // namespace qgevrey
