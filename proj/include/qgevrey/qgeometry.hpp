#pragma once

#include "qgevrey/errors.hpp"

namespace qgevrey {

/// The deformation parameter q, |q| > 1, with its principal logarithm fixed once.
class QBase {
public:
    explicit QBase(cplx q);

    cplx q() const noexcept { return q_; }
    cplx log_q() const noexcept { return log_q_; }
    /// log|q| (the real part of the principal logarithm).
    double log_abs() const noexcept { return log_q_.real(); }
    /// Rotation of q^t per unit t, in turns.
    double turn_rate() const noexcept;

private:
    cplx q_;
    cplx log_q_;
};

/// Open real interval (lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo < x && x < hi; }
    /// Membership of x modulo 1 (used for the angular coordinate in turns).
    bool contains_mod1(double x) const noexcept;
};

/// Chart U_I = {exp(2 pi i u) q^v : u in i1, v in i2}; both lengths < 1/4.
struct ChartBase {
    Interval i1;
    Interval i2;

    void validate() const;
};

/// Coordinates (u mod 1, v) of a nonzero point in the chart parameterization.
struct ChartCoords {
    double u;
    double v;
};

ChartCoords chart_coords(cplx x, const QBase& base);

/// Bounded open set V given as modulus interval x argument interval (turns).
struct ContinuousBase {
    Interval modulus;
    Interval arg;

    void validate() const;
    double dist0() const noexcept { return modulus.lo; }
    bool contains(cplx tau) const;
};

cplx qpow(const QBase& base, double t);

/// True iff eps q^n lies in U_I for some natural n.
bool in_discrete_spiral(cplx eps, const ChartBase& chart, const QBase& base);

/// Same test on chart coordinates; u must already be reduced mod 1.
bool in_discrete_spiral_coords(const ChartCoords& c, const ChartBase& chart);

/// True iff tau q^{-l} lies in V for some real l >= 0.
bool in_continuous_spiral(cplx tau, const ContinuousBase& v, const QBase& base);

/// True iff tau q^{-l} lies in V for some real l (both q-directions).
bool in_two_sided_spiral(cplx tau, const ContinuousBase& v, const QBase& base);

/// min over real k of |1 + lambda q^{-k} / z|. Exact whenever the minimum is at
/// most delta; otherwise some value above delta is returned.
double theta_safe_distance(cplx z, cplx lambda, const QBase& base, double delta);

/// z in R_{lambda,q,delta}: |1 + lambda/(z q^k)| > delta for every real k.
bool in_theta_safe(cplx z, cplx lambda, const QBase& base, double delta);

} // namespace qgevrey
