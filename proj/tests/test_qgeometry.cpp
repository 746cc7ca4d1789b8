#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qgevrey/qgeometry.hpp"

using namespace qgevrey;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

cplx turn(double a) { return std::polar(1.0, two_pi * a); }

// brute-force scan of |1 + lambda q^{-k} / z| over a wide k range
double scan_distance(cplx z, cplx lambda, const QBase& base, double k_lo, double k_hi, double h)
{
    double best = 1e300;
    for (double k = k_lo; k <= k_hi; k += h)
        best = std::min(best, std::abs(1.0 + lambda * std::exp(-k * base.log_q()) / z));
    return best;
}

} // namespace

TEST_CASE("qpow on real and rotated bases")
{
    const QBase two(2.0);
    CHECK(qpow(two, 0.0) == cplx(1.0));
    CHECK(std::abs(qpow(two, 1.0) - 2.0) < 1e-15);
    CHECK(std::abs(qpow(two, 0.5) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(qpow(two, -3.0) - 0.125) < 1e-16);

    const QBase rot(2.0 * std::exp(cplx(0, 0.1)));
    CHECK(std::abs(qpow(rot, 1.0) - rot.q()) < 1e-15);
    CHECK(rot.turn_rate() == doctest::Approx(0.1 / two_pi).epsilon(1e-14));
}

TEST_CASE("qpow is additive in the exponent")
{
    const QBase b(1.3 * std::exp(cplx(0, 0.7)));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double s = U(rng), t = U(rng);
        const cplx lhs = qpow(b, s + t);
        CHECK(std::abs(lhs - qpow(b, s) * qpow(b, t)) <= 1e-13 * std::abs(lhs));
    }
}

TEST_CASE("QBase rejects |q| <= 1")
{
    CHECK_THROWS_AS(QBase(1.0), ParameterError);
    CHECK_THROWS_AS(QBase(cplx(0.6, 0.8)), ParameterError);
    CHECK_THROWS_AS(QBase(0.5), ParameterError);
    CHECK_NOTHROW(QBase(1.0001));
}

TEST_CASE("chart intervals must be shorter than a quarter")
{
    const ChartBase ok{{0.0, 0.2}, {0.0, 0.2}};
    const ChartBase wide{{0.0, 0.25}, {0.0, 0.2}};
    const ChartBase empty{{0.0, 0.2}, {0.3, 0.3}};
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS(wide.validate(), ParameterError);
    CHECK_THROWS_AS(empty.validate(), ParameterError);
}

TEST_CASE("chart coordinates round trip")
{
    const QBase b(1.4 * std::exp(cplx(0, 0.3)));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0), V(-6.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double u = U(rng), v = V(rng);
        const cplx x = turn(u) * qpow(b, v);
        const ChartCoords c = chart_coords(x, b);
        CHECK(c.v == doctest::Approx(v).epsilon(1e-12));
        const double du = std::abs(c.u - u);
        CHECK(std::min(du, 1.0 - du) < 1e-12);
    }
    CHECK_THROWS_AS(chart_coords(0.0, b), DomainError);
}

TEST_CASE("discrete spiral membership")
{
    const QBase b(2.0);
    const ChartBase ch{{0.1, 0.3}, {-1.2, -1.0}};
    const cplx inside = turn(0.2) * qpow(b, -1.1);

    CHECK(in_discrete_spiral(inside, ch, b));
    CHECK(in_discrete_spiral(inside * std::pow(2.0, -3), ch, b));
    // above the chart: no natural n brings it down into i2
    CHECK_FALSE(in_discrete_spiral(turn(0.2) * qpow(b, -0.5), ch, b));
    CHECK_FALSE(in_discrete_spiral(turn(0.5) * qpow(b, -1.1), ch, b));
    CHECK_THROWS_AS(in_discrete_spiral(0.0, ch, b), DomainError);
}

TEST_CASE("discrete spiral is invariant under eps -> eps / q")
{
    const QBase b(1.4 * std::exp(cplx(0, 0.2)));
    const ChartBase ch{{0.3, 0.5}, {-1.3, -1.1}};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0), V(-4.0, -1.0);
    int hits = 0;
    for (int i = 0; i < 4000; ++i) {
        const cplx eps = turn(U(rng)) * qpow(b, V(rng));
        if (in_discrete_spiral(eps, ch, b)) {
            ++hits;
            CHECK(in_discrete_spiral(eps / b.q(), ch, b));
        }
    }
    CHECK(hits > 50);
}

TEST_CASE("continuous spiral membership")
{
    const QBase b(2.0);
    const ContinuousBase v{{1.1, 1.5}, {0.1, 0.2}};
    const cplx tau = 1.3 * turn(0.15);
    CHECK(in_continuous_spiral(tau, v, b));
    CHECK(in_continuous_spiral(tau * std::pow(2.0, 5.7), v, b));
    CHECK_FALSE(in_continuous_spiral(tau * 0.5, v, b));  // below dist0
    CHECK_FALSE(in_continuous_spiral(1.3 * turn(0.6), v, b));
    CHECK(in_two_sided_spiral(tau * 0.5, v, b));

    // a rotating base sweeps the argument as the modulus grows
    const QBase r(2.0 * turn(0.05));
    CHECK(in_continuous_spiral(1.3 * turn(0.15) * qpow(r, 3.0), v, r));
    CHECK_FALSE(in_continuous_spiral(1.3 * turn(0.6) * 1.1, v, r));
}

TEST_CASE("continuous spiral is closed under tau -> tau q^l, l >= 0")
{
    const QBase b(1.4 * turn(0.03));
    const ContinuousBase v{{1.05, 1.5}, {0.4, 0.44}};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> A(0.0, 1.0), R(0.5, 30.0), Lr(0.0, 4.0);
    int hits = 0;
    for (int i = 0; i < 5000; ++i) {
        const cplx tau = R(rng) * turn(A(rng));
        if (in_continuous_spiral(tau, v, b)) {
            ++hits;
            CHECK(in_continuous_spiral(tau * qpow(b, Lr(rng)), v, b));
        }
    }
    CHECK(hits > 20);
}

TEST_CASE("theta-safe distance against a brute-force scan")
{
    const QBase b(2.0 * std::exp(cplx(0, 0.1)));
    const double delta = 0.5;

    // lambda / z = -q^{0.31}: the path passes through -1 at k = 0.31
    const cplx z = 1.0;
    const cplx lambda = -qpow(b, 0.31);
    const double oracle = scan_distance(z, lambda, b, -10.0, 10.0, 1e-4);
    CHECK(oracle < 1e-3);
    CHECK(theta_safe_distance(z, lambda, b, delta) < 1e-6);
    CHECK_FALSE(in_theta_safe(z, lambda, b, delta));

    // random z: the decision always matches, the distance wherever it is decisive
    const cplx lambda2 = 1.25 * turn(0.2);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> A(0.0, 1.0), R(0.2, 3.0);
    int near = 0;
    for (int i = 0; i < 40; ++i) {
        const cplx zz = R(rng) * turn(A(rng));
        const double d = theta_safe_distance(zz, lambda2, b, delta);
        const double o = scan_distance(zz, lambda2, b, -15.0, 15.0, 1e-4);
        CHECK(in_theta_safe(zz, lambda2, b, delta) == (o > delta));
        if (o <= delta) {
            ++near;
            CHECK(d == doctest::Approx(o).epsilon(1e-6));
        }
    }
    CHECK(near > 5);
}

TEST_CASE("theta-safe set is invariant under z -> z q^k")
{
    const QBase b(1.4 * turn(0.02));
    const cplx lambda = 1.2 * turn(0.3);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> A(0.0, 1.0), R(0.1, 3.0), K(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const cplx z = R(rng) * turn(A(rng));
        const double k = K(rng);
        const double d0 = theta_safe_distance(z, lambda, b, 0.2);
        const double d1 = theta_safe_distance(z * qpow(b, k), lambda, b, 0.2);
        CHECK(d1 == doctest::Approx(d0).epsilon(1e-7));
    }
}

TEST_CASE("theta-safe rejects degenerate input")
{
    const QBase b(2.0);
    CHECK_THROWS_AS(theta_safe_distance(0.0, 1.0, b, 0.1), DomainError);
    CHECK_THROWS_AS(theta_safe_distance(1.0, 0.0, b, 0.1), DomainError);
    CHECK_THROWS_AS(theta_safe_distance(1.0, 1.0, b, 1.5), ParameterError);
    // positive real ratio on a real base never approaches -1
    CHECK(in_theta_safe(1.0, 1.0, b, 0.5));
    CHECK_FALSE(in_theta_safe(1.0, -1.0, b, 0.5));
}
