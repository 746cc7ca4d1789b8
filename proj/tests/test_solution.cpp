#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qgevrey/solution.hpp"

using namespace qgevrey;

namespace {

cplx turn(double a) { return std::polar(1.0, 2.0 * std::numbers::pi * a); }

const QBase q14(1.4);
const cplx lambda0 = 1.2 * turn(0.1);
const GrowthCertificate cert{1e12, 0.05};

// S = 1, k = 0, m0 = 1, m1 = 2, b_00 = 1, W_0 = 1 / (1 + tau)
CauchyProblem first_order()
{
    CauchyProblem p;
    p.s_order = 1;
    p.terms.push_back({0, 1, 2, {{0, Polynomial{{1.0}}}}});
    return p;
}

InitialData w0_data() { return {{{InitialTerm{1.0, 0, 0, 1}}}}; }

SolutionChart make_chart(cplx lambda = lambda0, int beta_max = 25, double abs_tol = 1e-10)
{
    QuadSettings qs;
    qs.abs_tol = abs_tol;
    qs.delta = 0.3;
    return SolutionChart(0, lambda, CoefficientEvaluator(first_order(), w0_data(), q14), qs, cert, beta_max);
}

// sum_{beta <= beta_max} W_beta(tau) z^beta / beta! from the closed form of the recursion
cplx closed_series(cplx eps, cplx tau, cplx z, int beta_max)
{
    const cplx x = tau / ((tau + 1.0) * eps);
    cplx acc = 0.0, w = 1.0 / (1.0 + tau), zp = 1.0;
    for (int h = 0; h <= beta_max; ++h) {
        acc += w * zp;
        w *= x * std::exp(-2.0 * h * q14.log_q());
        zp *= z / static_cast<double>(h + 1);
    }
    return acc;
}

// trapezoid rule on the transform path, no adaptivity
cplx x_oracle(cplx eps, cplx t, cplx z, int beta_max)
{
    const double h = 1e-3;
    cplx sum = 0.0;
    for (double s = -40.0; s <= 40.0; s += h) {
        const cplx tau = qpow(q14, s) * lambda0;
        const double lt = log_abs_theta(tau / (eps * t), q14);
        if (lt > 700.0)
            continue;
        sum += closed_series(eps, tau, z, beta_max) / theta(tau / (eps * t), q14);
    }
    return q14.log_q() / pi_q(q14) * h * sum;
}

} // namespace

TEST_CASE("z = 0 returns the beta = 0 transform")
{
    SolutionChart sc = make_chart();
    const cplx eps = 0.1, t = 0.9;
    const EvalResult r = evaluate_x(sc, eps, t, 0.0);
    CHECK(r.value == phi_ij(sc, 0, eps, t));
    CHECK(r.tail == 0.0);
}

TEST_CASE("zero equation with zero data gives zero")
{
    CauchyProblem p = first_order();
    p.terms[0].coeffs[0].poly = Polynomial{{0.0}};
    InitialData d{{{InitialTerm{0.0, 0, 0, 1}}}};
    QuadSettings qs;
    SolutionChart sc(0, lambda0, CoefficientEvaluator(p, d, q14), qs, cert, 10);
    CHECK(evaluate_x(sc, 0.1, 0.9, cplx(0.3, 0.1)).value == cplx(0.0));
    CHECK(residual(sc, 0.1, 0.9, cplx(0.3, 0.1)) == cplx(0.0));
}

TEST_CASE("first-order problem against closed-form coefficients and a fixed-step quadrature")
{
    SolutionChart sc = make_chart();
    const cplx eps = 0.1 * turn(0.02), t = 0.9;
    const cplx z(0.3, 0.2);
    const cplx oracle = x_oracle(eps, t, z, 25);
    // frozen from the oracle
    CHECK(oracle.real() == doctest::Approx(0.037951841301476698).epsilon(1e-9));
    CHECK(oracle.imag() == doctest::Approx(0.0050248506021474378).epsilon(1e-9));
    const EvalResult r = evaluate_x(sc, eps, t, z);
    CHECK(std::abs(r.value - oracle) < 1e-8);
    CHECK_FALSE(r.warning);

    // phi_0 is the transform of W_0 alone
    CHECK(std::abs(phi_ij(sc, 0, eps, t) - x_oracle(eps, t, 0.0, 0)) < 1e-8);
}

TEST_CASE("residual of the first-order problem")
{
    SolutionChart sc = make_chart(lambda0, 25, 1e-8);
    double worst = 0.0;
    for (cplx eps : {cplx(0.1), 0.08 * turn(0.03), 0.05 * turn(-0.02)})
        for (cplx t : {cplx(0.9), 0.7 * turn(0.01)})
            for (cplx z : {cplx(0.0), cplx(0.3, 0.2), cplx(-0.4, 0.1)})
                worst = std::max(worst, std::abs(residual(sc, eps, t, z)));
    CHECK(worst <= 1e-6);
}

TEST_CASE("residual does not grow when beta_max doubles")
{
    SolutionChart a = make_chart(lambda0, 12, 1e-9);
    SolutionChart b = make_chart(lambda0, 24, 1e-9);
    const cplx eps = 0.1, t = 0.9, z(0.45, 0.1);
    const double ra = std::abs(residual(a, eps, t, z));
    const double rb = std::abs(residual(b, eps, t, z));
    CHECK(rb <= std::max(ra, 1e-8));
}

TEST_CASE("raising beta_max changes X by no more than the tail estimate")
{
    SolutionChart a = make_chart(lambda0, 15, 1e-11);
    SolutionChart b = make_chart(lambda0, 25, 1e-11);
    const cplx eps = 0.1, t = 0.9;
    for (cplx z : {cplx(0.5), cplx(0.2, 0.4), cplx(-0.5, 0.0)}) {
        const EvalResult ra = evaluate_x(a, eps, t, z);
        const EvalResult rb = evaluate_x(b, eps, t, z);
        CHECK(std::abs(ra.value - rb.value) <= 2.0 * ra.tail + 1e-10);
    }
}

TEST_CASE("transforms decay like exp(-c beta^2)")
{
    SolutionChart sc = make_chart(lambda0, 25, 1e-8);
    // at small |eps| the linear term of log|W_beta| biases a pure beta^2 fit, so sample at |eps| = 0.84
    const DecayFit d = coefficient_decay(sc, 0.84 * turn(0.4), 0.9);
    const double a1 = 0.95;
    CHECK(d.slope <= -0.9 * a1 * q14.log_abs());
    CHECK(d.r2 > 0.9);
}

TEST_CASE("chart and T membership are enforced when set")
{
    SolutionChart sc = make_chart();
    sc.chart = ChartBase{{0.3, 0.5}, {-1.3, -1.1}};
    sc.t_set = ContinuousBase{{0.6, 0.95}, {-0.02, 0.02}};
    CHECK_THROWS_AS(evaluate_x(sc, 0.1, 0.9, 0.1), DomainError);
    sc.chart.reset();
    CHECK_THROWS_AS(evaluate_x(sc, 0.1, 0.5, 0.1), DomainError);
    CHECK_THROWS_AS(phi_ij(sc, 1, 0.1, 0.9), ParameterError);
    CHECK_THROWS_AS(make_chart(lambda0, 0), ParameterError);
}

TEST_CASE("flatness of one chart against itself is degenerate")
{
    SolutionChart sc = make_chart(lambda0, 20, 1e-9);
    GevreyParams g;
    g.m_big = 0.05;
    g.m_tilde = 0.045;
    g.xi = 0.95;
    g.xi_bar = 0.9;
    const std::vector<TZ> grid{{0.9, 0.0}, {0.9, 0.3}};
    CHECK_THROWS_AS(flatness_fit(sc, sc, 0.1, 13, grid, g, q14), FitError);
}

TEST_CASE("rotating lambda inside one holomorphy sector gives the same solution")
{
    SolutionChart a = make_chart(lambda0, 20, 1e-10);
    SolutionChart b = make_chart(lambda0 * qpow(q14, 0.5), 20, 1e-10);
    for (int n = 0; n < 13; n += 3) {
        const cplx eps = 0.1 * qpow(q14, -double(n));
        CHECK(std::abs(evaluate_x(a, eps, 0.9, 0.3).value - evaluate_x(b, eps, 0.9, 0.3).value) < 1e-8);
    }
}

TEST_CASE("flatness fit requires a positive exponent and enough rows")
{
    SolutionChart sc = make_chart(lambda0, 10);
    GevreyParams g;
    g.m_big = 3.0;  // 0.95 / (2 log 1.4) - 3 < 0
    g.m_tilde = 2.0;
    g.xi = 0.95;
    CHECK_THROWS_AS(flatness_fit(sc, sc, 0.1, 13, {{0.9, 0.0}}, g, q14), ParameterError);

    std::vector<FlatnessRow> rows;
    for (int n = 0; n < 7; ++n)
        rows.push_back({n, 0.1, 5.3, 1e-3, false});
    CHECK_THROWS_AS(fit_flatness_rows(rows, -1.0), FitError);
}

TEST_CASE("flatness fit recovers the exponent of an exactly flat function")
{
    const double c = prop4_convert(1.0, q14, 1.5);
    CHECK(c == doctest::Approx(1.0 / (3.0 * q14.log_abs())).epsilon(1e-15));
    std::vector<FlatnessRow> rows;
    for (int n = 0; n < 13; ++n) {
        const double ae = 0.84 * std::pow(1.4, -n);
        const double l2 = std::log(ae) * std::log(ae);
        rows.push_back({n, ae, l2, 3.0 * std::exp(-c * l2), false});
    }
    const FlatnessFit f = fit_flatness_rows(rows, -c);
    CHECK(f.slope == doctest::Approx(-c).epsilon(1e-9));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("extraction from exact polynomial samples")
{
    std::vector<cplx> eps;
    std::vector<std::vector<cplx>> cub, lin;
    const cplx c[4] = {{0.7, -0.2}, {1.5, 0.3}, {-0.4, 0.9}, {2.0, -1.0}};
    for (int n = 0; n < 7; ++n) {
        const cplx e = 0.84 * turn(0.4) * std::pow(1.4, -(5 + n));
        eps.push_back(e);
        cub.push_back({c[0] + e * (c[1] + e * (c[2] + e * c[3]))});
        lin.push_back({c[0] + c[1] * e});
    }
    // X_k = k! * (coefficient of eps^k)
    const AsymptoticSeries s = extract_from_samples(eps, cub, 3, 1e-6);
    CHECK(s.failed_k == -1);
    REQUIRE(s.coeffs.size() == 4);
    const double fact[4] = {1.0, 1.0, 2.0, 6.0};
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(s.coeffs[k][0] - fact[k] * c[k]) <= 1e-8 * std::abs(fact[k] * c[k]));

    const AsymptoticSeries l = extract_from_samples(eps, lin, 1, 1e-6);
    CHECK(std::abs(l.coeffs[0][0] - c[0]) < 1e-12);
    CHECK(std::abs(l.coeffs[1][0] - c[1]) < 1e-10);

    // a coefficient that vanishes exactly has no relative stability: it is reported, not hidden
    const AsymptoticSeries z = extract_from_samples(eps, lin, 3, 1e-6);
    CHECK(z.failed_k == 2);
    CHECK(z.coeffs.size() == 2);

    CHECK_THROWS_AS(extract_from_samples(eps, lin, 5, 0.1), ParameterError);
    CHECK_THROWS_AS(extract_from_samples({eps[0], eps[1]}, {lin[0], lin[1]}, 0, 0.1), ParameterError);
}

TEST_CASE("extraction reports the first unstable order")
{
    std::vector<cplx> eps;
    std::vector<std::vector<cplx>> osc;
    for (int n = 0; n < 7; ++n) {
        const cplx e = 0.5 * std::pow(1.4, -n);
        eps.push_back(e);
        osc.push_back({std::sin(1.0 / e)});
    }
    const AsymptoticSeries s = extract_from_samples(eps, osc, 3, 0.1);
    CHECK(s.failed_k >= 0);
    CHECK(s.coeffs.size() == static_cast<std::size_t>(s.failed_k));
}

TEST_CASE("gevrey fit on a synthetic series of known type")
{
    // f = sum_k |q|^{B k^2 / 2} eps^k / k!, so X_k = |q|^{B k^2 / 2}
    for (double B : {0.5, 1.0, 2.0}) {
        AsymptoticSeries s;
        for (int k = 0; k <= 4; ++k)
            s.coeffs.push_back({cplx(std::exp(0.5 * B * k * k * q14.log_abs()))});
        for (int n = 0; n < 5; ++n) {
            const cplx e = 0.01 * std::pow(1.4, -n);
            cplx f = 0.0, ef = 1.0;
            double fact = 1.0;
            for (int k = 0; k <= 14; ++k) {
                if (k > 0)
                    fact *= k;
                f += std::exp(0.5 * B * k * k * q14.log_abs()) * ef / fact;
                ef *= e;
            }
            s.eps.push_back(e);
            s.samples.push_back({f});
        }
        const GevreyFit g = gevrey_fit(s, q14);
        CAPTURE(B);
        CHECK_FALSE(g.degenerate);
        CHECK(std::abs(g.b_type - B) <= 0.15 * B);
    }
}

TEST_CASE("gevrey fit on an exact polynomial is degenerate")
{
    AsymptoticSeries s;
    s.coeffs = {{1.0}, {2.0}, {0.0}, {0.0}};
    for (int n = 0; n < 5; ++n) {
        const cplx e = 0.05 * std::pow(1.4, -n);
        s.eps.push_back(e);
        s.samples.push_back({1.0 + 2.0 * e});
    }
    const GevreyFit g = gevrey_fit(s, q14);
    CHECK(g.degenerate);
    CHECK(g.b_type == 0.0);
}

TEST_CASE("young conjugate")
{
    const QBase b(std::exp(1.0 / 16.0));
    const YoungValue y0 = young_conjugate(0.0, b);
    CHECK(y0.numeric == 0.0);
    CHECK(y0.closed == 0.0);
    const YoungValue y2 = young_conjugate(2.0, b);
    CHECK(y2.closed == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::abs(y2.numeric - 0.25) < 1e-9);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> Y(0.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        const YoungValue v = young_conjugate(Y(rng), q14);
        CHECK(std::abs(v.numeric - v.closed) <= 1e-9 * std::max(1.0, v.closed));
    }
    CHECK_THROWS_AS(young_conjugate(-1.0, b), ParameterError);
}

TEST_CASE("null-expansion conversion")
{
    CHECK_THROWS_AS(prop4_convert(1.0, q14, 1.0), ParameterError);
    CHECK_THROWS_AS(prop4_convert(1.0, q14, 0.5), ParameterError);
    double prev = prop4_convert(1.0, q14, 1.01);
    for (double at : {2.0, 10.0, 100.0, 1e6}) {
        const double c = prop4_convert(1.0, q14, at);
        CHECK(c < prev);
        prev = c;
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("null-expansion minimizer against golden-section search")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> H(0.5, 5.0), A(0.5, 3.0), E(-8.0, -1.0);
    for (int i = 0; i < 50; ++i) {
        const double h = H(rng), a = A(rng), ae = std::exp(E(rng));
        const double L = q14.log_abs();
        auto G = [&](double x) { return std::log(h) * x + 0.5 * L * a * x * x + (x + 1.0) * std::log(ae); };
        // bisection on the sign of a central-difference derivative
        double lo = -200.0, hi = 200.0;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (lo + hi);
            (G(m + 1e-4) - G(m - 1e-4) > 0.0 ? hi : lo) = m;
        }
        CHECK(std::abs(prop4_minimizer(h, a, ae, q14) - 0.5 * (lo + hi)) < 1e-8);
    }
    CHECK_THROWS_AS(prop4_minimizer(0.0, 1.0, 0.1, q14), ParameterError);
}
