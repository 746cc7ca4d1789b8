#include "qgevrey/qlaplace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qgevrey {

namespace {

double resolve_xi(const QuadSettings& s, const GrowthCertificate& cert, const QBase& base)
{
    if (!std::isnan(s.xi))
        return s.xi;
    return 0.5 * (2.0 * cert.mbar * base.log_abs() + 1.0);
}

// running sums in extended precision: the extraction of asymptotic
// coefficients divides quadrature noise by powers of a small eps
using acc_t = std::complex<long double>;

struct PathIntegrand {
    const BatchIntegrand& f;
    cplx lambda;
    cplx z;
    const QBase& base;
    const ThetaSettings& theta;
    std::vector<cplx> scratch;
    std::complex<long double> log_q{};
    std::complex<long double> lambda_over_z{};

    PathIntegrand(const BatchIntegrand& f_, cplx lambda_, cplx z_, const QBase& base_,
                  const ThetaSettings& theta_, std::size_t dim)
        : f(f_), lambda(lambda_), z(z_), base(base_), theta(theta_), scratch(dim)
    {
        using cld = std::complex<long double>;
        log_q = std::log(cld(base.q().real(), base.q().imag()));
        lambda_over_z = cld(lambda.real(), lambda.imag()) / cld(z.real(), z.imag());
    }

    /// Adds F(q^s lambda) / Theta(q^s lambda / z) into acc. The Theta argument
    /// is formed in extended precision: the integrand's logarithmic derivative
    /// is large where Theta cancels, so rounding the node would add noise.
    void accumulate(double s, std::vector<acc_t>& acc)
    {
        const std::complex<long double> qs = std::exp(static_cast<long double>(s) * log_q);
        const cplx tau = cplx(static_cast<double>(qs.real()), static_cast<double>(qs.imag())) * lambda;
        const ThetaParts tp = theta_parts(qs * lambda_over_z, base, theta);
        const cplx inv_theta = std::exp(-tp.log_factor) / tp.reduced;
        std::fill(scratch.begin(), scratch.end(), cplx(0.0));
        f(tau, scratch);
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += acc_t(scratch[i] * inv_theta);
    }
};

/// Composite Simpson on [a, b] with global halving; values are scaled by pref.
std::vector<cplx> simpson(PathIntegrand& g, std::size_t dim, double a, double b, cplx pref,
                          const QuadSettings& qs, QuadDiagnostics& diag)
{
    std::vector<cplx> out(dim, cplx(0.0));
    if (!(b > a))
        return out;

    long n = 2 * static_cast<long>(std::ceil((b - a) / (2.0 * qs.initial_step)));
    n = std::max(n, 2L);
    double h = (b - a) / static_cast<double>(n);

    std::vector<acc_t> ends(dim, 0.0), even(dim, 0.0), odd(dim, 0.0), mid(dim, 0.0);
    g.accumulate(a, ends);
    g.accumulate(b, ends);
    for (long i = 1; i < n; ++i)
        g.accumulate(a + h * static_cast<double>(i), (i % 2) ? odd : even);
    diag.evaluations += static_cast<std::size_t>(n + 1);

    auto estimate = [&](std::vector<cplx>& dst) {
        for (std::size_t i = 0; i < dim; ++i)
            dst[i] = pref * (h / 3.0) * cplx(ends[i] + 4.0L * odd[i] + 2.0L * even[i]);
    };
    std::vector<cplx> prev(dim), cur(dim);
    estimate(prev);

    for (int k = 1; k <= qs.max_halvings; ++k) {
        h *= 0.5;
        std::fill(mid.begin(), mid.end(), acc_t(0.0));
        for (long j = 0; j < n; ++j)
            g.accumulate(a + h * static_cast<double>(2 * j + 1), mid);
        diag.evaluations += static_cast<std::size_t>(n);
        n *= 2;
        for (std::size_t i = 0; i < dim; ++i) {
            even[i] += odd[i];
            odd[i] = mid[i];
        }
        estimate(cur);

        double change = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double c = std::abs(cur[i] - prev[i]);
            if (c > change || std::isnan(c)) {
                change = c;
                worst = i;
            }
        }
        diag.halvings = k;
        diag.step = h;
        diag.last_change = change;
        if (change < qs.abs_tol)
            return cur;
        if (k == qs.max_halvings)
            throw ConvergenceError("q-Laplace quadrature did not converge after " +
                                       std::to_string(k) + " halvings",
                                   cur[worst], prev[worst]);
        prev.swap(cur);
    }
    return prev;
}

void check_safe(cplx lambda, cplx z, const QBase& base, const QuadSettings& s)
{
    if (!in_theta_safe(z, lambda, base, s.delta))
        throw DomainError("q-Laplace: z is not in the Theta-safe domain for this direction");
}

} // namespace

void QuadSettings::validate() const
{
    if (!(abs_tol > 0.0))
        throw ParameterError("quadrature: abs_tol must be positive");
    if (!(initial_step > 0.0 && initial_step <= 0.5))
        throw ParameterError("quadrature: initial_step must lie in (0, 0.5]");
    if (max_halvings < 3)
        throw ParameterError("quadrature: max_halvings must be at least 3");
    if (!(s_pad > 0.0))
        throw ParameterError("quadrature: s_pad must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw ParameterError("quadrature: delta must lie in (0, 1)");
    if (!std::isnan(xi) && !(xi > 0.0 && xi < 1.0))
        throw ParameterError("quadrature: xi must lie in (0, 1)");
    theta.validate();
}

void GrowthCertificate::validate(const QBase& base) const
{
    if (!(c1 > 0.0))
        throw ParameterError("growth certificate: c1 must be positive");
    if (!(mbar > 0.0 && mbar < 1.0 / (2.0 * base.log_abs())))
        throw ParameterError("growth certificate: mbar must lie in (0, 1/(2 log|q|))");
}

double path_theta_constant(cplx lambda, cplx z, const QBase& base, double xi,
                           const ThetaSettings& settings)
{
    const double L = base.log_abs();
    // log f(s+1) - log f(s) = (1 - xi) l(s) + L (1 - xi/2): the minimum of every
    // residue class s0 + Z sits within one period of l_star
    const double l_star = -L * (1.0 - 0.5 * xi) / (1.0 - xi);
    const double l0 = std::log(std::abs(lambda / z));
    const double s_a = (l_star - L - l0) / L;
    const int samples = 512;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
        const double s = s_a + 2.0 * i / samples;
        const cplx x = qpow(base, s) * lambda / z;
        best = std::min(best, theta_lower_ratio(x, base, xi, settings));
    }
    return best;
}

Window truncation_window(const GrowthCertificate& cert, cplx lambda, cplx z, const QBase& base,
                         double xi, double tol)
{
    cert.validate(base);
    if (!(tol > 0.0))
        throw ParameterError("truncation window: tol must be positive");
    if (!(xi > 0.0 && xi < 1.0))
        throw ParameterError("truncation window: xi must lie in (0, 1)");
    const double L = base.log_abs();
    const double a = xi / (2.0 * L) - cert.mbar;
    if (!(a > 0.0))
        throw ParameterError("truncation window: mbar >= xi/(2 log|q|), integral not certifiably convergent");

    // exponent in u = log|q^s lambda|: mbar u^2 - xi (u - lz)^2 / (2L) = -a (u - u*)^2 + g_max
    const double lz = std::log(std::abs(z));
    const double b = xi * lz / L;
    const double u_star = b / (2.0 * a);
    const double g_max = b * b / (4.0 * a) - xi * lz * lz / (2.0 * L);

    const double c_xi = path_theta_constant(lambda, z, base, xi);
    if (!(c_xi > 0.0))
        throw DomainError("truncation window: path meets a zero of Theta");

    // two tails: (c1 / (C_xi L)) e^{g_max} e^{-a R^2} / (a R) <= tol
    const double K = std::log(cert.c1 / (c_xi * L * tol)) + g_max;
    auto excess = [&](double R) { return K - a * R * R - std::log(a * R); };
    double R = std::sqrt(std::max(K, 1.0) / a);
    for (int it = 0; it < 60 && excess(R) > 0.0; ++it)
        R = std::sqrt(std::max(K - std::log(a * R), 0.0) / a) * 1.0001 + 1e-12;
    while (excess(R) > 0.0)
        R *= 1.05;

    const double l_lambda = std::log(std::abs(lambda));
    return {(u_star - R - l_lambda) / L, (u_star + R - l_lambda) / L};
}

BatchResult q_laplace_batch(const BatchIntegrand& f, std::size_t dim, cplx lambda, cplx z,
                            const QBase& base, const GrowthCertificate& cert,
                            const QuadSettings& settings)
{
    settings.validate();
    check_safe(lambda, z, base, settings);
    const cplx pref = base.log_q() / pi_q(base);
    const double xi = resolve_xi(settings, cert, base);
    const double tol = settings.abs_tol / (10.0 * std::abs(pref));
    Window w = truncation_window(cert, lambda, z, base, xi, tol);
    w.s_lo -= settings.s_pad;
    w.s_hi += settings.s_pad;

    BatchResult r;
    r.diag.window = w;
    PathIntegrand g(f, lambda, z, base, settings.theta, dim);
    r.values = simpson(g, dim, w.s_lo, w.s_hi, pref, settings, r.diag);
    return r;
}

cplx q_laplace(const ScalarIntegrand& f, cplx lambda, cplx z, const QBase& base,
               const GrowthCertificate& cert, const QuadSettings& settings)
{
    BatchIntegrand fb = [&f](cplx tau, std::span<cplx> out) { out[0] = f(tau); };
    return q_laplace_batch(fb, 1, lambda, z, base, cert, settings).values[0];
}

SplitValue q_laplace_split(const ScalarIntegrand& f, cplx lambda, cplx z, const QBase& base,
                           const GrowthCertificate& cert, const QuadSettings& settings)
{
    settings.validate();
    check_safe(lambda, z, base, settings);
    const cplx pref = base.log_q() / pi_q(base);
    const double xi = resolve_xi(settings, cert, base);
    const double tol = settings.abs_tol / (10.0 * std::abs(pref));
    Window w = truncation_window(cert, lambda, z, base, xi, tol);
    w.s_lo -= settings.s_pad;
    w.s_hi += settings.s_pad;

    BatchIntegrand fb = [&f](cplx tau, std::span<cplx> out) { out[0] = f(tau); };
    PathIntegrand g(fb, lambda, z, base, settings.theta, 1);
    QuadDiagnostics diag;
    const double mid = std::clamp(0.0, w.s_lo, w.s_hi);
    SplitValue v{};
    v.minus = simpson(g, 1, w.s_lo, mid, pref, settings, diag)[0];
    v.plus = simpson(g, 1, mid, w.s_hi, pref, settings, diag)[0];
    return v;
}

} // namespace qgevrey
