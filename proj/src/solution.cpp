#include "qgevrey/solution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace qgevrey {

namespace {

/// Least-squares coefficients of y ~ c0 + c1 x + c2 x^2 (deg = 1 or 2), plus r^2.
struct PolyFit {
    std::array<double, 3> c{};
    double r2 = 0.0;
};

PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int deg)
{
    const int n = deg + 1;
    double a[3][4] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p[3] = {1.0, x[i], x[i] * x[i]};
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c)
                a[r][c] += p[r] * p[c];
            a[r][n] += p[r] * y[i];
        }
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        for (int c = 0; c <= n; ++c)
            std::swap(a[col][c], a[piv][c]);
        if (a[col][col] == 0.0)
            throw FitError("least squares: singular design");
        for (int r = 0; r < n; ++r) {
            if (r == col)
                continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c)
                a[r][c] -= f * a[col][c];
        }
    }
    PolyFit out;
    for (int r = 0; r < n; ++r)
        out.c[static_cast<std::size_t>(r)] = a[r][n] / a[r][r];

    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(y.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = out.c[0] + out.c[1] * x[i] + out.c[2] * x[i] * x[i];
        ss_res += (y[i] - f) * (y[i] - f);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

void check_chart(const SolutionChart& sc, cplx eps, cplx t, const QBase& base)
{
    if (sc.chart && !in_discrete_spiral(eps, *sc.chart, base))
        throw DomainError("eps is not in the discrete spiral of chart " + std::to_string(sc.index));
    if (sc.t_set && !sc.t_set->contains(t))
        throw DomainError("t is not in the set T");
}

} // namespace

SolutionChart::SolutionChart(std::size_t index_, cplx lambda_, CoefficientEvaluator evaluator_,
                             QuadSettings quad_, GrowthCertificate cert_, int beta_max_)
    : index(index_), lambda(lambda_), evaluator(std::move(evaluator_)), quad(quad_), cert(cert_),
      beta_max(beta_max_)
{
    if (beta_max < evaluator.problem().s_order)
        throw ParameterError("solution chart: beta_max must be at least S");
    quad.validate();
    cert.validate(evaluator.base());
}

const TransformSet& SolutionChart::transforms(cplx eps, cplx t)
{
    const auto key = std::make_pair(std::make_pair(eps.real(), eps.imag()),
                                    std::make_pair(t.real(), t.imag()));
    auto it = cache_.find(key);
    if (it != cache_.end())
        return it->second;

    const std::size_t dim = static_cast<std::size_t>(beta_max) + 1;
    const CoefficientEvaluator& ev = evaluator;
    BatchIntegrand f = [&ev, eps](cplx tau, std::span<cplx> out) { ev.coefficients(eps, tau, out); };
    BatchResult r = q_laplace_batch(f, dim, lambda, eps * t, ev.base(), cert, quad);
    return cache_.emplace(key, TransformSet{std::move(r.values), r.diag}).first->second;
}

EvalResult evaluate_x(SolutionChart& sc, cplx eps, cplx t, cplx z)
{
    check_chart(sc, eps, t, sc.evaluator.base());
    const TransformSet& ts = sc.transforms(eps, t);
    EvalResult r;
    r.diag = ts.diag;

    cplx zp = 1.0;  // z^beta / beta!
    cplx acc = 0.0;
    for (int b = 0; b <= sc.beta_max; ++b) {
        acc += ts.values[static_cast<std::size_t>(b)] * zp;
        zp *= z / static_cast<double>(b + 1);
    }
    r.value = acc;

    // tail: quadratic fit of log|T_beta| on the upper half, extrapolated
    const double az = std::abs(z);
    if (az == 0.0)
        return r;
    std::vector<double> xs, ys;
    for (int b = sc.beta_max / 2; b <= sc.beta_max; ++b) {
        const double a = std::abs(ts.values[static_cast<std::size_t>(b)]);
        if (a > 0.0) {
            xs.push_back(b);
            ys.push_back(std::log(a));
        }
    }
    if (xs.size() < 3)
        return r;
    const PolyFit pf = polyfit(xs, ys, 2);
    if (!(pf.c[2] < 0.0)) {
        r.warning = true;
        r.message = "transform magnitudes do not decay like exp(-c beta^2); tail not certified";
    }
    double tail = 0.0;
    for (int b = sc.beta_max + 1; b <= sc.beta_max + 60; ++b) {
        const double db = b;
        const double lt = pf.c[0] + pf.c[1] * db + pf.c[2] * db * db + db * std::log(az) -
                          std::lgamma(db + 1.0);
        tail += std::exp(lt);
    }
    r.tail = tail;
    if (tail > sc.quad.abs_tol) {
        r.warning = true;
        if (r.message.empty())
            r.message = "beta tail estimate exceeds the quadrature tolerance";
    }
    return r;
}

cplx phi_ij(SolutionChart& sc, int j, cplx eps, cplx t)
{
    if (j < 0 || j >= sc.evaluator.problem().s_order)
        throw ParameterError("phi_ij: j must lie in [0, S-1]");
    check_chart(sc, eps, t, sc.evaluator.base());
    return sc.transforms(eps, t).values[static_cast<std::size_t>(j)];
}

cplx residual(SolutionChart& sc, cplx eps, cplx t, cplx z)
{
    const CauchyProblem& p = sc.evaluator.problem();
    const QBase& base = sc.evaluator.base();
    check_chart(sc, eps, t, base);
    const int S = p.s_order;
    const int deg = sc.beta_max - S;  // both sides truncated at this z-degree

    std::vector<cplx> zp(static_cast<std::size_t>(deg) + 1);  // z^h / h!
    zp[0] = 1.0;
    for (int h = 1; h <= deg; ++h)
        zp[static_cast<std::size_t>(h)] = zp[static_cast<std::size_t>(h - 1)] * z / static_cast<double>(h);

    const cplx q = base.q();
    // copies: the cache may rehash (std::map does not, but stay independent of that)
    const std::vector<cplx> at_t = sc.transforms(eps, t).values;
    const std::vector<cplx> at_qt = sc.transforms(eps, q * t).values;

    cplx lhs = 0.0;
    for (int h = 0; h <= deg; ++h) {
        const auto i = static_cast<std::size_t>(h + S);
        lhs += (eps * t * at_qt[i] + at_t[i]) * zp[static_cast<std::size_t>(h)];
    }

    cplx rhs = 0.0;
    for (const auto& term : p.terms) {
        const double m0 = term.m0;
        const cplx shifted_t = std::exp(m0 * base.log_q()) * t;
        const std::vector<cplx> tr = sc.transforms(eps, shifted_t).values;
        // (t sigma_q)^m0 f(t) = t^m0 q^{m0(m0-1)/2} f(q^m0 t)
        const cplx op = std::pow(t, term.m0) * std::exp(0.5 * m0 * (m0 - 1.0) * base.log_q());
        for (const auto& c : term.coeffs) {
            const cplx b = c.poly(eps);
            if (b == cplx(0.0))
                continue;
            // z^s * sum_beta T_{beta+k} q^{-m1 beta} z^beta / beta!, kept to total degree deg
            cplx series = 0.0;
            cplx zb = 1.0;
            for (int beta = 0; beta + c.s <= deg; ++beta) {
                series += tr[static_cast<std::size_t>(beta + term.k)] *
                          std::exp(-static_cast<double>(term.m1) * beta * base.log_q()) * zb;
                zb *= z / static_cast<double>(beta + 1);
            }
            rhs += b * std::pow(z, c.s) * op * series;
        }
    }
    return lhs - rhs;
}

DecayFit coefficient_decay(SolutionChart& sc, cplx eps, cplx t)
{
    const TransformSet& ts = sc.transforms(eps, t);
    std::vector<double> xs, ys;
    for (int b = 0; b <= sc.beta_max; ++b) {
        const double a = std::abs(ts.values[static_cast<std::size_t>(b)]);
        if (a > 0.0) {
            xs.push_back(static_cast<double>(b) * b);
            ys.push_back(std::log(a));
        }
    }
    if (xs.size() < 3)
        throw FitError("coefficient decay: fewer than 3 nonzero transforms");
    const PolyFit pf = polyfit(xs, ys, 1);
    return {pf.c[1], pf.c[0], pf.r2};
}

FlatnessFit fit_flatness_rows(std::vector<FlatnessRow> rows, double predicted)
{
    FlatnessFit f;
    f.predicted = predicted;
    std::vector<double> xs, ys;
    for (auto& r : rows) {
        r.used = std::isfinite(r.d) && r.d >= flatness_floor;
        if (r.used) {
            xs.push_back(r.log2_eps);
            ys.push_back(std::log(r.d));
        }
    }
    f.rows = std::move(rows);
    if (xs.size() < 8)
        throw FitError("flatness fit: " + std::to_string(xs.size()) +
                       " points above the numeric floor, need at least 8");
    const PolyFit pf = polyfit(xs, ys, 1);
    f.slope = pf.c[1];
    f.intercept = pf.c[0];
    f.r2 = pf.r2;
    return f;
}

FlatnessFit flatness_fit(SolutionChart& sc1, SolutionChart& sc2, cplx eps0, int n_points,
                         const std::vector<TZ>& grid, const GevreyParams& g, const QBase& base)
{
    const AssumptionCReport c = check_assumption_c(g, base);
    if (!c.inv_a_positive)
        throw ParameterError("flatness fit: 1/A = (1 - xi_bar)(xi/(2 log|q|) - M) is not positive");
    if (grid.empty())
        throw ParameterError("flatness fit: empty (t, z) grid");
    std::vector<FlatnessRow> rows;
    for (int n = 0; n < n_points; ++n) {
        const cplx eps = eps0 * qpow(base, -static_cast<double>(n));
        double d = 0.0;
        for (const auto& p : grid)
            d = std::max(d, std::abs(evaluate_x(sc1, eps, p.t, p.z).value -
                                     evaluate_x(sc2, eps, p.t, p.z).value));
        const double le = std::log(std::abs(eps));
        rows.push_back({n, std::abs(eps), le * le, d, false});
    }
    return fit_flatness_rows(std::move(rows), -c.inv_a);
}

namespace {

/// Monomial coefficients of the interpolating polynomial through (x_i, y_i).
std::vector<cplx> interpolate(const std::vector<cplx>& x, std::vector<cplx> y)
{
    const std::size_t m = x.size();
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t i = m - 1; i >= j; --i)
            y[i] = (y[i] - y[i - 1]) / (x[i] - x[i - j]);
    std::vector<cplx> c(m, cplx(0.0));
    c[0] = y[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) {
        // c <- c (x - x_i) + y_i
        for (std::size_t d = m - 1; d > 0; --d)
            c[d] = c[d - 1] - x[i] * c[d];
        c[0] = y[i] - x[i] * c[0];
    }
    return c;
}

} // namespace

AsymptoticSeries extract_from_samples(const std::vector<cplx>& eps,
                                      const std::vector<std::vector<cplx>>& samples, int k_max,
                                      double tol)
{
    if (k_max < 0 || k_max > 4)
        throw ParameterError("extraction: k_max must lie in [0, 4]");
    if (eps.size() != samples.size() || eps.size() < 3)
        throw ParameterError("extraction: need at least 3 samples, one per eps");
    const std::size_t n = eps.size();
    const std::size_t m = n - 1;  // window length
    if (static_cast<std::size_t>(k_max) + 1 > m)
        throw ParameterError("extraction: depth too small for the requested k_max");
    const std::size_t ng = samples[0].size();

    // early[g], late[g]: monomial coefficients from the two windows
    std::vector<std::vector<cplx>> early(ng), late(ng);
    const std::vector<cplx> x_early(eps.begin(), eps.end() - 1), x_late(eps.begin() + 1, eps.end());
    for (std::size_t g = 0; g < ng; ++g) {
        std::vector<cplx> y_early, y_late;
        for (std::size_t i = 0; i < n; ++i) {
            if (i + 1 < n)
                y_early.push_back(samples[i][g]);
            if (i > 0)
                y_late.push_back(samples[i][g]);
        }
        early[g] = interpolate(x_early, y_early);
        late[g] = interpolate(x_late, y_late);
    }

    AsymptoticSeries out;
    out.eps = eps;
    out.samples = samples;
    double kfact = 1.0;
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0)
            kfact *= k;
        const auto ku = static_cast<std::size_t>(k);
        std::vector<cplx> est(ng);
        double scale = 0.0, diff = 0.0;
        for (std::size_t g = 0; g < ng; ++g) {
            est[g] = late[g][ku] * kfact;
            scale = std::max(scale, std::abs(est[g]));
            diff = std::max(diff, std::abs(late[g][ku] - early[g][ku]) * kfact);
        }
        const double stab = scale > 0.0 ? diff / scale : diff;
        out.stab.push_back(stab);
        if (!(stab < tol)) {
            out.failed_k = k;
            break;
        }
        out.coeffs.push_back(std::move(est));
    }
    return out;
}

AsymptoticSeries extract_coefficients(SolutionChart& sc, cplx eps0, int k_max, double tol,
                                      const std::vector<TZ>& grid, const ExtractionPlan& plan)
{
    if (plan.depth < 3 || plan.stride < 1 || plan.first < 0)
        throw ParameterError("extraction plan: need depth >= 3, stride >= 1, first >= 0");
    const QBase& base = sc.evaluator.base();
    std::vector<cplx> eps;
    std::vector<std::vector<cplx>> samples;
    for (int i = 0; i < plan.depth; ++i) {
        const cplx e = eps0 * qpow(base, -static_cast<double>(plan.stride) * (plan.first + i));
        std::vector<cplx> row;
        for (const auto& p : grid)
            row.push_back(evaluate_x(sc, e, p.t, p.z).value);
        eps.push_back(e);
        samples.push_back(std::move(row));
    }
    return extract_from_samples(eps, samples, k_max, tol);
}

GevreyFit gevrey_fit(const AsymptoticSeries& series, const QBase& base)
{
    const std::size_t K = series.coeffs.size();
    if (K < 3)
        throw FitError("gevrey fit: need at least 3 coefficients");
    GevreyFit f;
    std::vector<double> xs, ys;
    for (std::size_t N = 0; N < K; ++N) {
        double worst = 0.0;
        bool floored = true;
        for (std::size_t i = 0; i < series.eps.size(); ++i) {
            const cplx e = series.eps[i];
            const double ae = std::abs(e);
            for (std::size_t g = 0; g < series.samples[i].size(); ++g) {
                cplx partial = 0.0;
                double pf = 1.0;
                for (std::size_t p = 0; p <= N; ++p) {
                    if (p > 0)
                        pf *= static_cast<double>(p);
                    partial += series.coeffs[p][g] * std::pow(e, static_cast<int>(p)) / pf;
                }
                const cplx y = series.samples[i][g];
                const double num = std::abs(y - partial);
                if (num > 1e-14 * std::max(1.0, std::abs(y)))
                    floored = false;
                // |eps|^{N+1} / (N+1)!
                const double den = std::exp((N + 1.0) * std::log(ae) - std::lgamma(N + 2.0));
                worst = std::max(worst, num / den);
            }
        }
        if (floored || !(worst > 0.0)) {
            f.degenerate = true;
            f.log_remainder.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        f.log_remainder.push_back(std::log(worst));
        xs.push_back(static_cast<double>(N));
        ys.push_back(std::log(worst));
    }
    if (xs.size() < 3) {
        if (!f.degenerate)
            throw FitError("gevrey fit: fewer than 3 usable orders");
        f.b_type = 0.0;
        f.c1 = f.h = std::numeric_limits<double>::quiet_NaN();
        return f;
    }
    const PolyFit pf = polyfit(xs, ys, 2);
    f.c1 = std::exp(pf.c[0]);
    f.h = std::exp(pf.c[1]);
    f.b_type = 2.0 * pf.c[2] / base.log_abs();
    f.r2 = pf.r2;
    return f;
}

YoungValue young_conjugate(double y, const QBase& base)
{
    if (!(y >= 0.0))
        throw ParameterError("young_conjugate: y must be nonnegative");
    const double L = base.log_abs();
    auto phi = [&](double x) { return x * y - x * x / (4.0 * L); };
    // golden-section on [0, b]; the objective is concave with maximizer 2 L y
    double a = 0.0, b = 4.0 * L * y + 1.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = phi(c), fd = phi(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + b); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = phi(d);
        }
    }
    return {std::max(phi(0.5 * (a + b)), phi(0.0)), L * y * y};
}

double prop4_convert(double a_type, const QBase& base, double a_tilde)
{
    if (!(a_type > 0.0))
        throw ParameterError("prop4_convert: type must be positive");
    if (!(a_tilde > a_type))
        throw ParameterError("prop4_convert: need a_tilde > a_type");
    return 1.0 / (2.0 * a_tilde * base.log_abs());
}

double prop4_minimizer(double h, double a_type, double abs_eps, const QBase& base)
{
    if (!(h > 0.0 && a_type > 0.0 && abs_eps > 0.0))
        throw ParameterError("prop4_minimizer: H, A and |eps| must be positive");
    return (-std::log(h) - std::log(abs_eps)) / (a_type * base.log_abs());
}

} // namespace qgevrey
