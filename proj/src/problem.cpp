#include "qgevrey/problem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

namespace qgevrey {

cplx Polynomial::operator()(cplx eps) const
{
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        acc = acc * eps + *it;
    return acc;
}

bool Polynomial::is_zero() const
{
    return std::all_of(c.begin(), c.end(), [](cplx x) { return x == cplx(0.0); });
}

void CauchyProblem::validate() const
{
    if (s_order < 1)
        throw ParameterError("problem: S must be a positive integer");
    if (!(r0 > 0.0 && r0 <= 1.0))
        throw ParameterError("problem: r0 must lie in (0, 1]");
    std::set<int> ks;
    for (const auto& t : terms) {
        if (t.k < 0 || t.k >= s_order)
            throw ParameterError("problem: term index k must lie in [0, S-1]");
        if (!ks.insert(t.k).second)
            throw ParameterError("problem: term k = " + std::to_string(t.k) + " appears twice");
        if (t.m0 < 1 || t.m1 < 1)
            throw ParameterError("problem: m0 and m1 must be positive integers");
        std::set<int> ss;
        for (const auto& c : t.coeffs) {
            if (c.s < 0)
                throw ParameterError("problem: z-power s must be natural");
            if (!ss.insert(c.s).second)
                throw ParameterError("problem: z-power s repeated within term k = " +
                                     std::to_string(t.k));
        }
    }
}

void GevreyParams::validate() const
{
    auto pos = [](double x, const char* name) {
        if (!(x > 0.0))
            throw ParameterError(std::string("gevrey: ") + name + " must be positive");
    };
    auto unit = [](double x, const char* name) {
        if (!(x > 0.0 && x < 1.0))
            throw ParameterError(std::string("gevrey: ") + name + " must lie in (0, 1)");
    };
    pos(m_big, "M");
    pos(m_tilde, "M~");
    pos(a1_type, "A1");
    pos(c_geom, "C");
    unit(delta_theta, "delta");
    unit(xi, "xi");
    unit(xi_bar, "xi_bar");
    pos(a1, "a1");
    pos(a2, "a2");
    pos(b1, "b1");
    pos(b2, "b2");
    pos(d1, "d1");
    pos(d2, "d2");
    if (!(m_tilde < m_big))
        throw ParameterError("gevrey: M~ must be smaller than M");
}

cplx InitialData::eval(std::size_t j, cplx eps, cplx tau) const
{
    if (j >= w.size())
        return 0.0;
    cplx acc = 0.0;
    for (const auto& t : w[j])
        acc += t.c * std::pow(tau, t.a) * std::pow(eps, -t.b) * std::pow(1.0 + tau, -t.r);
    return acc;
}

std::size_t CoefficientEvaluator::KeyHash::operator()(const Key& k) const noexcept
{
    std::size_t h = 0;
    for (double d : {k.e_re, k.e_im, k.t_re, k.t_im})
        h = h * 1000003u ^ std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(d));
    return h;
}

CoefficientEvaluator::CoefficientEvaluator(CauchyProblem problem, InitialData initial, QBase base)
    : problem_(std::move(problem)), initial_(std::move(initial)), base_(base)
{
    problem_.validate();
    if (initial_.w.size() > static_cast<std::size_t>(problem_.s_order))
        throw ParameterError("initial data: more entries than S");
}

void CoefficientEvaluator::extend(std::vector<cplx>& w, std::size_t upto, cplx eps,
                                  cplx tau) const
{
    const std::size_t S = static_cast<std::size_t>(problem_.s_order);
    while (w.size() < std::min(upto, S))
        w.push_back(initial_.eval(w.size(), eps, tau));
    const cplx inv_tau1 = 1.0 / (tau + 1.0);
    const cplx log_q = base_.log_q();

    while (w.size() < upto) {
        // w[h + S] = h! sum_k sum_{h1 + h2 = h} b_{k h1} tau^m0 w[h2 + k] / ((tau+1) eps^m0 h2! q^{m1 h2})
        const std::size_t h = w.size() - S;
        cplx acc = 0.0;
        for (const auto& term : problem_.terms) {
            const cplx lead = std::pow(tau / eps, term.m0) * inv_tau1;
            for (const auto& c : term.coeffs) {
                if (static_cast<std::size_t>(c.s) > h)
                    continue;
                const std::size_t h2 = h - static_cast<std::size_t>(c.s);
                double ratio = 1.0;  // h! / h2!
                for (std::size_t j = h2 + 1; j <= h; ++j)
                    ratio *= static_cast<double>(j);
                const cplx scale =
                    ratio * std::exp(-static_cast<double>(term.m1) * static_cast<double>(h2) * log_q);
                acc += c.poly(eps) * lead * scale * w[h2 + static_cast<std::size_t>(term.k)];
            }
        }
        w.push_back(acc);
    }
}

cplx CoefficientEvaluator::coefficient(int beta, cplx eps, cplx tau)
{
    if (beta < 0)
        throw ParameterError("coefficient: beta must be natural");
    if (eps == cplx(0.0))
        throw DomainError("coefficient: eps = 0 is excluded");
    if (tau == cplx(-1.0))
        throw DomainError("coefficient: tau = -1 is a pole of the recursion");
    auto& w = memo_[Key{eps.real(), eps.imag(), tau.real(), tau.imag()}];
    if (w.size() <= static_cast<std::size_t>(beta))
        extend(w, static_cast<std::size_t>(beta) + 1, eps, tau);
    return w[static_cast<std::size_t>(beta)];
}

void CoefficientEvaluator::coefficients(cplx eps, cplx tau, std::span<cplx> out) const
{
    if (eps == cplx(0.0))
        throw DomainError("coefficient: eps = 0 is excluded");
    if (tau == cplx(-1.0))
        throw DomainError("coefficient: tau = -1 is a pole of the recursion");
    std::vector<cplx> w;
    w.reserve(out.size());
    extend(w, out.size(), eps, tau);
    std::copy(w.begin(), w.end(), out.begin());
}

cplx coefficient(CoefficientEvaluator& ev, int beta, cplx eps, cplx tau)
{
    return ev.coefficient(beta, eps, tau);
}

AssumptionAReport check_assumption_a(const CauchyProblem& p, const GevreyParams& g)
{
    AssumptionAReport r;
    for (const auto& t : p.terms) {
        for (const auto& c : t.coeffs) {
            const double n = static_cast<double>(p.s_order - t.k + c.s);
            AssumptionAEntry e{};
            e.k = t.k;
            e.s = c.s;
            e.m0_slack = g.c_geom * n - t.m0;
            e.m0_ok = t.m0 <= g.c_geom * n;
            e.m1_slack = t.m1 - 2.0 * n * g.a1_type;
            e.m1_ok = t.m1 >= 2.0 * n * g.a1_type;
            r.ok = r.ok && e.m0_ok && e.m1_ok;
            r.entries.push_back(e);
        }
    }
    return r;
}

AssumptionBReport check_assumption_b(const GevreyParams& g, const QBase& base)
{
    const double bound = 1.0 / (2.0 * base.log_abs());
    return {g.m_big <= bound, bound - g.m_big};
}

AssumptionCReport check_assumption_c(const GevreyParams& g, const QBase& base)
{
    const double L = base.log_abs();
    const double gap = g.xi / (2.0 * L) - g.m_big;  // xi/(2 log|q|) - M
    AssumptionCReport r{};

    r.c1_ok = L < g.b1 / g.b2;
    r.c1_slack = g.b1 / g.b2 - L;

    const double c2 = L + g.xi * g.b1 / (2.0 * g.b2) + (g.d1 / g.d2) * (g.m_big - g.xi / (2.0 * L));
    r.c2_ok = c2 > 0.0;
    r.c2_slack = c2;

    const double c3 = g.m_big - g.xi / (2.0 * L) + (g.d2 / g.d1) * L;
    r.c3_ok = c3 < 0.0;
    r.c3_slack = -c3;

    const double lhs = g.a1_type * (1.0 - g.d2 * L / (g.d1 * gap));
    const double rhs = g.c_geom * g.c_geom / (4.0 * g.xi_bar * L * gap) + g.c_geom * g.a2 / g.a1;
    r.c4_ok = lhs > rhs;
    r.c4_slack = lhs - rhs;

    r.inv_a = (1.0 - g.xi_bar) * gap;
    r.inv_a_positive = r.inv_a > 0.0;
    return r;
}

double weighted_norm(const TauSamples& v, int beta, cplx eps, const GevreyParams& g,
                     const QBase& base, NormFlavor flavor)
{
    if (v.tau.empty() || v.tau.size() != v.value.size())
        throw ParameterError("weighted_norm: grid must be nonempty and match the values");
    if (eps == cplx(0.0))
        throw DomainError("weighted_norm: eps = 0 is excluded");
    const double b = static_cast<double>(beta);
    const double log_q_weight = g.a1_type * b * b * base.log_abs();
    const double le = std::log(std::abs(eps));
    double best = 0.0;
    for (std::size_t i = 0; i < v.tau.size(); ++i) {
        const double av = std::abs(v.value[i]);
        if (av == 0.0)
            continue;
        const double lr = std::log(std::abs(v.tau[i])) - le;  // log|tau/eps|
        double lw;
        if (flavor == NormFlavor::spiral)
            lw = -g.m_big * lr * lr - g.c_geom * b * lr;
        else
            lw = g.c_geom * b * le - g.m_big * lr * lr;
        best = std::max(best, std::exp(std::log(av) + lw + log_q_weight));
    }
    return best;
}

double lemma1_constant(int s, int k, int m1, int m2, const GevreyParams& g, double cu, double cv,
                       const QBase& base)
{
    const double ks = static_cast<double>(k + s);
    if (m1 > g.c_geom * ks || m2 < 2.0 * ks * g.a1_type)
        throw ParameterError("lemma1_constant: need m1 <= C(k+s) and m2 >= 2(k+s)A1");
    if (!(cu > 0.0 && cv > 0.0))
        throw ParameterError("lemma1_constant: cu and cv must be positive");
    const double e_mod = g.c_geom * ks - m1;
    const double e_q = ks * ks * g.a1_type - static_cast<double>(m2) * k;
    return std::pow(cu / cv, e_mod) * std::exp(e_q * base.log_abs());
}

namespace {

std::vector<double> nodes(const Interval& iv, int n)
{
    std::vector<double> out;
    if (n <= 1) {
        out.push_back(0.5 * (iv.lo + iv.hi));
        return out;
    }
    for (int i = 0; i < n; ++i)
        out.push_back(iv.lo + iv.length() * i / (n - 1));
    return out;
}

double grid_delta(const std::vector<InitialTerm>& w, const AdmissibilityGrid& grid, double mt)
{
    InitialData d{{w}};
    double best = 0.0;
    for (double em : nodes(grid.eps_modulus, grid.n_eps_modulus))
        for (double ea : nodes(grid.eps_arg, grid.n_eps_arg)) {
            const cplx eps = std::polar(em, 2.0 * M_PI * ea);
            for (double tm : nodes(grid.tau_modulus, grid.n_tau_modulus))
                for (double ta : nodes(grid.tau_arg, grid.n_tau_arg)) {
                    const cplx tau = std::polar(tm, 2.0 * M_PI * ta);
                    const double lr = std::log(std::abs(tau / eps));
                    const double val = std::abs(d.eval(0, eps, tau)) * std::exp(-mt * lr * lr);
                    if (std::isnan(val))
                        return std::numeric_limits<double>::infinity();
                    best = std::max(best, val);
                }
        }
    return best;
}

} // namespace

AdmissibilityGrid AdmissibilityGrid::refine() const
{
    AdmissibilityGrid r = *this;
    auto up = [](int n) { return n <= 1 ? n : 2 * n - 1; };
    r.n_eps_modulus = up(n_eps_modulus);
    r.n_eps_arg = up(n_eps_arg);
    r.n_tau_modulus = up(n_tau_modulus);
    r.n_tau_arg = up(n_tau_arg);
    return r;
}

AdmissibilityFit admissibility_fit(const std::vector<InitialTerm>& w, const AdmissibilityGrid& grid,
                                   const GevreyParams& g)
{
    AdmissibilityFit f{};
    f.m_tilde_used = 0.9 * g.m_big;
    f.delta = grid_delta(w, grid, f.m_tilde_used);
    f.delta_refined = grid_delta(w, grid.refine(), f.m_tilde_used);
    f.pass = std::isfinite(f.delta) && std::isfinite(f.delta_refined) &&
             f.delta_refined <= 1.1 * f.delta;
    return f;
}

} // namespace qgevrey
