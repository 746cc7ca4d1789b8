#pragma once

#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "qgevrey/qgeometry.hpp"

namespace qgevrey {

/// Polynomial in eps with complex coefficients, c[i] multiplying eps^i.
struct Polynomial {
    std::vector<cplx> c;

    cplx operator()(cplx eps) const;
    bool is_zero() const;
};

struct CoefficientTerm {
    int s = 0;         ///< power of z
    Polynomial poly;   ///< b_{ks}(eps)
};

/// One summand b_k(eps, z) (t sigma_q)^{m0} (d_z^k X)(eps, t, z q^{-m1}).
struct EquationTerm {
    int k = 0;
    int m0 = 1;
    int m1 = 1;
    std::vector<CoefficientTerm> coeffs;
};

struct CauchyProblem {
    int s_order = 1;   ///< S
    std::vector<EquationTerm> terms;
    double r0 = 1.0;

    void validate() const;
};

struct GevreyParams {
    double m_big = 1.0;      ///< M
    double m_tilde = 0.9;    ///< M~ < M
    double a1_type = 1.0;    ///< A1
    double c_geom = 1.0;     ///< C
    double delta_theta = 0.1;
    double xi = 0.5;
    double xi_bar = 0.5;
    double a1 = 1.0, a2 = 1.0, b1 = 1.0, b2 = 1.0, d1 = 1.0, d2 = 1.0;

    void validate() const;
};

/// c tau^a eps^{-b} (1 + tau)^{-r}
struct InitialTerm {
    cplx c{1.0, 0.0};
    int a = 0;
    int b = 0;
    int r = 0;
};

struct InitialData {
    std::vector<std::vector<InitialTerm>> w;  ///< w[j] for j in [0, S)

    cplx eval(std::size_t j, cplx eps, cplx tau) const;
};

/// Pointwise evaluator of the coefficients W_beta(eps, tau) of the z-series.
/// The memo is append-only and not synchronized: one evaluator per worker.
class CoefficientEvaluator {
public:
    CoefficientEvaluator(CauchyProblem problem, InitialData initial, QBase base);

    const CauchyProblem& problem() const noexcept { return problem_; }
    const InitialData& initial() const noexcept { return initial_; }
    const QBase& base() const noexcept { return base_; }

    /// W_beta(eps, tau), memoized per (eps, tau).
    cplx coefficient(int beta, cplx eps, cplx tau);

    /// W_0..W_{out.size()-1} at one point without touching the memo.
    void coefficients(cplx eps, cplx tau, std::span<cplx> out) const;

    std::size_t memo_points() const noexcept { return memo_.size(); }

private:
    struct Key {
        double e_re, e_im, t_re, t_im;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    void extend(std::vector<cplx>& w, std::size_t upto, cplx eps, cplx tau) const;

    CauchyProblem problem_;
    InitialData initial_;
    QBase base_;
    std::unordered_map<Key, std::vector<cplx>, KeyHash> memo_;
};

struct AssumptionAEntry {
    int k;
    int s;
    bool m0_ok;
    double m0_slack;  ///< C(S-k+s) - m0
    bool m1_ok;
    double m1_slack;  ///< m1 - 2(S-k+s)A1
};

struct AssumptionAReport {
    std::vector<AssumptionAEntry> entries;
    bool ok = true;
};

struct AssumptionBReport {
    bool ok;
    double slack;  ///< 1/(2 log|q|) - M
};

struct AssumptionCReport {
    bool c1_ok, c2_ok, c3_ok, c4_ok;
    double c1_slack, c2_slack, c3_slack, c4_slack;  ///< lhs - rhs, oriented so > 0 holds
    double inv_a;         ///< (1 - xi_bar)(xi/(2 log|q|) - M)
    bool inv_a_positive;

    bool ok() const noexcept { return c1_ok && c2_ok && c3_ok && c4_ok; }
};

AssumptionAReport check_assumption_a(const CauchyProblem& p, const GevreyParams& g);
AssumptionBReport check_assumption_b(const GevreyParams& g, const QBase& base);
AssumptionCReport check_assumption_c(const GevreyParams& g, const QBase& base);

cplx coefficient(CoefficientEvaluator& ev, int beta, cplx eps, cplx tau);

enum class NormFlavor { spiral, disc };

/// A function sampled on a tau grid.
struct TauSamples {
    std::vector<cplx> tau;
    std::vector<cplx> value;
};

/// Grid maximum approximating the weighted sup-norms of the two function spaces.
double weighted_norm(const TauSamples& v, int beta, cplx eps, const GevreyParams& g,
                     const QBase& base, NormFlavor flavor);

/// Explicit constant of the shift-operator inequality:
/// (cu/cv)^{C(k+s) - m1} |q|^{(k+s)^2 A1 - m2 k}.
double lemma1_constant(int s, int k, int m1, int m2, const GevreyParams& g, double cu, double cv,
                       const QBase& base);

/// Polar sample grid for the admissibility fit. Nodes include the endpoints;
/// refine() inserts midpoints on every axis.
struct AdmissibilityGrid {
    Interval eps_modulus, eps_arg;
    Interval tau_modulus, tau_arg;
    int n_eps_modulus = 3, n_eps_arg = 3, n_tau_modulus = 9, n_tau_arg = 9;

    AdmissibilityGrid refine() const;
};

struct AdmissibilityFit {
    double delta;        ///< Delta on the given grid
    double delta_refined;
    double m_tilde_used;
    bool pass;
};

AdmissibilityFit admissibility_fit(const std::vector<InitialTerm>& w, const AdmissibilityGrid& grid,
                                   const GevreyParams& g);

} // namespace qgevrey
