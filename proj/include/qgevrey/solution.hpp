#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgevrey/problem.hpp"
#include "qgevrey/qlaplace.hpp"

namespace qgevrey {

/// Fit could not be formed (too few usable points, degenerate data).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transforms T_beta = L^lambda(W_beta(eps, .))(eps t') for beta = 0..beta_max.
struct TransformSet {
    std::vector<cplx> values;
    QuadDiagnostics diag;
};

/// X_I(eps, t, z) = sum_beta L^lambda(W_beta(eps, .))(eps t) z^beta / beta!
class SolutionChart {
public:
    SolutionChart(std::size_t index, cplx lambda, CoefficientEvaluator evaluator,
                  QuadSettings quad, GrowthCertificate cert, int beta_max = 25);

    std::size_t index;
    cplx lambda;
    CoefficientEvaluator evaluator;
    QuadSettings quad;
    GrowthCertificate cert;
    int beta_max;
    std::optional<ChartBase> chart;       ///< membership of eps is checked when set
    std::optional<ContinuousBase> t_set;  ///< membership of t is checked when set

    /// Cached per (eps, t'); no domain checks beyond the Theta-safe one.
    const TransformSet& transforms(cplx eps, cplx t);

    void clear_cache() { cache_.clear(); }
    std::size_t cache_size() const noexcept { return cache_.size(); }

private:
    std::map<std::pair<std::pair<double, double>, std::pair<double, double>>, TransformSet> cache_;
};

struct EvalResult {
    cplx value;
    double tail = 0.0;       ///< extrapolated size of the dropped beta > beta_max terms
    bool warning = false;    ///< tail above the quadrature tolerance, or decay fit not decaying
    std::string message;
    QuadDiagnostics diag;
};

EvalResult evaluate_x(SolutionChart& sc, cplx eps, cplx t, cplx z);

/// phi_{I,j}(eps, t): the beta = j transform, shared with evaluate_x.
cplx phi_ij(SolutionChart& sc, int j, cplx eps, cplx t);

/// LHS - RHS of the equation on the series truncated at degree beta_max - S.
cplx residual(SolutionChart& sc, cplx eps, cplx t, cplx z);

/// Slope and intercept of log|T_beta| against beta^2 (simple regression).
struct DecayFit {
    double slope;
    double intercept;
    double r2;
};
DecayFit coefficient_decay(SolutionChart& sc, cplx eps, cplx t);

struct TZ {
    cplx t;
    cplx z;
};

struct FlatnessRow {
    int n;
    double abs_eps;
    double log2_eps;  ///< log^2 |eps|
    double d;         ///< sup over the grid of |X_I - X_I'|
    bool used;        ///< above the numeric floor
};

struct FlatnessFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double predicted = 0.0;  ///< -1/A
    std::vector<FlatnessRow> rows;
};

constexpr double flatness_floor = 1e-14;

/// Least squares of log d against log^2|eps| on rows above the floor (at least 8).
FlatnessFit fit_flatness_rows(std::vector<FlatnessRow> rows, double predicted);

FlatnessFit flatness_fit(SolutionChart& sc1, SolutionChart& sc2, cplx eps0, int n_points,
                         const std::vector<TZ>& grid, const GevreyParams& g, const QBase& base);

struct ExtractionPlan {
    int first = 0;   ///< eps_n = eps0 q^{-stride n} for n = first, ..., first + depth - 1
    int depth = 7;
    int stride = 1;
};

struct AsymptoticSeries {
    std::vector<std::vector<cplx>> coeffs;  ///< coeffs[k][grid index] = X_k
    std::vector<double> stab;               ///< per-k relative change between the two windows
    int failed_k = -1;                      ///< first k that did not stabilize, -1 if none
    std::vector<cplx> eps;                  ///< the sequence used
    std::vector<std::vector<cplx>> samples; ///< samples[n][grid index] = X(eps_n)
};

/// Coefficients of sum X_k eps^k / k! from values on a sequence tending to 0.
/// The polynomial through the first depth-1 samples and the one through the
/// last depth-1 samples give two estimates; their relative difference is the
/// stabilization residual.
AsymptoticSeries extract_from_samples(const std::vector<cplx>& eps,
                                      const std::vector<std::vector<cplx>>& samples, int k_max,
                                      double tol);

AsymptoticSeries extract_coefficients(SolutionChart& sc, cplx eps0, int k_max, double tol,
                                      const std::vector<TZ>& grid, const ExtractionPlan& plan);

struct GevreyFit {
    double c1 = 0.0;
    double h = 0.0;
    double b_type = 0.0;
    double r2 = 0.0;
    bool degenerate = false;  ///< remainders reached the numeric floor
    std::vector<double> log_remainder;  ///< per order N, NaN when floored
};

GevreyFit gevrey_fit(const AsymptoticSeries& series, const QBase& base);

struct YoungValue {
    double numeric;
    double closed;  ///< log|q| y^2
};

/// sup_{x >= 0} (x y - x^2 / (4 log|q|)).
YoungValue young_conjugate(double y, const QBase& base);

/// Coefficient of -log^2|eps| in the flatness bound implied by a null
/// expansion of type a_type: 1 / (2 a_tilde log|q|).
double prop4_convert(double a_type, const QBase& base, double a_tilde);

/// Minimizer of C1 exp(log(H) x + (log|q| A / 2) x^2 + (x + 1) log|eps|).
double prop4_minimizer(double h, double a_type, double abs_eps, const QBase& base);

} // namespace qgevrey
