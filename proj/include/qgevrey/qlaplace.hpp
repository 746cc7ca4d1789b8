#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "qgevrey/theta.hpp"

namespace qgevrey {

struct QuadSettings {
    double abs_tol = 1e-8;
    double initial_step = 0.5;  ///< step in the path parameter s
    int max_halvings = 12;
    double s_pad = 2.0;         ///< added on both sides of the certified window
    double delta = 0.1;         ///< Theta-safe margin checked before integrating
    /// Majorant exponent; NaN selects the midpoint of (2 mbar log|q|, 1).
    double xi = std::numeric_limits<double>::quiet_NaN();
    ThetaSettings theta{};

    void validate() const;
};

/// ||F(x)|| <= c1 exp(mbar log^2|x|) on the integration path.
struct GrowthCertificate {
    double c1 = 1.0;
    double mbar = 0.1;

    void validate(const QBase& base) const;
};

struct Window {
    double s_lo;
    double s_hi;
};

/// Window outside which the integrand majorant integrates to less than tol.
Window truncation_window(const GrowthCertificate& cert, cplx lambda, cplx z, const QBase& base,
                         double xi, double tol);

/// Minimum over the path s -> q^s lambda / z of theta_lower_ratio (the C_xi of the path).
double path_theta_constant(cplx lambda, cplx z, const QBase& base, double xi,
                           const ThetaSettings& settings = {});

using ScalarIntegrand = std::function<cplx(cplx)>;
/// Fills out[i] = F_i(tau) for a batch of integrands sharing one path.
using BatchIntegrand = std::function<void(cplx, std::span<cplx>)>;

struct QuadDiagnostics {
    Window window{};       ///< padded window actually integrated
    int halvings = 0;
    double step = 0.0;
    double last_change = 0.0;
    std::size_t evaluations = 0;
};

struct BatchResult {
    std::vector<cplx> values;
    QuadDiagnostics diag;
};

struct SplitValue {
    cplx plus;   ///< s in [0, s_hi]
    cplx minus;  ///< s in [s_lo, 0]
};

cplx q_laplace(const ScalarIntegrand& f, cplx lambda, cplx z, const QBase& base,
               const GrowthCertificate& cert, const QuadSettings& settings);

SplitValue q_laplace_split(const ScalarIntegrand& f, cplx lambda, cplx z, const QBase& base,
                           const GrowthCertificate& cert, const QuadSettings& settings);

/// Transforms of dim integrands along one path; convergence is judged on the
/// largest componentwise change.
BatchResult q_laplace_batch(const BatchIntegrand& f, std::size_t dim, cplx lambda, cplx z,
                            const QBase& base, const GrowthCertificate& cert,
                            const QuadSettings& settings);

} // namespace qgevrey
