#pragma once

#include "qgevrey/qgeometry.hpp"

namespace qgevrey {

struct ThetaSettings {
    double tol = 1e-18;     ///< absolute tail bound on the reduced series
    int max_terms = 4000;   ///< per side

    void validate() const;
};

/// Theta(x) = theta_reduced * exp(log_factor), with x = x0 q^m and |x0| in [1, |q|).
struct ThetaParts {
    cplx reduced;
    cplx log_factor;
    long m;
    int terms;
};

ThetaParts theta_parts(cplx x, const QBase& base, const ThetaSettings& settings = {});
/// Same, for an argument known beyond double precision (quadrature nodes).
ThetaParts theta_parts(std::complex<long double> x, const QBase& base,
                       const ThetaSettings& settings = {});

/// Theta(x) = sum_{n in Z} q^{-n(n-1)/2} x^n.
cplx theta(cplx x, const QBase& base, const ThetaSettings& settings = {});

/// log|Theta(x)|, finite where Theta itself would overflow.
double log_abs_theta(cplx x, const QBase& base, const ThetaSettings& settings = {});

/// pi_q = log(q) prod_{n>=0} (1 - q^{-n-1})^{-1}.
cplx pi_q(const QBase& base);

/// |Theta(x)| / exp(xi log^2|x| / (2 log|q|)).
double theta_lower_ratio(cplx x, const QBase& base, double xi, const ThetaSettings& settings = {});

} // namespace qgevrey
