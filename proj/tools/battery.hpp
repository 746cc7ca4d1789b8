#pragma once

#include <cstdint>
#include <vector>

#include "report.hpp"

namespace qgevrey::cli {

// Property checks with their own brute-force oracles. Each result carries
// the worst observed error and the threshold it was held to.

/// Theta(qx) = qx Theta(x) on 1000 random x, three q.
CheckResult prop_theta_functional(std::uint64_t seed);
/// Reduced Theta against 200-term direct summation on the fundamental annulus.
CheckResult prop_theta_reduction(std::uint64_t seed);
/// q_laplace(tau phi)(t) = t q_laplace(phi)(q t) on five test functions.
CheckResult prop_commutation(std::uint64_t seed);
/// S = 1 recursion against its unrolled closed form, h <= 30, 100 points.
CheckResult prop_recursion_closed_form(std::uint64_t seed);
/// Shift-operator inequality on 20-term truncations, 20 parameter tuples.
CheckResult prop_shift_inequality(std::uint64_t seed);
/// Young conjugate and the flatness/null-expansion minimizer against numeric optimization.
CheckResult prop_closed_forms(std::uint64_t seed);
/// build_covering(5, 5, 0.1) on 10^4 samples.
CheckResult prop_covering(std::uint64_t seed);
/// Assumption checkers against direct inequality evaluation, 100 tuples.
CheckResult prop_assumption_agreement(std::uint64_t seed);

std::vector<CheckResult> run_battery(std::uint64_t seed);

} // namespace qgevrey::cli
