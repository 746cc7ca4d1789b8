#pragma once

#include <cstdint>
#include <vector>

#include "qgevrey/qgeometry.hpp"

namespace qgevrey {

struct GoodCovering {
    std::vector<ChartBase> charts;
};

/// n_u x n_v charts. u-intervals have length (1 + overlap)/n_u and tile the
/// circle; v-intervals tile one period starting at v_base, staggered per column
/// so that no point lies in four chart spirals.
GoodCovering build_covering(int n_u, int n_v, double overlap, double v_base = -1.0);

struct CoveringReport {
    std::size_t samples = 0;
    std::size_t uncovered = 0;
    std::size_t quadruple = 0;   ///< samples in four or more chart spirals
    int max_multiplicity = 0;
    std::vector<std::size_t> counts;  ///< per chart
    double v_min = 0.0, v_max = 0.0;  ///< tested band in the v coordinate

    bool covered() const noexcept { return uncovered == 0; }
    bool four_disjoint() const noexcept { return quadruple == 0; }
    bool ok() const noexcept { return covered() && four_disjoint(); }
};

/// Random samples of the annulus below every chart (three v-periods), plus
/// deterministic samples on every chart edge.
CoveringReport validate_covering(const GoodCovering& c, const QBase& base, std::size_t n_samples,
                                 std::uint64_t seed = 1);

struct AssociatedFamily {
    std::vector<ContinuousBase> v_sets;
    ContinuousBase t_set;
    double rho0 = 2.0;
    double delta = 0.1;
};

struct FamilyReport {
    bool item1 = true;  ///< V_I meets D(0, rho0)
    bool item2 = true;  ///< |tau + 1| > delta on V_I q^R
    bool item3 = true;  ///< |1 + lambda_v / (eps_u t q^r)| > delta
    bool item4 = true;  ///< |t| <= 1 on T
    double min_item2 = 0.0;  ///< smallest sampled distance
    double min_item3 = 0.0;
    std::vector<std::size_t> failing_charts;

    bool ok() const noexcept { return item1 && item2 && item3 && item4; }
};

FamilyReport validate_family(const AssociatedFamily& f, const GoodCovering& c, const QBase& base,
                             const std::vector<cplx>& lambda, std::size_t n_samples,
                             std::uint64_t seed = 1);

/// Midpoint of the modulus range (max(lo, 1), min(hi, rho0)) at the middle argument.
cplx pick_lambda(const ContinuousBase& v, double rho0);

struct FamilySpec {
    ContinuousBase t_set;
    Interval v_modulus;
    double v_arg_half_width = 0.02;
    double lambda_offset = 0.1;  ///< turns between a chart's typical eps t direction and lambda_I
    double rho0 = 2.0;
    double delta = 0.1;
};

struct BuiltFamily {
    AssociatedFamily family;
    std::vector<cplx> lambda;
};

/// One V_I per chart, centered lambda_offset turns away from the chart's
/// typical eps t direction, on whichever side keeps V_I q^R farther from -1.
BuiltFamily build_family(const GoodCovering& c, const FamilySpec& spec, const QBase& base);

} // namespace qgevrey
