#include "qgevrey/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace qgevrey {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double mid(const Interval& iv) { return 0.5 * (iv.lo + iv.hi); }

double frac(double x) { return x - std::floor(x); }

/// Distance in turns from a to b on the circle.
double turn_dist(double a, double b)
{
    const double d = frac(a - b);
    return std::min(d, 1.0 - d);
}

} // namespace

GoodCovering build_covering(int n_u, int n_v, double overlap, double v_base)
{
    if (n_u < 5 || n_v < 5)
        throw ParameterError("build_covering: need n_u >= 5 and n_v >= 5 (intervals shorter than 1/4 cannot cover a period otherwise)");
    if (!(overlap >= 0.0 && overlap < 0.5))
        throw ParameterError("build_covering: overlap must lie in [0, 0.5)");
    if ((1.0 + overlap) / n_u >= 0.25 || (1.0 + overlap) / n_v >= 0.25)
        throw ParameterError("build_covering: interval length (1 + overlap)/n reaches 1/4");

    const int k = n_u / 2;
    const double du = 1.0 / n_u, dv = 1.0 / n_v;
    GoodCovering c;
    c.charts.reserve(static_cast<std::size_t>(n_u * n_v));
    for (int i = 0; i < n_u; ++i) {
        const double offset = static_cast<double>((i * k) % n_u) / (n_u * n_v);
        const Interval iu{i * du - 0.5 * overlap * du, (i + 1) * du + 0.5 * overlap * du};
        for (int j = 0; j < n_v; ++j) {
            const double lo = v_base + offset + j * dv;
            c.charts.push_back({iu, {lo - 0.5 * overlap * dv, lo + dv + 0.5 * overlap * dv}});
        }
    }
    return c;
}

CoveringReport validate_covering(const GoodCovering& c, const QBase& base, std::size_t n_samples,
                                 std::uint64_t seed)
{
    (void)base;  // membership is decided in chart coordinates, which absorb q
    CoveringReport r;
    r.counts.assign(c.charts.size(), 0);
    if (c.charts.empty())
        return r;
    for (const auto& ch : c.charts)
        ch.validate();

    r.v_max = std::numeric_limits<double>::infinity();
    for (const auto& ch : c.charts)
        r.v_max = std::min(r.v_max, ch.i2.lo);
    r.v_min = r.v_max - 3.0;

    auto probe = [&](double u, double v) {
        int hits = 0;
        const ChartCoords cc{frac(u), v};
        for (std::size_t i = 0; i < c.charts.size(); ++i)
            if (in_discrete_spiral_coords(cc, c.charts[i])) {
                ++hits;
                ++r.counts[i];
            }
        ++r.samples;
        if (hits == 0)
            ++r.uncovered;
        if (hits >= 4)
            ++r.quadruple;
        r.max_multiplicity = std::max(r.max_multiplicity, hits);
    };
    // bring v below the band top by whole periods, which does not change membership
    auto drop = [&](double v) { return v - std::ceil(v - r.v_max) - 1.0; };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uu(0.0, 1.0), vv(r.v_min, r.v_max);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double u = uu(rng);
        probe(u, vv(rng));
    }
    for (const auto& ch : c.charts) {
        probe(ch.i1.lo, drop(mid(ch.i2)));
        probe(ch.i1.hi, drop(mid(ch.i2)));
        probe(mid(ch.i1), drop(ch.i2.lo));
        probe(mid(ch.i1), drop(ch.i2.hi));
    }
    return r;
}

cplx pick_lambda(const ContinuousBase& v, double rho0)
{
    const double lo = std::max(v.modulus.lo, 1.0);
    const double hi = std::min(v.modulus.hi, rho0);
    if (!(lo < hi))
        throw ParameterError("pick_lambda: V meets no modulus in (1, rho0)");
    return std::polar(0.5 * (lo + hi), two_pi * mid(v.arg));
}

FamilyReport validate_family(const AssociatedFamily& f, const GoodCovering& c, const QBase& base,
                             const std::vector<cplx>& lambda, std::size_t n_samples,
                             std::uint64_t seed)
{
    if (f.v_sets.size() != c.charts.size() || lambda.size() != c.charts.size())
        throw ParameterError("validate_family: need one V_I and one lambda_I per chart");
    if (!(f.rho0 > 1.0))
        throw ParameterError("validate_family: rho0 must exceed 1");
    if (!(f.delta > 0.0 && f.delta < 1.0))
        throw ParameterError("validate_family: delta must lie in (0, 1)");
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (!f.v_sets[i].contains(lambda[i]) || !(std::abs(lambda[i]) < f.rho0))
            throw ParameterError("validate_family: lambda_" + std::to_string(i) +
                                 " is not in V_I and D(0, rho0)");

    FamilyReport r;
    r.min_item2 = r.min_item3 = std::numeric_limits<double>::infinity();
    r.item4 = f.t_set.modulus.hi <= 1.0;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto in = [&](const Interval& iv, double x) { return iv.lo + x * iv.length(); };
    // corners of each box are always included; the rest is random
    auto corner = [](std::size_t s, int bit) { return ((s >> bit) & 1u) ? 0.999 : 0.001; };

    for (std::size_t i = 0; i < c.charts.size(); ++i) {
        const auto& vs = f.v_sets[i];
        const auto& ch = c.charts[i];
        bool bad = false;
        if (!(vs.modulus.lo < f.rho0)) {
            r.item1 = false;
            bad = true;
        }
        const Interval vmod{vs.modulus.lo, std::min(vs.modulus.hi, f.rho0)};

        for (std::size_t s = 0; s < n_samples; ++s) {
            const bool edge = s < 4;
            const cplx v = std::polar(in(vs.modulus, edge ? corner(s, 0) : unit(rng)),
                                      two_pi * in(vs.arg, edge ? corner(s, 1) : unit(rng)));
            const double d = theta_safe_distance(1.0, v, base, f.delta);
            r.min_item2 = std::min(r.min_item2, d);
            if (!(d > f.delta)) {
                r.item2 = false;
                bad = true;
            }
        }
        for (std::size_t s = 0; s < n_samples; ++s) {
            const bool edge = s < 64;
            auto pick = [&](int bit) { return edge ? corner(s, bit) : unit(rng); };
            const double u = in(ch.i1, pick(0));
            const double vv = in(ch.i2, pick(1));
            const cplx eps = std::polar(1.0, two_pi * u) * qpow(base, vv);
            const cplx t = std::polar(in(f.t_set.modulus, pick(2)), two_pi * in(f.t_set.arg, pick(3)));
            const cplx lv = std::polar(in(vmod, pick(4)), two_pi * in(vs.arg, pick(5)));
            const double d = theta_safe_distance(eps * t, lv, base, f.delta);
            r.min_item3 = std::min(r.min_item3, d);
            if (!(d > f.delta)) {
                r.item3 = false;
                bad = true;
            }
        }
        if (bad)
            r.failing_charts.push_back(i);
    }
    return r;
}

BuiltFamily build_family(const GoodCovering& c, const FamilySpec& spec, const QBase& base)
{
    spec.t_set.validate();
    BuiltFamily out;
    out.family.t_set = spec.t_set;
    out.family.rho0 = spec.rho0;
    out.family.delta = spec.delta;
    const double t_arg = mid(spec.t_set.arg);
    for (const auto& ch : c.charts) {
        const double typical = mid(ch.i1) + mid(ch.i2) * base.turn_rate() + t_arg;
        const double a = typical + spec.lambda_offset, b = typical - spec.lambda_offset;
        // ties go to the counterclockwise side
        const double dir = frac(turn_dist(a, 0.5) > turn_dist(b, 0.5) - 1e-9 ? a : b);
        ContinuousBase v{spec.v_modulus, {dir - spec.v_arg_half_width, dir + spec.v_arg_half_width}};
        v.validate();
        out.lambda.push_back(pick_lambda(v, spec.rho0));
        out.family.v_sets.push_back(v);
    }
    return out;
}

} // namespace qgevrey
