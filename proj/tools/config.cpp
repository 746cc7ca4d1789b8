#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace qgevrey::cli {

using nlohmann::json;

namespace {

/// Object reader that remembers which keys were consumed, so leftovers can be
/// reported as unknown fields.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& at(const std::string& key)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            throw ConfigError(where(key) + ": missing required field");
        return j_.at(key);
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

    void finish() const
    {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw ConfigError(where(item.key()) + ": unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

double as_number(const json& j, const std::string& path)
{
    if (!j.is_number())
        throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

long long as_integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer())
        throw ConfigError(path + ": expected an integer");
    return j.get<long long>();
}

int as_int(const json& j, const std::string& path)
{
    const long long v = as_integer(j, path);
    if (v < -1000000000LL || v > 1000000000LL)
        throw ConfigError(path + ": integer out of range");
    return static_cast<int>(v);
}

cplx as_complex(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(path + ": expected a [re, im] pair");
    return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

Interval as_interval(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(path + ": expected a [lo, hi] pair");
    const Interval iv{as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
    if (!(iv.lo < iv.hi))
        throw ConfigError(path + ": need lo < hi");
    return iv;
}

// optional field helpers
void opt_num(Obj& o, const std::string& key, double& out)
{
    if (o.has(key))
        out = as_number(o.at(key), o.where(key));
}

void opt_int(Obj& o, const std::string& key, int& out)
{
    if (o.has(key))
        out = as_int(o.at(key), o.where(key));
}

void opt_size(Obj& o, const std::string& key, std::size_t& out)
{
    if (o.has(key)) {
        const long long v = as_integer(o.at(key), o.where(key));
        if (v < 0)
            throw ConfigError(o.where(key) + ": must be nonnegative");
        out = static_cast<std::size_t>(v);
    }
}

double req_num(Obj& o, const std::string& key) { return as_number(o.at(key), o.where(key)); }
int req_int(Obj& o, const std::string& key) { return as_int(o.at(key), o.where(key)); }

void require(bool ok, const std::string& msg)
{
    if (!ok)
        throw ConfigError(msg);
}

CauchyProblem parse_problem(const json& j)
{
    Obj o(j, "problem");
    CauchyProblem p;
    p.s_order = req_int(o, "s_order");
    opt_num(o, "r0", p.r0);
    const json& terms = o.at("terms");
    require(terms.is_array(), "problem.terms: expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string path = "problem.terms[" + std::to_string(i) + "]";
        Obj t(terms[i], path);
        EquationTerm et;
        et.k = req_int(t, "k");
        et.m0 = req_int(t, "m0");
        et.m1 = req_int(t, "m1");
        const json& coeffs = t.at("coeffs");
        require(coeffs.is_array(), path + ".coeffs: expected an array");
        for (std::size_t c = 0; c < coeffs.size(); ++c) {
            const std::string cp = path + ".coeffs[" + std::to_string(c) + "]";
            Obj co(coeffs[c], cp);
            CoefficientTerm ct;
            ct.s = req_int(co, "s");
            const json& poly = co.at("poly");
            require(poly.is_array(), cp + ".poly: expected an array of [re, im] pairs");
            for (std::size_t d = 0; d < poly.size(); ++d)
                ct.poly.c.push_back(as_complex(poly[d], cp + ".poly[" + std::to_string(d) + "]"));
            co.finish();
            et.coeffs.push_back(std::move(ct));
        }
        t.finish();
        p.terms.push_back(std::move(et));
    }
    o.finish();
    return p;
}

InitialData parse_initial(const json& j)
{
    require(j.is_array(), "initial: expected one array of terms per j");
    InitialData d;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = "initial[" + std::to_string(i) + "]";
        require(j[i].is_array(), path + ": expected an array of terms");
        std::vector<InitialTerm> w;
        for (std::size_t k = 0; k < j[i].size(); ++k) {
            Obj o(j[i][k], path + "[" + std::to_string(k) + "]");
            InitialTerm t;
            t.c = as_complex(o.at("c"), o.where("c"));
            opt_int(o, "a", t.a);
            opt_int(o, "b", t.b);
            opt_int(o, "r", t.r);
            require(t.a >= 0 && t.b >= 0 && t.r >= 0, o.where("a/b/r") + ": exponents must be natural");
            o.finish();
            w.push_back(t);
        }
        d.w.push_back(std::move(w));
    }
    return d;
}

GevreyParams parse_gevrey(const json& j)
{
    Obj o(j, "gevrey");
    GevreyParams g;
    g.m_big = req_num(o, "m_big");
    g.m_tilde = req_num(o, "m_tilde");
    g.a1_type = req_num(o, "a1_type");
    g.c_geom = req_num(o, "c_geom");
    g.delta_theta = req_num(o, "delta_theta");
    g.xi = req_num(o, "xi");
    g.xi_bar = req_num(o, "xi_bar");
    g.a1 = req_num(o, "a1");
    g.a2 = req_num(o, "a2");
    g.b1 = req_num(o, "b1");
    g.b2 = req_num(o, "b2");
    g.d1 = req_num(o, "d1");
    g.d2 = req_num(o, "d2");
    o.finish();
    return g;
}

std::vector<TZ> parse_grid(const json& j, const std::string& path)
{
    require(j.is_array() && !j.empty(), path + ": expected a nonempty array");
    std::vector<TZ> g;
    for (std::size_t i = 0; i < j.size(); ++i) {
        Obj o(j[i], path + "[" + std::to_string(i) + "]");
        TZ p{as_complex(o.at("t"), o.where("t")), as_complex(o.at("z"), o.where("z"))};
        o.finish();
        g.push_back(p);
    }
    return g;
}

void parse_verify(const json& j, RunConfig& c)
{
    Obj o(j, "verify");
    VerifySpec& v = c.verify;
    if (o.has("charts")) {
        const json& ch = o.at("charts");
        require(ch.is_array() && ch.size() == 2, "verify.charts: expected two chart indices");
        v.charts = {as_int(ch[0], "verify.charts[0]"), as_int(ch[1], "verify.charts[1]")};
    }
    if (o.has("eps0"))
        v.eps0 = as_complex(o.at("eps0"), "verify.eps0");
    if (o.has("grid"))
        v.grid = parse_grid(o.at("grid"), "verify.grid");
    if (o.has("residual")) {
        Obj r(o.at("residual"), "verify.residual");
        opt_int(r, "samples", v.residual.samples);
        if (r.has("bound")) {
            v.residual.bound = req_num(r, "bound");
            c.provenance["verify.residual.bound"] = "config";
        }
        opt_num(r, "z_max", v.residual.z_max);
        r.finish();
    }
    if (o.has("decay")) {
        Obj d(o.at("decay"), "verify.decay");
        opt_int(d, "chart", v.decay.chart);
        if (d.has("eps"))
            v.decay.eps = as_complex(d.at("eps"), "verify.decay.eps");
        if (d.has("t"))
            v.decay.t = as_complex(d.at("t"), "verify.decay.t");
        opt_num(d, "margin", v.decay.margin);
        d.finish();
    }
    if (o.has("flatness")) {
        Obj f(o.at("flatness"), "verify.flatness");
        opt_int(f, "n_points", v.flatness.n_points);
        opt_num(f, "margin", v.flatness.margin);
        f.finish();
    }
    if (o.has("asympt")) {
        Obj a(o.at("asympt"), "verify.asympt");
        opt_int(a, "k_max", v.asympt.k_max);
        if (a.has("tol")) {
            v.asympt.tol = req_num(a, "tol");
            c.provenance["verify.asympt.tol"] = "config";
        }
        opt_int(a, "agreement_k_max", v.asympt.agreement_k_max);
        if (a.has("agreement_tol")) {
            v.asympt.agreement_tol = req_num(a, "agreement_tol");
            c.provenance["verify.asympt.agreement_tol"] = "config";
        }
        opt_int(a, "first", v.asympt.plan.first);
        opt_int(a, "depth", v.asympt.plan.depth);
        opt_int(a, "stride", v.asympt.plan.stride);
        a.finish();
    }
    o.finish();
}

/// Overrides from the environment; only tolerances are overridable.
void apply_env(RunConfig& c)
{
    auto env = [&](const char* name, double& field, const std::string& key) {
        const char* s = std::getenv(name);
        if (!s)
            return;
        char* end = nullptr;
        const double v = std::strtod(s, &end);
        if (end == s || *end != '\0' || !(v > 0.0))
            throw ConfigError(std::string(name) + ": expected a positive number, got '" + s + "'");
        field = v;
        c.provenance[key] = std::string("env:") + name;
    };
    env("QGEVREY_QUAD_ABS_TOL", c.quad.abs_tol, "quad.abs_tol");
    env("QGEVREY_THETA_TOL", c.quad.theta.tol, "theta.tol");
    env("QGEVREY_RESIDUAL_BOUND", c.verify.residual.bound, "verify.residual.bound");
    env("QGEVREY_EXTRACTION_TOL", c.verify.asympt.tol, "verify.asympt.tol");
    env("QGEVREY_AGREEMENT_TOL", c.verify.asympt.agreement_tol, "verify.asympt.agreement_tol");
}

void validate(const RunConfig& c)
{
    const QBase base(c.q);
    c.problem.validate();
    c.gevrey.validate();
    c.quad.validate();
    require(c.initial.w.size() == static_cast<std::size_t>(c.problem.s_order),
            "initial: need exactly S = " + std::to_string(c.problem.s_order) + " entries");
    require(c.cert.c1 > 0.0 && c.cert.mbar > 0.0, "certificate: c1 and mbar must be positive");
    require(c.beta_max >= c.problem.s_order, "solution.beta_max: must be at least S");
    build_covering(c.covering.n_u, c.covering.n_v, c.covering.overlap, c.covering.v_base);
    c.family.t_set.validate();
    require(c.family.v_arg_half_width > 0.0 && c.family.v_arg_half_width < 0.125,
            "family.v_arg_half_width: must lie in (0, 1/8)");

    const int n_charts = c.covering.n_u * c.covering.n_v;
    const VerifySpec& v = c.verify;
    for (int i : v.charts)
        require(i >= 0 && i < n_charts, "verify.charts: index out of range");
    require(v.charts[0] != v.charts[1], "verify.charts: need two distinct charts");
    require(v.decay.chart >= 0 && v.decay.chart < n_charts, "verify.decay.chart: index out of range");
    require(v.eps0 != cplx(0.0), "verify.eps0: must be nonzero");
    require(v.residual.samples > 0 && v.residual.bound > 0.0 && v.residual.z_max >= 0.0,
            "verify.residual: need samples > 0, bound > 0, z_max >= 0");
    require(v.flatness.n_points >= 8, "verify.flatness.n_points: need at least 8");
    require(v.asympt.k_max >= 0 && v.asympt.k_max <= 4, "verify.asympt.k_max: must lie in [0, 4]");
    require(v.asympt.agreement_k_max <= v.asympt.k_max,
            "verify.asympt.agreement_k_max: cannot exceed k_max");
    require(v.asympt.tol > 0.0 && v.asympt.agreement_tol > 0.0, "verify.asympt: tolerances must be positive");
    require(v.asympt.plan.depth >= v.asympt.k_max + 2,
            "verify.asympt.depth: need at least k_max + 2 samples");
}

} // namespace

const std::vector<std::pair<std::string, std::string>>& tolerance_env_vars()
{
    static const std::vector<std::pair<std::string, std::string>> vars{
        {"QGEVREY_QUAD_ABS_TOL", "quad.abs_tol"},
        {"QGEVREY_THETA_TOL", "theta.tol"},
        {"QGEVREY_RESIDUAL_BOUND", "verify.residual.bound"},
        {"QGEVREY_EXTRACTION_TOL", "verify.asympt.tol"},
        {"QGEVREY_AGREEMENT_TOL", "verify.asympt.agreement_tol"},
    };
    return vars;
}

RunConfig parse_config(const json& j)
{
    RunConfig c;
    for (const auto& kv : tolerance_env_vars())
        c.provenance[kv.second] = "default";
    try {
        Obj o(j, "config");
        if (o.has("name")) {
            require(o.at("name").is_string(), "config.name: expected a string");
            c.name = o.at("name").get<std::string>();
        }
        if (o.has("expected")) {
            require(o.at("expected").is_string(), "config.expected: expected a string");
            c.expected = o.at("expected").get<std::string>();
        }
        c.q = as_complex(o.at("q"), "config.q");
        if (o.has("seed")) {
            const long long s = as_integer(o.at("seed"), "config.seed");
            require(s >= 0, "config.seed: must be nonnegative");
            c.seed = static_cast<std::uint64_t>(s);
        }
        c.problem = parse_problem(o.at("problem"));
        c.initial = parse_initial(o.at("initial"));
        c.gevrey = parse_gevrey(o.at("gevrey"));

        {
            Obj cv(o.at("covering"), "covering");
            c.covering.n_u = req_int(cv, "n_u");
            c.covering.n_v = req_int(cv, "n_v");
            c.covering.overlap = req_num(cv, "overlap");
            opt_num(cv, "v_base", c.covering.v_base);
            opt_size(cv, "samples", c.covering_samples);
            cv.finish();
        }
        {
            Obj f(o.at("family"), "family");
            c.family.t_set.modulus = as_interval(f.at("t_modulus"), "family.t_modulus");
            c.family.t_set.arg = as_interval(f.at("t_arg"), "family.t_arg");
            c.family.v_modulus = as_interval(f.at("v_modulus"), "family.v_modulus");
            opt_num(f, "v_arg_half_width", c.family.v_arg_half_width);
            opt_num(f, "lambda_offset", c.family.lambda_offset);
            c.family.rho0 = req_num(f, "rho0");
            c.family.delta = req_num(f, "delta");
            opt_size(f, "samples", c.family_samples);
            f.finish();
        }
        if (o.has("admissibility")) {
            Obj a(o.at("admissibility"), "admissibility");
            AdmissibilityGrid g;
            g.eps_modulus = as_interval(a.at("eps_modulus"), "admissibility.eps_modulus");
            g.eps_arg = as_interval(a.at("eps_arg"), "admissibility.eps_arg");
            g.tau_modulus = as_interval(a.at("tau_modulus"), "admissibility.tau_modulus");
            g.tau_arg = as_interval(a.at("tau_arg"), "admissibility.tau_arg");
            opt_int(a, "n_eps_modulus", g.n_eps_modulus);
            opt_int(a, "n_eps_arg", g.n_eps_arg);
            opt_int(a, "n_tau_modulus", g.n_tau_modulus);
            opt_int(a, "n_tau_arg", g.n_tau_arg);
            require(g.n_eps_modulus >= 2 && g.n_eps_arg >= 2 && g.n_tau_modulus >= 2 && g.n_tau_arg >= 2,
                    "admissibility: node counts must be at least 2");
            a.finish();
            c.admissibility = g;
        }
        bool quad_delta_set = false;
        if (o.has("quad")) {
            Obj q(o.at("quad"), "quad");
            if (q.has("abs_tol")) {
                c.quad.abs_tol = req_num(q, "abs_tol");
                c.provenance["quad.abs_tol"] = "config";
            }
            opt_num(q, "initial_step", c.quad.initial_step);
            opt_int(q, "max_halvings", c.quad.max_halvings);
            opt_num(q, "s_pad", c.quad.s_pad);
            opt_num(q, "delta", c.quad.delta);
            quad_delta_set = q.has("delta");
            opt_num(q, "xi", c.quad.xi);
            q.finish();
        }
        // the Theta-safe margin defaults to the family's delta
        if (!quad_delta_set)
            c.quad.delta = c.family.delta;
        if (o.has("theta")) {
            Obj t(o.at("theta"), "theta");
            if (t.has("tol")) {
                c.quad.theta.tol = req_num(t, "tol");
                c.provenance["theta.tol"] = "config";
            }
            opt_int(t, "max_terms", c.quad.theta.max_terms);
            t.finish();
        }
        {
            Obj ce(o.at("certificate"), "certificate");
            c.cert.c1 = req_num(ce, "c1");
            c.cert.mbar = req_num(ce, "mbar");
            ce.finish();
        }
        if (o.has("solution")) {
            Obj s(o.at("solution"), "solution");
            opt_int(s, "beta_max", c.beta_max);
            s.finish();
        }
        if (o.has("verify"))
            parse_verify(o.at("verify"), c);
        o.finish();

        apply_env(c);
        validate(c);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        // invariant violations raised by the library constructors and validators
        throw ConfigError(e.what());
    }
    return c;
}

RunConfig load_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

} // namespace qgevrey::cli
