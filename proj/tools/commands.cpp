#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "battery.hpp"
#include "demo_config.hpp"

namespace qgevrey::cli {

namespace fs = std::filesystem;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

/// Runs fn(i) for i in [0, n) on a small pool. Results must be written by index
/// so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

CheckResult make(std::string name, bool ok, std::string message = {})
{
    CheckResult c;
    c.name = std::move(name);
    c.status = ok ? Status::pass : Status::fail;
    c.message = std::move(message);
    return c;
}

/// eps0 q^{-n} lies in both chart spirals for every n in [first, last).
bool ray_in_charts(const Setup& s, int a, int b, int first, int last)
{
    for (int n = first; n < last; ++n) {
        const cplx e = s.cfg.verify.eps0 * qpow(s.base, -static_cast<double>(n));
        if (!in_discrete_spiral(e, s.covering.charts[static_cast<std::size_t>(a)], s.base) ||
            !in_discrete_spiral(e, s.covering.charts[static_cast<std::size_t>(b)], s.base))
            return false;
    }
    return true;
}

/// Fills the transform caches of both charts for the given eps sequence in parallel.
void prewarm(std::vector<SolutionChart*> charts, const std::vector<cplx>& eps,
             const std::vector<TZ>& grid)
{
    parallel_for(charts.size(), [&](std::size_t i) {
        for (cplx e : eps)
            for (const auto& p : grid)
                charts[i]->transforms(e, p.t);
    });
}

} // namespace

Setup::Setup(RunConfig c)
    : cfg(std::move(c)), base(cfg.q),
      covering(build_covering(cfg.covering.n_u, cfg.covering.n_v, cfg.covering.overlap,
                              cfg.covering.v_base))
{
    try {
        family = build_family(covering, cfg.family, base);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("family: ") + e.what());
    }
}

SolutionChart Setup::chart(std::size_t i) const
{
    SolutionChart sc(i, family.lambda.at(i), CoefficientEvaluator(cfg.problem, cfg.initial, base),
                     cfg.quad, cfg.cert, cfg.beta_max);
    sc.chart = covering.charts.at(i);
    sc.t_set = cfg.family.t_set;
    return sc;
}

Report cmd_check(const Setup& s)
{
    const RunConfig& c = s.cfg;
    Report r;
    r.command = "check";

    {
        const AssumptionAReport a = check_assumption_a(c.problem, c.gevrey);
        CheckResult cr = make("assumption_a", a.ok);
        ojson entries = ojson::array();
        for (const auto& e : a.entries) {
            entries.push_back({{"k", e.k}, {"s", e.s}, {"m0_ok", e.m0_ok}, {"m0_slack", e.m0_slack},
                               {"m1_ok", e.m1_ok}, {"m1_slack", e.m1_slack}});
            if (!e.m0_ok || !e.m1_ok)
                cr.message += "(k=" + std::to_string(e.k) + ", s=" + std::to_string(e.s) + ") ";
        }
        if (!cr.message.empty())
            cr.message = "violated at " + cr.message.substr(0, cr.message.size() - 1);
        cr.data["entries"] = entries;
        r.add(cr);
    }
    {
        const AssumptionBReport b = check_assumption_b(c.gevrey, s.base);
        CheckResult cr = make("assumption_b", b.ok, b.ok ? "" : "M exceeds 1/(2 log|q|)");
        cr.data["slack"] = b.slack;
        r.add(cr);
    }
    const AssumptionCReport ac = check_assumption_c(c.gevrey, s.base);
    {
        CheckResult cr = make("assumption_c", ac.ok());
        cr.data = {{"c1_ok", ac.c1_ok}, {"c1_slack", ac.c1_slack}, {"c2_ok", ac.c2_ok},
                   {"c2_slack", ac.c2_slack}, {"c3_ok", ac.c3_ok}, {"c3_slack", ac.c3_slack},
                   {"c4_ok", ac.c4_ok}, {"c4_slack", ac.c4_slack}};
        r.add(cr);
    }
    {
        CheckResult cr = make("flatness_exponent", ac.inv_a_positive,
                              ac.inv_a_positive ? "" : "1/A = (1 - xi_bar)(xi/(2 log|q|) - M) is not positive");
        cr.data["inv_a"] = ac.inv_a;
        r.add(cr);
    }
    {
        bool ok = true;
        std::string msg;
        try {
            c.cert.validate(s.base);
        } catch (const std::exception& e) {
            ok = false;
            msg = e.what();
        }
        CheckResult cr = make("growth_certificate", ok, msg);
        cr.data = {{"c1", c.cert.c1}, {"mbar", c.cert.mbar}, {"limit", 1.0 / (2.0 * s.base.log_abs())}};
        r.add(cr);
    }
    {
        const CoveringReport cv = validate_covering(s.covering, s.base, c.covering_samples, c.seed);
        CheckResult cr = make("covering", cv.ok());
        cr.data = {{"charts", s.covering.charts.size()}, {"samples", cv.samples},
                   {"uncovered", cv.uncovered}, {"quadruple", cv.quadruple},
                   {"max_multiplicity", cv.max_multiplicity}, {"v_band", {cv.v_min, cv.v_max}}};
        r.add(cr);
    }
    {
        const FamilyReport f =
            validate_family(s.family.family, s.covering, s.base, s.family.lambda, c.family_samples, c.seed);
        CheckResult cr = make("family", f.ok());
        cr.data = {{"item1", f.item1}, {"item2", f.item2}, {"item3", f.item3}, {"item4", f.item4},
                   {"min_item2", f.min_item2}, {"min_item3", f.min_item3},
                   {"delta", s.family.family.delta}, {"failing_charts", f.failing_charts}};
        ojson lambdas = ojson::array();
        for (cplx l : s.family.lambda)
            lambdas.push_back(complex_json(l));
        cr.data["lambda"] = lambdas;
        r.add(cr);
    }
    if (c.admissibility) {
        for (std::size_t j = 0; j < c.initial.w.size(); ++j) {
            const AdmissibilityFit a = admissibility_fit(c.initial.w[j], *c.admissibility, c.gevrey);
            CheckResult cr = make("admissibility_w" + std::to_string(j), a.pass);
            cr.data = {{"delta", a.delta}, {"delta_refined", a.delta_refined},
                       {"m_tilde_used", a.m_tilde_used}};
            r.add(cr);
        }
    } else {
        CheckResult cr;
        cr.name = "admissibility";
        cr.status = Status::info;
        cr.message = "no admissibility grid configured; skipped";
        r.add(cr);
    }
    {
        const auto& v = c.verify;
        const int last = std::max(v.flatness.n_points,
                                  v.asympt.plan.first + v.asympt.plan.stride * v.asympt.plan.depth);
        const bool ok = ray_in_charts(s, v.charts[0], v.charts[1], 0, last);
        CheckResult cr = make("verify_ray", ok,
                              ok ? "" : "eps0 q^{-n} leaves one of the verify charts");
        cr.data = {{"charts", v.charts}, {"eps0", complex_json(v.eps0)}, {"n_max", last - 1}};
        r.add(cr);
    }
    return r;
}

Report cmd_solve(const Setup& s, const SolvePoint& p)
{
    Report r;
    r.command = "solve";
    if (p.chart < 0 || static_cast<std::size_t>(p.chart) >= s.covering.charts.size())
        throw ConfigError("solve: chart index out of range");
    SolutionChart sc = s.chart(static_cast<std::size_t>(p.chart));
    CheckResult cr;
    cr.name = "solve";
    try {
        const EvalResult e = evaluate_x(sc, p.eps, p.t, p.z);
        cr.status = e.warning ? Status::warn : Status::pass;
        cr.message = e.message;
        cr.data = {{"chart", p.chart},
                   {"lambda", complex_json(sc.lambda)},
                   {"eps", complex_json(p.eps)},
                   {"t", complex_json(p.t)},
                   {"z", complex_json(p.z)},
                   {"value", complex_json(e.value)},
                   {"tail", e.tail},
                   {"phi_0", complex_json(phi_ij(sc, 0, p.eps, p.t))},
                   {"quad", {{"window", {e.diag.window.s_lo, e.diag.window.s_hi}},
                             {"halvings", e.diag.halvings},
                             {"step", e.diag.step},
                             {"last_change", e.diag.last_change},
                             {"evaluations", e.diag.evaluations}}}};
    } catch (const DomainError& e) {
        cr.status = Status::fail;
        cr.message = std::string("domain: ") + e.what();
    }
    r.add(cr);
    return r;
}

Report verify_residual(const Setup& s, const fs::path& out_dir)
{
    const RunConfig& c = s.cfg;
    Report r;
    r.command = "verify residual";

    struct Sample {
        std::size_t chart;
        cplx eps, t, z;
        double res = 0.0;
        bool shifted_outside = false;
    };
    std::vector<Sample> samples;
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    const auto& T = c.family.t_set;
    for (int i = 0; i < c.verify.residual.samples; ++i) {
        Sample sm;
        sm.chart = static_cast<std::size_t>(rng() % s.covering.charts.size());
        const ChartBase& ch = s.covering.charts[sm.chart];
        const double uu = ch.i1.lo + u(rng) * ch.i1.length();
        const double vv = ch.i2.lo + u(rng) * ch.i2.length() - static_cast<double>(rng() % 3);
        sm.eps = std::polar(1.0, two_pi * uu) * qpow(s.base, vv);
        sm.t = std::polar(T.modulus.lo + u(rng) * T.modulus.length(), two_pi * (T.arg.lo + u(rng) * T.arg.length()));
        sm.z = std::polar(c.verify.residual.z_max * std::sqrt(u(rng)), two_pi * u(rng));
        samples.push_back(sm);
    }
    parallel_for(samples.size(), [&](std::size_t i) {
        Sample& sm = samples[i];
        SolutionChart sc = s.chart(sm.chart);
        sm.res = std::abs(residual(sc, sm.eps, sm.t, sm.z));
        for (const auto& term : c.problem.terms)
            if (!T.contains(std::exp(static_cast<double>(term.m0) * s.base.log_q()) * sm.t))
                sm.shifted_outside = true;
    });

    CsvTable table({"chart", "eps_re", "eps_im", "t_re", "t_im", "z_re", "z_im", "abs_residual",
                    "shifted_t_outside_T"});
    double worst = 0.0;
    int outside = 0;
    for (const auto& sm : samples) {
        table.row({static_cast<long long>(sm.chart), sm.eps.real(), sm.eps.imag(), sm.t.real(),
                   sm.t.imag(), sm.z.real(), sm.z.imag(), sm.res, static_cast<long long>(sm.shifted_outside)});
        worst = std::max(worst, sm.res);
        outside += sm.shifted_outside;
    }
    table.write(out_dir / "residual.csv");
    r.datasets.push_back("residual.csv");

    CheckResult cr = make("residual", worst <= c.verify.residual.bound);
    cr.data = {{"samples", samples.size()}, {"max_abs_residual", worst},
               {"bound", c.verify.residual.bound}, {"beta_max", c.beta_max},
               {"z_max", c.verify.residual.z_max}, {"shifted_t_outside_T", outside}};
    if (outside > 0)
        cr.message = std::to_string(outside) + " samples evaluated with q^m0 t outside T";
    r.add(cr);

    // coefficient decay at one point
    const auto& d = c.verify.decay;
    SolutionChart sc = s.chart(static_cast<std::size_t>(d.chart));
    const DecayFit fit = coefficient_decay(sc, d.eps, d.t);
    const double threshold = -c.gevrey.a1_type * s.base.log_abs() * (1.0 - d.margin);
    CsvTable dt({"beta", "abs_transform", "log_abs_transform"});
    const TransformSet& ts = sc.transforms(d.eps, d.t);
    for (std::size_t b = 0; b < ts.values.size(); ++b) {
        const double a = std::abs(ts.values[b]);
        dt.row({static_cast<long long>(b), a, std::log(a)});
    }
    dt.write(out_dir / "decay.csv");
    r.datasets.push_back("decay.csv");
    CheckResult dc = make("coefficient_decay", fit.slope <= threshold);
    dc.data = {{"chart", d.chart}, {"eps", complex_json(d.eps)}, {"t", complex_json(d.t)},
               {"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2},
               {"threshold", threshold}};
    r.add(dc);
    return r;
}

Report verify_flatness(const Setup& s, const fs::path& out_dir)
{
    const RunConfig& c = s.cfg;
    Report r;
    r.command = "verify flatness";
    const auto& v = c.verify;
    const AssumptionCReport ac = check_assumption_c(c.gevrey, s.base);
    if (!ac.inv_a_positive) {
        CheckResult cr = make("flatness", false,
                              "refused: Assumption C regime violated, 1/A = (1 - xi_bar)(xi/(2 log|q|) - M) <= 0");
        cr.data["inv_a"] = ac.inv_a;
        r.add(cr);
        return r;
    }
    SolutionChart a = s.chart(static_cast<std::size_t>(v.charts[0]));
    SolutionChart b = s.chart(static_cast<std::size_t>(v.charts[1]));
    std::vector<cplx> eps;
    for (int n = 0; n < v.flatness.n_points; ++n)
        eps.push_back(v.eps0 * qpow(s.base, -static_cast<double>(n)));
    prewarm({&a, &b}, eps, v.grid);

    CheckResult cr;
    cr.name = "flatness";
    try {
        const FlatnessFit f = flatness_fit(a, b, v.eps0, v.flatness.n_points, v.grid, c.gevrey, s.base);
        CsvTable t({"n", "abs_eps", "log2_abs_eps", "sup_diff", "used"});
        for (const auto& row : f.rows)
            t.row({static_cast<long long>(row.n), row.abs_eps, row.log2_eps, row.d,
                   static_cast<long long>(row.used)});
        t.write(out_dir / "flatness.csv");
        r.datasets.push_back("flatness.csv");
        const double threshold = (1.0 - v.flatness.margin) * f.predicted;
        cr.status = f.slope <= threshold ? Status::pass : Status::fail;
        cr.data = {{"charts", v.charts}, {"slope", f.slope}, {"intercept", f.intercept},
                   {"r2", f.r2}, {"predicted", f.predicted}, {"threshold", threshold}};
    } catch (const FitError& e) {
        cr.status = Status::fail;
        cr.message = e.what();
    }
    r.add(cr);
    return r;
}

Report verify_asympt(const Setup& s, const fs::path& out_dir)
{
    const RunConfig& c = s.cfg;
    Report r;
    r.command = "verify asympt";
    const auto& v = c.verify;
    const auto& as = v.asympt;
    SolutionChart a = s.chart(static_cast<std::size_t>(v.charts[0]));
    SolutionChart b = s.chart(static_cast<std::size_t>(v.charts[1]));
    std::vector<cplx> eps;
    for (int i = 0; i < as.plan.depth; ++i)
        eps.push_back(v.eps0 * qpow(s.base, -static_cast<double>(as.plan.stride) * (as.plan.first + i)));
    prewarm({&a, &b}, eps, v.grid);

    const AsymptoticSeries sa = extract_coefficients(a, v.eps0, as.k_max, as.tol, v.grid, as.plan);
    const AsymptoticSeries sb = extract_coefficients(b, v.eps0, as.k_max, as.tol, v.grid, as.plan);

    CsvTable t({"k", "grid", "t_re", "t_im", "z_re", "z_im", "chart_a_re", "chart_a_im",
                "chart_b_re", "chart_b_im"});
    const std::size_t common = std::min(sa.coeffs.size(), sb.coeffs.size());
    for (std::size_t k = 0; k < common; ++k)
        for (std::size_t g = 0; g < v.grid.size(); ++g)
            t.row({static_cast<long long>(k), static_cast<long long>(g), v.grid[g].t.real(),
                   v.grid[g].t.imag(), v.grid[g].z.real(), v.grid[g].z.imag(), sa.coeffs[k][g].real(),
                   sa.coeffs[k][g].imag(), sb.coeffs[k][g].real(), sb.coeffs[k][g].imag()});
    t.write(out_dir / "asympt.csv");
    r.datasets.push_back("asympt.csv");

    CsvTable agree({"k", "stab_a", "stab_b", "rel_diff", "tol", "pass"});
    bool all_ok = true;
    ojson per_k = ojson::array();
    for (int k = 0; k <= as.agreement_k_max; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        double rel = std::numeric_limits<double>::infinity();
        if (ku < common) {
            double diff = 0.0, scale = 0.0;
            for (std::size_t g = 0; g < v.grid.size(); ++g) {
                diff = std::max(diff, std::abs(sa.coeffs[ku][g] - sb.coeffs[ku][g]));
                scale = std::max(scale, std::abs(sa.coeffs[ku][g]));
            }
            rel = scale > 0.0 ? diff / scale : diff;
        }
        const bool ok = rel <= as.agreement_tol;
        all_ok = all_ok && ok;
        const double stab_a = ku < sa.stab.size() ? sa.stab[ku] : std::nan("");
        const double stab_b = ku < sb.stab.size() ? sb.stab[ku] : std::nan("");
        agree.row({static_cast<long long>(k), stab_a, stab_b, rel, as.agreement_tol, static_cast<long long>(ok)});
        per_k.push_back({{"k", k}, {"rel_diff", rel}, {"stab_a", stab_a}, {"stab_b", stab_b}});
    }
    agree.write(out_dir / "asympt_agreement.csv");
    r.datasets.push_back("asympt_agreement.csv");

    CheckResult cr = make("asympt_agreement", all_ok);
    cr.data = {{"charts", v.charts},
               {"plan", {{"first", as.plan.first}, {"depth", as.plan.depth}, {"stride", as.plan.stride}}},
               {"tol", as.agreement_tol},
               {"failed_k", {sa.failed_k, sb.failed_k}},
               {"per_k", per_k}};
    r.add(cr);

    const std::pair<const char*, const AsymptoticSeries*> fits[] = {{"gevrey_fit_a", &sa}, {"gevrey_fit_b", &sb}};
    for (const auto& [name, series] : fits) {
        CheckResult gc;
        gc.name = name;
        try {
            const GevreyFit g = gevrey_fit(*series, s.base);
            gc.status = std::isfinite(g.b_type) && g.b_type > 0.0 ? Status::info : Status::warn;
            gc.data = {{"c1", g.c1}, {"h", g.h}, {"b_type", g.b_type}, {"r2", g.r2},
                       {"degenerate", g.degenerate}};
        } catch (const FitError& e) {
            gc.status = Status::warn;
            gc.message = e.what();
        }
        r.add(gc);
    }
    return r;
}

Report verify_properties(const Setup& s, const fs::path& out_dir)
{
    Report r;
    r.command = "verify properties";
    CsvTable t({"check", "status", "worst", "threshold"});
    for (auto& c : run_battery(s.cfg.seed)) {
        auto num = [&](const char* key) {
            return c.data.contains(key) ? c.data[key].get<double>() : std::nan("");
        };
        t.row({c.name, std::string(to_string(c.status)), num("worst"), num("threshold")});
        r.add(std::move(c));
    }
    t.write(out_dir / "properties.csv");
    r.datasets.push_back("properties.csv");
    return r;
}

void emit(const Report& r, const RunConfig& cfg, const fs::path& out_dir, const std::string& stem,
          std::ostream& out)
{
    write_text(out_dir / (stem + ".json"), r.to_json(cfg).dump(2) + "\n");
    for (const auto& c : r.checks) {
        std::string label = to_string(c.status);
        std::transform(label.begin(), label.end(), label.begin(), ::toupper);
        out << label << "  " << c.name;
        if (!c.message.empty())
            out << "  (" << c.message << ")";
        out << "\n";
    }
    out << r.command << ": " << (r.ok() ? "ok" : "FAILED") << ", report "
        << (out_dir / (stem + ".json")).string() << "\n";
}

namespace {

cplx parse_complex_arg(const std::string& s, const std::string& what)
{
    const auto comma = s.find(',');
    try {
        std::size_t used = 0;
        if (comma == std::string::npos) {
            const double re = std::stod(s, &used);
            if (used != s.size())
                throw std::invalid_argument(s);
            return {re, 0.0};
        }
        const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
        const double re = std::stod(a, &used);
        if (used != a.size())
            throw std::invalid_argument(s);
        const double im = std::stod(b, &used);
        if (used != b.size())
            throw std::invalid_argument(s);
        return {re, im};
    } catch (const std::exception&) {
        throw ConfigError(what + ": expected 're,im', got '" + s + "'");
    }
}

} // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"Chart solutions of a singularly perturbed q-difference-differential Cauchy problem"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "qgevrey-out";
    std::int64_t seed = -1;
    bool force = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out-dir", out_dir, "directory for reports and CSV datasets");
    app.add_option("--seed", seed, "override the configured seed")->check(CLI::NonNegativeNumber);
    app.add_flag("--force", force, "run even when `check` fails");
    app.fallthrough();

    auto* check = app.add_subcommand("check", "assumption, covering, family and admissibility checks");
    auto* solve = app.add_subcommand("solve", "evaluate X_I(eps, t, z) on one chart");
    int chart = 0;
    std::string eps_s, t_s, z_s = "0,0";
    solve->add_option("--chart", chart, "chart index")->required();
    solve->add_option("--eps", eps_s, "eps as re,im")->required();
    solve->add_option("--t", t_s, "t as re,im")->required();
    solve->add_option("--z", z_s, "z as re,im");
    auto* verify = app.add_subcommand("verify", "residual | flatness | asympt | properties");
    std::string mode;
    verify->add_option("mode", mode, "verification mode")
        ->required()
        ->check(CLI::IsMember({"residual", "flatness", "asympt", "properties"}));
    auto* demo = app.add_subcommand("demo", "check and every verification on the shipped demo config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);
        else if (demo->parsed())
            cfg = load_config_text(demo_config_json);
        else
            throw ConfigError("--config is required for this command");
        if (seed >= 0)
            cfg.seed = static_cast<std::uint64_t>(seed);
        const Setup s(cfg);
        const fs::path out(out_dir);

        const Report pre = cmd_check(s);
        if (check->parsed()) {
            emit(pre, cfg, out, "check", std::cout);
            return pre.ok() ? 0 : 1;
        }
        if (!pre.ok() && !force) {
            emit(pre, cfg, out, "check", std::cout);
            std::cerr << "check failed; rerun with --force to proceed anyway\n";
            return 1;
        }

        if (solve->parsed()) {
            const SolvePoint p{chart, parse_complex_arg(eps_s, "--eps"), parse_complex_arg(t_s, "--t"),
                               parse_complex_arg(z_s, "--z")};
            const Report r = cmd_solve(s, p);
            emit(r, cfg, out, "solve", std::cout);
            const auto& d = r.checks.front().data;
            if (d.contains("value"))
                std::cout << "X = " << format_double(d["value"][0].get<double>()) << " + "
                          << format_double(d["value"][1].get<double>()) << "i\n"
                          << "phi_0 = " << format_double(d["phi_0"][0].get<double>()) << " + "
                          << format_double(d["phi_0"][1].get<double>()) << "i\n"
                          << "tail = " << format_double(d["tail"].get<double>()) << "\n";
            return r.ok() ? 0 : 1;
        }

        std::vector<std::pair<std::string, std::function<Report(const Setup&, const fs::path&)>>> runs;
        if (verify->parsed()) {
            if (mode == "residual") runs.emplace_back("residual", verify_residual);
            if (mode == "flatness") runs.emplace_back("flatness", verify_flatness);
            if (mode == "asympt") runs.emplace_back("asympt", verify_asympt);
            if (mode == "properties") runs.emplace_back("properties", verify_properties);
        } else {
            emit(pre, cfg, out, "check", std::cout);
            runs = {{"residual", verify_residual},
                    {"flatness", verify_flatness},
                    {"asympt", verify_asympt},
                    {"properties", verify_properties}};
        }
        bool ok = pre.ok();
        for (const auto& [stem, fn] : runs) {
            const Report r = fn(s, out);
            emit(r, cfg, out, stem, std::cout);
            ok = ok && r.ok();
        }
        return ok ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace qgevrey::cli
