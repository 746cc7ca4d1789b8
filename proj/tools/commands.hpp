#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace qgevrey::cli {

/// Everything derived from a config once: base, covering, family, lambdas.
struct Setup {
    explicit Setup(RunConfig c);

    RunConfig cfg;
    QBase base;
    GoodCovering covering;
    BuiltFamily family;

    /// Chart solver with chart and T membership enforced.
    SolutionChart chart(std::size_t i) const;
};

Report cmd_check(const Setup& s);

struct SolvePoint {
    int chart = 0;
    cplx eps;
    cplx t;
    cplx z;
};
Report cmd_solve(const Setup& s, const SolvePoint& p);

/// Verification modes. Each writes its CSV datasets under out_dir.
Report verify_residual(const Setup& s, const std::filesystem::path& out_dir);
Report verify_flatness(const Setup& s, const std::filesystem::path& out_dir);
Report verify_asympt(const Setup& s, const std::filesystem::path& out_dir);
Report verify_properties(const Setup& s, const std::filesystem::path& out_dir);

/// Writes <out_dir>/<stem>.json and prints one line per check to out.
void emit(const Report& r, const RunConfig& cfg, const std::filesystem::path& out_dir,
          const std::string& stem, std::ostream& out);

/// Full command line entry point; returns the process exit code (0, 1 or 2).
int run_cli(int argc, char** argv);

} // namespace qgevrey::cli
