#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgevrey/covering.hpp"
#include "qgevrey/problem.hpp"
#include "qgevrey/qlaplace.hpp"
#include "qgevrey/solution.hpp"

namespace qgevrey::cli {

/// Malformed configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CoveringSpec {
    int n_u = 5;
    int n_v = 5;
    double overlap = 0.1;
    double v_base = -1.0;
};

struct ResidualSpec {
    int samples = 100;
    double bound = 1e-6;
    double z_max = 0.5;
};

struct DecaySpec {
    int chart = 0;
    cplx eps{0.5, 0.0};
    cplx t{0.9, 0.0};
    double margin = 0.1;  ///< slope must be <= -A1 log|q| (1 - margin)
};

struct FlatnessSpec {
    int n_points = 13;
    double margin = 0.1;  ///< slope must be <= -(1 - margin) / A
};

struct AsymptSpec {
    int k_max = 4;
    double tol = 1e-3;            ///< stabilization threshold per k
    int agreement_k_max = 3;
    double agreement_tol = 1e-4;  ///< relative, across the two charts
    ExtractionPlan plan{};
};

struct VerifySpec {
    std::vector<int> charts{0, 1};  ///< overlapping pair for flatness and asympt
    cplx eps0{0.5, 0.0};
    std::vector<TZ> grid{{cplx(0.9, 0.0), cplx(0.0, 0.0)}};
    ResidualSpec residual{};
    DecaySpec decay{};
    FlatnessSpec flatness{};
    AsymptSpec asympt{};
};

struct RunConfig {
    std::string name;
    cplx q{2.0, 0.0};
    CauchyProblem problem;
    InitialData initial;
    GevreyParams gevrey;
    CoveringSpec covering;
    FamilySpec family;
    std::size_t covering_samples = 10000;
    std::size_t family_samples = 400;
    std::optional<AdmissibilityGrid> admissibility;
    QuadSettings quad;
    GrowthCertificate cert;
    int beta_max = 25;
    std::uint64_t seed = 1;
    VerifySpec verify;
    std::string expected;  ///< free-form note, e.g. which check is meant to fail

    /// Tolerance name -> where its value came from ("default", "config", "env:NAME").
    std::map<std::string, std::string> provenance;
};

/// Parses and validates; throws ConfigError on any schema or invariant violation.
/// Tolerances may be overridden by QGEVREY_* environment variables afterwards.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
RunConfig load_config_text(const std::string& text);

/// Environment variables that may override tolerances, and the field each sets.
const std::vector<std::pair<std::string, std::string>>& tolerance_env_vars();

} // namespace qgevrey::cli
