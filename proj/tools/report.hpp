#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace qgevrey::cli {

using ojson = nlohmann::ordered_json;

enum class Status { pass, fail, warn, info };

const char* to_string(Status s) noexcept;

struct CheckResult {
    std::string name;
    Status status = Status::info;
    std::string message;
    ojson data = ojson::object();  ///< slacks, fitted constants, thresholds
};

/// Per-check statuses plus the provenance of every tolerance; field order is fixed.
struct Report {
    std::string command;
    std::vector<CheckResult> checks;
    std::vector<std::string> datasets;  ///< CSV files written, relative to the out dir

    void add(CheckResult c) { checks.push_back(std::move(c)); }
    /// No check failed.
    bool ok() const noexcept;
    ojson to_json(const RunConfig& cfg) const;
};

/// RFC 4180 writer: CRLF line ends, quoting where needed, doubles at 17
/// significant digits with '.' as separator regardless of locale.
class CsvTable {
public:
    using Cell = std::variant<std::string, double, long long>;

    explicit CsvTable(std::vector<std::string> header);

    void row(std::vector<Cell> cells);
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double v);
ojson complex_json(cplx z);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace qgevrey::cli
