#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qgevrey::cli {

const char* to_string(Status s) noexcept
{
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::warn: return "warn";
    case Status::info: return "info";
    }
    return "info";
}

bool Report::ok() const noexcept
{
    for (const auto& c : checks)
        if (c.status == Status::fail)
            return false;
    return true;
}

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson Report::to_json(const RunConfig& cfg) const
{
    ojson j;
    j["command"] = command;
    j["config"] = cfg.name;
    if (!cfg.expected.empty())
        j["expected"] = cfg.expected;
    j["seed"] = cfg.seed;
    j["status"] = ok() ? "pass" : "fail";

    ojson tol = ojson::object();
    auto put = [&](const std::string& key, double v) {
        const auto it = cfg.provenance.find(key);
        tol[key] = {{"value", v}, {"source", it == cfg.provenance.end() ? "default" : it->second}};
    };
    put("quad.abs_tol", cfg.quad.abs_tol);
    put("theta.tol", cfg.quad.theta.tol);
    put("verify.residual.bound", cfg.verify.residual.bound);
    put("verify.asympt.tol", cfg.verify.asympt.tol);
    put("verify.asympt.agreement_tol", cfg.verify.asympt.agreement_tol);
    j["tolerances"] = tol;

    ojson arr = ojson::array();
    for (const auto& c : checks) {
        ojson e;
        e["name"] = c.name;
        e["status"] = to_string(c.status);
        if (!c.message.empty())
            e["message"] = c.message;
        e["data"] = c.data;
        arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    j["datasets"] = datasets;
    return j;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // snprintf honours LC_NUMERIC; force the '.' separator
    for (char* p = buf; *p; ++p)
        if (*p == ',')
            *p = '.';
    return buf;
}

namespace {

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const CsvTable::Cell& c)
{
    if (const auto* s = std::get_if<std::string>(&c))
        return quote(*s);
    if (const auto* d = std::get_if<double>(&c))
        return format_double(*d);
    return std::to_string(std::get<long long>(c));
}

} // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::row(std::vector<Cell> cells)
{
    if (cells.size() != header_.size())
        throw std::logic_error("csv: row width does not match the header");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const
{
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i)
        out += (i ? "," : "") + quote(header_[i]);
    out += "\r\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out += (i ? "," : "") + cell_text(r[i]);
        out += "\r\n";
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

} // namespace qgevrey::cli
