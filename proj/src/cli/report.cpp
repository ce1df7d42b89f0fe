#include "ssb/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "ssb/cli/config.hpp"

#ifndef SSB_VERSION
#define SSB_VERSION "0.0.0"
#endif

namespace ssb::cli {
namespace {

// JSON has no infinities; keep them readable rather than silently null.
Json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string tool_version() { return SSB_VERSION; }

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            std::visit(
                [&out](const auto& c) {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, double>) {
                        out << format_double(c);
                    } else {
                        out << c;
                    }
                },
                row[i]);
        }
        out << '\n';
    }
}

ReportBuilder::ReportBuilder(std::string experiment) : experiment_(std::move(experiment)) {}

const Check& ReportBuilder::below(const std::string& name, double measured, double tolerance) {
    checks_.push_back({name, measured, "<", tolerance, measured < tolerance});
    return checks_.back();
}

const Check& ReportBuilder::at_most(const std::string& name, double measured, double tolerance) {
    checks_.push_back({name, measured, "<=", tolerance, measured <= tolerance});
    return checks_.back();
}

const Check& ReportBuilder::above(const std::string& name, double measured, double threshold) {
    checks_.push_back({name, measured, ">", threshold, measured > threshold});
    return checks_.back();
}

const Check& ReportBuilder::expect(const std::string& name, bool value, bool expected) {
    checks_.push_back({name, value ? 1.0 : 0.0, "==", expected ? 1.0 : 0.0, value == expected});
    return checks_.back();
}

void ReportBuilder::error(const std::string& kind, const std::string& message) {
    errors_.push_back(Json{{"kind", kind}, {"message", message}});
}

bool ReportBuilder::passed() const {
    if (!errors_.empty()) return false;
    for (const auto& c : checks_) {
        if (!c.passed) return false;
    }
    return true;
}

Json ReportBuilder::finish(const Json& config_echo) const {
    Json j;
    j["schema"] = 1;
    j["tool"] = "ssb-lab";
    j["version"] = tool_version();
    j["experiment"] = experiment_;
    j["config"] = config_echo;
    j["results"] = results_;
    Json checks = Json::array();
    for (const auto& c : checks_) {
        Json cj;
        cj["name"] = c.name;
        if (c.relation == "==") {
            cj["measured"] = c.measured != 0.0;
            cj["relation"] = c.relation;
            cj["expected"] = c.tolerance != 0.0;
        } else {
            cj["measured"] = number(c.measured);
            cj["relation"] = c.relation;
            cj["tolerance"] = number(c.tolerance);
        }
        cj["passed"] = c.passed;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    j["errors"] = errors_;
    Json files = Json::array();
    for (const auto& t : tables_) files.push_back(t.name + ".csv");
    j["tables"] = files;
    j["passed"] = passed();
    return j;
}

std::vector<std::filesystem::path> write_outputs(const RunResult& result,
                                                 const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    const auto report_path = dir / "report.json";
    {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + report_path.string());
        out << result.report.dump(2) << '\n';
    }
    written.push_back(report_path);
    for (const auto& t : result.tables) {
        const auto path = dir / (t.name + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + path.string());
        write_csv(out, t);
        written.push_back(path);
    }
    return written;
}

}  // namespace ssb::cli
