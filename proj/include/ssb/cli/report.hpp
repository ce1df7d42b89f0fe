#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ssb::cli {

using Json = nlohmann::ordered_json;

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::string name;  // file name without extension
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

// Doubles as %.17g, header row first, '\n' line endings.
void write_csv(std::ostream& out, const Table& table);
std::string format_double(double v);

struct Check {
    std::string name;
    double measured = 0.0;
    std::string relation;  // "<", "<=", ">", "==" (booleans)
    double tolerance = 0.0;
    bool passed = false;
};

class ReportBuilder {
public:
    explicit ReportBuilder(std::string experiment);

    Json& results() { return results_; }
    void note(const std::string& key, Json value) { results_[key] = std::move(value); }

    const Check& below(const std::string& name, double measured, double tolerance);
    const Check& at_most(const std::string& name, double measured, double tolerance);
    const Check& above(const std::string& name, double measured, double threshold);
    const Check& expect(const std::string& name, bool value, bool expected = true);

    void error(const std::string& kind, const std::string& message);
    void attach(Table table) { tables_.push_back(std::move(table)); }

    const std::vector<Check>& checks() const { return checks_; }
    const std::vector<Table>& tables() const { return tables_; }
    bool passed() const;

    Json finish(const Json& config_echo) const;

private:
    std::string experiment_;
    Json results_ = Json::object();
    std::vector<Check> checks_;
    Json errors_ = Json::array();
    std::vector<Table> tables_;
};

struct RunResult {
    Json report;
    std::vector<Table> tables;
    std::vector<Check> checks;
    bool passed = false;
};

// report.json plus one CSV per table; returns the written paths.
std::vector<std::filesystem::path> write_outputs(const RunResult& result,
                                                 const std::filesystem::path& dir);

std::string tool_version();

}  // namespace ssb::cli
