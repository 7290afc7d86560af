#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace branchlab::cli {

std::string format_number(double v);

class CsvTable {
public:
    CsvTable() = default;
    CsvTable(std::string name, std::vector<std::string> header);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    void add_row(const std::vector<double>& values);
    void add_row(std::vector<std::string> cells);
    std::string render() const;

private:
    std::string name_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// value <= tolerance
Check check_at_most(const std::string& name, double value, double tolerance);
// boolean condition recorded as 1/0 against tolerance 1
Check check_true(const std::string& name, bool condition);

struct RunResult {
    std::string experiment;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::vector<Check> checks;
    std::vector<CsvTable> tables;

    bool all_pass() const;
    nlohmann::json summary() const;
};

nlohmann::json number_json(double v);
// Writes <dir>/<table>.csv for each table and <dir>/<experiment>.json.
void write_artifacts(const RunResult& r, const std::string& dir);

}  // namespace branchlab::cli
