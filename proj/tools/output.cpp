#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace branchlab::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::string name, std::vector<std::string> header)
    : name_(std::move(name)), header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("CsvTable: row width does not match header");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::render() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        out.push_back(std::move(cells));
    }
    return out;
}

Check check_at_most(const std::string& name, double value, double tolerance) {
    return Check{name, value, tolerance, value <= tolerance};
}

Check check_true(const std::string& name, bool condition) {
    return Check{name, condition ? 1.0 : 0.0, 1.0, condition};
}

bool RunResult::all_pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

nlohmann::json number_json(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

nlohmann::json RunResult::summary() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config"] = config;
    j["results"] = results;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        j["checks"].push_back(
            {{"name", c.name}, {"value", number_json(c.value)}, {"tolerance", number_json(c.tolerance)}, {"pass", c.pass}});
    }
    return j;
}

void write_artifacts(const RunResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& t : r.tables) {
        std::ofstream out(std::filesystem::path(dir) / (t.name() + ".csv"), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + t.name() + ".csv");
        out << t.render();
    }
    std::ofstream js(std::filesystem::path(dir) / (r.experiment + ".json"), std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + r.experiment + ".json");
    js << r.summary().dump(2) << '\n';
}

}  // namespace branchlab::cli
