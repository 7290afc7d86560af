#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "branchlab/measure_kit.hpp"

namespace branchlab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

}  // namespace

std::string normalize_key(std::string key) {
    key = trim(key);
    std::replace(key.begin(), key.end(), '-', '_');
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    return key;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = normalize_key(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (key == "experiment") {
            cfg.experiment = value;
        } else {
            cfg.set(key, value);
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ExperimentConfig::serialize() const {
    std::string out;
    if (!experiment.empty()) out += "experiment = " + experiment + "\n";
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    values_[normalize_key(key)] = trim(value);
}

bool ExperimentConfig::has(const std::string& key) const { return values_.count(normalize_key(key)) > 0; }

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(normalize_key(key));
    return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(normalize_key(key));
    if (it == values_.end()) return fallback;
    return to_double(key, it->second);
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(normalize_key(key));
    if (it == values_.end()) return fallback;
    const double v = to_double(key, it->second);
    if (v != std::floor(v) || std::abs(v) > 9e15) {
        throw ConfigError("config key '" + key + "': expected an integer");
    }
    return static_cast<long long>(v);
}

std::uint64_t ExperimentConfig::get_seed(std::uint64_t fallback) const {
    const auto it = values_.find("seed");
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(it->second, &used, 0);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key 'seed': expected a 64-bit unsigned integer");
    }
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(normalize_key(key));
    if (it == values_.end()) return fallback;
    const std::string v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean");
}

std::vector<double> ExperimentConfig::get_grid(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(normalize_key(key));
    if (it == values_.end()) return fallback;
    return parse_grid(it->second);
}

std::vector<std::string> ExperimentConfig::get_list(const std::string& key,
                                                     const std::vector<std::string>& fallback) const {
    const auto it = values_.find(normalize_key(key));
    if (it == values_.end()) return fallback;
    auto items = split(it->second, ',');
    items.erase(std::remove(items.begin(), items.end(), std::string()), items.end());
    if (items.empty()) throw ConfigError("config key '" + key + "': empty list");
    return items;
}

gw::FamilyLaw ExperimentConfig::law() const {
    try {
        if (has("weights")) return gw::make_family_law(parse_number_list(get_string("weights", "")));
        return gw::named_law(get_string("law", "binary"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot resolve law: ") + e.what());
    }
}

std::string ExperimentConfig::law_label() const {
    if (has("weights")) return "weights:" + get_string("weights", "");
    return get_string("law", "binary");
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        if (item.empty()) continue;
        out.push_back(to_double("list", item));
    }
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> grid;
    const auto parts = split(spec, ':');
    if (parts.size() == 4 && (parts[0] == "log" || parts[0] == "lin")) {
        const double lo = to_double("grid", parts[1]);
        const double hi = to_double("grid", parts[2]);
        const double n = to_double("grid", parts[3]);
        if (!(n >= 1.0) || n != std::floor(n) || !(hi >= lo)) throw ConfigError("invalid grid spec: " + spec);
        const auto count = static_cast<std::size_t>(n);
        if (parts[0] == "log") {
            if (!(lo > 0.0)) throw ConfigError("log grid needs a positive lower end: " + spec);
            grid = measure::log_grid(lo, hi, count);
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                grid.push_back(count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1));
            }
        }
    } else if (parts.size() == 1) {
        grid = parse_number_list(spec);
    } else {
        throw ConfigError("invalid grid spec: " + spec);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw ConfigError("grid must be nonnegative, finite and increasing: " + spec);
        }
    }
    return grid;
}

}  // namespace branchlab::cli
