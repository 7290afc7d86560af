#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "branchlab/gw_discrete.hpp"

namespace branchlab::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value settings. Keys use underscores; command-line spellings with
// dashes are normalized on insertion.
class ExperimentConfig {
public:
    std::string experiment;

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string serialize() const;

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_seed(std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_grid(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;

    // `weights` wins over `law`; the default law is binary.
    gw::FamilyLaw law() const;
    std::string law_label() const;

    bool operator==(const ExperimentConfig& other) const {
        return experiment == other.experiment && values_ == other.values_;
    }

private:
    std::map<std::string, std::string> values_;
};

std::string normalize_key(std::string key);
// "log:lo:hi:n", "lin:lo:hi:n" or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec);
std::vector<double> parse_number_list(const std::string& text);

}  // namespace branchlab::cli
