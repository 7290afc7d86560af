#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"

using namespace branchlab::cli;

int main(int argc, char** argv) {
    CLI::App app{"branchlab: branching process and coagulation experiments"};
    app.set_help_flag("--help", "print this help");
    std::string experiment;
    std::string criterion;
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    app.add_option("experiment", experiment, "evolve, simulate, limit, grimvall, smol-residual, universal-build, "
                                             "universal-demo, continuity or verify")
        ->required();
    app.add_option("criterion", criterion, "criterion name or number for verify");
    app.add_option("--config", config_path, "key = value settings file");
    app.add_option("--out", out_dir, "directory for CSV and JSON artifacts");

    struct Flag {
        const char* option;
        const char* key;
        const char* help;
        std::string value;
    };
    std::vector<Flag> flags{
        {"--seed", "seed", "64-bit seed", {}},
        {"--law", "law", "unit, binary, ternary or subcritical-demo", {}},
        {"--weights", "weights", "explicit family law w0,w1,...", {}},
        {"--h", "h", "size unit", {}},
        {"--tau", "tau", "time step", {}},
        {"--c", "c", "speed schedule constant", {}},
        {"--q-grid", "q_grid", "log:lo:hi:n, lin:lo:hi:n or a list", {}},
        {"--t-grid", "t_grid", "log:lo:hi:n, lin:lo:hi:n or a list", {}},
    };
    for (auto& f : flags) app.add_option(f.option, f.value, f.help);
    app.add_option("--set", overrides, "extra key=value settings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        ExperimentConfig config;
        if (!config_path.empty()) config = ExperimentConfig::load(config_path);
        config.experiment = experiment;
        for (const auto& f : flags) {
            if (!f.value.empty()) config.set(f.key, f.value);
        }
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value: " + kv);
            config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!criterion.empty()) config.set("criterion", criterion);
        if (!out_dir.empty()) config.set("out", out_dir);

        const RunResult result = run_experiment(config);
        std::cout << result.summary().dump(2) << '\n';
        const std::string dir = config.get_string("out", "");
        if (!dir.empty()) write_artifacts(result, dir);
        return exit_code(result);
    } catch (const std::exception& e) {
        std::cerr << "branchlab: " << e.what() << '\n';
        return 1;
    }
}
