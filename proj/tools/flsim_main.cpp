#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flsim/config.hpp"
#include "flsim/errors.hpp"
#include "flsim/experiments.hpp"
#include "flsim/oracles.hpp"

namespace {

std::vector<flsim::BeamMode> parse_beams(const std::string& value) {
    if (value == "1" || value == "single") return {flsim::BeamMode::Single};
    if (value == "3" || value == "three") return {flsim::BeamMode::Three};
    if (value == "both") return {flsim::BeamMode::Single, flsim::BeamMode::Three};
    throw flsim::ConfigError("--beams must be 1, 3 or both (got '" + value + "')");
}

int do_run(const std::string& config_path, const std::string& experiment,
           const std::string& beams, const std::string& out_dir, int runs, long long seed,
           int threads, bool episode_logs, bool map_dumps) {
    flsim::Config cfg =
        config_path.empty() ? flsim::Config{} : flsim::Config::from_file(config_path);
    cfg.validate();
    if (runs > 0) cfg.experiments.runs = runs;
    if (seed >= 0) cfg.experiments.master_seed = static_cast<std::uint64_t>(seed);
    if (threads > 0) cfg.experiments.threads = threads;

    flsim::experiments::SweepOptions options;
    options.experiment = flsim::experiments::experiment_from_name(experiment);
    options.modes = parse_beams(beams);
    options.runs = cfg.experiments.runs;
    options.master_seed = cfg.experiments.master_seed;
    options.threads = cfg.experiments.threads;
    options.confidence = cfg.experiments.confidence;

    std::filesystem::create_directories(out_dir);
    if (episode_logs || map_dumps) {
        options.episode_log_dir = out_dir + "/episode_logs";
        options.map_dumps = map_dumps;
        std::filesystem::create_directories(options.episode_log_dir);
    }

    flsim::experiments::SweepResult result = flsim::experiments::run_sweep(cfg, options);

    std::string csv_path = out_dir + "/" + experiment + ".csv";
    flsim::experiments::write_csv_file(csv_path, result);
    std::string summary = flsim::experiments::summarize(result);
    std::ofstream summary_file(out_dir + "/summary.txt");
    if (!summary_file) throw flsim::ConfigError("cannot write " + out_dir + "/summary.txt");
    summary_file << summary;
    std::cout << summary << "wrote " << csv_path << "\n";
    return 0;
}

int do_validate(const std::string& config_path) {
    flsim::Config cfg =
        config_path.empty() ? flsim::Config{} : flsim::Config::from_file(config_path);
    cfg.validate();
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash()));
    std::cout << "config ok (hash " << hash << ")\n" << cfg.to_toml();
    return 0;
}

int do_oracle(long long seed) {
    std::uint64_t s = seed >= 0 ? static_cast<std::uint64_t>(seed) : 20240817ull;
    std::vector<flsim::oracles::OracleCheck> checks =
        flsim::oracles::run_derived_value_oracles(s);
    std::cout << flsim::oracles::format_report(checks);
    return flsim::oracles::all_pass(checks) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flsim: single-beam vs three-beam forward-looking sonar collision avoidance"};
    app.require_subcommand(1);

    std::string config_path;
    std::string experiment = "density";
    std::string beams = "both";
    std::string out_dir = ".";
    int runs = -1;
    long long seed = -1;
    int threads = -1;
    bool episode_logs = false;
    bool map_dumps = false;

    CLI::App* run_cmd = app.add_subcommand("run", "run a Monte Carlo sweep");
    run_cmd->add_option("--config", config_path, "TOML config file (defaults when omitted)");
    run_cmd->add_option("--experiment", experiment,
                        "density, radius, surge_error, yaw_error, altitude or single");
    run_cmd->add_option("--runs", runs, "paired episodes per sweep value");
    run_cmd->add_option("--seed", seed, "master seed");
    run_cmd->add_option("--beams", beams, "1, 3 or both");
    run_cmd->add_option("--threads", threads, "worker threads (default: hardware)");
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_flag("--episode-logs", episode_logs, "write per-episode decision logs");
    run_cmd->add_flag("--map-dumps", map_dumps, "with logs: dump per-epoch map state");

    CLI::App* validate_cmd =
        app.add_subcommand("validate-config", "parse, validate and print the resolved config");
    validate_cmd->add_option("--config", config_path, "TOML config file (defaults when omitted)");

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "run the derived-value oracles and print the report");
    oracle_cmd->add_option("--seed", seed, "oracle seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (run_cmd->parsed())
            return do_run(config_path, experiment, beams, out_dir, runs, seed, threads,
                          episode_logs, map_dumps);
        if (validate_cmd->parsed()) return do_validate(config_path);
        if (oracle_cmd->parsed()) return do_oracle(seed);
    } catch (const flsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
