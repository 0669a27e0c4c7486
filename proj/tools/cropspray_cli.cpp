// Mission runner CLI: executes the closed-loop sprayer simulation, checks
// the embedded RTK survey fixture, and drives Monte Carlo batches.
//
// Exit codes: 0 ok, 1 configuration error, 2 accuracy check failure,
// 3 mission timeout.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cropspray/mission.hpp"
#include "cropspray/montecarlo.hpp"
#include "cropspray/runner.hpp"
#include "cropspray/survey.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitTimeout = 3;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

cropspray::mission::MissionConfig load_config(const std::string& path,
                                              const std::optional<std::uint64_t>& seed) {
    auto cfg = cropspray::mission::load_mission(path);
    if (seed) {
        cfg.seed = *seed;
    }
    return cfg;
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::filesystem::path& out_dir, bool csv) {
    const auto cfg = load_config(config_path, seed);
    const auto started = std::chrono::steady_clock::now();
    const auto result = cropspray::mission::run_mission(cfg);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - started;

    std::filesystem::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "steps.jsonl");
        cropspray::mission::write_step_log(result.log, out);
    }
    {
        auto out = open_out(out_dir / "report.json");
        cropspray::mission::write_report(result.report, out);
    }
    if (csv) {
        auto out = open_out(out_dir / "trace.csv");
        cropspray::mission::write_trace_csv(result.log, out);
    }

    int sprayed = 0;
    for (const auto& plant : result.report.plants) {
        sprayed += plant.sprayed ? 1 : 0;
    }
    std::cout << (result.report.completed ? "completed" : "TIMEOUT") << " after "
              << result.report.sim_time_s << " s simulated (" << result.report.ticks
              << " ticks, " << wall.count() << " s wall)\n"
              << "cross-track mean " << result.report.cross_track_mean_m << " m, variance "
              << result.report.cross_track_variance_m2 << " m^2, max "
              << result.report.cross_track_max_m << " m\n"
              << "plants sprayed " << sprayed << "/" << result.report.plants.size()
              << ", consumed " << result.report.tank_consumed_ml << " ml, remaining "
              << result.report.tank_remaining_ml << " ml\n"
              << "gps fixes " << result.report.gps_scheduled << " scheduled, "
              << result.report.gps_accepted << " accepted, " << result.report.gps_rejected
              << " rejected, " << result.report.gps_missed_by_outage << " lost to outages\n"
              << "artifacts in " << out_dir.string() << "\n";
    return result.report.timeout ? kExitTimeout : kExitOk;
}

int cmd_verify_table1() {
    const auto report = cropspray::mission::evaluate_rtk_survey();
    cropspray::mission::print_survey_report(report, std::cout);
    return report.within_reference ? kExitOk : kExitCheckFailed;
}

int cmd_montecarlo(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                   const std::filesystem::path& out_dir, std::size_t runs, unsigned parallel) {
    const auto cfg = load_config(config_path, seed);
    const auto report = cropspray::mission::run_monte_carlo(cfg, runs, parallel);

    std::filesystem::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "montecarlo_report.json");
        cropspray::mission::write_monte_carlo_report(report, out);
    }
    {
        auto out = open_out(out_dir / "montecarlo_runs.csv");
        cropspray::mission::write_monte_carlo_csv(report, out);
    }

    std::cout << report.runs << " runs (" << report.failures << " failed), seeds "
              << report.base_seed << ".." << report.base_seed + report.runs - 1 << "\n"
              << "cross-track mean of means " << report.cte_mean_avg << " m (min "
              << report.cte_mean_min << ", max " << report.cte_mean_max << ")\n"
              << "final NEES average " << report.nees_final_avg << ", 95% band ["
              << report.nees_band.lo << ", " << report.nees_band.hi << "] -> "
              << (report.nees_within_band ? "consistent" : "INCONSISTENT") << "\n"
              << "artifacts in " << out_dir.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crop-spraying robot simulation stack"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool csv = false;
    std::size_t runs = 50;
    unsigned parallel = 0;

    auto* run = app.add_subcommand("run", "Execute one mission and write its artifacts");
    run->add_option("config", config_path, "Mission config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out-dir", out_dir, "Output directory (default .)");
    run->add_flag("--csv", csv, "Also write a plot-ready trace.csv");

    auto* verify =
        app.add_subcommand("verify-table1", "Check the embedded RTK survey accuracy fixture");

    auto* mc = app.add_subcommand("montecarlo", "Run N seeded missions and aggregate");
    mc->add_option("config", config_path, "Mission config (JSON)")->required();
    mc->add_option("--runs", runs, "Number of runs (default 50)");
    mc->add_option("--parallel", parallel, "Worker threads (default: hardware)");
    mc->add_option("--seed", seed, "Override the base seed");
    mc->add_option("--out-dir", out_dir, "Output directory (default .)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_path, seed, out_dir, csv);
        }
        if (verify->parsed()) {
            return cmd_verify_table1();
        }
        if (mc->parsed()) {
            return cmd_montecarlo(config_path, seed, out_dir, runs, parallel);
        }
    } catch (const cropspray::mission::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
