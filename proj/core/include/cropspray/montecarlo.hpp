#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cropspray/mission.hpp"
#include "cropspray/runner.hpp"
#include "cropspray/stats.hpp"

namespace cropspray::mission {

struct RunSummary {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    bool failed = false;  // threw; error carries the message
    std::string error;
    bool completed = false;
    bool timeout = false;
    double cross_track_mean_m = 0.0;
    double cross_track_variance_m2 = 0.0;
    double cross_track_max_m = 0.0;
    double nees_mean = 0.0;
    double nees_final = 0.0;
    int gps_rejected = 0;
    int plants_sprayed = 0;
};

/// Aggregate over N independent seeded runs. The NEES consistency check
/// compares the across-run average of the final-tick NEES (independent
/// samples) against the 95% interval for the mean of N chi-square(3) draws.
struct MonteCarloReport {
    std::size_t runs = 0;
    std::size_t failures = 0;
    std::uint64_t base_seed = 0;
    std::vector<RunSummary> summaries;

    double cte_mean_avg = 0.0;
    double cte_mean_min = 0.0;
    double cte_mean_max = 0.0;
    double cte_variance_avg = 0.0;

    double nees_final_avg = 0.0;
    stats::Interval nees_band;
    bool nees_within_band = false;
};

/// Runs the mission under seeds base_seed + i for i in [0, runs). `parallel`
/// limits worker threads (0 = hardware concurrency). Results are aggregated
/// in run order, so the report does not depend on scheduling.
MonteCarloReport run_monte_carlo(const MissionConfig& base, std::size_t runs,
                                 unsigned parallel = 0);

void write_monte_carlo_report(const MonteCarloReport& report, std::ostream& out);
void write_monte_carlo_csv(const MonteCarloReport& report, std::ostream& out);

}  // namespace cropspray::mission
