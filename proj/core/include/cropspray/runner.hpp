#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cropspray/mission.hpp"
#include "cropspray/odometry.hpp"
#include "cropspray/targeting.hpp"

namespace cropspray::mission {

enum class GpsStatus { kAbsent, kAccepted, kRejected };

enum class SprayStatus { kSprayed, kLowTank, kUnreachable, kNotReached };

/// One spray decision at the tick a plant first crosses the image center.
struct SprayEvent {
    int plant_id = -1;
    targeting::CameraSide side = targeting::CameraSide::kLeft;
    SprayStatus status = SprayStatus::kSprayed;
    double pan_rad = 0.0;
    double tilt_rad = 0.0;
    double dpan_rad = 0.0;
    double dtilt_rad = 0.0;
    double duration_s = 0.0;
    double volume_ml = 0.0;
    double aim_miss_m = 0.0;  // aim-ray distance to the true plant position
};

/// One line of the mission log; one record per tick, append-only.
struct StepRecord {
    std::uint64_t tick = 0;
    double time_s = 0.0;
    odometry::Pose2D true_pose;
    odometry::Pose2D est_pose;
    std::array<double, 3> cov_diag{};
    GpsStatus gps = GpsStatus::kAbsent;
    double v_left_mps = 0.0;
    double v_right_mps = 0.0;
    std::vector<SprayEvent> sprays;  // events triggered this tick
    int active_sprays = 0;           // sprays whose duration covers this tick
    double cross_track_m = 0.0;      // true pose to nearest point of the planned polyline
};

struct PlantResult {
    int id = -1;
    bool sprayed = false;
    SprayStatus status = SprayStatus::kNotReached;
    std::uint64_t trigger_tick = 0;
    double time_s = 0.0;
    targeting::CameraSide side = targeting::CameraSide::kLeft;
    double pan_rad = 0.0;
    double tilt_rad = 0.0;
    double volume_ml = 0.0;
    double aim_miss_m = 0.0;
};

/// End-of-run summary. Every statistic here is recomputable from the step
/// log; runtime is simulated time so artifacts stay byte-deterministic.
struct RunReport {
    bool completed = false;
    bool timeout = false;
    std::uint64_t ticks = 0;
    double sim_time_s = 0.0;
    std::uint64_t seed = 0;
    double cross_track_mean_m = 0.0;
    double cross_track_variance_m2 = 0.0;
    double cross_track_max_m = 0.0;
    std::vector<PlantResult> plants;
    double tank_capacity_ml = 0.0;
    double tank_initial_ml = 0.0;
    double tank_consumed_ml = 0.0;
    double tank_remaining_ml = 0.0;
    int low_tank_refusals = 0;
    int gps_scheduled = 0;
    int gps_accepted = 0;
    int gps_rejected = 0;
    int gps_missed_by_outage = 0;
};

struct RunResult {
    RunReport report;
    std::vector<StepRecord> log;
    // In-memory filter diagnostics (need the full covariance, so they are
    // not part of the file artifacts).
    double nees_mean = 0.0;
    double nees_final = 0.0;
    std::uint64_t nees_samples = 0;
};

/// Executes the closed loop (world -> filter -> guidance -> targeting) until
/// the path completes or the duration cap is hit. Identical config and seed
/// give bit-identical results.
RunResult run_mission(const MissionConfig& cfg);

// Artifact writers. Log records are line-delimited JSON, one object per
// tick; the report is a single JSON document; the CSV trace is plot-ready.
void write_step_log(const std::vector<StepRecord>& log, std::ostream& out);
void write_report(const RunReport& report, std::ostream& out);
void write_trace_csv(const std::vector<StepRecord>& log, std::ostream& out);

/// Statistics recomputed from a serialized step log, for cross-checking a
/// report against its log.
struct RecomputedStats {
    std::uint64_t ticks = 0;
    double cross_track_mean_m = 0.0;
    double cross_track_variance_m2 = 0.0;
    double cross_track_max_m = 0.0;
    double consumed_ml = 0.0;
    int sprayed_plants = 0;
    int low_tank_refusals = 0;
    int gps_accepted = 0;
    int gps_rejected = 0;
};
RecomputedStats recompute_stats_from_log(std::istream& jsonl);

const char* to_string(GpsStatus s);
const char* to_string(SprayStatus s);
const char* to_string(targeting::CameraSide s);

}  // namespace cropspray::mission
