#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cropspray/geodesy.hpp"
#include "cropspray/odometry.hpp"
#include "cropspray/simworld.hpp"
#include "cropspray/targeting.hpp"

namespace cropspray::mission {

struct GuidanceParams {
    double lookahead_m = 1.0;
    double v_nominal_mps = 0.2;
    bool static_reference = false;  // comparison mode; dynamic by default
};

struct SprayParams {
    double flow_ml_per_s = 10000.0 / 60.0;  // 10 l/min
    double volume_per_plant_ml = 200.0;
    double tank_capacity_ml = 10000.0;
};

struct FilterParams {
    double sigma_xy = 0.008;          // process noise per meter of travel, position
    double sigma_theta = 0.03;        // process noise per meter of travel, heading
    double init_pos_std_m = 0.01;
    double init_heading_std_rad = 0.005;
};

struct RobotParams {
    double track_width_m = 0.5;
    double v_max_mps = 0.5;
};

struct NozzleParams {
    Eigen::Matrix4d camera_to_nozzle;  // rigid camera->nozzle coordinate map
    targeting::NozzleLimits limits;

    NozzleParams();
};

struct SimParams {
    double tick_rate_hz = 50.0;
    double duration_cap_s = 300.0;
};

/// Raised on any malformed mission configuration; `field` names the
/// offending entry (dotted path).
struct ConfigError : std::runtime_error {
    std::string field;

    ConfigError(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message), field(std::move(field_path)) {}
};

/// Fully resolved mission scenario. Waypoints are stored in the datum's
/// tangent plane regardless of the frame they were written in.
struct MissionConfig {
    geodesy::GeodeticCoord datum;
    std::vector<geodesy::EnuCoord> waypoints;
    std::vector<sim::Plant> plants;
    RobotParams robot;
    sim::CameraRig rig;
    NozzleParams nozzle;
    sim::NoiseConfig noise;
    GuidanceParams guidance;
    SprayParams spray;
    FilterParams filter;
    SimParams sim_params;
    std::uint64_t seed = 0;
    std::optional<odometry::Pose2D> start_pose;  // default: first waypoint, facing the second
};

/// Parses and validates a mission document (JSON). Unknown keys anywhere in
/// the document are rejected.
MissionConfig parse_mission(const std::string& json_text);

MissionConfig load_mission(const std::filesystem::path& path);

}  // namespace cropspray::mission
