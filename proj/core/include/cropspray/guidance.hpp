#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "cropspray/geodesy.hpp"
#include "cropspray/odometry.hpp"

namespace cropspray::guidance {

/// Piecewise-linear reference path in the tangent plane. Consecutive
/// waypoints must be more than 1 mm apart. Guidance is planar; the up
/// component of waypoints is carried but ignored.
class PlannedPath {
public:
    explicit PlannedPath(std::vector<geodesy::EnuCoord> waypoints);

    const std::vector<geodesy::EnuCoord>& waypoints() const { return waypoints_; }
    double total_length() const { return cumulative_.back(); }

    /// Point at the given arclength, clamped to [0, total_length].
    Eigen::Vector2d point_at(double arclength_m) const;

    struct Closest {
        double arclength_m = 0.0;
        Eigen::Vector2d point = Eigen::Vector2d::Zero();
        double distance_m = 0.0;
    };
    Closest closest_to(const Eigen::Vector2d& position) const;

private:
    std::vector<geodesy::EnuCoord> waypoints_;
    std::vector<double> cumulative_;  // arclength at each waypoint
};

struct ReferencePoint {
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
    double arclength_m = 0.0;
    bool fallback = false;  // robot farther than the lookahead from the path
};

/// Lookahead intersection of the circle of radius `lookahead_m` around the
/// robot with the path, taking the intersection of greatest arclength not
/// behind `progress_m`. Falls back to the closest path point when the robot
/// is farther than the lookahead from the path. `progress_m` is advanced
/// monotonically. Returns nullopt once the path is exhausted (the would-be
/// reference lies beyond the final waypoint).
std::optional<ReferencePoint> reference_point(const PlannedPath& path,
                                              const odometry::Pose2D& pose,
                                              double lookahead_m, double& progress_m);

struct ArcSolution {
    double curvature_inv_m = 0.0;
    double heading_error_rad = 0.0;  // signed angle from heading to the reference bearing
    bool behind = false;             // reference behind the robot; max-curvature fallback
};

// Reference bearings beyond pi/2 + this margin count as behind the robot.
inline constexpr double kBehindMarginRad = 0.1;

/// Curvature of the unique circle through the robot, tangent to its heading,
/// passing through the reference: 2 sin(eta) / chord. When the reference is
/// behind the robot the curvature saturates at 2 / chord (sin clamped),
/// biasing the command toward a turn in place, and the flag is set.
ArcSolution arc_to_reference(const odometry::Pose2D& pose, const Eigen::Vector2d& reference,
                             double chord_m);

struct GuidanceCommand {
    double v_left_mps = 0.0;
    double v_right_mps = 0.0;
    double curvature_inv_m = 0.0;
    bool saturated = false;
};

/// Differential-drive speeds realizing the commanded curvature at the
/// nominal speed. If either wheel would exceed v_max both are rescaled,
/// preserving the curvature exactly and flagging saturation.
GuidanceCommand wheel_speeds(double curvature_inv_m, double v_nominal_mps,
                             double track_width_m, double v_max_mps);

/// Progress-marker-owning follower used by the mission loop. The dynamic
/// policy re-solves the lookahead intersection every tick; the static policy
/// holds the reference fixed and hops it forward by one lookahead once the
/// robot closes within a quarter lookahead (comparison mode only).
class PathFollower {
public:
    PathFollower(const PlannedPath& path, double lookahead_m, bool static_reference = false);

    std::optional<ReferencePoint> next_reference(const odometry::Pose2D& pose);
    double progress_m() const { return progress_m_; }

private:
    const PlannedPath& path_;
    double lookahead_m_;
    bool static_reference_;
    double progress_m_ = 0.0;
    std::optional<ReferencePoint> held_;  // static mode
};

}  // namespace cropspray::guidance
