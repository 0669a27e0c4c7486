#pragma once

#include <Eigen/Core>

#include "cropspray/angles.hpp"

namespace cropspray::odometry {

// Per-tick heading change below which the arc update degenerates to a
// straight step; both branches agree to machine precision here.
inline constexpr double kStraightEpsRad = 1e-9;

/// Planar robot pose in the ENU-aligned navigation frame. Heading is always
/// wrapped into (-pi, pi] on construction.
struct Pose2D {
    double x_m = 0.0;
    double y_m = 0.0;
    double theta_rad = 0.0;

    Pose2D() = default;
    Pose2D(double x, double y, double theta) : x_m(x), y_m(y), theta_rad(wrap_pi(theta)) {}
};

/// Signed wheel travel over one tick, plus the track width between the
/// driven wheels.
struct WheelIncrement {
    double left_m = 0.0;
    double right_m = 0.0;
    double track_width_m = 0.0;

    WheelIncrement() = default;
    WheelIncrement(double left, double right, double track_width);

    /// Encoder glitch guard: both wheels within the reachable travel for one
    /// tick (v_max * dt, supplied by the caller).
    bool within_travel_limit(double max_travel_m) const;
};

/// Per-tick heading change (right - left) / track_width.
double heading_delta(const WheelIncrement& inc);

/// Arc-based dead-reckoning update. The wheel geometry gives the left-wheel
/// arc radius left/dtheta; the robot center rides track_width/2 further out.
/// Below kStraightEpsRad the straight-line limit is used.
Pose2D propagate(const Pose2D& p, const WheelIncrement& inc);

/// Analytic Jacobian of propagate with respect to (x, y, theta).
Eigen::Matrix3d propagate_pose_jacobian(const Pose2D& p, const WheelIncrement& inc);

}  // namespace cropspray::odometry
