#include "cropspray/odometry.hpp"

#include <cmath>
#include <stdexcept>

namespace cropspray::odometry {

WheelIncrement::WheelIncrement(double left, double right, double track_width)
    : left_m(left), right_m(right), track_width_m(track_width) {
    if (!(std::isfinite(left) && std::isfinite(right) && std::isfinite(track_width))) {
        throw std::invalid_argument("WheelIncrement: non-finite component");
    }
    if (track_width <= 0.0) {
        throw std::invalid_argument("WheelIncrement: track width must be positive");
    }
}

bool WheelIncrement::within_travel_limit(double max_travel_m) const {
    return std::abs(left_m) <= max_travel_m && std::abs(right_m) <= max_travel_m;
}

double heading_delta(const WheelIncrement& inc) {
    return (inc.right_m - inc.left_m) / inc.track_width_m;
}

Pose2D propagate(const Pose2D& p, const WheelIncrement& inc) {
    const double dtheta = heading_delta(inc);
    double dx;
    double dy;
    if (std::abs(dtheta) < kStraightEpsRad) {
        const double travel = 0.5 * (inc.left_m + inc.right_m);
        dx = travel * std::cos(p.theta_rad);
        dy = travel * std::sin(p.theta_rad);
    } else {
        const double center_radius = inc.left_m / dtheta + 0.5 * inc.track_width_m;
        dx = center_radius * (std::sin(p.theta_rad + dtheta) - std::sin(p.theta_rad));
        dy = center_radius * (std::cos(p.theta_rad) - std::cos(p.theta_rad + dtheta));
    }
    return Pose2D(p.x_m + dx, p.y_m + dy, p.theta_rad + dtheta);
}

Eigen::Matrix3d propagate_pose_jacobian(const Pose2D& p, const WheelIncrement& inc) {
    const double dtheta = heading_delta(inc);
    Eigen::Matrix3d jac = Eigen::Matrix3d::Identity();
    if (std::abs(dtheta) < kStraightEpsRad) {
        const double travel = 0.5 * (inc.left_m + inc.right_m);
        jac(0, 2) = -travel * std::sin(p.theta_rad);
        jac(1, 2) = travel * std::cos(p.theta_rad);
    } else {
        const double center_radius = inc.left_m / dtheta + 0.5 * inc.track_width_m;
        jac(0, 2) = center_radius * (std::cos(p.theta_rad + dtheta) - std::cos(p.theta_rad));
        jac(1, 2) = center_radius * (std::sin(p.theta_rad + dtheta) - std::sin(p.theta_rad));
    }
    return jac;
}

}  // namespace cropspray::odometry
