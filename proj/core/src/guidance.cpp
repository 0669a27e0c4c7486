#include "cropspray/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cropspray::guidance {

namespace {

Eigen::Vector2d planar(const geodesy::EnuCoord& p) {
    return {p.east_m, p.north_m};
}

constexpr double kMinWaypointSpacingM = 1e-3;
constexpr double kPathEndEpsM = 1e-9;

}  // namespace

PlannedPath::PlannedPath(std::vector<geodesy::EnuCoord> waypoints)
    : waypoints_(std::move(waypoints)) {
    if (waypoints_.size() < 2) {
        throw std::invalid_argument("PlannedPath: need at least two waypoints");
    }
    cumulative_.reserve(waypoints_.size());
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
        const double seg = (planar(waypoints_[i]) - planar(waypoints_[i - 1])).norm();
        if (seg <= kMinWaypointSpacingM) {
            throw std::invalid_argument("PlannedPath: consecutive waypoints closer than 1 mm");
        }
        cumulative_.push_back(cumulative_.back() + seg);
    }
}

Eigen::Vector2d PlannedPath::point_at(double arclength_m) const {
    const double s = std::clamp(arclength_m, 0.0, total_length());
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    const std::size_t seg = std::min<std::size_t>(
        static_cast<std::size_t>(std::distance(cumulative_.begin(), it)), cumulative_.size() - 1);
    const std::size_t i = seg == 0 ? 1 : seg;
    const Eigen::Vector2d a = planar(waypoints_[i - 1]);
    const Eigen::Vector2d b = planar(waypoints_[i]);
    const double seg_len = cumulative_[i] - cumulative_[i - 1];
    const double t = (s - cumulative_[i - 1]) / seg_len;
    return a + t * (b - a);
}

PlannedPath::Closest PlannedPath::closest_to(const Eigen::Vector2d& position) const {
    Closest best;
    best.distance_m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
        const Eigen::Vector2d a = planar(waypoints_[i - 1]);
        const Eigen::Vector2d b = planar(waypoints_[i]);
        const Eigen::Vector2d ab = b - a;
        const double t = std::clamp((position - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        const Eigen::Vector2d candidate = a + t * ab;
        const double dist = (position - candidate).norm();
        if (dist < best.distance_m) {
            best.distance_m = dist;
            best.point = candidate;
            best.arclength_m = cumulative_[i - 1] + t * ab.norm();
        }
    }
    return best;
}

std::optional<ReferencePoint> reference_point(const PlannedPath& path,
                                              const odometry::Pose2D& pose,
                                              double lookahead_m, double& progress_m) {
    if (!(lookahead_m > 0.0)) {
        throw std::invalid_argument("reference_point: lookahead must be positive");
    }
    const Eigen::Vector2d robot(pose.x_m, pose.y_m);
    const auto& wps = path.waypoints();

    if (progress_m >= path.total_length() - kPathEndEpsM) {
        return std::nullopt;
    }

    // Circle/segment intersections, keeping the farthest one along the path
    // that is not behind the progress marker.
    double best_s = -1.0;
    Eigen::Vector2d best_point = Eigen::Vector2d::Zero();
    bool any_intersection = false;
    double seg_start_s = 0.0;
    for (std::size_t i = 1; i < wps.size(); ++i) {
        const Eigen::Vector2d a = planar(wps[i - 1]);
        const Eigen::Vector2d b = planar(wps[i]);
        const Eigen::Vector2d ab = b - a;
        const double seg_len = ab.norm();

        const Eigen::Vector2d rel = a - robot;
        const double qa = ab.squaredNorm();
        const double qb = 2.0 * rel.dot(ab);
        const double qc = rel.squaredNorm() - lookahead_m * lookahead_m;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double sqrt_disc = std::sqrt(disc);
            for (const double t : {(-qb - sqrt_disc) / (2.0 * qa), (-qb + sqrt_disc) / (2.0 * qa)}) {
                if (t < 0.0 || t > 1.0) {
                    continue;
                }
                any_intersection = true;
                const double s = seg_start_s + t * seg_len;
                if (s + kPathEndEpsM < progress_m) {
                    continue;
                }
                if (s > best_s) {
                    best_s = s;
                    best_point = a + t * ab;
                }
            }
        }
        seg_start_s += seg_len;
    }

    if (best_s >= 0.0) {
        progress_m = std::max(progress_m, best_s);
        return ReferencePoint{best_point, best_s, false};
    }

    // No forward intersection. If the final waypoint already sits inside the
    // lookahead circle the path is exhausted.
    const Eigen::Vector2d end = planar(wps.back());
    if ((end - robot).norm() <= lookahead_m) {
        progress_m = path.total_length();
        return std::nullopt;
    }

    // Intersections exist but all sit behind the marker (the pose estimate
    // stepped backwards). Hold the reference at the marker rather than
    // letting it snap to the robot.
    if (any_intersection) {
        return ReferencePoint{path.point_at(progress_m), progress_m, false};
    }

    // Robot farther than the lookahead from the path: steer at the closest
    // path point.
    const auto closest = path.closest_to(robot);
    progress_m = std::max(progress_m, closest.arclength_m);
    return ReferencePoint{closest.point, closest.arclength_m, true};
}

ArcSolution arc_to_reference(const odometry::Pose2D& pose, const Eigen::Vector2d& reference,
                             double chord_m) {
    if (!(chord_m > 0.0)) {
        throw std::invalid_argument("arc_to_reference: chord must be positive");
    }
    const double bearing =
        std::atan2(reference.y() - pose.y_m, reference.x() - pose.x_m);
    const double eta = angle_diff(bearing, pose.theta_rad);

    ArcSolution sol;
    sol.heading_error_rad = eta;
    if (std::abs(eta) > kPi / 2.0 + kBehindMarginRad) {
        sol.behind = true;
        sol.curvature_inv_m = (eta >= 0.0 ? 2.0 : -2.0) / chord_m;
    } else {
        sol.curvature_inv_m = 2.0 * std::sin(eta) / chord_m;
    }
    return sol;
}

GuidanceCommand wheel_speeds(double curvature_inv_m, double v_nominal_mps,
                             double track_width_m, double v_max_mps) {
    if (!(track_width_m > 0.0)) {
        throw std::invalid_argument("wheel_speeds: track width must be positive");
    }
    GuidanceCommand cmd;
    cmd.curvature_inv_m = curvature_inv_m;
    const double half_span = curvature_inv_m * track_width_m * 0.5;
    cmd.v_left_mps = v_nominal_mps * (1.0 - half_span);
    cmd.v_right_mps = v_nominal_mps * (1.0 + half_span);

    const double peak = std::max(std::abs(cmd.v_left_mps), std::abs(cmd.v_right_mps));
    if (peak > v_max_mps) {
        // Rescaling both wheels preserves the curvature exactly.
        const double scale = v_max_mps / peak;
        cmd.v_left_mps *= scale;
        cmd.v_right_mps *= scale;
        cmd.saturated = true;
    }
    return cmd;
}

PathFollower::PathFollower(const PlannedPath& path, double lookahead_m, bool static_reference)
    : path_(path), lookahead_m_(lookahead_m), static_reference_(static_reference) {
    if (!(lookahead_m > 0.0)) {
        throw std::invalid_argument("PathFollower: lookahead must be positive");
    }
}

std::optional<ReferencePoint> PathFollower::next_reference(const odometry::Pose2D& pose) {
    if (!static_reference_) {
        return reference_point(path_, pose, lookahead_m_, progress_m_);
    }

    // Static comparison mode: hold the reference until the robot closes in,
    // then hop one lookahead forward along the path.
    const Eigen::Vector2d robot(pose.x_m, pose.y_m);
    if (held_ && (held_->point - robot).norm() > 0.25 * lookahead_m_) {
        return held_;
    }
    const double next_s = (held_ ? held_->arclength_m : progress_m_) + lookahead_m_;
    if (next_s >= path_.total_length() + lookahead_m_ - kPathEndEpsM) {
        progress_m_ = path_.total_length();
        return std::nullopt;
    }
    const double s = std::min(next_s, path_.total_length());
    held_ = ReferencePoint{path_.point_at(s), s, false};
    progress_m_ = std::max(progress_m_, s);
    return held_;
}

}  // namespace cropspray::guidance
