#pragma once

#include <Eigen/Core>

#include <optional>

#include "cropspray/angles.hpp"

namespace cropspray::targeting {

/// Camera description with a linear pixel/angle mapping: view angle equals
/// the pixel offset from the principal point (image center) times the
/// per-pixel angular resolution fov / pixels. Not a pinhole model.
struct CameraModel {
    double width_px = 1080.0;
    double height_px = 720.0;
    double hfov_rad = deg_to_rad(62.2);
    double vfov_rad = deg_to_rad(48.8);

    CameraModel() = default;
    CameraModel(double width, double height, double hfov, double vfov);
};

enum class CameraSide { kLeft, kRight };

/// Plant observation in pixel space. The center is the bbox midpoint.
/// plant_id is a ground-truth tag available in simulation only.
struct Detection {
    double x_min_px = 0.0;
    double y_min_px = 0.0;
    double x_max_px = 0.0;
    double y_max_px = 0.0;
    double center_x_px = 0.0;
    double center_y_px = 0.0;
    double confidence = 1.0;
    CameraSide side = CameraSide::kLeft;
    int plant_id = -1;
};

/// View angles of an image point. Signs: a point right of the image center
/// has positive horizontal angle, a point below center a positive vertical
/// angle.
struct ViewAngles {
    double vertical_rad = 0.0;    // about the camera y axis
    double horizontal_rad = 0.0;  // about the camera z axis
};

ViewAngles pixel_to_angles(const CameraModel& cam, double px, double py);

/// Homogeneous plant coordinates in the camera frame (x along the optical
/// axis, y toward image right, z up):
///   (d cos az, d sin az, -d cos az tan ay, 1)
/// where d is the range in the camera's xy plane. Points at or beyond
/// +-pi/2 horizontal are behind the focal plane and rejected.
Eigen::Vector4d plant_in_camera(double range_m, const ViewAngles& angles);

/// Homogeneous camera-to-nozzle map with the default rig geometry: frames
/// axis-aligned, camera at (0.20, 0, 0.10) m in nozzle coordinates (the
/// nozzle sits behind and below the camera).
Eigen::Matrix4d default_camera_to_nozzle();

/// Applies a rigid homogeneous transform; the rotation block must be
/// orthonormal.
Eigen::Vector4d camera_to_nozzle(const Eigen::Vector4d& p_camera, const Eigen::Matrix4d& h);

/// Pan-tilt aim of the spray nozzle.
struct NozzlePose {
    double pan_rad = 0.0;   // about the nozzle z axis
    double tilt_rad = 0.0;  // about the nozzle y axis
};

struct NozzleLimits {
    double pan_rad = kPi / 2.0;
    double tilt_rad = kPi / 2.0;
};

/// Full spherical pan-tilt solution: the emitted ray from the nozzle origin
/// through (pan, tilt) passes through the target. The target must be in
/// front of the nozzle (x > 0). Returns nullopt when the solution exceeds
/// the servo limits (target skipped).
std::optional<NozzlePose> nozzle_angles(const Eigen::Vector4d& p_nozzle,
                                        const NozzleLimits& limits = {});

/// Unit direction of the spray ray for a pan-tilt pose.
Eigen::Vector3d aim_direction(const NozzlePose& pose);

/// Perpendicular distance from the aim ray (from the nozzle origin) to a
/// target point in nozzle coordinates.
double ray_miss_distance(const NozzlePose& pose, const Eigen::Vector3d& target_nozzle);

struct AngleDelta {
    double dtilt_rad = 0.0;
    double dpan_rad = 0.0;
};

/// Servo increments from the previous aim to the next; applying the delta to
/// prev reproduces next exactly.
AngleDelta incremental_angles(const NozzlePose& prev, const NozzlePose& next);

struct SprayPlan {
    double duration_s = 0.0;
    double volume_ml = 0.0;
    double flow_ml_per_s = 0.0;
};

/// Agro-chemical tank; remaining volume stays within [0, capacity].
class TankState {
public:
    TankState(double capacity_ml, double remaining_ml);

    double capacity_ml() const { return capacity_ml_; }
    double remaining_ml() const { return remaining_ml_; }

    /// Withdraws exactly volume_ml; callers go through plan_spray.
    void drain(double volume_ml);

private:
    double capacity_ml_;
    double remaining_ml_;
};

/// Duration = volume / flow; drains the tank on success. Returns nullopt
/// (spray refused, refill required) when the remaining volume is short.
std::optional<SprayPlan> plan_spray(double volume_ml, double flow_ml_per_s, TankState& tank);

}  // namespace cropspray::targeting
