#include "cropspray/targeting.hpp"

#include <cmath>
#include <stdexcept>

namespace cropspray::targeting {

CameraModel::CameraModel(double width, double height, double hfov, double vfov)
    : width_px(width), height_px(height), hfov_rad(hfov), vfov_rad(vfov) {
    if (!(width > 0.0 && height > 0.0)) {
        throw std::invalid_argument("CameraModel: resolution must be positive");
    }
    if (!(hfov > 0.0 && hfov < kPi && vfov > 0.0 && vfov < kPi)) {
        throw std::invalid_argument("CameraModel: fov must be in (0, pi)");
    }
}

ViewAngles pixel_to_angles(const CameraModel& cam, double px, double py) {
    if (px < 0.0 || px > cam.width_px || py < 0.0 || py > cam.height_px) {
        throw std::invalid_argument("pixel_to_angles: pixel outside image");
    }
    ViewAngles a;
    a.horizontal_rad = (px - 0.5 * cam.width_px) * (cam.hfov_rad / cam.width_px);
    a.vertical_rad = (py - 0.5 * cam.height_px) * (cam.vfov_rad / cam.height_px);
    return a;
}

Eigen::Vector4d plant_in_camera(double range_m, const ViewAngles& angles) {
    if (!(range_m > 0.0)) {
        throw std::invalid_argument("plant_in_camera: range must be positive");
    }
    if (std::abs(angles.horizontal_rad) >= kPi / 2.0) {
        throw std::invalid_argument("plant_in_camera: point behind the focal plane");
    }
    const double cos_h = std::cos(angles.horizontal_rad);
    return {range_m * cos_h, range_m * std::sin(angles.horizontal_rad),
            -range_m * cos_h * std::tan(angles.vertical_rad), 1.0};
}

Eigen::Matrix4d default_camera_to_nozzle() {
    Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
    h(0, 3) = 0.20;
    h(2, 3) = 0.10;
    return h;
}

Eigen::Vector4d camera_to_nozzle(const Eigen::Vector4d& p_camera, const Eigen::Matrix4d& h) {
    const Eigen::Matrix3d rot = h.topLeftCorner<3, 3>();
    if (((rot.transpose() * rot) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
        h(3, 0) != 0.0 || h(3, 1) != 0.0 || h(3, 2) != 0.0 || h(3, 3) != 1.0) {
        throw std::invalid_argument("camera_to_nozzle: not a rigid homogeneous transform");
    }
    return h * p_camera;
}

std::optional<NozzlePose> nozzle_angles(const Eigen::Vector4d& p_nozzle,
                                        const NozzleLimits& limits) {
    const double x = p_nozzle(0);
    const double y = p_nozzle(1);
    const double z = p_nozzle(2);
    if (!(x > 0.0)) {
        throw std::invalid_argument("nozzle_angles: target not in front of the nozzle");
    }
    NozzlePose pose;
    pose.pan_rad = std::atan2(y, x);
    pose.tilt_rad = std::atan2(z, std::hypot(x, y));
    if (std::abs(pose.pan_rad) > limits.pan_rad || std::abs(pose.tilt_rad) > limits.tilt_rad) {
        return std::nullopt;
    }
    return pose;
}

Eigen::Vector3d aim_direction(const NozzlePose& pose) {
    const double cos_tilt = std::cos(pose.tilt_rad);
    return {cos_tilt * std::cos(pose.pan_rad), cos_tilt * std::sin(pose.pan_rad),
            std::sin(pose.tilt_rad)};
}

double ray_miss_distance(const NozzlePose& pose, const Eigen::Vector3d& target_nozzle) {
    const Eigen::Vector3d dir = aim_direction(pose);
    return (target_nozzle - target_nozzle.dot(dir) * dir).norm();
}

AngleDelta incremental_angles(const NozzlePose& prev, const NozzlePose& next) {
    return AngleDelta{next.tilt_rad - prev.tilt_rad, next.pan_rad - prev.pan_rad};
}

TankState::TankState(double capacity_ml, double remaining_ml)
    : capacity_ml_(capacity_ml), remaining_ml_(remaining_ml) {
    if (!(capacity_ml > 0.0)) {
        throw std::invalid_argument("TankState: capacity must be positive");
    }
    if (remaining_ml < 0.0 || remaining_ml > capacity_ml) {
        throw std::invalid_argument("TankState: remaining outside [0, capacity]");
    }
}

void TankState::drain(double volume_ml) {
    if (volume_ml < 0.0 || volume_ml > remaining_ml_) {
        throw std::invalid_argument("TankState: drain volume outside [0, remaining]");
    }
    remaining_ml_ -= volume_ml;
}

std::optional<SprayPlan> plan_spray(double volume_ml, double flow_ml_per_s, TankState& tank) {
    if (!(volume_ml > 0.0)) {
        throw std::invalid_argument("plan_spray: volume must be positive");
    }
    if (!(flow_ml_per_s > 0.0)) {
        throw std::invalid_argument("plan_spray: flow must be positive");
    }
    if (tank.remaining_ml() < volume_ml) {
        return std::nullopt;  // low tank, refill required
    }
    tank.drain(volume_ml);
    return SprayPlan{volume_ml / flow_ml_per_s, volume_ml, flow_ml_per_s};
}

}  // namespace cropspray::targeting
