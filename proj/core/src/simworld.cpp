#include "cropspray/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cropspray::sim {

namespace {

bool in_outage(const std::vector<std::pair<double, double>>& windows, double t_s) {
    for (const auto& [start, end] : windows) {
        if (t_s >= start && t_s < end) {
            return true;
        }
    }
    return false;
}

}  // namespace

void NoiseConfig::validate() const {
    const double stds[] = {encoder_slip_std, gps_std_m,  imu_std_rad,
                           pixel_std_px,     range_std_m, caster_jitter_std_rad};
    for (double s : stds) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("NoiseConfig: standard deviations must be >= 0");
        }
    }
    if (!(gps_rate_hz > 0.0)) {
        throw std::invalid_argument("NoiseConfig: gps rate must be positive");
    }
    for (const auto& [start, end] : gps_outages) {
        if (!(end > start) || start < 0.0) {
            throw std::invalid_argument("NoiseConfig: outage window must satisfy 0 <= start < end");
        }
    }
}

WorldState::WorldState(const odometry::Pose2D& start, std::vector<Plant> plants,
                       std::uint64_t seed, double track_width_m, const CameraRig& rig)
    : true_pose_(start),
      plants_(std::move(plants)),
      track_width_m_(track_width_m),
      rig_(rig),
      rng_(seed) {
    if (!(track_width_m > 0.0)) {
        throw std::invalid_argument("WorldState: track width must be positive");
    }
    if (!(rig.min_range_m > 0.0 && rig.max_range_m > rig.min_range_m)) {
        throw std::invalid_argument("WorldState: camera range band invalid");
    }
}

SensorBundle WorldState::step(const guidance::GuidanceCommand& cmd, double dt_s,
                              const NoiseConfig& noise) {
    if (!(dt_s > 0.0)) {
        throw std::invalid_argument("WorldState::step: dt must be positive");
    }
    noise.validate();

    // True kinematics share the dead-reckoning propagation, on noiseless
    // wheel travel.
    const double left_true = cmd.v_left_mps * dt_s;
    const double right_true = cmd.v_right_mps * dt_s;
    true_pose_ = odometry::propagate(
        true_pose_, odometry::WheelIncrement(left_true, right_true, track_width_m_));
    if (noise.caster_jitter_std_rad > 0.0) {
        true_pose_ = odometry::Pose2D(
            true_pose_.x_m, true_pose_.y_m,
            true_pose_.theta_rad +
                rng_.stream(RngPool::Stream::kCaster).gaussian(0.0, noise.caster_jitter_std_rad));
    }

    SensorBundle bundle;

    // Encoders: multiplicative slip per wheel.
    auto& enc_rng = rng_.stream(RngPool::Stream::kEncoder);
    const double left_meas = left_true * (1.0 + enc_rng.gaussian(0.0, noise.encoder_slip_std));
    const double right_meas = right_true * (1.0 + enc_rng.gaussian(0.0, noise.encoder_slip_std));
    bundle.encoder = odometry::WheelIncrement(left_meas, right_meas, track_width_m_);

    const double t_now = static_cast<double>(tick_ + 1) * dt_s;

    // GPS on its own cadence, suppressed inside outage windows. The fix
    // schedule is indexed so that fix k is due at k / rate seconds.
    const auto period_ticks =
        static_cast<std::uint64_t>(std::llround(1.0 / (noise.gps_rate_hz * dt_s)));
    if (period_ticks > 0 && (tick_ + 1) % period_ticks == 0) {
        bundle.gps_due = true;
        const double fix_index = static_cast<double>((tick_ + 1) / period_ticks);
        const double fix_time = fix_index / noise.gps_rate_hz;
        if (in_outage(noise.gps_outages, fix_time)) {
            bundle.gps_in_outage = true;
        } else {
            auto& gps_rng = rng_.stream(RngPool::Stream::kGps);
            geodesy::EnuCoord pos;
            pos.east_m = true_pose_.x_m + gps_rng.gaussian(0.0, noise.gps_std_m);
            pos.north_m = true_pose_.y_m + gps_rng.gaussian(0.0, noise.gps_std_m);
            pos.up_m = 0.0;
            // RTK-grade fixes never report a perfect std; keep the filter's
            // measurement model strictly positive.
            const double reported_std = std::max(noise.gps_std_m, 1e-6);
            bundle.gps = fusion::GpsFix{pos, reported_std, t_now};
        }
    }

    // IMU heading every tick.
    auto& imu_rng = rng_.stream(RngPool::Stream::kImu);
    const double heading_meas =
        wrap_pi(true_pose_.theta_rad + imu_rng.gaussian(0.0, noise.imu_std_rad));
    bundle.heading = fusion::HeadingFix{heading_meas, std::max(noise.imu_std_rad, 1e-6), t_now};

    // Cameras, left then right, plants in id order.
    auto& range_rng = rng_.stream(RngPool::Stream::kRange);
    for (const auto side : {targeting::CameraSide::kLeft, targeting::CameraSide::kRight}) {
        for (auto& det : project_plants(side, noise.pixel_std_px)) {
            const Plant* plant = nullptr;
            for (const auto& p : plants_) {
                if (p.id == det.plant_id) {
                    plant = &p;
                    break;
                }
            }
            const Eigen::Vector3d cam = camera_frame_position(*plant, side);
            const double true_range = std::hypot(cam.x(), cam.y());
            const double measured =
                std::max(1e-3, true_range + range_rng.gaussian(0.0, noise.range_std_m));
            bundle.observations.push_back(CameraObservation{det, measured});
        }
    }

    ++tick_;
    return bundle;
}

Eigen::Vector3d WorldState::camera_frame_position(const Plant& plant,
                                                  targeting::CameraSide side) const {
    const double axis_yaw =
        true_pose_.theta_rad + (side == targeting::CameraSide::kLeft ? kPi / 2.0 : -kPi / 2.0);
    const Eigen::Vector2d axis(std::cos(axis_yaw), std::sin(axis_yaw));
    const Eigen::Vector2d image_right(axis.y(), -axis.x());  // 90 deg clockwise from the axis

    const Eigen::Vector2d delta(plant.position.east_m - true_pose_.x_m,
                                plant.position.north_m - true_pose_.y_m);
    return {delta.dot(axis), delta.dot(image_right), plant.position.up_m - rig_.height_m};
}

std::vector<targeting::Detection> WorldState::project_plants(targeting::CameraSide side,
                                                             double pixel_std_px) {
    std::vector<targeting::Detection> detections;
    auto& pixel_rng = rng_.stream(RngPool::Stream::kPixel);
    const auto& cam = rig_.model;

    for (const auto& plant : plants_) {
        const Eigen::Vector3d p = camera_frame_position(plant, side);
        if (p.x() <= 0.0) {
            continue;  // behind the camera
        }
        const double range = std::hypot(p.x(), p.y());
        if (range < rig_.min_range_m || range > rig_.max_range_m) {
            continue;
        }
        const double horizontal = std::atan2(p.y(), p.x());
        const double vertical = std::atan2(-p.z(), p.x());
        if (std::abs(horizontal) > 0.5 * cam.hfov_rad || std::abs(vertical) > 0.5 * cam.vfov_rad) {
            continue;
        }

        // Exact inverse of the linear pixel/angle map, then pixel noise.
        double cx = 0.5 * cam.width_px + horizontal * (cam.width_px / cam.hfov_rad);
        double cy = 0.5 * cam.height_px + vertical * (cam.height_px / cam.vfov_rad);
        cx += pixel_rng.gaussian(0.0, pixel_std_px);
        cy += pixel_rng.gaussian(0.0, pixel_std_px);
        if (cx < 0.0 || cx > cam.width_px || cy < 0.0 || cy > cam.height_px) {
            continue;  // noisy center left the sensor
        }

        // Bbox from the nominal canopy radius, shrunk symmetrically so the
        // center stays the midpoint inside the image.
        const double half_angle = std::atan(rig_.plant_radius_m / range);
        double half_x = half_angle * (cam.width_px / cam.hfov_rad);
        double half_y = half_angle * (cam.height_px / cam.vfov_rad);
        half_x = std::min({half_x, cx, cam.width_px - cx});
        half_y = std::min({half_y, cy, cam.height_px - cy});

        targeting::Detection det;
        det.x_min_px = cx - half_x;
        det.x_max_px = cx + half_x;
        det.y_min_px = cy - half_y;
        det.y_max_px = cy + half_y;
        det.center_x_px = cx;
        det.center_y_px = cy;
        det.confidence = std::clamp(
            1.0 - 0.1 * (range - rig_.min_range_m) / (rig_.max_range_m - rig_.min_range_m), 0.0,
            1.0);
        det.side = side;
        det.plant_id = plant.id;
        detections.push_back(det);
    }
    return detections;
}

void WorldState::record_spray(int plant_id, double volume_ml) {
    for (auto& plant : plants_) {
        if (plant.id == plant_id) {
            plant.sprayed_volume_ml += volume_ml;
            return;
        }
    }
    throw std::invalid_argument("record_spray: unknown plant id");
}

}  // namespace cropspray::sim
