#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cropspray/fusion.hpp"
#include "cropspray/geodesy.hpp"
#include "cropspray/guidance.hpp"
#include "cropspray/odometry.hpp"
#include "cropspray/random.hpp"
#include "cropspray/targeting.hpp"

namespace cropspray::sim {

/// All sensor imperfections in one place. Standard deviations must be
/// non-negative; zero disables the effect.
struct NoiseConfig {
    double encoder_slip_std = 0.0;  // multiplicative, fraction of per-tick wheel travel
    double gps_std_m = 0.0;
    double gps_rate_hz = 5.0;  // rounded to a whole number of ticks per fix
    std::vector<std::pair<double, double>> gps_outages;  // [start_s, end_s) windows
    double imu_std_rad = 0.0;
    double pixel_std_px = 0.0;
    double range_std_m = 0.0;
    double caster_jitter_std_rad = 0.0;  // true-heading disturbance, off by default

    void validate() const;
};

/// Side-mounted camera pair. Optical axes point +90 deg (left camera) and
/// -90 deg (right camera) from the robot heading, at the given height.
struct CameraRig {
    targeting::CameraModel model;
    double height_m = 0.5;
    double min_range_m = 0.3;
    double max_range_m = 3.0;
    double plant_radius_m = 0.10;  // nominal canopy radius for bbox synthesis
};

struct Plant {
    int id = 0;
    geodesy::EnuCoord position;
    double sprayed_volume_ml = 0.0;
};

struct CameraObservation {
    targeting::Detection detection;
    double measured_range_m = 0.0;  // ground-truth camera-plane range plus noise
};

struct SensorBundle {
    odometry::WheelIncrement encoder;
    std::optional<fusion::GpsFix> gps;
    bool gps_due = false;       // a fix was scheduled this tick
    bool gps_in_outage = false; // ...but suppressed by an outage window
    std::optional<fusion::HeadingFix> heading;
    std::vector<CameraObservation> observations;
};

/// Deterministic discrete-time world: exact differential-drive kinematics
/// plus synthesized sensors. Identical seed and configuration produce a
/// bit-identical trajectory; each noise source draws from its own substream
/// so subsystem evaluation order cannot perturb another subsystem.
class WorldState {
public:
    WorldState(const odometry::Pose2D& start, std::vector<Plant> plants,
               std::uint64_t seed, double track_width_m, const CameraRig& rig);

    const odometry::Pose2D& true_pose() const { return true_pose_; }
    std::uint64_t tick() const { return tick_; }
    const std::vector<Plant>& plants() const { return plants_; }
    const CameraRig& rig() const { return rig_; }
    double track_width_m() const { return track_width_m_; }

    /// Advances one tick: true kinematics from the commanded wheel speeds,
    /// then sensor synthesis at the post-move state.
    SensorBundle step(const guidance::GuidanceCommand& cmd, double dt_s,
                      const NoiseConfig& noise);

    /// Synthesizes detections for one camera: every plant inside the range
    /// band and both fields of view, with the pixel center being the exact
    /// linear-map inverse of the true bearing plus Gaussian pixel noise.
    /// Noisy centers that leave the image are dropped.
    std::vector<targeting::Detection> project_plants(targeting::CameraSide side,
                                                     double pixel_std_px);

    /// True plant position in the given camera's frame (x optical axis,
    /// y image right, z up).
    Eigen::Vector3d camera_frame_position(const Plant& plant, targeting::CameraSide side) const;

    void record_spray(int plant_id, double volume_ml);

private:
    odometry::Pose2D true_pose_;
    std::vector<Plant> plants_;
    double track_width_m_;
    CameraRig rig_;
    std::uint64_t tick_ = 0;
    RngPool rng_;
};

}  // namespace cropspray::sim
