#pragma once

#include <Eigen/Core>

#include "cropspray/geodesy.hpp"
#include "cropspray/odometry.hpp"

namespace cropspray::fusion {

/// EKF belief over (x, y, theta). Immutable value; every filter operation
/// returns a new estimate. The factory re-establishes the covariance
/// invariants: symmetric, eigenvalues clamped to be non-negative.
struct StateEstimate {
    odometry::Pose2D mean;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();

    static StateEstimate make(const odometry::Pose2D& mean, const Eigen::Matrix3d& covariance);
};

/// Absolute planar position fix in the navigation frame (up ignored).
struct GpsFix {
    geodesy::EnuCoord position;
    double noise_std_m = 0.0;
    double timestamp_s = 0.0;
};

/// Absolute heading fix, wrapped into (-pi, pi].
struct HeadingFix {
    double theta_rad = 0.0;
    double noise_std_rad = 0.0;
    double timestamp_s = 0.0;
};

/// Process noise scaled by mean per-tick travel:
/// diag((sigma_xy*travel)^2, (sigma_xy*travel)^2, (sigma_theta*travel)^2).
Eigen::Matrix3d travel_scaled_process_noise(double sigma_xy, double sigma_theta,
                                            double mean_travel_m);

/// Dead-reckoning prediction: mean through odometry::propagate, covariance
/// through the analytic motion Jacobian plus process noise.
StateEstimate predict(const StateEstimate& s, const odometry::WheelIncrement& inc,
                      const Eigen::Matrix3d& process_noise);

struct UpdateResult {
    StateEstimate state;
    bool accepted = false;
    double mahalanobis_sq = 0.0;
};

/// Position update, H = [[1,0,0],[0,1,0]]. Fixes whose squared Mahalanobis
/// innovation distance exceeds the chi-square(2, 0.999) gate are rejected
/// and leave the state unchanged.
UpdateResult update_gps(const StateEstimate& s, const GpsFix& fix);

/// Heading update, H = [0,0,1]. The innovation is the shortest signed arc;
/// gate is chi-square(1, 0.999).
UpdateResult update_heading(const StateEstimate& s, const HeadingFix& fix);

/// Normalized estimation error squared against a ground-truth pose, with the
/// heading residual wrapped.
double nees(const StateEstimate& s, const odometry::Pose2D& truth);

}  // namespace cropspray::fusion
