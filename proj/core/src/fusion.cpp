#include "cropspray/fusion.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "cropspray/stats.hpp"

namespace cropspray::fusion {

namespace {

Eigen::Matrix3d symmetrized(const Eigen::Matrix3d& m) {
    return 0.5 * (m + m.transpose());
}

}  // namespace

StateEstimate StateEstimate::make(const odometry::Pose2D& mean, const Eigen::Matrix3d& covariance) {
    Eigen::Matrix3d cov = symmetrized(covariance);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    if (eig.eigenvalues().minCoeff() < 0.0) {
        const Eigen::Vector3d clamped = eig.eigenvalues().cwiseMax(0.0);
        cov = symmetrized(eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose());
    }
    return StateEstimate{mean, cov};
}

Eigen::Matrix3d travel_scaled_process_noise(double sigma_xy, double sigma_theta,
                                            double mean_travel_m) {
    const double pos = sigma_xy * mean_travel_m;
    const double ang = sigma_theta * mean_travel_m;
    Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
    q(0, 0) = pos * pos;
    q(1, 1) = pos * pos;
    q(2, 2) = ang * ang;
    return q;
}

StateEstimate predict(const StateEstimate& s, const odometry::WheelIncrement& inc,
                      const Eigen::Matrix3d& process_noise) {
    const odometry::Pose2D mean = odometry::propagate(s.mean, inc);
    const Eigen::Matrix3d f = odometry::propagate_pose_jacobian(s.mean, inc);
    const Eigen::Matrix3d cov = f * s.covariance * f.transpose() + process_noise;
    return StateEstimate::make(mean, cov);
}

namespace {

// Joseph-form measurement update shared by both sensors. H picks rows of the
// state; the innovation is supplied pre-wrapped where needed.
template <int Dim>
StateEstimate apply_update(const StateEstimate& s, const Eigen::Matrix<double, Dim, 3>& h,
                           const Eigen::Matrix<double, Dim, 1>& innovation,
                           const Eigen::Matrix<double, Dim, Dim>& noise) {
    const Eigen::Matrix<double, Dim, Dim> innovation_cov =
        h * s.covariance * h.transpose() + noise;
    const Eigen::Matrix<double, 3, Dim> gain =
        s.covariance * h.transpose() * innovation_cov.inverse();
    const Eigen::Vector3d correction = gain * innovation;

    const odometry::Pose2D mean(s.mean.x_m + correction(0), s.mean.y_m + correction(1),
                                s.mean.theta_rad + correction(2));
    const Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - gain * h;
    const Eigen::Matrix3d cov =
        ikh * s.covariance * ikh.transpose() + gain * noise * gain.transpose();
    return StateEstimate::make(mean, cov);
}

}  // namespace

UpdateResult update_gps(const StateEstimate& s, const GpsFix& fix) {
    if (!(fix.noise_std_m > 0.0)) {
        throw std::invalid_argument("update_gps: noise std must be positive");
    }

    Eigen::Matrix<double, 2, 3> h = Eigen::Matrix<double, 2, 3>::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    const Eigen::Vector2d innovation(fix.position.east_m - s.mean.x_m,
                                     fix.position.north_m - s.mean.y_m);
    const Eigen::Matrix2d noise =
        Eigen::Vector2d::Constant(fix.noise_std_m * fix.noise_std_m).asDiagonal();

    const Eigen::Matrix2d innovation_cov = h * s.covariance * h.transpose() + noise;
    const double d2 = innovation.dot(innovation_cov.inverse() * innovation);
    if (d2 > stats::kChi2Gate2Dof) {
        return UpdateResult{s, false, d2};
    }
    return UpdateResult{apply_update<2>(s, h, innovation, noise), true, d2};
}

UpdateResult update_heading(const StateEstimate& s, const HeadingFix& fix) {
    if (!(fix.noise_std_rad > 0.0)) {
        throw std::invalid_argument("update_heading: noise std must be positive");
    }

    Eigen::Matrix<double, 1, 3> h;
    h << 0.0, 0.0, 1.0;
    Eigen::Matrix<double, 1, 1> innovation;
    innovation(0) = angle_diff(fix.theta_rad, s.mean.theta_rad);
    Eigen::Matrix<double, 1, 1> noise;
    noise(0) = fix.noise_std_rad * fix.noise_std_rad;

    const double innovation_var = s.covariance(2, 2) + noise(0);
    const double d2 = innovation(0) * innovation(0) / innovation_var;
    if (d2 > stats::kChi2Gate1Dof) {
        return UpdateResult{s, false, d2};
    }
    return UpdateResult{apply_update<1>(s, h, innovation, noise), true, d2};
}

double nees(const StateEstimate& s, const odometry::Pose2D& truth) {
    const Eigen::Vector3d err(s.mean.x_m - truth.x_m, s.mean.y_m - truth.y_m,
                              angle_diff(s.mean.theta_rad, truth.theta_rad));
    return err.dot(s.covariance.inverse() * err);
}

}  // namespace cropspray::fusion
