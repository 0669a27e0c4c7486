#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace cropspray::geodesy {

// WGS-84 ellipsoid. No other ellipsoid is supported.
inline constexpr double kSemiMajorAxisM = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kSemiMinorAxisM = kSemiMajorAxisM * (1.0 - kFlattening);
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);

/// Raised when the iterative ECEF -> geodetic solve fails to settle, which
/// signals a point near the Earth's center.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Geodetic position on the WGS-84 ellipsoid. The constructor normalizes
/// longitude into (-180, 180] and rejects latitudes outside [-90, 90].
struct GeodeticCoord {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double height_m = 0.0;

    GeodeticCoord() = default;
    GeodeticCoord(double lat_deg, double lon_deg, double h_m);
};

/// Earth-centered, Earth-fixed cartesian position, meters.
struct EcefCoord {
    double x_m = 0.0;
    double y_m = 0.0;
    double z_m = 0.0;

    Eigen::Vector3d vec() const { return {x_m, y_m, z_m}; }
    static EcefCoord from_vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// East-north-up position relative to a datum origin, meters.
struct EnuCoord {
    double east_m = 0.0;
    double north_m = 0.0;
    double up_m = 0.0;

    Eigen::Vector3d vec() const { return {east_m, north_m, up_m}; }
    static EnuCoord from_vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// Local tangent-plane anchor. Immutable after construction; caches the
/// origin's ECEF position and the ECEF->ENU direction cosine matrix, both
/// fully determined by the origin.
class Datum {
public:
    explicit Datum(const GeodeticCoord& origin);

    const GeodeticCoord& origin() const { return origin_; }
    const EcefCoord& origin_ecef() const { return origin_ecef_; }
    const Eigen::Matrix3d& rotation_ecef_to_enu() const { return rotation_; }

private:
    GeodeticCoord origin_;
    EcefCoord origin_ecef_;
    Eigen::Matrix3d rotation_;
};

/// Closed-form WGS-84 geodetic -> ECEF conversion.
EcefCoord llh_to_ecef(const GeodeticCoord& g);

/// ECEF -> geodetic. Bowring's closed form seeds a fixed-point refinement
/// that runs until the latitude moves by less than 1e-12 rad; throws
/// ConvergenceError if 20 iterations are not enough.
GeodeticCoord ecef_to_llh(const EcefCoord& e);

/// Rigid map into the datum's tangent plane: rotation applied to the offset
/// from the datum origin. The origin itself maps to (0, 0, 0).
EnuCoord ecef_to_enu(const EcefCoord& e, const Datum& d);

/// Inverse of ecef_to_enu.
EcefCoord enu_to_ecef(const EnuCoord& p, const Datum& d);

EnuCoord llh_to_enu(const GeodeticCoord& g, const Datum& d);

}  // namespace cropspray::geodesy
