#include "cropspray/geodesy.hpp"

#include <cmath>

#include "cropspray/angles.hpp"

namespace cropspray::geodesy {

namespace {

double normalize_longitude(double lon_deg) {
    double w = std::remainder(lon_deg, 360.0);
    if (w <= -180.0) {
        w += 360.0;
    }
    return w;
}

}  // namespace

GeodeticCoord::GeodeticCoord(double lat_deg, double lon_deg, double h_m)
    : latitude_deg(lat_deg), longitude_deg(normalize_longitude(lon_deg)), height_m(h_m) {
    if (!(std::isfinite(lat_deg) && std::isfinite(lon_deg) && std::isfinite(h_m))) {
        throw std::invalid_argument("GeodeticCoord: non-finite component");
    }
    if (lat_deg < -90.0 || lat_deg > 90.0) {
        throw std::invalid_argument("GeodeticCoord: latitude outside [-90, 90] deg");
    }
}

EcefCoord llh_to_ecef(const GeodeticCoord& g) {
    const double lat = deg_to_rad(g.latitude_deg);
    const double lon = deg_to_rad(g.longitude_deg);
    const double sin_lat = std::sin(lat);
    const double cos_lat = std::cos(lat);

    // Prime vertical radius of curvature.
    const double n = kSemiMajorAxisM / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);

    return EcefCoord{(n + g.height_m) * cos_lat * std::cos(lon),
                     (n + g.height_m) * cos_lat * std::sin(lon),
                     (n * (1.0 - kEccentricitySq) + g.height_m) * sin_lat};
}

GeodeticCoord ecef_to_llh(const EcefCoord& e) {
    const double p = std::hypot(e.x_m, e.y_m);
    const double z = e.z_m;
    if (p == 0.0 && z == 0.0) {
        throw std::invalid_argument("ecef_to_llh: zero vector");
    }

    // On the polar axis the solution is exact.
    if (p < 1e-9) {
        const double lat = (z >= 0.0) ? 90.0 : -90.0;
        return GeodeticCoord(lat, 0.0, std::abs(z) - kSemiMinorAxisM);
    }

    const double lon = std::atan2(e.y_m, e.x_m);

    // Bowring's parametric-latitude seed.
    const double ep_sq = kEccentricitySq / (1.0 - kEccentricitySq);
    const double beta = std::atan2(z * kSemiMajorAxisM, p * kSemiMinorAxisM);
    double lat = std::atan2(z + ep_sq * kSemiMinorAxisM * std::pow(std::sin(beta), 3),
                            p - kEccentricitySq * kSemiMajorAxisM * std::pow(std::cos(beta), 3));

    constexpr int kMaxIterations = 20;
    constexpr double kLatToleranceRad = 1e-12;
    double h = 0.0;
    bool converged = false;
    for (int i = 0; i < kMaxIterations; ++i) {
        const double sin_lat = std::sin(lat);
        const double cos_lat = std::cos(lat);
        const double n = kSemiMajorAxisM / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
        h = p * cos_lat + z * sin_lat - kSemiMajorAxisM * std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
        const double next = std::atan2(z, p * (1.0 - kEccentricitySq * n / (n + h)));
        const double delta = std::abs(next - lat);
        lat = next;
        if (delta < kLatToleranceRad) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("ecef_to_llh: no convergence after 20 iterations (point near Earth center?)");
    }

    const double sin_lat = std::sin(lat);
    const double cos_lat = std::cos(lat);
    h = p * cos_lat + z * sin_lat - kSemiMajorAxisM * std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
    return GeodeticCoord(rad_to_deg(lat), rad_to_deg(lon), h);
}

Datum::Datum(const GeodeticCoord& origin) : origin_(origin), origin_ecef_(llh_to_ecef(origin)) {
    const double lat = deg_to_rad(origin.latitude_deg);
    const double lon = deg_to_rad(origin.longitude_deg);
    const double sin_lat = std::sin(lat);
    const double cos_lat = std::cos(lat);
    const double sin_lon = std::sin(lon);
    const double cos_lon = std::cos(lon);

    rotation_ << -sin_lon, cos_lon, 0.0,
                 -sin_lat * cos_lon, -sin_lat * sin_lon, cos_lat,
                 cos_lat * cos_lon, cos_lat * sin_lon, sin_lat;
}

EnuCoord ecef_to_enu(const EcefCoord& e, const Datum& d) {
    const Eigen::Vector3d delta = e.vec() - d.origin_ecef().vec();
    return EnuCoord::from_vec(d.rotation_ecef_to_enu() * delta);
}

EcefCoord enu_to_ecef(const EnuCoord& p, const Datum& d) {
    const Eigen::Vector3d ecef =
        d.origin_ecef().vec() + d.rotation_ecef_to_enu().transpose() * p.vec();
    return EcefCoord::from_vec(ecef);
}

EnuCoord llh_to_enu(const GeodeticCoord& g, const Datum& d) {
    return ecef_to_enu(llh_to_ecef(g), d);
}

}  // namespace cropspray::geodesy
