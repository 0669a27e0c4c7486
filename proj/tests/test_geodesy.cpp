#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "cropspray/angles.hpp"
#include "cropspray/geodesy.hpp"
#include "cropspray/random.hpp"
#include "cropspray/survey.hpp"

using namespace cropspray;
using namespace cropspray::geodesy;

namespace {

// Test-only inverse: 2-D Newton on (lat, h) driven purely by the forward
// model with a finite-difference Jacobian. Independent of the Bowring-seeded
// fixed point used by ecef_to_llh.
void oracle_invert(const EcefCoord& e, double& lat_deg, double& lon_deg, double& h_m) {
    const double p_target = std::hypot(e.x_m, e.y_m);
    const double z_target = e.z_m;
    lon_deg = rad_to_deg(std::atan2(e.y_m, e.x_m));

    auto forward = [](double lat_rad, double h, double& p, double& z) {
        const double s = std::sin(lat_rad);
        const double c = std::cos(lat_rad);
        const double n = kSemiMajorAxisM / std::sqrt(1.0 - kEccentricitySq * s * s);
        p = (n + h) * c;
        z = (n * (1.0 - kEccentricitySq) + h) * s;
    };

    double lat = std::atan2(z_target, p_target);
    double h = e.vec().norm() - kSemiMajorAxisM;
    for (int i = 0; i < 100; ++i) {
        double p0;
        double z0;
        forward(lat, h, p0, z0);
        const double rp = p0 - p_target;
        const double rz = z0 - z_target;
        const double dl = 1e-9;
        const double dh = 1e-3;
        double p1, z1, p2, z2;
        forward(lat + dl, h, p1, z1);
        forward(lat, h + dh, p2, z2);
        const double j11 = (p1 - p0) / dl;
        const double j12 = (p2 - p0) / dh;
        const double j21 = (z1 - z0) / dl;
        const double j22 = (z2 - z0) / dh;
        const double det = j11 * j22 - j12 * j21;
        const double step_lat = (rp * j22 - rz * j12) / det;
        const double step_h = (rz * j11 - rp * j21) / det;
        lat -= step_lat;
        h -= step_h;
        if (std::abs(step_lat) < 1e-15 && std::abs(step_h) < 1e-10) {
            break;
        }
    }
    lat_deg = rad_to_deg(lat);
    h_m = h;
}

const EcefCoord kPoint1Actual{1110825.867, 6235329.584, 750012.164};
const EcefCoord kPoint2Actual{1110706.361, 6235347.832, 750033.936};

}  // namespace

TEST_CASE("llh_to_ecef analytic anchors") {
    const EcefCoord equator = llh_to_ecef(GeodeticCoord(0.0, 0.0, 0.0));
    CHECK(equator.x_m == doctest::Approx(6378137.0).epsilon(1e-12));
    CHECK(std::abs(equator.y_m) < 1e-9);
    CHECK(std::abs(equator.z_m) < 1e-9);

    const EcefCoord pole = llh_to_ecef(GeodeticCoord(90.0, 0.0, 0.0));
    CHECK(std::abs(pole.x_m) < 1e-4);
    CHECK(std::abs(pole.y_m) < 1e-4);
    CHECK(std::abs(pole.z_m - 6356752.3142) < 1e-4);
}

TEST_CASE("checkpoint 1 geodetic coordinates, frozen from the Newton oracle") {
    double lat, lon, h;
    oracle_invert(kPoint1Actual, lat, lon, h);
    // Frozen oracle output.
    CHECK(lat == doctest::Approx(6.798593741592828).epsilon(1e-12));
    CHECK(lon == doctest::Approx(79.898713021760429).epsilon(1e-12));
    CHECK(h == doctest::Approx(-82.554219790).epsilon(1e-9));

    // Round trip through the forward implementation reproduces the ECEF
    // checkpoint well inside 1e-3 m.
    const EcefCoord rt = llh_to_ecef(GeodeticCoord(lat, lon, h));
    CHECK(std::abs(rt.x_m - kPoint1Actual.x_m) < 1e-3);
    CHECK(std::abs(rt.y_m - kPoint1Actual.y_m) < 1e-3);
    CHECK(std::abs(rt.z_m - kPoint1Actual.z_m) < 1e-3);

    // The implementation's own inverse agrees with the oracle.
    const GeodeticCoord g = ecef_to_llh(kPoint1Actual);
    CHECK(g.latitude_deg == doctest::Approx(lat).epsilon(1e-12));
    CHECK(g.longitude_deg == doctest::Approx(lon).epsilon(1e-12));
    CHECK(g.height_m == doctest::Approx(h).epsilon(1e-6));
}

TEST_CASE("ecef_to_llh anchors and symmetry") {
    const GeodeticCoord equator = ecef_to_llh(EcefCoord{6378137.0, 0.0, 0.0});
    CHECK(std::abs(equator.latitude_deg) < 1e-12);
    CHECK(std::abs(equator.longitude_deg) < 1e-12);
    CHECK(std::abs(equator.height_m) < 1e-9);

    const GeodeticCoord east = ecef_to_llh(EcefCoord{0.0, 6378137.0, 0.0});
    CHECK(std::abs(east.latitude_deg) < 1e-12);
    CHECK(east.longitude_deg == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(std::abs(east.height_m) < 1e-9);
}

TEST_CASE("checkpoint 2 round trip") {
    const GeodeticCoord g = ecef_to_llh(kPoint2Actual);
    const EcefCoord rt = llh_to_ecef(g);
    CHECK(std::abs(rt.x_m - kPoint2Actual.x_m) < 1e-6);
    CHECK(std::abs(rt.y_m - kPoint2Actual.y_m) < 1e-6);
    CHECK(std::abs(rt.z_m - kPoint2Actual.z_m) < 1e-6);
}

TEST_CASE("round trip identity over random geodetic samples") {
    RandomStream rng(20240511);
    for (int i = 0; i < 10000; ++i) {
        const double lat = -89.0 + 178.0 * rng.uniform();
        const double lon = -180.0 + 360.0 * rng.uniform();
        const double h = -10000.0 + 20000.0 * rng.uniform();
        const GeodeticCoord g(lat, lon, h);
        const EcefCoord e = llh_to_ecef(g);
        // Near-surface points stay inside the Earth-radius sanity band.
        CHECK(e.vec().norm() > 6.0e6);
        CHECK(e.vec().norm() < 6.5e6);
        const GeodeticCoord back = ecef_to_llh(e);
        CHECK(std::abs(back.latitude_deg - g.latitude_deg) < 1e-9);
        CHECK(std::abs(back.longitude_deg - g.longitude_deg) < 1e-9);
        CHECK(std::abs(back.height_m - g.height_m) < 1e-6);
    }
}

TEST_CASE("ecef_to_llh error paths") {
    CHECK_THROWS_AS(ecef_to_llh(EcefCoord{0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ecef_to_llh(EcefCoord{100.0, 100.0, 100.0}), ConvergenceError);
}

TEST_CASE("GeodeticCoord invariants") {
    CHECK(GeodeticCoord(0.0, 270.0, 0.0).longitude_deg == doctest::Approx(-90.0));
    CHECK(GeodeticCoord(0.0, -180.0, 0.0).longitude_deg == doctest::Approx(180.0));
    CHECK(GeodeticCoord(0.0, 180.0, 0.0).longitude_deg == doctest::Approx(180.0));
    CHECK(GeodeticCoord(0.0, 540.0, 0.0).longitude_deg == doctest::Approx(180.0));
    CHECK_THROWS_AS(GeodeticCoord(90.001, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GeodeticCoord(-90.001, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("datum cache is orthonormal and bit-reproducible") {
    const GeodeticCoord origin(6.798593741592828, 79.898713021760429, -82.554219790);
    const Datum a(origin);
    const Datum b(origin);

    const Eigen::Matrix3d gram = a.rotation_ecef_to_enu().transpose() * a.rotation_ecef_to_enu();
    CHECK((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);

    CHECK(std::memcmp(a.rotation_ecef_to_enu().data(), b.rotation_ecef_to_enu().data(),
                      9 * sizeof(double)) == 0);
    CHECK(a.origin_ecef().x_m == b.origin_ecef().x_m);
    CHECK(a.origin_ecef().y_m == b.origin_ecef().y_m);
    CHECK(a.origin_ecef().z_m == b.origin_ecef().z_m);
}

TEST_CASE("ecef_to_enu maps the datum origin to zero and preserves distances") {
    const Datum datum(ecef_to_llh(kPoint1Actual));

    const EnuCoord origin = ecef_to_enu(datum.origin_ecef(), datum);
    CHECK(std::abs(origin.east_m) < 1e-9);
    CHECK(std::abs(origin.north_m) < 1e-9);
    CHECK(std::abs(origin.up_m) < 1e-9);

    // Isometry on the checkpoint pair.
    const EnuCoord e1 = ecef_to_enu(kPoint1Actual, datum);
    const EnuCoord e2 = ecef_to_enu(kPoint2Actual, datum);
    const double d_enu = (e1.vec() - e2.vec()).norm();
    const double d_ecef = (kPoint1Actual.vec() - kPoint2Actual.vec()).norm();
    CHECK(std::abs(d_enu - d_ecef) / d_ecef < 1e-9);

    // And over random nearby pairs.
    RandomStream rng(99);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector3d base = kPoint1Actual.vec();
        const Eigen::Vector3d p = base + Eigen::Vector3d(rng.gaussian(0, 100), rng.gaussian(0, 100),
                                                         rng.gaussian(0, 100));
        const Eigen::Vector3d q = base + Eigen::Vector3d(rng.gaussian(0, 100), rng.gaussian(0, 100),
                                                         rng.gaussian(0, 100));
        const double d1 = (ecef_to_enu(EcefCoord::from_vec(p), datum).vec() -
                           ecef_to_enu(EcefCoord::from_vec(q), datum).vec())
                              .norm();
        const double d2 = (p - q).norm();
        CHECK(std::abs(d1 - d2) <= 1e-9 * std::max(1.0, d2));
    }
}

TEST_CASE("enu/ecef round trip") {
    const Datum datum(GeodeticCoord(6.8, 79.9, 10.0));
    RandomStream rng(7);
    for (int i = 0; i < 100; ++i) {
        const EnuCoord p{rng.gaussian(0, 50), rng.gaussian(0, 50), rng.gaussian(0, 5)};
        const EnuCoord back = ecef_to_enu(enu_to_ecef(p, datum), datum);
        CHECK(std::abs(back.east_m - p.east_m) < 1e-9);
        CHECK(std::abs(back.north_m - p.north_m) < 1e-9);
        CHECK(std::abs(back.up_m - p.up_m) < 1e-9);
    }
}

TEST_CASE("rtk survey checkpoints reproduce the reference errors") {
    const auto report = mission::evaluate_rtk_survey();
    CHECK(std::abs(report.horizontal_error_m[0] - 0.032) <= 0.001);
    CHECK(std::abs(report.horizontal_error_m[1] - 0.058) <= 0.001);
    CHECK(std::abs(report.mean_horizontal_error_m - 0.045) <= 0.001);
    CHECK(report.within_reference);

    // 3-D norms carried for transparency.
    CHECK(report.full_error_m[0] == doctest::Approx(0.073).epsilon(0.02));
    CHECK(report.full_error_m[1] == doctest::Approx(0.0745).epsilon(0.02));

    // A point compared against itself has zero error.
    const auto& pts = mission::rtk_survey_points();
    const double dx = pts[0].actual.x_m - pts[0].actual.x_m;
    const double dy = pts[0].actual.y_m - pts[0].actual.y_m;
    CHECK(std::hypot(dx, dy) == 0.0);
}
