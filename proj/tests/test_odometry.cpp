#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cropspray/odometry.hpp"
#include "cropspray/random.hpp"

using namespace cropspray;
using namespace cropspray::odometry;

TEST_CASE("heading_delta") {
    CHECK(heading_delta(WheelIncrement(1.0, 1.0, 0.5)) == 0.0);
    CHECK(heading_delta(WheelIncrement(1.0, 1.1, 0.5)) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(heading_delta(WheelIncrement(1.1, 1.0, 0.5)) == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK_THROWS_AS(WheelIncrement(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(WheelIncrement(1.0, 1.0, -0.5), std::invalid_argument);
}

TEST_CASE("propagate straight motion") {
    const Pose2D p = propagate(Pose2D(0, 0, 0), WheelIncrement(2.0, 2.0, 0.5));
    CHECK(p.x_m == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.y_m == 0.0);
    CHECK(p.theta_rad == 0.0);

    // Frame rotation: straight along +y.
    const Pose2D q = propagate(Pose2D(1, 1, kPi / 2), WheelIncrement(2.0, 2.0, 0.5));
    CHECK(q.x_m == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.y_m == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(q.theta_rad == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("propagate arc, hand-evaluated") {
    // dtheta = 0.2, left-wheel radius 5.0, centerline radius 5.25:
    // dx = 5.25 (sin 0.2 - sin 0), dy = 5.25 (cos 0 - cos 0.2).
    const Pose2D p = propagate(Pose2D(0, 0, 0), WheelIncrement(1.0, 1.1, 0.5));
    CHECK(std::abs(p.x_m - 1.04301) < 1e-5);
    CHECK(std::abs(p.y_m - 0.10465) < 1e-5);
    CHECK(p.theta_rad == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("constant increments stay on the closed-form circle") {
    // Equal arcs around the fixed center (0, R) with R = 5.25.
    const WheelIncrement inc(1.0, 1.1, 0.5);
    const double radius = 5.25;
    Pose2D p(0, 0, 0);
    for (int k = 1; k <= 10000; ++k) {
        p = propagate(p, inc);
        const double dist = std::hypot(p.x_m - 0.0, p.y_m - radius);
        REQUIRE(std::abs(dist - radius) < 1e-9);
    }
    // And the pose angle around the circle telescopes to k * dtheta.
    CHECK(std::abs(wrap_pi(p.theta_rad - wrap_pi(10000 * 0.2))) < 1e-9);
}

TEST_CASE("straight/arc branch continuity at the switch threshold") {
    // At |dtheta| == kStraightEpsRad the arc branch runs; its result must
    // match the straight-line limit computed by hand for the same increment.
    const double w = 0.5;
    const double travel = 0.02;
    const Pose2D start(1, 2, 0.7);
    for (const double sign : {1.0, -1.0}) {
        const double dtheta = sign * kStraightEpsRad;
        const double l = travel - 0.5 * dtheta * w;
        const double r = travel + 0.5 * dtheta * w;
        const WheelIncrement inc(l, r, w);
        REQUIRE(std::abs(heading_delta(inc)) >= kStraightEpsRad * 0.99);

        const Pose2D moved = propagate(start, inc);
        const double mean_travel = 0.5 * (l + r);
        const double straight_x = start.x_m + mean_travel * std::cos(start.theta_rad);
        const double straight_y = start.y_m + mean_travel * std::sin(start.theta_rad);

        CHECK(std::abs(moved.x_m - straight_x) < 1e-9);
        CHECK(std::abs(moved.y_m - straight_y) < 1e-9);
    }
}

TEST_CASE("straight composition: two half steps equal one full step") {
    RandomStream rng(1234);
    for (int i = 0; i < 200; ++i) {
        const Pose2D start(rng.gaussian(0, 10), rng.gaussian(0, 10), rng.gaussian(0, 2));
        const double travel = rng.gaussian(0, 0.05);
        const WheelIncrement half(travel, travel, 0.5);
        const WheelIncrement full(2 * travel, 2 * travel, 0.5);
        const Pose2D two = propagate(propagate(start, half), half);
        const Pose2D one = propagate(start, full);
        CHECK(std::abs(two.x_m - one.x_m) < 1e-12);
        CHECK(std::abs(two.y_m - one.y_m) < 1e-12);
        CHECK(std::abs(wrap_pi(two.theta_rad - one.theta_rad)) < 1e-12);
    }
}

TEST_CASE("rigid-motion equivariance") {
    RandomStream rng(777);
    for (int i = 0; i < 500; ++i) {
        const double tx = rng.gaussian(0, 5);
        const double ty = rng.gaussian(0, 5);
        const double rot = rng.gaussian(0, 2);
        const WheelIncrement inc(rng.gaussian(0.01, 0.01), rng.gaussian(0.01, 0.01), 0.5);

        const Pose2D from_origin = propagate(Pose2D(0, 0, 0), inc);
        // Apply the rigid motion g = (rot, tx, ty) to the result...
        const double gx = tx + std::cos(rot) * from_origin.x_m - std::sin(rot) * from_origin.y_m;
        const double gy = ty + std::sin(rot) * from_origin.x_m + std::cos(rot) * from_origin.y_m;
        const double gtheta = from_origin.theta_rad + rot;

        // ...and compare against propagating from the transformed start.
        const Pose2D from_moved = propagate(Pose2D(tx, ty, rot), inc);
        CHECK(std::abs(from_moved.x_m - gx) < 1e-12);
        CHECK(std::abs(from_moved.y_m - gy) < 1e-12);
        CHECK(std::abs(wrap_pi(from_moved.theta_rad - gtheta)) < 1e-12);
    }
}

TEST_CASE("heading always wrapped") {
    Pose2D p(0, 0, 3.0);
    const WheelIncrement spin(0.0, 0.5, 0.5);  // +1 rad per step
    for (int i = 0; i < 20; ++i) {
        p = propagate(p, spin);
        CHECK(p.theta_rad > -kPi);
        CHECK(p.theta_rad <= kPi);
    }
}

TEST_CASE("travel limit guard") {
    const WheelIncrement inc(0.004, 0.0041, 0.5);
    CHECK(inc.within_travel_limit(0.01));
    CHECK_FALSE(inc.within_travel_limit(0.004));
    CHECK_FALSE(WheelIncrement(-0.02, 0.0, 0.5).within_travel_limit(0.01));
}
