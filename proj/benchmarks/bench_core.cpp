#include <benchmark/benchmark.h>

#include "cropspray/fusion.hpp"
#include "cropspray/geodesy.hpp"
#include "cropspray/guidance.hpp"
#include "cropspray/odometry.hpp"
#include "cropspray/simworld.hpp"
#include "cropspray/targeting.hpp"

using namespace cropspray;

static void BM_LlhToEcef(benchmark::State& state) {
    const geodesy::GeodeticCoord g(6.7986, 79.8987, 5.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(geodesy::llh_to_ecef(g));
    }
}
BENCHMARK(BM_LlhToEcef);

static void BM_EcefToLlh(benchmark::State& state) {
    const geodesy::EcefCoord e{1110825.867, 6235329.584, 750012.164};
    for (auto _ : state) {
        benchmark::DoNotOptimize(geodesy::ecef_to_llh(e));
    }
}
BENCHMARK(BM_EcefToLlh);

static void BM_OdometryPropagate(benchmark::State& state) {
    odometry::Pose2D pose(0, 0, 0);
    const odometry::WheelIncrement inc(0.0040, 0.0041, 0.5);
    for (auto _ : state) {
        pose = odometry::propagate(pose, inc);
        benchmark::DoNotOptimize(pose);
    }
}
BENCHMARK(BM_OdometryPropagate);

static void BM_EkfPredictUpdate(benchmark::State& state) {
    fusion::StateEstimate est =
        fusion::StateEstimate::make(odometry::Pose2D(0, 0, 0), Eigen::Matrix3d::Identity() * 1e-4);
    const odometry::WheelIncrement inc(0.0040, 0.0041, 0.5);
    const Eigen::Matrix3d q = fusion::travel_scaled_process_noise(0.015, 0.057, 0.004);
    fusion::GpsFix fix;
    fix.noise_std_m = 0.045;
    for (auto _ : state) {
        est = fusion::predict(est, inc, q);
        fix.position = {est.mean.x_m, est.mean.y_m, 0.0};
        est = fusion::update_gps(est, fix).state;
        benchmark::DoNotOptimize(est);
    }
}
BENCHMARK(BM_EkfPredictUpdate);

static void BM_GuidanceTick(benchmark::State& state) {
    const guidance::PlannedPath path({geodesy::EnuCoord{0, 0, 0}, geodesy::EnuCoord{12, 0, 0},
                                      geodesy::EnuCoord{12, 4, 0}, geodesy::EnuCoord{0, 4, 0}});
    const odometry::Pose2D pose(3.0, 0.1, 0.01);
    for (auto _ : state) {
        double progress = 2.0;
        const auto ref = guidance::reference_point(path, pose, 1.0, progress);
        const auto arc = guidance::arc_to_reference(pose, ref->point, 1.0);
        benchmark::DoNotOptimize(guidance::wheel_speeds(arc.curvature_inv_m, 0.2, 0.5, 0.5));
    }
}
BENCHMARK(BM_GuidanceTick);

static void BM_NozzleSolve(benchmark::State& state) {
    const Eigen::Matrix4d h = targeting::default_camera_to_nozzle();
    const targeting::CameraModel cam;
    for (auto _ : state) {
        const auto angles = targeting::pixel_to_angles(cam, 700.0, 500.0);
        const auto pose = targeting::nozzle_angles(
            targeting::camera_to_nozzle(targeting::plant_in_camera(0.9, angles), h));
        benchmark::DoNotOptimize(pose);
    }
}
BENCHMARK(BM_NozzleSolve);

static void BM_WorldStep(benchmark::State& state) {
    std::vector<sim::Plant> plants;
    for (int i = 0; i < 10; ++i) {
        plants.push_back({i, {2.0 * i, 0.8, 0.25}, 0.0});
    }
    sim::WorldState world(odometry::Pose2D(0, 0, 0), plants, 42, 0.5, sim::CameraRig{});
    sim::NoiseConfig noise;
    noise.encoder_slip_std = 0.02;
    noise.gps_std_m = 0.045;
    noise.imu_std_rad = 0.02;
    noise.pixel_std_px = 2.0;
    noise.range_std_m = 0.02;
    guidance::GuidanceCommand cmd;
    cmd.v_left_mps = 0.2;
    cmd.v_right_mps = 0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(world.step(cmd, 0.02, noise));
    }
}
BENCHMARK(BM_WorldStep);

BENCHMARK_MAIN();
