#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cropspray/mission.hpp"
#include "cropspray/montecarlo.hpp"
#include "cropspray/runner.hpp"

using namespace cropspray;
using namespace cropspray::mission;

namespace {

std::string minimal_json(const std::string& extra = "") {
    return R"({
      "datum": {"latitude_deg": 6.7986, "longitude_deg": 79.8987, "height_m": 5.0},
      "waypoints": {"frame": "enu", "points": [[0, 0], [20, 0]]}
      )" + (extra.empty() ? std::string{} : "," + extra) + "\n}";
}

std::string demo_path() {
    return std::string(CROPSPRAY_MISSIONS_DIR) + "/demo_two_rows.json";
}

std::string log_bytes(const RunResult& result) {
    std::ostringstream out;
    write_step_log(result.log, out);
    return out.str();
}

std::string report_bytes(const RunResult& result) {
    std::ostringstream out;
    write_report(result.report, out);
    return out.str();
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    const MissionConfig cfg = parse_mission(minimal_json());
    CHECK(cfg.waypoints.size() == 2);
    CHECK(cfg.robot.track_width_m == 0.5);
    CHECK(cfg.guidance.lookahead_m == 1.0);
    CHECK(cfg.guidance.v_nominal_mps == 0.2);
    CHECK(cfg.spray.flow_ml_per_s == doctest::Approx(10000.0 / 60.0));
    CHECK(cfg.sim_params.tick_rate_hz == 50.0);
    CHECK(cfg.seed == 0);
    CHECK_FALSE(cfg.start_pose.has_value());
}

TEST_CASE("unknown keys are rejected with the offending field named") {
    try {
        parse_mission(minimal_json(R"("sprayer": {})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "<root>.sprayer");
    }

    try {
        parse_mission(minimal_json(R"("noise": {"gps_std": 0.1})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "noise.gps_std");
    }

    try {
        parse_mission(minimal_json(R"("guidance": {"lookahead_m": 1.0, "lookahed_m": 2.0})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "guidance.lookahed_m");
    }
}

TEST_CASE("missing and malformed fields are diagnosed") {
    CHECK_THROWS_AS(parse_mission("{"), ConfigError);
    try {
        parse_mission(R"({"waypoints": {"frame": "enu", "points": [[0,0],[1,0]]}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "<root>.datum");
    }
    try {
        parse_mission(minimal_json(R"("guidance": {"lookahead_m": -1.0})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "guidance.lookahead_m");
    }
    try {
        parse_mission(minimal_json(R"("robot": {"v_max_mps": 0.1})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "guidance.v_nominal_mps");  // nominal 0.2 now exceeds v_max
    }
    try {
        parse_mission(minimal_json(R"("plants": [{"id": 1, "east_m": 1.0, "north_m": 0.5},
                                                 {"id": 1, "east_m": 2.0, "north_m": 0.5}])"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "plants[1].id");
    }
}

TEST_CASE("waypoints in llh resolve to the same path as enu") {
    const MissionConfig enu_cfg = parse_mission(minimal_json());
    const geodesy::Datum datum(enu_cfg.datum);

    // Convert the endpoints to geodetic and feed them back in llh form.
    std::ostringstream llh_points;
    llh_points << "[";
    for (std::size_t i = 0; i < enu_cfg.waypoints.size(); ++i) {
        const auto g = geodesy::ecef_to_llh(geodesy::enu_to_ecef(enu_cfg.waypoints[i], datum));
        llh_points.precision(17);
        llh_points << (i ? "," : "") << "[" << g.latitude_deg << "," << g.longitude_deg << ","
                   << g.height_m << "]";
    }
    llh_points << "]";

    const std::string llh_json = R"({
      "datum": {"latitude_deg": 6.7986, "longitude_deg": 79.8987, "height_m": 5.0},
      "waypoints": {"frame": "llh", "points": )" + llh_points.str() + "}}";
    const MissionConfig llh_cfg = parse_mission(llh_json);

    REQUIRE(llh_cfg.waypoints.size() == enu_cfg.waypoints.size());
    for (std::size_t i = 0; i < llh_cfg.waypoints.size(); ++i) {
        CHECK(std::abs(llh_cfg.waypoints[i].east_m - enu_cfg.waypoints[i].east_m) < 1e-6);
        CHECK(std::abs(llh_cfg.waypoints[i].north_m - enu_cfg.waypoints[i].north_m) < 1e-6);
    }
}

TEST_CASE("zero-noise straight mission tracks the path almost exactly") {
    const MissionConfig cfg = parse_mission(minimal_json(R"("seed": 7)"));
    const RunResult result = run_mission(cfg);
    CHECK(result.report.completed);
    CHECK_FALSE(result.report.timeout);
    CHECK(result.report.cross_track_mean_m < 1e-4);
    CHECK(result.report.cross_track_max_m < 1e-3);
}

TEST_CASE("demo mission: ten plants sprayed, 2000 ml consumed") {
    const MissionConfig cfg = load_mission(demo_path());
    const RunResult result = run_mission(cfg);

    CHECK(result.report.completed);
    REQUIRE(result.report.plants.size() == 10);
    for (const auto& plant : result.report.plants) {
        CHECK(plant.sprayed);
        CHECK(plant.volume_ml == 200.0);
        CHECK(plant.aim_miss_m < 0.10);
    }
    CHECK(result.report.tank_consumed_ml == 2000.0);
    CHECK(result.report.tank_remaining_ml == 8000.0);
    // Conservation is exact.
    CHECK(result.report.tank_consumed_ml + result.report.tank_remaining_ml ==
          result.report.tank_initial_ml);
    CHECK(result.report.low_tank_refusals == 0);
    CHECK(result.report.gps_rejected < result.report.gps_scheduled / 10);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
    const MissionConfig cfg = load_mission(demo_path());
    const RunResult a = run_mission(cfg);
    const RunResult b = run_mission(cfg);
    CHECK(log_bytes(a) == log_bytes(b));
    CHECK(report_bytes(a) == report_bytes(b));

    MissionConfig other = cfg;
    other.seed = cfg.seed + 1;
    const RunResult c = run_mission(other);
    CHECK(log_bytes(a) != log_bytes(c));
    // Different seed still completes and stays within the mission envelope.
    CHECK(c.report.completed);
    CHECK(c.report.cross_track_mean_m < 0.10);
}

TEST_CASE("report statistics equal an independent recomputation from the log") {
    const MissionConfig cfg = load_mission(demo_path());
    const RunResult result = run_mission(cfg);

    std::istringstream in(log_bytes(result));
    const RecomputedStats stats = recompute_stats_from_log(in);
    CHECK(stats.ticks == result.report.ticks);
    CHECK(std::abs(stats.cross_track_mean_m - result.report.cross_track_mean_m) < 1e-12);
    CHECK(std::abs(stats.cross_track_variance_m2 - result.report.cross_track_variance_m2) < 1e-12);
    CHECK(stats.cross_track_max_m == result.report.cross_track_max_m);
    CHECK(stats.consumed_ml == result.report.tank_consumed_ml);
    CHECK(stats.gps_accepted == result.report.gps_accepted);
    CHECK(stats.gps_rejected == result.report.gps_rejected);
    int sprayed = 0;
    for (const auto& p : result.report.plants) {
        sprayed += p.sprayed ? 1 : 0;
    }
    CHECK(stats.sprayed_plants == sprayed);
}

TEST_CASE("csv trace export") {
    const MissionConfig cfg = parse_mission(minimal_json(R"("seed": 3)"));
    const RunResult result = run_mission(cfg);
    std::ostringstream out;
    write_trace_csv(result.log, out);
    const std::string csv = out.str();
    CHECK(csv.rfind("tick,time_s,true_x_m", 0) == 0);
    const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == result.log.size() + 1);
}

TEST_CASE("gps outage inflates then recovers the position covariance") {
    // Strong slip noise makes the open-loop growth visible; the outage
    // starts well after the initial covariance transient has settled.
    const MissionConfig cfg = parse_mission(minimal_json(
        R"("noise": {"gps_std_m": 0.045, "encoder_slip_std": 0.1, "imu_std_rad": 0.02,
                     "gps_outages": [[15.0, 25.0]]},
           "filter": {"sigma_xy": 0.07, "sigma_theta": 0.28},
           "seed": 11)"));
    const RunResult result = run_mission(cfg);
    REQUIRE(result.report.completed);
    CHECK(result.report.gps_missed_by_outage == 50);  // floor(10 s * 5 Hz)

    auto trace_max = [&](double t0, double t1) {
        double peak = 0.0;
        for (const auto& r : result.log) {
            if (r.time_s >= t0 && r.time_s < t1) {
                peak = std::max(peak, r.cov_diag[0] + r.cov_diag[1]);
            }
        }
        return peak;
    };
    const double before = trace_max(12.0, 15.0);
    const double during = trace_max(15.0, 25.0);
    const double after = trace_max(30.0, 35.0);
    CHECK(during > 1.5 * before);
    CHECK(after < 0.75 * during);
}

TEST_CASE("monte carlo with one run matches run_mission") {
    MissionConfig cfg = parse_mission(minimal_json(R"("seed": 21)"));
    const RunResult single = run_mission(cfg);
    const MonteCarloReport mc = run_monte_carlo(cfg, 1, 1);
    REQUIRE(mc.summaries.size() == 1);
    CHECK_FALSE(mc.summaries[0].failed);
    CHECK(mc.summaries[0].cross_track_mean_m == single.report.cross_track_mean_m);
    CHECK(mc.summaries[0].nees_final == single.nees_final);
    CHECK(mc.cte_mean_avg == single.report.cross_track_mean_m);
}

TEST_CASE("monte carlo on the demo mission is filter-consistent") {
    const MissionConfig cfg = load_mission(demo_path());
    const MonteCarloReport mc = run_monte_carlo(cfg, 200, 0);
    CHECK(mc.failures == 0);
    CHECK(mc.nees_within_band);
    CHECK(mc.nees_final_avg > mc.nees_band.lo);
    CHECK(mc.nees_final_avg < mc.nees_band.hi);
    // Every run completes and stays in the mission envelope.
    for (const auto& s : mc.summaries) {
        REQUIRE(s.completed);
        REQUIRE(s.plants_sprayed == 10);
        REQUIRE(s.cross_track_mean_m < 0.10);
    }
}

TEST_CASE("monte carlo aggregation is independent of parallelism") {
    MissionConfig cfg = load_mission(demo_path());
    cfg.sim_params.duration_cap_s = 60.0;  // truncated runs keep this test quick
    const MonteCarloReport serial = run_monte_carlo(cfg, 6, 1);
    const MonteCarloReport parallel = run_monte_carlo(cfg, 6, 3);

    std::ostringstream a;
    std::ostringstream b;
    write_monte_carlo_report(serial, a);
    write_monte_carlo_report(parallel, b);
    CHECK(a.str() == b.str());

    std::ostringstream ca;
    std::ostringstream cb;
    write_monte_carlo_csv(serial, ca);
    write_monte_carlo_csv(parallel, cb);
    CHECK(ca.str() == cb.str());

    for (std::size_t i = 0; i < serial.summaries.size(); ++i) {
        CHECK(serial.summaries[i].seed == cfg.seed + i);
    }
}
