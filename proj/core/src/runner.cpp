#include "cropspray/runner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "cropspray/fusion.hpp"
#include "cropspray/guidance.hpp"
#include "cropspray/stats.hpp"

namespace cropspray::mission {

namespace {

using ordered_json = nlohmann::ordered_json;

odometry::Pose2D default_start_pose(const std::vector<geodesy::EnuCoord>& waypoints) {
    const auto& first = waypoints.front();
    const auto& second = waypoints[1];
    const double heading =
        std::atan2(second.north_m - first.north_m, second.east_m - first.east_m);
    return odometry::Pose2D(first.east_m, first.north_m, heading);
}

struct CrossingTracker {
    // previous center column offset per (plant, side)
    std::map<std::pair<int, int>, double> prev_offset;

    bool update(int plant_id, targeting::CameraSide side, double offset_px) {
        const auto key = std::make_pair(plant_id, static_cast<int>(side));
        const auto it = prev_offset.find(key);
        bool crossed = false;
        if (it != prev_offset.end()) {
            crossed = it->second * offset_px <= 0.0;
            it->second = offset_px;
        } else {
            prev_offset.emplace(key, offset_px);
        }
        return crossed;
    }
};

}  // namespace

const char* to_string(GpsStatus s) {
    switch (s) {
        case GpsStatus::kAbsent: return "absent";
        case GpsStatus::kAccepted: return "accepted";
        case GpsStatus::kRejected: return "rejected";
    }
    return "absent";
}

const char* to_string(SprayStatus s) {
    switch (s) {
        case SprayStatus::kSprayed: return "sprayed";
        case SprayStatus::kLowTank: return "low_tank";
        case SprayStatus::kUnreachable: return "unreachable";
        case SprayStatus::kNotReached: return "not_reached";
    }
    return "not_reached";
}

const char* to_string(targeting::CameraSide s) {
    return s == targeting::CameraSide::kLeft ? "left" : "right";
}

RunResult run_mission(const MissionConfig& cfg) {
    const guidance::PlannedPath path(cfg.waypoints);
    const odometry::Pose2D start =
        cfg.start_pose ? *cfg.start_pose : default_start_pose(cfg.waypoints);

    sim::WorldState world(start, cfg.plants, cfg.seed, cfg.robot.track_width_m, cfg.rig);

    Eigen::Matrix3d p0 = Eigen::Matrix3d::Zero();
    p0(0, 0) = cfg.filter.init_pos_std_m * cfg.filter.init_pos_std_m;
    p0(1, 1) = p0(0, 0);
    p0(2, 2) = cfg.filter.init_heading_std_rad * cfg.filter.init_heading_std_rad;
    fusion::StateEstimate est = fusion::StateEstimate::make(start, p0);

    guidance::PathFollower follower(path, cfg.guidance.lookahead_m,
                                    cfg.guidance.static_reference);
    targeting::TankState tank(cfg.spray.tank_capacity_ml, cfg.spray.tank_capacity_ml);
    const double tank_initial = tank.remaining_ml();

    const double dt = 1.0 / cfg.sim_params.tick_rate_hz;
    const auto max_ticks = static_cast<std::uint64_t>(
        std::ceil(cfg.sim_params.duration_cap_s * cfg.sim_params.tick_rate_hz));
    const double max_travel = cfg.robot.v_max_mps * dt;

    CrossingTracker crossings;
    std::map<int, PlantResult> plant_results;
    for (const auto& plant : cfg.plants) {
        PlantResult r;
        r.id = plant.id;
        plant_results[plant.id] = r;
    }
    targeting::NozzlePose prev_aim_left;   // home position
    targeting::NozzlePose prev_aim_right;
    std::vector<double> spray_ends;

    RunResult result;
    result.report.seed = cfg.seed;
    result.report.tank_capacity_ml = tank.capacity_ml();
    result.report.tank_initial_ml = tank_initial;

    stats::RunningStats cross_track_stats;
    stats::RunningStats nees_stats;
    bool completed = false;

    while (world.tick() < max_ticks) {
        const auto reference = follower.next_reference(est.mean);
        if (!reference) {
            completed = true;
            break;
        }

        const double chord = std::max(
            1e-6, std::hypot(reference->point.x() - est.mean.x_m,
                             reference->point.y() - est.mean.y_m));
        const auto arc = guidance::arc_to_reference(est.mean, reference->point, chord);
        const auto cmd = guidance::wheel_speeds(arc.curvature_inv_m, cfg.guidance.v_nominal_mps,
                                                cfg.robot.track_width_m, cfg.robot.v_max_mps);

        auto bundle = world.step(cmd, dt, cfg.noise);
        const double t_now = static_cast<double>(world.tick()) * dt;

        // Filter: dead-reckoning prediction from the (guarded) encoder
        // reading, then the absolute updates.
        odometry::WheelIncrement inc = bundle.encoder;
        if (!inc.within_travel_limit(max_travel)) {
            inc = odometry::WheelIncrement(std::clamp(inc.left_m, -max_travel, max_travel),
                                           std::clamp(inc.right_m, -max_travel, max_travel),
                                           inc.track_width_m);
        }
        // Unsigned wheel travel keeps the process noise alive through pivot
        // turns, where the signed mean cancels.
        const double mean_travel = 0.5 * (std::abs(inc.left_m) + std::abs(inc.right_m));
        est = fusion::predict(est, inc,
                              fusion::travel_scaled_process_noise(
                                  cfg.filter.sigma_xy, cfg.filter.sigma_theta, mean_travel));
        if (bundle.heading) {
            est = fusion::update_heading(est, *bundle.heading).state;
        }
        GpsStatus gps_status = GpsStatus::kAbsent;
        if (bundle.gps_due) {
            ++result.report.gps_scheduled;
        }
        if (bundle.gps_in_outage) {
            ++result.report.gps_missed_by_outage;
        }
        if (bundle.gps) {
            const auto update = fusion::update_gps(est, *bundle.gps);
            est = update.state;
            gps_status = update.accepted ? GpsStatus::kAccepted : GpsStatus::kRejected;
            if (update.accepted) {
                ++result.report.gps_accepted;
            } else {
                ++result.report.gps_rejected;
            }
        }

        // Targeting: act on the first crossing of the image center column,
        // once per plant.
        std::vector<SprayEvent> events;
        for (const auto& obs : bundle.observations) {
            const auto& det = obs.detection;
            const double offset = det.center_x_px - 0.5 * cfg.rig.model.width_px;
            const bool crossed = crossings.update(det.plant_id, det.side, offset);
            auto& plant_result = plant_results.at(det.plant_id);
            if (!crossed || plant_result.status != SprayStatus::kNotReached) {
                continue;
            }

            SprayEvent event;
            event.plant_id = det.plant_id;
            event.side = det.side;

            const auto angles =
                targeting::pixel_to_angles(cfg.rig.model, det.center_x_px, det.center_y_px);
            const Eigen::Vector4d p_cam = targeting::plant_in_camera(obs.measured_range_m, angles);
            const Eigen::Vector4d p_noz =
                targeting::camera_to_nozzle(p_cam, cfg.nozzle.camera_to_nozzle);

            std::optional<targeting::NozzlePose> aim;
            if (p_noz(0) > 0.0) {
                aim = targeting::nozzle_angles(p_noz, cfg.nozzle.limits);
            }
            if (!aim) {
                event.status = SprayStatus::kUnreachable;
            } else {
                auto plan = targeting::plan_spray(cfg.spray.volume_per_plant_ml,
                                                  cfg.spray.flow_ml_per_s, tank);
                if (!plan) {
                    event.status = SprayStatus::kLowTank;
                    ++result.report.low_tank_refusals;
                } else {
                    targeting::NozzlePose& prev = det.side == targeting::CameraSide::kLeft
                                                      ? prev_aim_left
                                                      : prev_aim_right;
                    const auto delta = targeting::incremental_angles(prev, *aim);
                    prev = *aim;

                    const sim::Plant* plant = nullptr;
                    for (const auto& p : world.plants()) {
                        if (p.id == det.plant_id) {
                            plant = &p;
                        }
                    }
                    const Eigen::Vector3d cam_true = world.camera_frame_position(*plant, det.side);
                    const Eigen::Vector4d noz_true = targeting::camera_to_nozzle(
                        Eigen::Vector4d(cam_true.x(), cam_true.y(), cam_true.z(), 1.0),
                        cfg.nozzle.camera_to_nozzle);

                    event.status = SprayStatus::kSprayed;
                    event.pan_rad = aim->pan_rad;
                    event.tilt_rad = aim->tilt_rad;
                    event.dpan_rad = delta.dpan_rad;
                    event.dtilt_rad = delta.dtilt_rad;
                    event.duration_s = plan->duration_s;
                    event.volume_ml = plan->volume_ml;
                    event.aim_miss_m = targeting::ray_miss_distance(*aim, noz_true.head<3>());
                    world.record_spray(det.plant_id, plan->volume_ml);
                    spray_ends.push_back(t_now + plan->duration_s);
                }
            }

            plant_result.status = event.status;
            plant_result.sprayed = event.status == SprayStatus::kSprayed;
            plant_result.trigger_tick = world.tick();
            plant_result.time_s = t_now;
            plant_result.side = event.side;
            plant_result.pan_rad = event.pan_rad;
            plant_result.tilt_rad = event.tilt_rad;
            plant_result.volume_ml = event.volume_ml;
            plant_result.aim_miss_m = event.aim_miss_m;
            events.push_back(event);
        }

        std::erase_if(spray_ends, [&](double end) { return end <= t_now; });

        const Eigen::Vector2d true_xy(world.true_pose().x_m, world.true_pose().y_m);
        const double cross_track = path.closest_to(true_xy).distance_m;
        cross_track_stats.add(cross_track);

        const double step_nees = fusion::nees(est, world.true_pose());
        nees_stats.add(step_nees);
        result.nees_final = step_nees;

        StepRecord record;
        record.tick = world.tick();
        record.time_s = t_now;
        record.true_pose = world.true_pose();
        record.est_pose = est.mean;
        record.cov_diag = {est.covariance(0, 0), est.covariance(1, 1), est.covariance(2, 2)};
        record.gps = gps_status;
        record.v_left_mps = cmd.v_left_mps;
        record.v_right_mps = cmd.v_right_mps;
        record.sprays = std::move(events);
        record.active_sprays = static_cast<int>(spray_ends.size());
        record.cross_track_m = cross_track;
        result.log.push_back(std::move(record));
    }

    result.report.completed = completed;
    result.report.timeout = !completed;
    result.report.ticks = world.tick();
    result.report.sim_time_s = static_cast<double>(world.tick()) * dt;
    result.report.cross_track_mean_m = cross_track_stats.mean();
    result.report.cross_track_variance_m2 = cross_track_stats.variance();
    result.report.cross_track_max_m = cross_track_stats.max();
    for (const auto& plant : cfg.plants) {
        result.report.plants.push_back(plant_results.at(plant.id));
    }
    result.report.tank_consumed_ml = tank_initial - tank.remaining_ml();
    result.report.tank_remaining_ml = tank.remaining_ml();
    result.nees_mean = nees_stats.mean();
    result.nees_samples = nees_stats.count();
    return result;
}

namespace {

ordered_json pose_json(const odometry::Pose2D& p) {
    return ordered_json{{"x_m", p.x_m}, {"y_m", p.y_m}, {"theta_rad", p.theta_rad}};
}

ordered_json spray_json(const SprayEvent& e) {
    return ordered_json{{"plant_id", e.plant_id},
                        {"side", to_string(e.side)},
                        {"status", to_string(e.status)},
                        {"pan_rad", e.pan_rad},
                        {"tilt_rad", e.tilt_rad},
                        {"dpan_rad", e.dpan_rad},
                        {"dtilt_rad", e.dtilt_rad},
                        {"duration_s", e.duration_s},
                        {"volume_ml", e.volume_ml},
                        {"aim_miss_m", e.aim_miss_m}};
}

}  // namespace

void write_step_log(const std::vector<StepRecord>& log, std::ostream& out) {
    for (const auto& r : log) {
        ordered_json line{{"tick", r.tick},
                          {"time_s", r.time_s},
                          {"true", pose_json(r.true_pose)},
                          {"est", pose_json(r.est_pose)},
                          {"cov_diag", r.cov_diag},
                          {"gps", to_string(r.gps)},
                          {"cmd", ordered_json{{"v_left_mps", r.v_left_mps},
                                               {"v_right_mps", r.v_right_mps}}},
                          {"sprays", ordered_json::array()},
                          {"active_sprays", r.active_sprays},
                          {"cross_track_m", r.cross_track_m}};
        for (const auto& e : r.sprays) {
            line["sprays"].push_back(spray_json(e));
        }
        out << line.dump() << '\n';
    }
}

void write_report(const RunReport& report, std::ostream& out) {
    ordered_json plants = ordered_json::array();
    for (const auto& p : report.plants) {
        plants.push_back(ordered_json{{"id", p.id},
                                      {"sprayed", p.sprayed},
                                      {"status", to_string(p.status)},
                                      {"trigger_tick", p.trigger_tick},
                                      {"time_s", p.time_s},
                                      {"side", to_string(p.side)},
                                      {"pan_rad", p.pan_rad},
                                      {"tilt_rad", p.tilt_rad},
                                      {"volume_ml", p.volume_ml},
                                      {"aim_miss_m", p.aim_miss_m}});
    }
    const ordered_json doc{
        {"completed", report.completed},
        {"timeout", report.timeout},
        {"ticks", report.ticks},
        {"sim_time_s", report.sim_time_s},
        {"seed", report.seed},
        {"cross_track", ordered_json{{"mean_m", report.cross_track_mean_m},
                                     {"variance_m2", report.cross_track_variance_m2},
                                     {"max_m", report.cross_track_max_m}}},
        {"plants", plants},
        {"tank", ordered_json{{"capacity_ml", report.tank_capacity_ml},
                              {"initial_ml", report.tank_initial_ml},
                              {"consumed_ml", report.tank_consumed_ml},
                              {"remaining_ml", report.tank_remaining_ml},
                              {"low_tank_refusals", report.low_tank_refusals}}},
        {"gps", ordered_json{{"scheduled", report.gps_scheduled},
                             {"accepted", report.gps_accepted},
                             {"rejected", report.gps_rejected},
                             {"missed_by_outage", report.gps_missed_by_outage}}}};
    out << doc.dump(2) << '\n';
}

void write_trace_csv(const std::vector<StepRecord>& log, std::ostream& out) {
    out << "tick,time_s,true_x_m,true_y_m,true_theta_rad,est_x_m,est_y_m,est_theta_rad,"
           "cov_xx,cov_yy,cov_tt,gps,v_left_mps,v_right_mps,active_sprays,cross_track_m\n";
    ordered_json num;  // reuse the JSON float formatter so CSV and JSONL agree
    for (const auto& r : log) {
        auto fmt = [&num](double v) {
            num = v;
            return num.dump();
        };
        out << r.tick << ',' << fmt(r.time_s) << ',' << fmt(r.true_pose.x_m) << ','
            << fmt(r.true_pose.y_m) << ',' << fmt(r.true_pose.theta_rad) << ','
            << fmt(r.est_pose.x_m) << ',' << fmt(r.est_pose.y_m) << ','
            << fmt(r.est_pose.theta_rad) << ',' << fmt(r.cov_diag[0]) << ','
            << fmt(r.cov_diag[1]) << ',' << fmt(r.cov_diag[2]) << ',' << to_string(r.gps) << ','
            << fmt(r.v_left_mps) << ',' << fmt(r.v_right_mps) << ',' << r.active_sprays << ','
            << fmt(r.cross_track_m) << '\n';
    }
}

RecomputedStats recompute_stats_from_log(std::istream& jsonl) {
    RecomputedStats out;
    stats::RunningStats cross_track;
    std::string line;
    while (std::getline(jsonl, line)) {
        if (line.empty()) {
            continue;
        }
        const auto rec = nlohmann::json::parse(line);
        ++out.ticks;
        cross_track.add(rec.at("cross_track_m").get<double>());
        const std::string gps = rec.at("gps").get<std::string>();
        if (gps == "accepted") {
            ++out.gps_accepted;
        } else if (gps == "rejected") {
            ++out.gps_rejected;
        }
        for (const auto& spray : rec.at("sprays")) {
            const std::string status = spray.at("status").get<std::string>();
            if (status == "sprayed") {
                ++out.sprayed_plants;
                out.consumed_ml += spray.at("volume_ml").get<double>();
            } else if (status == "low_tank") {
                ++out.low_tank_refusals;
            }
        }
    }
    out.cross_track_mean_m = cross_track.mean();
    out.cross_track_variance_m2 = cross_track.variance();
    out.cross_track_max_m = cross_track.max();
    return out;
}

}  // namespace cropspray::mission
