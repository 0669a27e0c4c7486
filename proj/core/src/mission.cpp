#include "cropspray/mission.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cropspray/guidance.hpp"

namespace cropspray::mission {

namespace {

using nlohmann::json;

/// Strict accessor for one JSON object: typed getters with defaults, and a
/// final unknown-key sweep against everything that was asked for.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw ConfigError(path_, "expected an object");
        }
    }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!node_.contains(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (!v.is_number()) {
            throw ConfigError(path_ + "." + key, "expected a number");
        }
        return v.get<double>();
    }

    double required_number(const std::string& key) {
        seen_.insert(key);
        if (!node_.contains(key)) {
            throw ConfigError(path_ + "." + key, "missing required value");
        }
        const json& v = node_.at(key);
        if (!v.is_number()) {
            throw ConfigError(path_ + "." + key, "expected a number");
        }
        return v.get<double>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!node_.contains(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (!v.is_boolean()) {
            throw ConfigError(path_ + "." + key, "expected a boolean");
        }
        return v.get<bool>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        seen_.insert(key);
        if (!node_.contains(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (!v.is_number_unsigned()) {
            throw ConfigError(path_ + "." + key, "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!node_.contains(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (!v.is_string()) {
            throw ConfigError(path_ + "." + key, "expected a string");
        }
        return v.get<std::string>();
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        return node_.contains(key) ? &node_.at(key) : nullptr;
    }

    const json& required_child(const std::string& key) {
        seen_.insert(key);
        if (!node_.contains(key)) {
            throw ConfigError(path_ + "." + key, "missing required section");
        }
        return node_.at(key);
    }

    const std::string& path() const { return path_; }

    void reject_unknown() const {
        for (const auto& item : node_.items()) {
            if (!seen_.contains(item.key())) {
                throw ConfigError(path_ + "." + item.key(), "unknown key");
            }
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void check_positive(double v, const std::string& field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(field, "must be a positive finite number");
    }
}

void check_non_negative(double v, const std::string& field) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError(field, "must be a non-negative finite number");
    }
}

geodesy::GeodeticCoord parse_datum(const json& node) {
    Section s(node, "datum");
    const double lat = s.required_number("latitude_deg");
    const double lon = s.required_number("longitude_deg");
    const double h = s.number("height_m", 0.0);
    s.reject_unknown();
    try {
        return geodesy::GeodeticCoord(lat, lon, h);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("datum", e.what());
    }
}

std::vector<geodesy::EnuCoord> parse_waypoints(const json& node, const geodesy::Datum& datum) {
    Section s(node, "waypoints");
    const std::string frame = s.text("frame", "enu");
    if (frame != "enu" && frame != "llh") {
        throw ConfigError("waypoints.frame", "must be \"enu\" or \"llh\"");
    }
    const json& pts = s.required_child("points");
    s.reject_unknown();
    if (!pts.is_array() || pts.size() < 2) {
        throw ConfigError("waypoints.points", "expected an array of at least two points");
    }

    std::vector<geodesy::EnuCoord> out;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const json& p = pts[i];
        const std::string field = "waypoints.points[" + std::to_string(i) + "]";
        if (!p.is_array() || (frame == "enu" && p.size() != 2 && p.size() != 3) ||
            (frame == "llh" && p.size() != 3)) {
            throw ConfigError(field, frame == "enu" ? "expected [east_m, north_m(, up_m)]"
                                                    : "expected [latitude_deg, longitude_deg, height_m]");
        }
        for (const auto& component : p) {
            if (!component.is_number()) {
                throw ConfigError(field, "expected numeric components");
            }
        }
        if (frame == "enu") {
            out.push_back(geodesy::EnuCoord{p[0].get<double>(), p[1].get<double>(),
                                            p.size() == 3 ? p[2].get<double>() : 0.0});
        } else {
            try {
                const geodesy::GeodeticCoord g(p[0].get<double>(), p[1].get<double>(),
                                               p[2].get<double>());
                out.push_back(geodesy::llh_to_enu(g, datum));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(field, e.what());
            }
        }
    }
    return out;
}

std::vector<sim::Plant> parse_plants(const json& node) {
    if (!node.is_array()) {
        throw ConfigError("plants", "expected an array");
    }
    std::vector<sim::Plant> plants;
    plants.reserve(node.size());
    std::set<int> ids;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string path = "plants[" + std::to_string(i) + "]";
        Section s(node[i], path);
        sim::Plant plant;
        const double id = s.required_number("id");
        plant.id = static_cast<int>(id);
        if (plant.id != id || plant.id < 0) {
            throw ConfigError(path + ".id", "expected a non-negative integer");
        }
        if (!ids.insert(plant.id).second) {
            throw ConfigError(path + ".id", "duplicate plant id");
        }
        plant.position.east_m = s.required_number("east_m");
        plant.position.north_m = s.required_number("north_m");
        plant.position.up_m = s.number("up_m", 0.0);
        s.reject_unknown();
        plants.push_back(plant);
    }
    return plants;
}

sim::NoiseConfig parse_noise(const json& node) {
    Section s(node, "noise");
    sim::NoiseConfig noise;
    noise.encoder_slip_std = s.number("encoder_slip_std", noise.encoder_slip_std);
    noise.gps_std_m = s.number("gps_std_m", noise.gps_std_m);
    noise.gps_rate_hz = s.number("gps_rate_hz", noise.gps_rate_hz);
    noise.imu_std_rad = s.number("imu_std_rad", noise.imu_std_rad);
    noise.pixel_std_px = s.number("pixel_std_px", noise.pixel_std_px);
    noise.range_std_m = s.number("range_std_m", noise.range_std_m);
    noise.caster_jitter_std_rad = s.number("caster_jitter_std_rad", noise.caster_jitter_std_rad);
    if (const json* outages = s.child("gps_outages")) {
        if (!outages->is_array()) {
            throw ConfigError("noise.gps_outages", "expected an array of [start_s, end_s]");
        }
        for (std::size_t i = 0; i < outages->size(); ++i) {
            const json& w = (*outages)[i];
            const std::string field = "noise.gps_outages[" + std::to_string(i) + "]";
            if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
                throw ConfigError(field, "expected [start_s, end_s]");
            }
            noise.gps_outages.emplace_back(w[0].get<double>(), w[1].get<double>());
        }
    }
    s.reject_unknown();
    try {
        noise.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("noise", e.what());
    }
    return noise;
}

sim::CameraRig parse_camera(const json& node) {
    Section s(node, "camera");
    sim::CameraRig rig;
    const double width = s.number("width_px", rig.model.width_px);
    const double height = s.number("height_px", rig.model.height_px);
    const double hfov = deg_to_rad(s.number("hfov_deg", rad_to_deg(rig.model.hfov_rad)));
    const double vfov = deg_to_rad(s.number("vfov_deg", rad_to_deg(rig.model.vfov_rad)));
    try {
        rig.model = targeting::CameraModel(width, height, hfov, vfov);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("camera", e.what());
    }
    rig.height_m = s.number("height_m", rig.height_m);
    rig.min_range_m = s.number("min_range_m", rig.min_range_m);
    rig.max_range_m = s.number("max_range_m", rig.max_range_m);
    rig.plant_radius_m = s.number("plant_radius_m", rig.plant_radius_m);
    s.reject_unknown();
    check_positive(rig.height_m, "camera.height_m");
    check_positive(rig.min_range_m, "camera.min_range_m");
    check_positive(rig.plant_radius_m, "camera.plant_radius_m");
    if (!(rig.max_range_m > rig.min_range_m)) {
        throw ConfigError("camera.max_range_m", "must exceed min_range_m");
    }
    return rig;
}

NozzleParams parse_nozzle(const json& node) {
    Section s(node, "nozzle");
    NozzleParams nozzle;
    if (const json* t = s.child("camera_to_nozzle_translation_m")) {
        if (!t->is_array() || t->size() != 3 || !(*t)[0].is_number() || !(*t)[1].is_number() ||
            !(*t)[2].is_number()) {
            throw ConfigError("nozzle.camera_to_nozzle_translation_m", "expected [x, y, z]");
        }
        nozzle.camera_to_nozzle = Eigen::Matrix4d::Identity();
        nozzle.camera_to_nozzle(0, 3) = (*t)[0].get<double>();
        nozzle.camera_to_nozzle(1, 3) = (*t)[1].get<double>();
        nozzle.camera_to_nozzle(2, 3) = (*t)[2].get<double>();
    }
    nozzle.limits.pan_rad = s.number("pan_limit_rad", nozzle.limits.pan_rad);
    nozzle.limits.tilt_rad = s.number("tilt_limit_rad", nozzle.limits.tilt_rad);
    s.reject_unknown();
    check_positive(nozzle.limits.pan_rad, "nozzle.pan_limit_rad");
    check_positive(nozzle.limits.tilt_rad, "nozzle.tilt_limit_rad");
    return nozzle;
}

}  // namespace

NozzleParams::NozzleParams() : camera_to_nozzle(targeting::default_camera_to_nozzle()) {}

MissionConfig parse_mission(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }

    Section s(root, "<root>");
    MissionConfig cfg;

    cfg.datum = parse_datum(s.required_child("datum"));
    const geodesy::Datum datum(cfg.datum);
    cfg.waypoints = parse_waypoints(s.required_child("waypoints"), datum);
    if (const json* plants = s.child("plants")) {
        cfg.plants = parse_plants(*plants);
    }

    if (const json* robot = s.child("robot")) {
        Section r(*robot, "robot");
        cfg.robot.track_width_m = r.number("track_width_m", cfg.robot.track_width_m);
        cfg.robot.v_max_mps = r.number("v_max_mps", cfg.robot.v_max_mps);
        r.reject_unknown();
        check_positive(cfg.robot.track_width_m, "robot.track_width_m");
        check_positive(cfg.robot.v_max_mps, "robot.v_max_mps");
    }

    if (const json* camera = s.child("camera")) {
        cfg.rig = parse_camera(*camera);
    }
    if (const json* nozzle = s.child("nozzle")) {
        cfg.nozzle = parse_nozzle(*nozzle);
    }
    if (const json* noise = s.child("noise")) {
        cfg.noise = parse_noise(*noise);
    }

    if (const json* guidance = s.child("guidance")) {
        Section g(*guidance, "guidance");
        cfg.guidance.lookahead_m = g.number("lookahead_m", cfg.guidance.lookahead_m);
        cfg.guidance.v_nominal_mps = g.number("v_nominal_mps", cfg.guidance.v_nominal_mps);
        cfg.guidance.static_reference = g.boolean("static_reference", cfg.guidance.static_reference);
        g.reject_unknown();
        check_positive(cfg.guidance.lookahead_m, "guidance.lookahead_m");
        check_positive(cfg.guidance.v_nominal_mps, "guidance.v_nominal_mps");
    }

    if (const json* spray = s.child("spray")) {
        Section sp(*spray, "spray");
        cfg.spray.flow_ml_per_s = sp.number("flow_ml_per_s", cfg.spray.flow_ml_per_s);
        cfg.spray.volume_per_plant_ml = sp.number("volume_per_plant_ml", cfg.spray.volume_per_plant_ml);
        cfg.spray.tank_capacity_ml = sp.number("tank_capacity_ml", cfg.spray.tank_capacity_ml);
        sp.reject_unknown();
        check_positive(cfg.spray.flow_ml_per_s, "spray.flow_ml_per_s");
        check_positive(cfg.spray.volume_per_plant_ml, "spray.volume_per_plant_ml");
        check_positive(cfg.spray.tank_capacity_ml, "spray.tank_capacity_ml");
    }

    if (const json* filter = s.child("filter")) {
        Section f(*filter, "filter");
        cfg.filter.sigma_xy = f.number("sigma_xy", cfg.filter.sigma_xy);
        cfg.filter.sigma_theta = f.number("sigma_theta", cfg.filter.sigma_theta);
        cfg.filter.init_pos_std_m = f.number("init_pos_std_m", cfg.filter.init_pos_std_m);
        cfg.filter.init_heading_std_rad =
            f.number("init_heading_std_rad", cfg.filter.init_heading_std_rad);
        f.reject_unknown();
        check_non_negative(cfg.filter.sigma_xy, "filter.sigma_xy");
        check_non_negative(cfg.filter.sigma_theta, "filter.sigma_theta");
        check_positive(cfg.filter.init_pos_std_m, "filter.init_pos_std_m");
        check_positive(cfg.filter.init_heading_std_rad, "filter.init_heading_std_rad");
    }

    if (const json* sim_node = s.child("sim")) {
        Section sm(*sim_node, "sim");
        cfg.sim_params.tick_rate_hz = sm.number("tick_rate_hz", cfg.sim_params.tick_rate_hz);
        cfg.sim_params.duration_cap_s = sm.number("duration_cap_s", cfg.sim_params.duration_cap_s);
        sm.reject_unknown();
        check_positive(cfg.sim_params.tick_rate_hz, "sim.tick_rate_hz");
        check_positive(cfg.sim_params.duration_cap_s, "sim.duration_cap_s");
    }

    cfg.seed = s.unsigned_integer("seed", 0);

    if (const json* start = s.child("start_pose")) {
        Section sp(*start, "start_pose");
        const double x = sp.required_number("x_m");
        const double y = sp.required_number("y_m");
        const double theta = sp.required_number("theta_rad");
        sp.reject_unknown();
        cfg.start_pose = odometry::Pose2D(x, y, theta);
    }

    s.reject_unknown();

    // Cross-field checks.
    if (cfg.guidance.v_nominal_mps > cfg.robot.v_max_mps) {
        throw ConfigError("guidance.v_nominal_mps", "exceeds robot.v_max_mps");
    }
    try {
        guidance::PlannedPath probe(cfg.waypoints);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("waypoints.points", e.what());
    }
    if (cfg.noise.gps_rate_hz > cfg.sim_params.tick_rate_hz) {
        throw ConfigError("noise.gps_rate_hz", "exceeds sim.tick_rate_hz");
    }

    return cfg;
}

MissionConfig load_mission(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("<file>", "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_mission(buffer.str());
}

}  // namespace cropspray::mission
