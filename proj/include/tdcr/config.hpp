#pragma once

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdcr/scenario.hpp"

namespace tdcr {

// Fully resolved run description. `resolved` echoes every effective value so
// a summary file alone reproduces the run.
struct RunConfig {
    RodParams rod;
    TendonLayout tendons;
    double dt = 0.01;
    double alpha = -0.2;
    ControlSetup control;
    ReferenceTrajectory reference;
    Scenario scenario;
    int horizon = 100;
    ShootingConfig shooting;
    std::string out_dir = "out";
    bool store_shapes = false;
    unsigned seed = 0;  // reserved; the pipeline is deterministic
    std::string name = "run";
    nlohmann::json resolved;
};

namespace cfg_detail {

using nlohmann::json;

class Reader {
public:
    explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

    void check_object(const json& j, const std::string& path,
                      const std::set<std::string>& allowed) {
        if (!j.is_object()) {
            issues_.push_back(path + ": expected an object");
            return;
        }
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!allowed.count(it.key()))
                issues_.push_back("unknown config key: " + join(path, it.key()));
    }

    double number(const json& j, const std::string& path, const std::string& key,
                  std::optional<double> fallback = {}) {
        if (!j.is_object() || !j.contains(key)) {
            if (fallback) return *fallback;
            issues_.push_back("missing config key: " + join(path, key));
            return 0.0;
        }
        if (!j.at(key).is_number()) {
            issues_.push_back(join(path, key) + ": expected a number");
            return fallback.value_or(0.0);
        }
        return j.at(key).get<double>();
    }

    int integer(const json& j, const std::string& path, const std::string& key, int fallback) {
        if (!j.is_object() || !j.contains(key)) return fallback;
        if (!j.at(key).is_number_integer()) {
            issues_.push_back(join(path, key) + ": expected an integer");
            return fallback;
        }
        return j.at(key).get<int>();
    }

    bool boolean(const json& j, const std::string& path, const std::string& key, bool fallback) {
        if (!j.is_object() || !j.contains(key)) return fallback;
        if (!j.at(key).is_boolean()) {
            issues_.push_back(join(path, key) + ": expected a boolean");
            return fallback;
        }
        return j.at(key).get<bool>();
    }

    std::string text(const json& j, const std::string& path, const std::string& key,
                     std::optional<std::string> fallback = {}) {
        if (!j.is_object() || !j.contains(key)) {
            if (fallback) return *fallback;
            issues_.push_back("missing config key: " + join(path, key));
            return {};
        }
        if (!j.at(key).is_string()) {
            issues_.push_back(join(path, key) + ": expected a string");
            return fallback.value_or("");
        }
        return j.at(key).get<std::string>();
    }

    Vec3 vec3(const json& j, const std::string& path, const std::string& key, Vec3 fallback) {
        if (!j.is_object() || !j.contains(key)) return fallback;
        const json& v = j.at(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
            !v[2].is_number()) {
            issues_.push_back(join(path, key) + ": expected an array of 3 numbers");
            return fallback;
        }
        return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }

    // Scalar or 3-array, interpreted as a diagonal matrix.
    Mat3 diagonal(const json& j, const std::string& path, const std::string& key,
                  const Mat3& fallback) {
        if (!j.is_object() || !j.contains(key)) return fallback;
        const json& v = j.at(key);
        if (v.is_number()) return v.get<double>() * Mat3::Identity();
        if (v.is_array() && v.size() == 3 && v[0].is_number() && v[1].is_number() &&
            v[2].is_number())
            return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>()).asDiagonal();
        issues_.push_back(join(path, key) + ": expected a number or an array of 3 numbers");
        return fallback;
    }

    void require(bool ok, const std::string& message) {
        if (!ok) issues_.push_back(message);
    }

private:
    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    std::vector<std::string>& issues_;
};

inline json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json diag_to_json(const Mat3& m) {
    return json::array({m(0, 0), m(1, 1), m(2, 2)});
}

}  // namespace cfg_detail

/// Parse and validate a config document. Collects every violated invariant
/// (with key paths) before throwing a single ConfigError; applies the
/// COSSERAT_PROFILE discretization preset when the env var is set.
inline RunConfig parse_run_config(const nlohmann::json& doc, const std::string& name = "run") {
    using nlohmann::json;
    std::vector<std::string> issues;
    cfg_detail::Reader rd(issues);

    if (!doc.is_object()) throw ConfigError("config root: expected a JSON object");
    rd.check_object(doc, "", {"rod", "tendons", "discretization", "controller", "reference",
                              "scenario", "horizon", "shooting", "output", "seed"});

    RunConfig cfg;
    cfg.name = name;
    const auto [paper_rod, paper_layout] = default_paper_rod();
    cfg.rod = paper_rod;

    if (doc.contains("rod")) {
        const json& r = doc.at("rod");
        rd.check_object(r, "rod",
                        {"length_m", "radius_m", "density_kg_m3", "youngs_modulus_pa",
                         "poisson_ratio", "gravity_m_s2", "b_se", "b_bt", "drag_c", "v_star",
                         "u_star"});
        cfg.rod.length = rd.number(r, "rod", "length_m", paper_rod.length);
        cfg.rod.radius = rd.number(r, "rod", "radius_m", paper_rod.radius);
        cfg.rod.density = rd.number(r, "rod", "density_kg_m3", paper_rod.density);
        cfg.rod.youngs_modulus = rd.number(r, "rod", "youngs_modulus_pa", paper_rod.youngs_modulus);
        cfg.rod.poisson_ratio = rd.number(r, "rod", "poisson_ratio", paper_rod.poisson_ratio);
        cfg.rod.gravity = rd.vec3(r, "rod", "gravity_m_s2", paper_rod.gravity);
        cfg.rod.B_se = rd.diagonal(r, "rod", "b_se", paper_rod.B_se);
        cfg.rod.B_bt = rd.diagonal(r, "rod", "b_bt", paper_rod.B_bt);
        cfg.rod.C = rd.diagonal(r, "rod", "drag_c", paper_rod.C);
        cfg.rod.v_star = rd.vec3(r, "rod", "v_star", paper_rod.v_star);
        cfg.rod.u_star = rd.vec3(r, "rod", "u_star", paper_rod.u_star);
    }

    int tendon_count = 4;
    double tendon_offset = 0.02;
    double first_angle_deg = 0.0;
    if (doc.contains("tendons")) {
        const json& t = doc.at("tendons");
        rd.check_object(t, "tendons", {"count", "offset_m", "first_angle_deg"});
        tendon_count = rd.integer(t, "tendons", "count", 4);
        tendon_offset = rd.number(t, "tendons", "offset_m", 0.02);
        first_angle_deg = rd.number(t, "tendons", "first_angle_deg", 0.0);
    }
    if (tendon_count >= 1 && tendon_offset > 0.0)
        cfg.tendons = TendonLayout::ring(tendon_count, tendon_offset,
                                         first_angle_deg * std::numbers::pi / 180.0);
    else
        cfg.tendons = paper_layout;

    if (doc.contains("discretization")) {
        const json& d = doc.at("discretization");
        rd.check_object(d, "discretization", {"nodes", "dt_s", "alpha"});
        cfg.rod.node_count = rd.integer(d, "discretization", "nodes", 200);
        cfg.dt = rd.number(d, "discretization", "dt_s", 0.01);
        cfg.alpha = rd.number(d, "discretization", "alpha", -0.2);
    }

    if (!doc.contains("controller")) {
        issues.push_back("missing config key: controller");
    } else {
        const json& c = doc.at("controller");
        rd.check_object(c, "controller",
                        {"kind", "c", "k", "epsilon", "alpha1", "alpha2", "t_max_n", "b_floor",
                         "actuated_tendon"});
        const std::string kind = rd.text(c, "controller", "kind");
        if (kind == "smc") {
            cfg.control.kind = ControllerKind::Smc;
            cfg.control.smc.c = rd.number(c, "controller", "c");
            cfg.control.smc.k = rd.number(c, "controller", "k");
            cfg.control.smc.epsilon = rd.number(c, "controller", "epsilon");
        } else if (kind == "backstepping") {
            cfg.control.kind = ControllerKind::Backstepping;
            cfg.control.backstepping.alpha1 = rd.number(c, "controller", "alpha1");
            cfg.control.backstepping.alpha2 = rd.number(c, "controller", "alpha2");
        } else if (kind == "none") {
            cfg.control.kind = ControllerKind::None;
        } else if (!kind.empty()) {
            issues.push_back("controller.kind: expected one of none, smc, backstepping");
        }
        cfg.control.t_max = rd.number(c, "controller", "t_max_n", 50.0);
        cfg.control.b_floor = rd.number(c, "controller", "b_floor", 1e-8);
        cfg.control.actuated_tendon = rd.integer(c, "controller", "actuated_tendon", 0);
    }

    if (doc.contains("reference")) {
        const json& r = doc.at("reference");
        rd.check_object(r, "reference", {"amplitude_m", "rate_per_s"});
        cfg.reference.amplitude = rd.number(r, "reference", "amplitude_m", 0.340);
        cfg.reference.rate = rd.number(r, "reference", "rate_per_s", 20.0);
    }

    if (doc.contains("scenario")) {
        const json& s = doc.at("scenario");
        rd.check_object(s, "scenario",
                        {"kind", "weight_kg", "weight_direction", "disturbance_force_n",
                         "disturbance_start", "disturbance_duration"});
        const std::string kind = rd.text(s, "scenario", "kind", std::string("nominal"));
        if (kind == "nominal") cfg.scenario.kind = ScenarioKind::Nominal;
        else if (kind == "tip_weight") cfg.scenario.kind = ScenarioKind::TipWeight;
        else if (kind == "disturbance") cfg.scenario.kind = ScenarioKind::Disturbance;
        else issues.push_back("scenario.kind: expected one of nominal, tip_weight, disturbance");
        cfg.scenario.weight_mass = rd.number(s, "scenario", "weight_kg", 0.020);
        cfg.scenario.weight_direction = rd.vec3(s, "scenario", "weight_direction", Vec3(-1, 0, 0));
        cfg.scenario.disturbance_force =
            rd.vec3(s, "scenario", "disturbance_force_n", Vec3(10, 0, -10));
        cfg.scenario.disturbance_start = rd.integer(s, "scenario", "disturbance_start", 50);
        cfg.scenario.disturbance_duration = rd.integer(s, "scenario", "disturbance_duration", 1);
    }

    if (doc.contains("horizon")) {
        if (!doc.at("horizon").is_number_integer())
            issues.push_back("horizon: expected an integer");
        else
            cfg.horizon = doc.at("horizon").get<int>();
    }

    if (doc.contains("shooting")) {
        const json& s = doc.at("shooting");
        rd.check_object(s, "shooting",
                        {"tolerance", "max_iterations", "fd_step_relative", "fd_step_absolute",
                         "max_halvings"});
        cfg.shooting.tolerance = rd.number(s, "shooting", "tolerance", 1e-6);
        cfg.shooting.max_iterations = rd.integer(s, "shooting", "max_iterations", 50);
        cfg.shooting.fd_step_relative = rd.number(s, "shooting", "fd_step_relative", 1e-7);
        cfg.shooting.fd_step_absolute = rd.number(s, "shooting", "fd_step_absolute", 1e-9);
        cfg.shooting.max_halvings = rd.integer(s, "shooting", "max_halvings", 8);
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        rd.check_object(o, "output", {"dir", "store_shapes"});
        cfg.out_dir = rd.text(o, "output", "dir", std::string("out"));
        cfg.store_shapes = rd.boolean(o, "output", "store_shapes", false);
    }

    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_integer()) issues.push_back("seed: expected an integer");
        else cfg.seed = doc.at("seed").get<unsigned>();
    }

    // Environment profile overrides the spatial resolution.
    if (const char* profile = std::getenv("COSSERAT_PROFILE")) {
        const std::string p(profile);
        if (p == "fast") cfg.rod.node_count = 40;
        else if (p == "paper") cfg.rod.node_count = 200;
        else issues.push_back("COSSERAT_PROFILE: expected fast or paper, got '" + p + "'");
    }

    // Invariants.
    rd.require(cfg.rod.length > 0, "rod.length_m: must be > 0");
    rd.require(cfg.rod.radius > 0, "rod.radius_m: must be > 0");
    rd.require(cfg.rod.density > 0, "rod.density_kg_m3: must be > 0");
    rd.require(cfg.rod.youngs_modulus > 0, "rod.youngs_modulus_pa: must be > 0");
    rd.require(cfg.rod.poisson_ratio >= 0 && cfg.rod.poisson_ratio < 0.5,
               "rod.poisson_ratio: must be in [0, 0.5)");
    rd.require(cfg.rod.node_count >= 3, "discretization.nodes: must be >= 3");
    rd.require(cfg.rod.B_se.diagonal().minCoeff() >= 0, "rod.b_se: must be >= 0");
    rd.require(cfg.rod.B_bt.diagonal().minCoeff() >= 0, "rod.b_bt: must be >= 0");
    rd.require(cfg.rod.C.diagonal().minCoeff() >= 0, "rod.drag_c: must be >= 0");
    rd.require(tendon_count >= 1, "tendons.count: must be >= 1");
    rd.require(tendon_offset > 0, "tendons.offset_m: must be > 0");
    rd.require(cfg.dt > 0, "discretization.dt_s: must be > 0");
    rd.require(cfg.alpha > -0.5 && cfg.alpha <= 0,
               "discretization.alpha: must be in (-0.5, 0]");
    if (cfg.control.kind == ControllerKind::Smc) {
        rd.require(cfg.control.smc.c > 0, "controller.c: must be > 0");
        rd.require(cfg.control.smc.k > 0, "controller.k: must be > 0");
        rd.require(cfg.control.smc.epsilon >= 0, "controller.epsilon: must be >= 0");
    }
    if (cfg.control.kind == ControllerKind::Backstepping) {
        rd.require(cfg.control.backstepping.alpha1 > 0, "controller.alpha1: must be > 0");
        rd.require(cfg.control.backstepping.alpha2 > 0, "controller.alpha2: must be > 0");
    }
    rd.require(cfg.control.t_max > 0, "controller.t_max_n: must be > 0");
    rd.require(cfg.control.b_floor > 0, "controller.b_floor: must be > 0");
    rd.require(cfg.control.actuated_tendon >= 0 && cfg.control.actuated_tendon < tendon_count,
               "controller.actuated_tendon: must index an existing tendon");
    rd.require(cfg.reference.amplitude > 0, "reference.amplitude_m: must be > 0");
    rd.require(cfg.reference.rate > 0, "reference.rate_per_s: must be > 0");
    rd.require(cfg.scenario.weight_mass >= 0, "scenario.weight_kg: must be >= 0");
    rd.require(cfg.scenario.disturbance_duration >= 1,
               "scenario.disturbance_duration: must be >= 1");
    rd.require(cfg.horizon >= 1, "horizon: must be >= 1");
    rd.require(cfg.shooting.tolerance > 0, "shooting.tolerance: must be > 0");
    rd.require(cfg.shooting.max_iterations >= 1, "shooting.max_iterations: must be >= 1");

    if (!issues.empty()) {
        std::string message = "invalid configuration:";
        for (const std::string& i : issues) message += "\n  - " + i;
        throw ConfigError(message);
    }

    // Echo of every effective value.
    using cfg_detail::diag_to_json;
    using cfg_detail::vec3_to_json;
    json resolved;
    resolved["rod"] = {{"length_m", cfg.rod.length},
                       {"radius_m", cfg.rod.radius},
                       {"density_kg_m3", cfg.rod.density},
                       {"youngs_modulus_pa", cfg.rod.youngs_modulus},
                       {"poisson_ratio", cfg.rod.poisson_ratio},
                       {"gravity_m_s2", vec3_to_json(cfg.rod.gravity)},
                       {"b_se", diag_to_json(cfg.rod.B_se)},
                       {"b_bt", diag_to_json(cfg.rod.B_bt)},
                       {"drag_c", diag_to_json(cfg.rod.C)},
                       {"v_star", vec3_to_json(cfg.rod.v_star)},
                       {"u_star", vec3_to_json(cfg.rod.u_star)}};
    resolved["tendons"] = {{"count", tendon_count},
                           {"offset_m", tendon_offset},
                           {"first_angle_deg", first_angle_deg}};
    resolved["discretization"] = {{"nodes", cfg.rod.node_count}, {"dt_s", cfg.dt},
                                  {"alpha", cfg.alpha}};
    json ctrl;
    switch (cfg.control.kind) {
        case ControllerKind::None: ctrl["kind"] = "none"; break;
        case ControllerKind::Smc:
            ctrl["kind"] = "smc";
            ctrl["c"] = cfg.control.smc.c;
            ctrl["k"] = cfg.control.smc.k;
            ctrl["epsilon"] = cfg.control.smc.epsilon;
            break;
        case ControllerKind::Backstepping:
            ctrl["kind"] = "backstepping";
            ctrl["alpha1"] = cfg.control.backstepping.alpha1;
            ctrl["alpha2"] = cfg.control.backstepping.alpha2;
            break;
    }
    ctrl["t_max_n"] = cfg.control.t_max;
    ctrl["b_floor"] = cfg.control.b_floor;
    ctrl["actuated_tendon"] = cfg.control.actuated_tendon;
    resolved["controller"] = ctrl;
    resolved["reference"] = {{"amplitude_m", cfg.reference.amplitude},
                             {"rate_per_s", cfg.reference.rate}};
    json scen;
    switch (cfg.scenario.kind) {
        case ScenarioKind::Nominal: scen["kind"] = "nominal"; break;
        case ScenarioKind::TipWeight: scen["kind"] = "tip_weight"; break;
        case ScenarioKind::Disturbance: scen["kind"] = "disturbance"; break;
    }
    scen["weight_kg"] = cfg.scenario.weight_mass;
    scen["weight_direction"] = vec3_to_json(cfg.scenario.weight_direction);
    scen["disturbance_force_n"] = vec3_to_json(cfg.scenario.disturbance_force);
    scen["disturbance_start"] = cfg.scenario.disturbance_start;
    scen["disturbance_duration"] = cfg.scenario.disturbance_duration;
    resolved["scenario"] = scen;
    resolved["horizon"] = cfg.horizon;
    resolved["shooting"] = {{"tolerance", cfg.shooting.tolerance},
                            {"max_iterations", cfg.shooting.max_iterations},
                            {"fd_step_relative", cfg.shooting.fd_step_relative},
                            {"fd_step_absolute", cfg.shooting.fd_step_absolute},
                            {"max_halvings", cfg.shooting.max_halvings}};
    resolved["output"] = {{"dir", cfg.out_dir}, {"store_shapes", cfg.store_shapes}};
    resolved["seed"] = cfg.seed;
    cfg.resolved = std::move(resolved);
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    std::string name = path;
    if (auto slash = name.find_last_of("/\\"); slash != std::string::npos)
        name = name.substr(slash + 1);
    if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
    return parse_run_config(doc, name);
}

}  // namespace tdcr
