#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tdcr/control.hpp"
#include "tdcr/shooting.hpp"

namespace tdcr {

// Exponential approach x_d(t) = A (1 - e^{-lambda t}) along the x-axis.
struct ReferenceTrajectory {
    double amplitude = 0.340;  // [m]
    double rate = 20.0;        // lambda [1/s]

    ReferencePoint at(double t) const {
        const double decay = std::exp(-rate * t);
        return {amplitude * (1.0 - decay), amplitude * rate * decay,
                -amplitude * rate * rate * decay};
    }
};

enum class ScenarioKind { Nominal, TipWeight, Disturbance };

struct Scenario {
    ScenarioKind kind = ScenarioKind::Nominal;
    double weight_mass = 0.020;                 // [kg]
    Vec3 weight_direction{-1.0, 0.0, 0.0};      // unit
    Vec3 disturbance_force{10.0, 0.0, -10.0};   // [N]
    int disturbance_start = 50;                 // iteration
    int disturbance_duration = 1;               // iterations

    // Point force at the tip during iteration k (1-based). The weight acts
    // for the whole run; the disturbance only inside its window.
    Vec3 tip_force(int iteration, double gravity_norm) const {
        Vec3 f = Vec3::Zero();
        if (kind == ScenarioKind::TipWeight)
            f += weight_mass * gravity_norm * weight_direction.normalized();
        if (kind == ScenarioKind::Disturbance && iteration >= disturbance_start &&
            iteration < disturbance_start + disturbance_duration)
            f += disturbance_force;
        return f;
    }

    // The always-on part, applied already in the static initialization so the
    // run starts at rest with the weight attached.
    Vec3 static_tip_force(double gravity_norm) const { return tip_force(0, gravity_norm); }
};

enum class ControllerKind { None, Smc, Backstepping };

struct ControlSetup {
    ControllerKind kind = ControllerKind::Backstepping;
    SmcGains smc{};
    BacksteppingGains backstepping{};
    int actuated_tendon = 0;
    double t_max = 50.0;    // [N]
    double b_floor = 1e-8;  // minimum |b_c|
};

struct TraceRecord {
    int iteration = 0;
    double t = 0.0;              // [s]
    Vec3 tip_mm = Vec3::Zero();  // [mm]
    double tension_n = 0.0;
    double displacement_mm = 0.0;  // actuated tendon
    double error_mm = 0.0;         // x_d - tip_x
    double lyapunov = 0.0;
    int shoot_iterations = 0;
    double shoot_residual = 0.0;
};

struct SimTrace {
    Vec3 initial_tip_mm = Vec3::Zero();
    std::vector<TraceRecord> rows;
    std::vector<std::vector<Vec3>> shapes;  // centerlines [mm], index 0 = initial state
    bool has_shapes = false;
};

struct MetricsReport {
    double tpl_mm = 0.0;
    int settling_iterations = 0;        // 5% band
    double overshoot_percent = 0.0;
    int rise_iterations = 0;            // 0 to 90%
    double steady_state_error_mm = 0.0; // |mean of last 10 errors|
};

inline ReferencePoint reference(const ReferenceTrajectory& traj, double t) { return traj.at(t); }

namespace detail {

inline std::vector<Vec3> centerline_mm(const RodTrajectoryStep& step) {
    std::vector<Vec3> line;
    line.reserve(step.nodes.size());
    for (const NodeState& n : step.nodes) line.push_back(1000.0 * n.p);
    return line;
}

}  // namespace detail

/// Closed-loop run: one control update per timestep, plant terms extracted
/// from the previous converged step.
inline SimTrace run_closed_loop(const ControlSetup& control, const Scenario& scenario,
                                int horizon, const RodParams& params,
                                const TendonLayout& layout, double dt, double alpha,
                                const ReferenceTrajectory& traj,
                                const ShootingConfig& shooting = {},
                                bool store_shapes = false) {
    Simulator sim(params, layout, dt, alpha, shooting);
    const double g_norm = params.gravity.norm();
    const std::vector<double> zero_tension(layout.count(), 0.0);
    sim.initialize_static(zero_tension, scenario.static_tip_force(g_norm));

    SimTrace trace;
    trace.initial_tip_mm = 1000.0 * sim.current().tip().p;
    trace.has_shapes = store_shapes;
    if (store_shapes) trace.shapes.push_back(detail::centerline_mm(sim.current()));
    trace.rows.reserve(horizon);

    for (int k = 1; k <= horizon; ++k) {
        const double t_k = k * dt;
        const ReferencePoint ref = traj.at(t_k);

        double tension_cmd = 0.0;
        double lyapunov = 0.0;
        if (control.kind != ControllerKind::None) {
            const PlantTerms plant = plant_terms(sim.current(), layout, params,
                                                 control.actuated_tendon, control.b_floor);
            const LyapunovValues V = lyapunov_values(plant, ref, control.smc, control.backstepping);
            if (control.kind == ControllerKind::Smc) {
                tension_cmd = smc_control(plant, ref, control.smc);
                lyapunov = V.smc;
            } else {
                tension_cmd = backstepping_control(plant, ref, control.backstepping);
                lyapunov = V.backstepping;
            }
        }

        const ControlCommand cmd = clamp_and_convert(tension_cmd, sim.current(), layout,
                                                     control.actuated_tendon, params,
                                                     control.t_max);
        ShootingReport rep;
        try {
            rep = sim.step(cmd.tension, scenario.tip_force(k, g_norm));
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError(e.iterations, e.best_residual,
                                      "iteration " + std::to_string(k));
        }

        TraceRecord row;
        row.iteration = k;
        row.t = t_k;
        row.tip_mm = 1000.0 * sim.current().tip().p;
        row.tension_n = cmd.tension[control.actuated_tendon];
        row.displacement_mm = 1000.0 * cmd.displacement[control.actuated_tendon];
        row.error_mm = 1000.0 * ref.x - row.tip_mm.x();
        row.lyapunov = lyapunov;
        row.shoot_iterations = rep.iterations;
        row.shoot_residual = rep.residual_norm;
        trace.rows.push_back(row);
        if (store_shapes) trace.shapes.push_back(detail::centerline_mm(sim.current()));
    }
    return trace;
}

/// Table metrics over a completed trace. All distances in mm; iteration
/// indices follow the trace (initial state counts as iteration 0).
inline MetricsReport compute_metrics(const SimTrace& trace, double target_mm) {
    if (trace.rows.size() < 10)
        throw InsufficientDataError("compute_metrics: trace shorter than 10 iterations");

    MetricsReport rep;

    Vec3 prev = trace.initial_tip_mm;
    for (const TraceRecord& row : trace.rows) {
        rep.tpl_mm += (row.tip_mm - prev).norm();
        prev = row.tip_mm;
    }

    const double band = 0.05 * target_mm;
    int settled_from = trace.rows.front().iteration;
    for (const TraceRecord& row : trace.rows)
        if (std::abs(row.tip_mm.x() - target_mm) > band) settled_from = row.iteration + 1;
    rep.settling_iterations = std::min(settled_from, trace.rows.back().iteration);

    double max_x = trace.initial_tip_mm.x();
    for (const TraceRecord& row : trace.rows) max_x = std::max(max_x, row.tip_mm.x());
    rep.overshoot_percent = std::max(0.0, (max_x - target_mm) / target_mm * 100.0);

    int origin = -1;
    if (trace.initial_tip_mm.x() >= 0.0) origin = 0;
    int reach90 = -1;
    for (const TraceRecord& row : trace.rows) {
        if (origin < 0 && row.tip_mm.x() >= 0.0) origin = row.iteration;
        if (reach90 < 0 && row.tip_mm.x() >= 0.9 * target_mm) reach90 = row.iteration;
    }
    if (origin < 0) origin = trace.rows.back().iteration;
    if (reach90 < 0) reach90 = trace.rows.back().iteration;
    rep.rise_iterations = reach90 - origin;

    double err_sum = 0.0;
    for (std::size_t i = trace.rows.size() - 10; i < trace.rows.size(); ++i)
        err_sum += trace.rows[i].error_mm;
    rep.steady_state_error_mm = std::abs(err_sum / 10.0);

    return rep;
}

}  // namespace tdcr
