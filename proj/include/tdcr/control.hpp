#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tdcr/dynamics.hpp"
#include "tdcr/tendon_loads.hpp"

namespace tdcr {

// Scalar planar plant seen by both controllers: tip x-position dynamics
// x2_dot = a_c + b_c * U for the actuated tendon's tension U.
struct PlantTerms {
    double a_c = 0.0;  // [m/s^2]
    double b_c = 0.0;  // [m/s^2 per N]
    double X1 = 0.0;   // tip x [m]
    double X2 = 0.0;   // tip x-velocity [m/s]
};

struct SmcGains {
    double c = 2100.0;       // surface slope [1/s]
    double k = 12.0;         // reaching gain [1/s]
    double epsilon = 0.005;  // switching gain [m/s^2]
};

struct BacksteppingGains {
    double alpha1 = 1500.0;  // [1/s]
    double alpha2 = 12.5;    // [1/s]
};

struct ReferencePoint {
    double x = 0.0;       // x_d [m]
    double x_dot = 0.0;   // [m/s]
    double x_ddot = 0.0;  // [m/s^2]
};

struct ControlCommand {
    std::vector<double> tension;       // per tendon [N]
    std::vector<double> displacement;  // per tendon [m], shortening vs straight
    bool clamped = false;
};

/// Extract the scalar plant terms from a converged step. a_c uses the tip
/// spatial force balance without the tendon term; b_c is the x-projection of
/// the actuated tendon's per-unit-tension force density, rotated to global.
inline PlantTerms plant_terms(const RodTrajectoryStep& step, const TendonLayout& layout,
                              const RodParams& params, int tendon_index,
                              double b_floor = 1e-8) {
    const NodeState& tip = step.tip();
    const double rhoA = params.density * std::numbers::pi * params.radius * params.radius;

    PlantTerms plant;
    plant.X1 = tip.p.x();
    plant.X2 = (tip.R * tip.q).x();
    plant.a_c = (step.tip_n_s + step.tip_f_e).x() / rhoA;

    const Eigen::Matrix3Xd alpha = alpha_matrix(tip, layout, step.u_s.back(), step.v_s.back());
    plant.b_c = (-(tip.R * alpha.col(tendon_index))).x() / rhoA;

    if (std::abs(plant.b_c) < b_floor) throw UncontrollableConfigurationError(plant.b_c);
    return plant;
}

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Sliding mode law with the exponential reaching term.
inline double smc_control(const PlantTerms& plant, const ReferencePoint& ref,
                          const SmcGains& g) {
    const double e = ref.x - plant.X1;
    const double e_dot = ref.x_dot - plant.X2;
    const double S = e_dot + g.c * e;
    return (g.c * e_dot + ref.x_ddot - plant.a_c + g.epsilon * sgn(S) + g.k * S) / plant.b_c;
}

/// Backstepping law (virtual velocity alpha1*z1, damping alpha2).
inline double backstepping_control(const PlantTerms& plant, const ReferencePoint& ref,
                                   const BacksteppingGains& g) {
    const double z1 = ref.x - plant.X1;
    const double z2 = plant.X2 - ref.x_dot - g.alpha1 * z1;
    return (-plant.a_c + z1 - g.alpha1 * z2 - g.alpha1 * g.alpha1 * z1 - g.alpha2 * z2 +
            ref.x_ddot) / plant.b_c;
}

/// Tendon path shortening relative to the straight configuration,
/// trapezoidal over nodes.
inline double tendon_displacement(const RodTrajectoryStep& step, const TendonLayout& layout,
                                  int tendon_index, const RodParams& params) {
    const double ds = params.ds();
    double path_length = 0.0;
    for (std::size_t j = 0; j < step.nodes.size(); ++j) {
        const NodeState& node = step.nodes[j];
        const double g = (hat(node.u) * layout.offset[tendon_index] +
                          layout.offset_s[tendon_index] + node.v).norm();
        const bool endpoint = (j == 0 || j + 1 == step.nodes.size());
        path_length += (endpoint ? 0.5 : 1.0) * g * ds;
    }
    return params.length - path_length;
}

/// Saturate the commanded tension to [0, t_max], hold antagonists slack, and
/// report every tendon's displacement for the motor-side interface.
inline ControlCommand clamp_and_convert(double U, const RodTrajectoryStep& step,
                                        const TendonLayout& layout, int actuated_tendon,
                                        const RodParams& params, double t_max = 50.0) {
    ControlCommand cmd;
    cmd.tension.assign(layout.count(), 0.0);
    cmd.clamped = (U < 0.0 || U > t_max);
    cmd.tension[actuated_tendon] = std::clamp(U, 0.0, t_max);
    cmd.displacement.resize(layout.count());
    for (int i = 0; i < layout.count(); ++i)
        cmd.displacement[i] = tendon_displacement(step, layout, i, params);
    return cmd;
}

struct LyapunovValues {
    double smc = 0.0;           // S^2 / 2 [m^2/s^2]
    double backstepping = 0.0;  // (z1^2 + z2^2) / 2
};

inline LyapunovValues lyapunov_values(const PlantTerms& plant, const ReferencePoint& ref,
                                      const SmcGains& smc, const BacksteppingGains& bs) {
    const double e = ref.x - plant.X1;
    const double e_dot = ref.x_dot - plant.X2;
    const double S = e_dot + smc.c * e;
    const double z1 = e;
    const double z2 = plant.X2 - ref.x_dot - bs.alpha1 * z1;
    return {0.5 * S * S, 0.5 * (z1 * z1 + z2 * z2)};
}

}  // namespace tdcr
