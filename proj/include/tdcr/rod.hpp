#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "tdcr/math.hpp"

namespace tdcr {

// Material, geometric, damping, and discretization constants of the backbone.
struct RodParams {
    double length = 0.5;              // L [m]
    double radius = 1e-3;             // backbone radius [m]
    double density = 17189.0;         // rho [kg/m^3]
    double youngs_modulus = 190e9;    // E [Pa]
    double poisson_ratio = 0.3;       // nu
    Vec3 gravity{-9.81, 0.0, 0.0};    // g [m/s^2]
    Mat3 B_se = Mat3::Zero();         // shear/extension damping [N s]
    Mat3 B_bt = 0.008 * Mat3::Identity();  // bending/torsion damping [N m^2 s]
    Mat3 C = 0.1 * Mat3::Identity();  // square-law drag [kg/m^2]
    int node_count = 200;             // N
    Vec3 v_star{0.0, 0.0, 1.0};       // reference linear strain
    Vec3 u_star{0.0, 0.0, 0.0};       // reference curvature [1/m]

    double ds() const { return length / (node_count - 1); }
};

// Datasheet density of the bare 304 stainless backbone; the default above is
// the recalibrated value that lumps disks, glue, and markers into the rod.
inline constexpr double kDatasheetDensity = 6366.0;  // [kg/m^3]

// Tendon routing in the cross-section frame. Offsets are constant along s
// (straight parallel routing), so the per-arc-length rates default to zero.
struct TendonLayout {
    std::vector<Vec3> offset;     // r_i [m], third component zero
    std::vector<Vec3> offset_s;   // dr_i/ds
    std::vector<Vec3> offset_ss;  // d^2 r_i/ds^2

    int count() const { return static_cast<int>(offset.size()); }

    static TendonLayout ring(int n, double radial_offset, double first_angle_rad = 0.0) {
        TendonLayout lay;
        lay.offset.reserve(n);
        for (int i = 0; i < n; ++i) {
            double phi = first_angle_rad + 2.0 * std::numbers::pi * i / n;
            lay.offset.emplace_back(radial_offset * std::cos(phi),
                                    radial_offset * std::sin(phi), 0.0);
        }
        lay.offset_s.assign(n, Vec3::Zero());
        lay.offset_ss.assign(n, Vec3::Zero());
        return lay;
    }
};

// Full cross-section state at one arc-length node. p, R, n, m are global;
// q, w, v, u are body-frame.
struct NodeState {
    Vec3 p = Vec3::Zero();    // position [m]
    Mat3 R = Mat3::Identity();
    Vec3 n = Vec3::Zero();    // internal force [N]
    Vec3 m = Vec3::Zero();    // internal moment [N m]
    Vec3 q = Vec3::Zero();    // linear velocity [m/s]
    Vec3 w = Vec3::Zero();    // angular velocity [rad/s]
    Vec3 v{0.0, 0.0, 1.0};    // linear strain rate
    Vec3 u = Vec3::Zero();    // curvature/twist [1/m]
};

struct StiffnessSet {
    Mat3 K_se;            // diag(GA, GA, EA) [N]
    Mat3 K_bt;            // diag(EI, EI, GJp) [N m^2]
    Mat3 J;               // diag(I, I, 2I) [m^4]
    double area;          // A [m^2]
    double second_moment; // I [m^4]
};

inline StiffnessSet build_stiffness(const RodParams& p) {
    const double A = std::numbers::pi * p.radius * p.radius;
    const double I = std::numbers::pi * std::pow(p.radius, 4) / 4.0;
    const double G = p.youngs_modulus / (2.0 * (1.0 + p.poisson_ratio));
    StiffnessSet s;
    s.area = A;
    s.second_moment = I;
    s.K_se = Vec3(G * A, G * A, p.youngs_modulus * A).asDiagonal();
    s.K_bt = Vec3(p.youngs_modulus * I, p.youngs_modulus * I, 2.0 * G * I).asDiagonal();
    s.J = Vec3(I, I, 2.0 * I).asDiagonal();
    return s;
}

/// Linear elasticity with material damping, body frame (without the leading R).
inline std::pair<Vec3, Vec3> constitutive(const Vec3& v, const Vec3& u,
                                          const Vec3& v_t, const Vec3& u_t,
                                          const StiffnessSet& stiff,
                                          const RodParams& params) {
    Vec3 n_body = stiff.K_se * (v - params.v_star) + params.B_se * v_t;
    Vec3 m_body = stiff.K_bt * (u - params.u_star) + params.B_bt * u_t;
    return {n_body, m_body};
}

/// Rod and tendon layout used for all reported simulations: 0.5 m steel
/// backbone, recalibrated density, four tendons at 2 cm offset, 90 deg apart.
inline std::pair<RodParams, TendonLayout> default_paper_rod() {
    RodParams p;  // defaults above are the calibrated set
    TendonLayout lay = TendonLayout::ring(4, 0.02);
    return {p, lay};
}

}  // namespace tdcr
