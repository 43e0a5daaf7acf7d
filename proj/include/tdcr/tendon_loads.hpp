#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tdcr/math.hpp"
#include "tdcr/rod.hpp"

namespace tdcr {

// Distributed tendon load blocks at one node. All body-frame. With zero
// tensions every field is exactly zero.
struct TendonLoadSet {
    Mat3 A = Mat3::Zero();
    Mat3 B = Mat3::Zero();
    Mat3 G = Mat3::Zero();
    Mat3 H = Mat3::Zero();
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    std::vector<Vec3> path_tangent;  // p^b_is per tendon
};

inline constexpr double kMinTendonTangent = 1e-9;

// f_tendon(body) = a + A v_s + G u_s, l_tendon(body) = b + B v_s + H u_s.
inline TendonLoadSet assemble(const NodeState& state, std::span<const double> tensions,
                              const TendonLayout& layout, int node_index = -1) {
    TendonLoadSet out;
    out.path_tangent.reserve(layout.count());
    const Mat3 u_hat = hat(state.u);
    for (int i = 0; i < layout.count(); ++i) {
        const Vec3 p_is = u_hat * layout.offset[i] + layout.offset_s[i] + state.v;
        const double norm = p_is.norm();
        if (norm < kMinTendonTangent) throw SingularTendonPathError(i, node_index);
        out.path_tangent.push_back(p_is);

        const Mat3 hat_pis = hat(p_is);
        const Mat3 A_i = -tensions[i] / (norm * norm * norm) * (hat_pis * hat_pis);
        const Mat3 r_hat = hat(layout.offset[i]);
        const Mat3 B_i = r_hat * A_i;
        const Vec3 a_i = A_i * (u_hat * p_is + u_hat * layout.offset_s[i] + layout.offset_ss[i]);

        out.A += A_i;
        out.B += B_i;
        out.G -= A_i * r_hat;
        out.H -= B_i * r_hat;
        out.a += a_i;
        out.b += r_hat * a_i;
    }
    return out;
}

/// Per-unit-tension tendon force density columns (body frame), evaluated with
/// the arc-length rates u_s, v_s of the converged state: column i is
/// alpha_i = (hat(p_is)^2 / |p_is|^3) p_iss, so f_tendon = -alpha * T for any
/// tension vector.
inline Eigen::Matrix3Xd alpha_matrix(const NodeState& state, const TendonLayout& layout,
                                     const Vec3& u_s, const Vec3& v_s) {
    Eigen::Matrix3Xd alpha(3, layout.count());
    const Mat3 u_hat = hat(state.u);
    const Mat3 us_hat = hat(u_s);
    for (int i = 0; i < layout.count(); ++i) {
        const Vec3 p_is = u_hat * layout.offset[i] + layout.offset_s[i] + state.v;
        const double norm = p_is.norm();
        if (norm < kMinTendonTangent) throw SingularTendonPathError(i);
        const Vec3 p_iss = u_hat * p_is + us_hat * layout.offset[i] +
                           u_hat * layout.offset_s[i] + layout.offset_ss[i] + v_s;
        const Mat3 hat_pis = hat(p_is);
        alpha.col(i) = (hat_pis * hat_pis) * p_iss / (norm * norm * norm);
    }
    return alpha;
}

/// Required internal load at the free end (global frame): the tendon
/// termination pulls -T_i along the tendon exit tangent at the offset point,
/// and any external point force at the tip adds directly to the force balance.
inline std::pair<Vec3, Vec3> free_end_bc(const NodeState& tip, std::span<const double> tensions,
                                         const TendonLayout& layout,
                                         const Vec3& tip_force = Vec3::Zero()) {
    Vec3 n_L = tip_force;
    Vec3 m_L = Vec3::Zero();
    const Mat3 u_hat = hat(tip.u);
    for (int i = 0; i < layout.count(); ++i) {
        const Vec3 p_is_body = u_hat * layout.offset[i] + layout.offset_s[i] + tip.v;
        const double norm = p_is_body.norm();
        if (norm < kMinTendonTangent) throw SingularTendonPathError(i);
        const Vec3 force = -tensions[i] * (tip.R * p_is_body) / norm;
        n_L += force;
        m_L += (tip.R * layout.offset[i]).cross(force);
    }
    return {n_L, m_L};
}

}  // namespace tdcr
