#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "tdcr/math.hpp"
#include "tdcr/rod.hpp"
#include "tdcr/tendon_loads.hpp"

namespace tdcr {

// Two-step BDF-alpha coefficients: y_t = c0 y + c1 y_prev + c2 y_prev2 + d1 y_t_prev.
struct BdfCoeffs {
    double c0 = 0.0;     // [1/s]
    double c1 = 0.0;     // [1/s]
    double c2 = 0.0;     // [1/s]
    double d1 = 0.0;
    double alpha = 0.0;
    double dt = 0.0;     // [s]
};

inline BdfCoeffs bdf_coeffs(double dt, double alpha) {
    BdfCoeffs c;
    c.c0 = (1.5 + alpha) / (dt * (1.0 + alpha));
    c.c1 = -2.0 / dt;
    c.c2 = (0.5 + alpha) / (dt * (1.0 + alpha));
    c.d1 = alpha / (1.0 + alpha);
    c.alpha = alpha;
    c.dt = dt;
    return c;
}

// All-zero coefficients freeze the time terms, turning one solve into a
// statics problem on the same code path.
inline BdfCoeffs static_coeffs() { return BdfCoeffs{}; }

inline Vec3 implicit_rate(const Vec3& y, const Vec3& y_hist, const BdfCoeffs& c) {
    return c.c0 * y + y_hist;
}

// The six per-node signals whose time derivatives the scheme needs.
struct NodeSignals {
    Vec3 v = Vec3::Zero();
    Vec3 u = Vec3::Zero();
    Vec3 q = Vec3::Zero();
    Vec3 w = Vec3::Zero();
    Vec3 v_s = Vec3::Zero();
    Vec3 u_s = Vec3::Zero();
};

// One converged (or trial) rod configuration: N node states plus the spatial
// strain derivatives the history scheme tracks. Node 0 always satisfies the
// fixed-end condition p = q = w = 0, R = I.
struct RodTrajectoryStep {
    std::vector<NodeState> nodes;
    std::vector<Vec3> v_s;
    std::vector<Vec3> u_s;
    Vec3 tip_n_s = Vec3::Zero();  // global n_s at s = L, for control extraction
    Vec3 tip_f_e = Vec3::Zero();  // global external force density at s = L
    double time = 0.0;

    const NodeState& tip() const { return nodes.back(); }

    NodeSignals signals(std::size_t j) const {
        return {nodes[j].v, nodes[j].u, nodes[j].q, nodes[j].w, v_s[j], u_s[j]};
    }
};

// Per-node lagged values and lagged rates for {v, u, q, w, v_s, u_s}, plus the
// precomputed history terms y_h used by the implicit rate.
class HistoryBuffer {
public:
    HistoryBuffer() = default;

    explicit HistoryBuffer(int node_count)
        : prev_(node_count), prev2_(node_count), rate_prev_(node_count), h_(node_count) {}

    int node_count() const { return static_cast<int>(h_.size()); }

    // Cold start at rest: both lagged values equal the current state and the
    // lagged rates are zero, so every implicit rate starts exactly at zero.
    void initialize_from(const RodTrajectoryStep& step, const BdfCoeffs& coeffs) {
        const std::size_t n = step.nodes.size();
        prev_.resize(n); prev2_.resize(n); rate_prev_.resize(n); h_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            prev_[j] = prev2_[j] = step.signals(j);
            rate_prev_[j] = NodeSignals{};  // zero
        }
        rebuild(coeffs);
    }

    // Shift the window after a converged step: current rates come from the
    // history terms that were active during the step.
    void advance(const RodTrajectoryStep& step, const BdfCoeffs& coeffs) {
        for (std::size_t j = 0; j < h_.size(); ++j) {
            const NodeSignals cur = step.signals(j);
            NodeSignals rate;
            rate.v = implicit_rate(cur.v, h_[j].v, coeffs);
            rate.u = implicit_rate(cur.u, h_[j].u, coeffs);
            rate.q = implicit_rate(cur.q, h_[j].q, coeffs);
            rate.w = implicit_rate(cur.w, h_[j].w, coeffs);
            rate.v_s = implicit_rate(cur.v_s, h_[j].v_s, coeffs);
            rate.u_s = implicit_rate(cur.u_s, h_[j].u_s, coeffs);
            prev2_[j] = prev_[j];
            prev_[j] = cur;
            rate_prev_[j] = rate;
        }
        rebuild(coeffs);
    }

    const NodeSignals& h(std::size_t j) const { return h_[j]; }
    const NodeSignals& prev(std::size_t j) const { return prev_[j]; }
    const NodeSignals& prev_rate(std::size_t j) const { return rate_prev_[j]; }

    // Direct access for tests that seed exact histories.
    void set(std::size_t j, const NodeSignals& prev, const NodeSignals& prev2,
             const NodeSignals& rate_prev) {
        prev_[j] = prev;
        prev2_[j] = prev2;
        rate_prev_[j] = rate_prev;
    }

    void rebuild(const BdfCoeffs& c) {
        for (std::size_t j = 0; j < h_.size(); ++j) {
            auto term = [&](const Vec3& y1, const Vec3& y2, const Vec3& yt1) -> Vec3 {
                return c.c1 * y1 + c.c2 * y2 + c.d1 * yt1;
            };
            h_[j].v = term(prev_[j].v, prev2_[j].v, rate_prev_[j].v);
            h_[j].u = term(prev_[j].u, prev2_[j].u, rate_prev_[j].u);
            h_[j].q = term(prev_[j].q, prev2_[j].q, rate_prev_[j].q);
            h_[j].w = term(prev_[j].w, prev2_[j].w, rate_prev_[j].w);
            h_[j].v_s = term(prev_[j].v_s, prev2_[j].v_s, rate_prev_[j].v_s);
            h_[j].u_s = term(prev_[j].u_s, prev2_[j].u_s, rate_prev_[j].u_s);
        }
    }

private:
    std::vector<NodeSignals> prev_, prev2_, rate_prev_, h_;
};

inline void advance_history(const RodTrajectoryStep& step, HistoryBuffer& buffer,
                            const BdfCoeffs& coeffs) {
    buffer.advance(step, coeffs);
}

struct SpatialDerivs {
    Vec3 p_s;
    Mat3 R_s;
    Vec3 n_s, m_s, q_s, w_s;
    Vec3 v_s, u_s;
};

/// Right-hand side of the semi-discretized spatial ODE at one node. Recovers
/// v, u from the propagated (n, m) through the implicit-rate inversion of the
/// constitutive law and writes them back into `node`.
inline SpatialDerivs spatial_rhs(NodeState& node, const NodeSignals& hist,
                                 std::span<const double> tensions, const RodParams& params,
                                 const StiffnessSet& stiff, const TendonLayout& layout,
                                 const BdfCoeffs& coeffs, int node_index = -1) {
    const double rhoA = params.density * stiff.area;
    const Mat3 Rt = node.R.transpose();

    // Body-frame internal loads, then strain recovery. The history terms are
    // built from raw v, u, so the constant reference offset c0*y_star joins
    // them (the BDF coefficients annihilate constants, keeping rates exact).
    const Vec3 nb = Rt * node.n;
    const Vec3 mb = Rt * node.m;
    const Mat3 Kse_c0Bse = stiff.K_se + coeffs.c0 * params.B_se;
    const Mat3 Kbt_c0Bbt = stiff.K_bt + coeffs.c0 * params.B_bt;
    node.v = params.v_star +
             Kse_c0Bse.ldlt().solve(nb - params.B_se * (hist.v + coeffs.c0 * params.v_star));
    node.u = params.u_star +
             Kbt_c0Bbt.ldlt().solve(mb - params.B_bt * (hist.u + coeffs.c0 * params.u_star));

    const Vec3 v_t = implicit_rate(node.v, hist.v, coeffs);
    const Vec3 u_t = implicit_rate(node.u, hist.u, coeffs);
    const Vec3 q_t = implicit_rate(node.q, hist.q, coeffs);
    const Vec3 w_t = implicit_rate(node.w, hist.w, coeffs);

    const TendonLoadSet loads = assemble(node, tensions, layout, node_index);

    Mat6 theta;
    theta.topLeftCorner<3, 3>() = Kse_c0Bse + loads.A;
    theta.topRightCorner<3, 3>() = loads.G;
    theta.bottomLeftCorner<3, 3>() = loads.B;
    theta.bottomRightCorner<3, 3>() = Kbt_c0Bbt + loads.H;

    const Vec3 q_abs_q = node.q.cwiseProduct(node.q.cwiseAbs());
    const Vec3 pi_n = rhoA * (node.w.cross(node.q) + q_t) - Rt * (rhoA * params.gravity) +
                      params.C * q_abs_q - loads.a;
    const Vec3 pi_m = params.density * (node.w.cross(stiff.J * node.w) + stiff.J * w_t) -
                      node.v.cross(nb) - loads.b;
    const Vec3 sigma_n = node.u.cross(nb) + params.B_se * hist.v_s;
    const Vec3 sigma_m = node.u.cross(mb) + params.B_bt * hist.u_s;

    Vec6 rhs;
    rhs << pi_n - sigma_n, pi_m - sigma_m;
    const Vec6 strain_s = solve6(theta, rhs, "spatial_rhs");

    SpatialDerivs d;
    d.v_s = strain_s.head<3>();
    d.u_s = strain_s.tail<3>();
    d.p_s = node.R * node.v;
    d.R_s = node.R * hat(node.u);
    d.n_s = rhoA * (node.R * (node.w.cross(node.q) + q_t)) -
            node.R * (loads.a + loads.A * d.v_s + loads.G * d.u_s) -
            rhoA * params.gravity + node.R * (params.C * q_abs_q);
    d.m_s = params.density * (node.R * (node.w.cross(stiff.J * node.w) + stiff.J * w_t)) -
            d.p_s.cross(node.n) -
            node.R * (loads.b + loads.B * d.v_s + loads.H * d.u_s);
    d.q_s = v_t - node.u.cross(node.q) + node.w.cross(node.v);
    d.w_s = u_t - node.u.cross(node.w);
    return d;
}

/// Forward-Euler propagation from the fixed end given guessed base loads.
/// Rotations are reprojected onto SO(3) after every step (flag-controlled).
inline RodTrajectoryStep propagate(const Vec3& n0, const Vec3& m0,
                                   std::span<const double> tensions, const RodParams& params,
                                   const StiffnessSet& stiff, const TendonLayout& layout,
                                   const BdfCoeffs& coeffs, const HistoryBuffer& history,
                                   double time = 0.0, bool reproject_rotations = true) {
    const int N = params.node_count;
    const double ds = params.ds();

    RodTrajectoryStep step;
    step.time = time;
    step.nodes.resize(N);
    step.v_s.resize(N);
    step.u_s.resize(N);

    NodeState& base = step.nodes[0];
    base = NodeState{};  // p = q = w = 0, R = I
    base.n = n0;
    base.m = m0;

    for (int j = 0; j < N; ++j) {
        NodeState& node = step.nodes[j];
        const SpatialDerivs d = spatial_rhs(node, history.h(j), tensions, params, stiff,
                                            layout, coeffs, j);
        step.v_s[j] = d.v_s;
        step.u_s[j] = d.u_s;

        if (!node.v.allFinite() || !node.u.allFinite() || node.v.z() <= 0.0)
            throw DivergenceError(j);

        if (j == N - 1) {
            step.tip_n_s = d.n_s;
            step.tip_f_e = params.density * stiff.area * params.gravity -
                           node.R * (params.C * node.q.cwiseProduct(node.q.cwiseAbs()));
            break;
        }

        NodeState& next = step.nodes[j + 1];
        next.p = node.p + ds * d.p_s;
        next.R = node.R + ds * d.R_s;
        next.n = node.n + ds * d.n_s;
        next.m = node.m + ds * d.m_s;
        next.q = node.q + ds * d.q_s;
        next.w = node.w + ds * d.w_s;
        if (!next.p.allFinite() || !next.n.allFinite() || !next.m.allFinite() ||
            !next.q.allFinite() || !next.w.allFinite() || !next.R.allFinite())
            throw DivergenceError(j + 1);
        if (reproject_rotations) next.R = reorthonormalize(next.R);
    }
    return step;
}

}  // namespace tdcr
