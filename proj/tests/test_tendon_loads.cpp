#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <random>

#include "tdcr/tendon_loads.hpp"

using namespace tdcr;
using Catch::Approx;

namespace {

NodeState straight_state() { return NodeState{}; }  // v = e3, u = 0, R = I

TendonLayout one_tendon(const Vec3& r) {
    TendonLayout lay;
    lay.offset = {r};
    lay.offset_s = {Vec3::Zero()};
    lay.offset_ss = {Vec3::Zero()};
    return lay;
}

}  // namespace

TEST_CASE("assemble: zero tension gives a zero load set") {
    auto [params, layout] = default_paper_rod();
    const std::array<double, 4> T{0, 0, 0, 0};
    const TendonLoadSet s = assemble(straight_state(), T, layout);
    CHECK(s.A.isZero(0.0));
    CHECK(s.B.isZero(0.0));
    CHECK(s.G.isZero(0.0));
    CHECK(s.H.isZero(0.0));
    CHECK(s.a.isZero(0.0));
    CHECK(s.b.isZero(0.0));
}

TEST_CASE("assemble: unit tension on a straight rod") {
    const TendonLayout lay = one_tendon(Vec3(0.02, 0, 0));
    const std::array<double, 1> T{1.0};
    const TendonLoadSet s = assemble(straight_state(), T, lay);

    // p_is = v = e3, hat(e3)^2 = diag(-1,-1,0), so A_1 = diag(1,1,0)
    CHECK((s.path_tangent[0] - Vec3(0, 0, 1)).norm() == 0.0);
    CHECK((s.A - Vec3(1, 1, 0).asDiagonal().toDenseMatrix()).norm() < 1e-15);
    CHECK(s.a.isZero(0.0));  // zero curvature
    CHECK(s.b.isZero(0.0));
}

TEST_CASE("assemble: linearity in tension") {
    auto [params, layout] = default_paper_rod();
    NodeState bent = straight_state();
    bent.u = Vec3(0.3, 1.2, -0.4);
    bent.v = Vec3(0.001, -0.002, 1.01);
    const std::array<double, 4> T{1.5, 0.2, 0.0, 3.0};
    std::array<double, 4> T2;
    for (std::size_t i = 0; i < 4; ++i) T2[i] = 2.0 * T[i];

    const TendonLoadSet s1 = assemble(bent, T, layout);
    const TendonLoadSet s2 = assemble(bent, T2, layout);
    CHECK((s2.A - 2 * s1.A).norm() < 1e-12 * s1.A.norm());
    CHECK((s2.B - 2 * s1.B).norm() < 1e-12 * (1 + s1.B.norm()));
    CHECK((s2.G - 2 * s1.G).norm() < 1e-12 * (1 + s1.G.norm()));
    CHECK((s2.H - 2 * s1.H).norm() < 1e-12 * (1 + s1.H.norm()));
    CHECK((s2.a - 2 * s1.a).norm() < 1e-12 * (1 + s1.a.norm()));
    CHECK((s2.b - 2 * s1.b).norm() < 1e-12 * (1 + s1.b.norm()));
}

TEST_CASE("assemble: antagonistic pair keeps the straight rod in equilibrium") {
    TendonLayout lay;
    lay.offset = {Vec3(0.02, 0, 0), Vec3(-0.02, 0, 0)};
    lay.offset_s = {Vec3::Zero(), Vec3::Zero()};
    lay.offset_ss = {Vec3::Zero(), Vec3::Zero()};
    const std::array<double, 2> T{2.0, 2.0};
    const TendonLoadSet s = assemble(straight_state(), T, lay);
    CHECK(s.b.isZero(1e-15));
    CHECK((s.H - s.H.transpose()).norm() < 1e-15);
}

TEST_CASE("assemble: degenerate tangent") {
    NodeState collapsed = straight_state();
    collapsed.v = Vec3::Zero();
    const TendonLayout lay = one_tendon(Vec3(0.02, 0, 0));
    const std::array<double, 1> T{1.0};
    CHECK_THROWS_AS(assemble(collapsed, T, lay, 17), SingularTendonPathError);
}

TEST_CASE("alpha_matrix reproduces the assembled tendon force") {
    // f_tendon(body) = a + A v_s + G u_s must equal -alpha * T for any state.
    auto [params, layout] = default_paper_rod();
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        NodeState st = straight_state();
        st.u = Vec3(2 * d(rng), 2 * d(rng), d(rng));
        st.v = Vec3(0.01 * d(rng), 0.01 * d(rng), 1.0 + 0.01 * d(rng));
        const Vec3 v_s(0.1 * d(rng), 0.1 * d(rng), 0.1 * d(rng));
        const Vec3 u_s(5 * d(rng), 5 * d(rng), d(rng));
        const std::array<double, 4> T{1.0 + d(rng) * 0.5, 0.5 + 0.2 * d(rng),
                                      0.7 + 0.2 * d(rng), 0.1};

        const TendonLoadSet s = assemble(st, T, layout);
        const Vec3 f_assemble = s.a + s.A * v_s + s.G * u_s;

        const Eigen::Matrix3Xd alpha = alpha_matrix(st, layout, u_s, v_s);
        Vec3 f_alpha = Vec3::Zero();
        for (int i = 0; i < 4; ++i) f_alpha -= alpha.col(i) * T[i];

        CHECK((f_assemble - f_alpha).norm() < 1e-12 * (1 + f_assemble.norm()));
    }
}

TEST_CASE("alpha_matrix: straight static column is zero") {
    const TendonLayout lay = one_tendon(Vec3(0.02, 0, 0));
    const Eigen::Matrix3Xd alpha =
        alpha_matrix(straight_state(), lay, Vec3::Zero(), Vec3::Zero());
    CHECK(alpha.col(0).isZero(0.0));
}

TEST_CASE("alpha_matrix: opposite tendons produce no net bending moment") {
    TendonLayout lay;
    lay.offset = {Vec3(0.02, 0, 0), Vec3(-0.02, 0, 0)};
    lay.offset_s = {Vec3::Zero(), Vec3::Zero()};
    lay.offset_ss = {Vec3::Zero(), Vec3::Zero()};
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 u_s(5 * d(rng), 5 * d(rng), 0.0);  // planar
        const Vec3 v_s(0.1 * d(rng), 0.1 * d(rng), 0.1 * d(rng));
        const Eigen::Matrix3Xd alpha = alpha_matrix(straight_state(), lay, u_s, v_s);
        const double T = 1.7;
        Vec3 moment = Vec3::Zero();
        for (int i = 0; i < 2; ++i)
            moment += lay.offset[i].cross(Vec3(-alpha.col(i) * T));
        CHECK(moment.head<2>().norm() < 1e-14);
    }
}

TEST_CASE("free_end_bc") {
    const TendonLayout lay = one_tendon(Vec3(0.02, 0, 0));

    SECTION("no loads") {
        const std::array<double, 1> T{0.0};
        auto [n, m] = free_end_bc(straight_state(), T, lay);
        CHECK(n.isZero(0.0));
        CHECK(m.isZero(0.0));
    }

    SECTION("unit tension on the straight rod pulls back along the axis") {
        const std::array<double, 1> T{1.0};
        auto [n, m] = free_end_bc(straight_state(), T, lay);
        CHECK((n - Vec3(0, 0, -1)).norm() < 1e-15);
        // termination force at +x offset: moment r x F bends the rod toward +x
        CHECK((m - Vec3(0, 0.02, 0)).norm() < 1e-15);
    }

    SECTION("tip weight enters the force balance directly") {
        const std::array<double, 1> T{0.0};
        auto [n, m] = free_end_bc(straight_state(), T, lay, Vec3(-0.1962, 0, 0));
        CHECK((n - Vec3(-0.1962, 0, 0)).norm() == 0.0);
        CHECK(m.isZero(0.0));
    }

    SECTION("force magnitude bound") {
        auto [params, layout] = default_paper_rod();
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> d(0.0, 5.0);
        for (int trial = 0; trial < 30; ++trial) {
            NodeState st = straight_state();
            st.u = Vec3(d(rng), d(rng), d(rng) * 0.2);
            const std::array<double, 4> T{d(rng), d(rng), d(rng), d(rng)};
            const Vec3 tip_force(d(rng), -d(rng), d(rng));
            auto [n, m] = free_end_bc(st, T, layout, tip_force);
            CHECK(n.norm() <= T[0] + T[1] + T[2] + T[3] + tip_force.norm() + 1e-12);
        }
    }
}
