#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "swarmsteer/error.hpp"
#include "swarmsteer/rng.hpp"
#include "swarmsteer/tva.hpp"

using namespace swarmsteer;

namespace {

AgentState2 agent(Vec2 pos, double heading, double speed) {
    return make_agent2(pos, heading, speed);
}

AgentState3 agent3(Vec3 pos, Vec3 x, Vec3 y, double speed) {
    AgentState3 s;
    s.r = pos;
    s.x = x;
    s.y = y;
    s.z = x.cross(y);
    s.nu = speed;
    return renormalize(s);
}

// Exhaustive K-nearest for the brute-force cross-check.
std::vector<int> brute_k_nearest(const std::vector<Vec2>& positions, int i, int k) {
    std::vector<std::pair<double, int>> all;
    for (int j = 0; j < static_cast<int>(positions.size()); ++j) {
        if (j == i) continue;
        all.emplace_back((positions[static_cast<std::size_t>(j)] -
                          positions[static_cast<std::size_t>(i)]).norm(),
                         j);
    }
    std::sort(all.begin(), all.end());
    std::vector<int> out;
    for (int m = 0; m < k; ++m) out.push_back(all[static_cast<std::size_t>(m)].second);
    return out;
}

Vec2 random_unit(Rng& rng) {
    double a = rng.uniform(-kPi, kPi);
    return {std::cos(a), std::sin(a)};
}

Vec3 random_unit3(Rng& rng) {
    // uniform direction via z + azimuth
    double z = rng.uniform(-1.0, 1.0);
    double a = rng.uniform(-kPi, kPi);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(a), r * std::sin(a), z};
}

}  // namespace

TEST_CASE("k_nearest picks the closest agents with index tie-breaks") {
    std::vector<Vec2> collinear{{0, 0}, {100, 0}, {300, 0}};
    Neighborhood n = k_nearest(std::span<const Vec2>(collinear), 1, 1);
    CHECK(n.members == std::vector<int>{0});

    std::vector<Vec2> equidistant{{0, 0}, {500, 0}, {-500, 0}};
    n = k_nearest(std::span<const Vec2>(equidistant), 0, 1);
    CHECK(n.members == std::vector<int>{1});

    CHECK_THROWS_AS(k_nearest(std::span<const Vec2>(collinear), 0, 3),
                    InsufficientAgentsError);
}

TEST_CASE("k_nearest matches the exhaustive oracle on random configurations") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec2> pts;
        for (int j = 0; j < 10; ++j) {
            pts.push_back({rng.uniform(-1000, 1000), rng.uniform(-1000, 1000)});
        }
        int i = static_cast<int>(rng.uniform(0, 10)) % 10;
        int k = 1 + static_cast<int>(rng.uniform(0, 9)) % 9;
        Neighborhood got = k_nearest(std::span<const Vec2>(pts), i, k);
        CHECK(got.members == brute_k_nearest(pts, i, k));
    }
}

TEST_CASE("COM velocity averages neighborhood velocities") {
    std::vector<AgentState2> states{
        agent({0, 0}, 0, 60),          // focal
        agent({100, 0}, 0, 60),        // +x at 60
        agent({200, 0}, kPi, 60),      // -x at 60
        agent({0, 100}, kPi / 2, 60),  // +y at 60
    };
    Vec2 single = com_velocity(states, Neighborhood{{1}});
    CHECK(single.x == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(single.y == doctest::Approx(0.0).epsilon(1e-12));

    Vec2 cancel = com_velocity(states, Neighborhood{{1, 2}});
    CHECK(cancel.norm() < 1e-12);

    std::vector<AgentState2> trio{
        agent({0, 0}, 0, 60),
        agent({10, 0}, 0, 50),
        agent({20, 0}, 2 * kPi / 3, 50),
        agent({30, 0}, -2 * kPi / 3, 50),
    };
    Vec2 symmetric = com_velocity(trio, Neighborhood{{1, 2, 3}});
    CHECK(symmetric.norm() < 1e-12);
}

TEST_CASE("fallback widens the neighborhood when v_COM vanishes") {
    // Two nearest neighbors cancel; the third supplies direction +y.
    std::vector<AgentState2> states{
        agent({0, 0}, 0.3, 60),
        agent({100, 0}, 0, 60),
        agent({-100, 0}, kPi, 60),
        agent({0, 150}, kPi / 2, 60),
    };
    ComDirection2 com = com_direction_with_fallback(states, 0, 2);
    CHECK(com.used_k == 3);
    CHECK(com.direction.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(com.direction.y == doctest::Approx(1.0).epsilon(1e-12));

    // Non-degenerate case keeps K and returns a unit direction.
    ComDirection2 plain = com_direction_with_fallback(states, 0, 1);
    CHECK(plain.used_k == 1);
    CHECK(std::abs(plain.direction.norm() - 1.0) < 1e-12);
}

TEST_CASE("degenerate neighborhood even after the fallback is an error") {
    // The two nearest cancel exactly and the third mover is nearly stopped,
    // holding |v_COM| under the relative threshold for K+1 as well.
    std::vector<AgentState2> states{
        agent({0, 0}, 0.0, 60),
        agent({100, 0}, 0, 60),
        agent({-100, 0}, kPi, 60),
        agent({0, 150}, kPi / 2, 1e-12),
    };
    CHECK_THROWS_AS(com_direction_with_fallback(states, 0, 2), DegenerateNeighborhoodError);
}

TEST_CASE("contrast spans [0, 2]") {
    CHECK(contrast(Vec2{1, 0}, Vec2{1, 0}) == 0.0);
    CHECK(contrast(Vec2{1, 0}, Vec2{-1, 0}) == 2.0);
    CHECK(contrast(Vec2{1, 0}, Vec2{0, 1}) == 1.0);
    CHECK_THROWS_AS(contrast(Vec2{2, 0}, Vec2{1, 0}), ContractViolationError);
}

TEST_CASE("aligned agents get zero steering") {
    AgentState2 s = agent({0, 0}, 0.77, 60);
    Curvature2 c = tva_controls(s, s.x, 1.0);
    CHECK(std::abs(c.u) < 1e-16);
}

TEST_CASE("two-agent steering matches the shape-space form") {
    // phi = pi/2, mu = 1, nu1 = 60: u1 = -(mu/nu1) sin(phi) = -1/60.
    AgentState2 a1 = agent({0, 0}, kPi / 2, 60);
    AgentState2 a2 = agent({800, 0}, 0, 60);
    Curvature2 c1 = tva_controls(a1, a2.x, 1.0);
    CHECK(c1.u == doctest::Approx(-1.0 / 60.0).epsilon(1e-12));
    Curvature2 c2 = tva_controls(a2, a1.x, 1.0);
    CHECK(c2.u == doctest::Approx(1.0 / 60.0).epsilon(1e-12));
}

TEST_CASE("lateral acceleration identity, 2D and 3D") {
    Rng rng(55);
    for (int k = 0; k < 1000; ++k) {
        AgentState2 s = agent({0, 0}, rng.uniform(-kPi, kPi), rng.uniform(10, 300));
        Vec2 xn = random_unit(rng);
        double mu = rng.uniform(0.1, 3.0);
        Curvature2 c = tva_controls(s, xn, mu);
        Vec2 lat = (s.nu * s.nu * c.u) * s.y;
        Vec2 expect = mu * s.nu * (xn - xn.dot(s.x) * s.x);
        CHECK((lat - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
    }
    for (int k = 0; k < 1000; ++k) {
        Vec3 x = random_unit3(rng);
        Vec3 helper = std::abs(x.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        Vec3 y = helper.cross(x).normalized();
        AgentState3 s = agent3({0, 0, 0}, x, y, rng.uniform(10, 300));
        Vec3 xn = random_unit3(rng);
        double mu = rng.uniform(0.1, 3.0);
        Curvature3 c = tva_controls(s, xn, mu);
        Vec3 lat = (s.nu * s.nu) * (c.u * s.y + c.v * s.z);
        Vec3 expect = mu * s.nu * (xn - xn.dot(s.x) * s.x);
        CHECK((lat - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
    }
}

TEST_CASE("shape variables of an ordered pair") {
    AgentState2 a1 = agent({0, 0}, 0, 60);
    AgentState2 a2 = agent({1000, 0}, 0, 60);
    TvaShape sh = shape_from_states(a1, a2);
    CHECK(sh.rho == doctest::Approx(1000.0));
    CHECK(sh.phi == 0.0);
    CHECK(sh.psi == doctest::Approx(kPi));

    AgentState2 b2 = agent({1000, 0}, 0.635, 60);
    TvaShape sh2 = shape_from_states(a1, b2);
    CHECK(sh2.phi == doctest::Approx(-0.635));

    CHECK_THROWS_AS(shape_from_states(a1, agent({0, 0}, 1, 60)), CollocationError);
}

TEST_CASE("the two shape-matrix routes agree on random pose pairs") {
    Rng rng(321);
    for (int k = 0; k < 1000; ++k) {
        AgentState2 a1 = agent({rng.uniform(-500, 500), rng.uniform(-500, 500)},
                               rng.uniform(-kPi, kPi), 60);
        AgentState2 a2 = agent({rng.uniform(-500, 500), rng.uniform(-500, 500)},
                               rng.uniform(-kPi, kPi), 60);
        if ((a1.r - a2.r).norm() < 1.0) a2.r.x += 10.0;
        Mat3 from_poses = shape_matrix_from_poses(a1, a2);
        Mat3 from_shape = shape_matrix_from_shape(shape_from_states(a1, a2));
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                double scale = std::max(1.0, std::abs(from_poses[r][c]));
                CHECK(std::abs(from_poses[r][c] - from_shape[r][c]) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("the aligned manifold is exactly invariant") {
    TvaShape s{900, 1.1, 0.0};
    for (int k = 0; k < 100; ++k) {
        s = shape_step_closed_loop(s, 60, 80, 1.0, 0.01);
        CHECK(s.phi == 0.0);
    }
}

TEST_CASE("rho sin(psi) is conserved on the aligned manifold") {
    TvaShape s{700, 2.2, 0.0};
    double invariant = s.rho * std::sin(s.psi);
    double prev = invariant;
    for (int k = 0; k < 10000; ++k) {  // 10 s at 1 ms with nu1 != nu2
        s = shape_step_closed_loop(s, 60, 80, 1.0, 1e-3);
        double now = s.rho * std::sin(s.psi);
        CHECK(std::abs(now - prev) <= 1e-9 * std::abs(invariant));
        prev = now;
        CHECK(s.psi > 0.0);
        CHECK(s.psi < kPi);
    }
    CHECK(std::abs(prev - invariant) <= 1e-6 * std::abs(invariant));
}

TEST_CASE("contrast along the closed-loop flow matches the closed form") {
    double mu = 1.0, dt = 1e-3;
    TvaShape s{800, 0.4, 2.0 * kPi / 3.0};
    double theta0 = 1.0 - std::cos(s.phi);
    for (int k = 1; k <= 3000; ++k) {
        s = shape_step_closed_loop(s, 60, 60, mu, dt);
        double theta = 1.0 - std::cos(s.phi);
        double predicted = theta_closed_form(theta0, mu, k * dt);
        CHECK(std::abs(theta - predicted) < 1e-6);
    }
}

TEST_CASE("closed-form contrast decay") {
    CHECK(theta_closed_form(0.8, 2.0, 0.0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(theta_closed_form(1.0, 1.0, 1.0) == doctest::Approx(0.03597241992418311).epsilon(1e-13));
    CHECK(theta_closed_form(0.0, 1.0, 5.0) == 0.0);
    CHECK(theta_closed_form(2.0, 1.0, 5.0) == 2.0);
    CHECK_THROWS_AS(theta_closed_form(2.5, 1.0, 0.0), ContractViolationError);

    double prev = 1.9;
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        double theta = theta_closed_form(1.9, 0.7, t);
        CHECK(theta < prev);
        prev = theta;
    }
    CHECK(theta_closed_form(1.9, 0.7, 50.0) < 1e-10);
}

TEST_CASE("finite-difference contrast rate matches -2 mu Theta (2 - Theta) at O(dt)") {
    double mu = 1.0;
    auto worst_fd_gap = [&](double dt) {
        TvaShape s{800, 0.4, 1.8};
        double worst = 0.0;
        double theta_prev = 1.0 - std::cos(s.phi);
        for (int k = 1; k <= static_cast<int>(2.0 / dt); ++k) {
            s = shape_step_closed_loop(s, 60, 60, mu, dt);
            double theta = 1.0 - std::cos(s.phi);
            double fd = (theta - theta_prev) / dt;
            double predicted = -2.0 * mu * theta_prev * (2.0 - theta_prev);
            worst = std::max(worst, std::abs(fd - predicted));
            theta_prev = theta;
        }
        return worst;
    };
    double e1 = worst_fd_gap(2e-3);
    double e2 = worst_fd_gap(1e-3);
    double e3 = worst_fd_gap(5e-4);
    // First-order convergence: halving dt roughly halves the error.
    CHECK(e2 / e1 > 0.3);
    CHECK(e2 / e1 < 0.7);
    CHECK(e3 / e2 > 0.3);
    CHECK(e3 / e2 < 0.7);
}

TEST_CASE("alignment time stays under the closed-form bound") {
    double mu = 1.0, dt = 1e-3;
    double theta0 = 1.7;
    TvaShape s{900, 0.3, std::acos(1.0 - theta0)};
    double c = 2.0 / theta0 - 1.0;
    double bound = (1.0 / (4.0 * mu)) * std::log(2e3 / c * (1.0 - 5e-4)) + 1.0;
    double crossing = -1.0;
    for (int k = 1; k <= 20000; ++k) {
        s = shape_step_closed_loop(s, 60, 60, mu, dt);
        if (1.0 - std::cos(s.phi) < 1e-3) {
            crossing = k * dt;
            break;
        }
    }
    REQUIRE(crossing > 0.0);
    CHECK(crossing <= bound);
}
