#include <doctest.h>

#include <cmath>
#include <vector>

#include "swarmsteer/csv.hpp"
#include "swarmsteer/error.hpp"
#include "swarmsteer/rng.hpp"
#include "swarmsteer/sim.hpp"

using namespace swarmsteer;

namespace {

SimConfig two_agent_tva(double heading1, double heading2, double separation) {
    SimConfig c;
    c.name = "pair";
    c.law = Law::Tva;
    c.dt = 0.04;
    c.duration = 5.0;
    c.agents = {{{0, 0}, heading1, 60.0}, {{separation, 0}, heading2, 60.0}};
    c.tva = {1.0, 1};
    c.avoidance.range_mm = 0.0;  // keep the pure law
    return c;
}

SimConfig fixed_point_mmc() {
    SimConfig c;
    c.name = "mmc-fixed";
    c.law = Law::Mmc;
    c.dt = 0.04;
    c.duration = 60.0;
    c.agents = {{{1000, 0}, kPi / 2, 200.0}, {{0, 0}, -kPi / 2, 200.0}};
    c.mmc.mu = 0.001;
    c.avoidance.range_mm = 0.0;
    return c;
}

// O(n^3) transitive closure over the same pair relation used by
// cluster_count: heading-aligned groups, then a distance gate of twice the
// group's largest nearest-neighbor spacing.
int brute_cluster_count(const std::vector<Vec2>& pos, const std::vector<double>& hdg,
                        double tol) {
    int n = static_cast<int>(pos.size());
    auto aligned = [&](int i, int j) {
        return std::abs(angle_diff(hdg[static_cast<std::size_t>(i)],
                                   hdg[static_cast<std::size_t>(j)])) <= tol;
    };
    // closure over heading alignment
    std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) reach[i][j] = i == j || aligned(i, j);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;

    std::vector<int> group(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            if (reach[i][j] && group[static_cast<std::size_t>(j)] >= 0) {
                group[static_cast<std::size_t>(i)] = group[static_cast<std::size_t>(j)];
                break;
            } else if (j == i) {
                group[static_cast<std::size_t>(i)] = i;
            }

    std::vector<double> scale(static_cast<std::size_t>(n), 1.0);
    for (int g = 0; g < n; ++g) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (group[static_cast<std::size_t>(i)] == g) members.push_back(i);
        double s = 1.0;
        for (int i : members) {
            double nn = -1;
            for (int j : members) {
                if (i == j) continue;
                double d = (pos[static_cast<std::size_t>(i)] - pos[static_cast<std::size_t>(j)]).norm();
                if (nn < 0 || d < nn) nn = d;
            }
            if (nn > s) s = nn;
        }
        scale[static_cast<std::size_t>(g)] = s;
    }

    std::vector<std::vector<bool>> rel(static_cast<std::size_t>(n),
                                       std::vector<bool>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                rel[i][j] = true;
                continue;
            }
            bool same_group = group[static_cast<std::size_t>(i)] == group[static_cast<std::size_t>(j)];
            double d = (pos[static_cast<std::size_t>(i)] - pos[static_cast<std::size_t>(j)]).norm();
            rel[i][j] = same_group && aligned(i, j) &&
                        d <= 2.0 * scale[static_cast<std::size_t>(group[static_cast<std::size_t>(i)])];
        }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (rel[i][k] && rel[k][j]) rel[i][j] = true;

    int count = 0;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        if (seen[static_cast<std::size_t>(i)]) continue;
        ++count;
        for (int j = 0; j < n; ++j)
            if (rel[i][j]) seen[static_cast<std::size_t>(j)] = true;
    }
    return count;
}

}  // namespace

TEST_CASE("aligned TVA pair stays aligned with zero contrast") {
    SimConfig c = two_agent_tva(0.7, 0.7, 500.0);
    auto records = run(c);
    for (const StepRecord& r : records) {
        CHECK(std::abs(r.theta_total) <= 1e-12);
    }
}

TEST_CASE("two-agent contrast is logged bit-identically for both agents") {
    SimConfig c = two_agent_tva(1.2, -0.4, 700.0);
    auto records = run(c);
    for (const StepRecord& r : records) {
        CHECK(r.agents[0].theta == r.agents[1].theta);
    }
}

TEST_CASE("tick accounting and logged headings") {
    SimConfig c = two_agent_tva(0.5, 0.1, 400.0);
    c.duration = 2.0;
    auto records = run(c);
    CHECK(records.size() == 51);  // floor(2 / 0.04) + 1
    for (std::size_t k = 0; k < records.size(); ++k) {
        CHECK(records[k].t == doctest::Approx(k * c.dt).epsilon(1e-12));
    }
}

TEST_CASE("identical configs give bit-identical records and CSV bytes") {
    SimConfig c = two_agent_tva(1.0, -2.0, 600.0);
    c.noise.heading_sigma = 0.01;
    c.noise.seed = 77;
    auto a = run(c);
    auto b = run(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].theta_total == b[k].theta_total);
        for (std::size_t i = 0; i < a[k].agents.size(); ++i) {
            CHECK(a[k].agents[i].pos.x == b[k].agents[i].pos.x);
            CHECK(a[k].agents[i].pos.y == b[k].agents[i].pos.y);
            CHECK(a[k].agents[i].heading == b[k].agents[i].heading);
        }
    }
    CHECK(trajectory_csv(a, false) == trajectory_csv(b, false));
}

TEST_CASE("different seeds move noisy trajectories apart") {
    SimConfig c = two_agent_tva(1.0, -2.0, 600.0);
    c.noise.heading_sigma = 0.01;
    c.noise.seed = 1;
    auto a = run(c);
    c.noise.seed = 2;
    auto b = run(c);
    CHECK((a.back().agents[0].pos - b.back().agents[0].pos).norm() > 1e-6);
}

TEST_CASE("MMC pair at the reduced fixed point holds its range") {
    auto records = run(fixed_point_mmc());
    for (const StepRecord& r : records) {
        CHECK(std::abs(r.rho - 1000.0) / 1000.0 < 1e-3);
    }
}

TEST_CASE("avoidance overrides with the saturated rate, CCW on a dead-ahead tie") {
    AvoidanceParams params;  // 300 mm, 50 rad/s, pi/2 cone
    AgentState2 s = make_agent2({0, 0}, 0.0, 60.0);

    std::vector<Vec2> ahead{{200, 0}};
    auto d = avoidance_override(s, ahead, params);
    REQUIRE(d.has_value());
    CHECK(d->omega == 50.0);
    CHECK(d->obstacle == 0);

    std::vector<Vec2> leftside{{150, 100}};
    d = avoidance_override(s, leftside, params);
    REQUIRE(d.has_value());
    CHECK(d->omega == -50.0);

    std::vector<Vec2> far{{400, 0}};
    CHECK_FALSE(avoidance_override(s, far, params).has_value());

    std::vector<Vec2> behind{{-200, 0}};
    CHECK_FALSE(avoidance_override(s, behind, params).has_value());
}

TEST_CASE("whenever avoidance is active the logged rate is exactly +-omega_sat") {
    SimConfig c;
    c.name = "headon";
    c.law = Law::Tva;
    c.dt = 0.04;
    c.duration = 4.0;
    c.agents = {{{0, 0}, 0.0, 60.0}, {{500, 0}, kPi, 60.0}};
    c.tva = {1.0, 1};
    auto records = run(c);
    double sat_deg = (180.0 / kPi) * c.avoidance.omega_sat;
    bool saw_avoidance = false;
    for (const StepRecord& r : records) {
        for (const AgentRecord& a : r.agents) {
            if (a.avoidance) {
                saw_avoidance = true;
                CHECK(std::abs(a.omega_deg_s) == sat_deg);
            }
        }
    }
    CHECK(saw_avoidance);
}

TEST_CASE("apply_events returns the most recent change") {
    std::vector<KEvent> events{{20.0, 1}};
    CHECK(apply_events(10.0, 3, events) == 3);
    CHECK(apply_events(20.0, 3, events) == 1);
    CHECK(apply_events(35.0, 3, events) == 1);
    CHECK(apply_events(10.0, 3, {}) == 3);
}

TEST_CASE("cluster_count basics") {
    std::vector<Vec2> pos{{0, 0}, {100, 0}, {0, 100}, {100, 100}};
    std::vector<double> hdg{0.01, -0.01, 0.02, 0.0};
    CHECK(cluster_count(pos, hdg) == 1);

    std::vector<Vec2> two_groups{{0, 0}, {100, 0}, {50000, 0}, {50100, 0}};
    std::vector<double> hdg2{0.0, 0.0, kPi, kPi};
    CHECK(cluster_count(two_groups, hdg2) == 2);
}

TEST_CASE("cluster_count matches the brute-force closure on random data") {
    Rng rng(4242);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 3 + static_cast<int>(rng.uniform(0, 7));
        std::vector<Vec2> pos;
        std::vector<double> hdg;
        for (int i = 0; i < n; ++i) {
            // clumped positions and quantized headings to exercise ties
            double cx = rng.uniform(0, 2) < 1 ? 0.0 : 4000.0;
            pos.push_back({cx + rng.uniform(-300, 300), rng.uniform(-300, 300)});
            hdg.push_back(std::floor(rng.uniform(0, 4)) * (kPi / 2.0));
        }
        CHECK(cluster_count(pos, hdg) == brute_cluster_count(pos, hdg, 5.0 * kPi / 180.0));
    }
}

TEST_CASE("perturber influences the swarm only through avoidance") {
    SimConfig with;
    with.name = "iso";
    with.law = Law::Tva;
    with.dt = 0.04;
    with.duration = 5.0;
    with.agents = {{{0, 0}, 0.2, 60.0}, {{400, 0}, -0.1, 60.0}, {{0, 400}, 0.05, 60.0}};
    with.tva = {1.0, 1};
    // Perturber far away: never inside anyone's avoidance range.
    with.perturber = PerturberScript{{{0.0, {50000, 50000}}, {5.0, {51000, 50000}}}};

    SimConfig without = with;
    without.perturber.reset();

    auto a = run(with);
    auto b = run(without);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(a[k].agents[i].pos.x == b[k].agents[i].pos.x);
            CHECK(a[k].agents[i].pos.y == b[k].agents[i].pos.y);
            CHECK(a[k].agents[i].heading == b[k].agents[i].heading);
        }
        // the perturber itself is logged as the extra final row
        CHECK(a[k].agents.size() == 4);
        CHECK(b[k].agents.size() == 3);
    }
}

TEST_CASE("perturber follows its waypoints with exact arrival") {
    PerturberScript script{{{0.0, {0, 0}}, {10.0, {1000, 0}}, {20.0, {1000, 500}}}};
    CHECK(perturber_position(script, -1.0).x == 0.0);
    CHECK(perturber_position(script, 5.0).x == doctest::Approx(500.0));
    CHECK(perturber_position(script, 10.0).x == doctest::Approx(1000.0));
    CHECK(perturber_position(script, 15.0).y == doctest::Approx(250.0));
    CHECK(perturber_position(script, 25.0).y == doctest::Approx(500.0));
    CHECK(perturber_heading(script, 5.0) == doctest::Approx(0.0));
    CHECK(perturber_heading(script, 15.0) == doctest::Approx(kPi / 2));
}

TEST_CASE("config validation rejects bad setups") {
    SimConfig c = two_agent_tva(0, 0, 500);
    c.dt = 0.0;
    CHECK_THROWS_AS(validate(c), ConfigError);

    c = two_agent_tva(0, 0, 500);
    c.agents[0].speed = 0.0;
    CHECK_THROWS_AS(validate(c), ConfigError);

    c = two_agent_tva(0, 0, 500);
    c.tva.K = 2;  // n-1 = 1
    CHECK_THROWS_AS(validate(c), ConfigError);

    c = fixed_point_mmc();
    c.agents.push_back({{500, 500}, 0, 200});
    CHECK_THROWS_AS(validate(c), ConfigError);

    c = two_agent_tva(0, 0, 500);
    c.events = {{5.0, 1}, {2.0, 1}};
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("full two-agent rollout reproduces the closed-loop shape flow") {
    SimConfig c = two_agent_tva(1.2, -0.3, 800.0);
    c.dt = 1e-3;
    c.duration = 5.0;
    auto records = run(c);

    AgentState2 a1 = make_agent2(c.agents[0].pos, c.agents[0].heading, c.agents[0].speed);
    AgentState2 a2 = make_agent2(c.agents[1].pos, c.agents[1].heading, c.agents[1].speed);
    TvaShape shape = shape_from_states(a1, a2);

    double worst = 0.0;
    for (std::size_t k = 1; k < records.size(); ++k) {
        shape = shape_step_closed_loop(shape, c.agents[0].speed, c.agents[1].speed,
                                       c.tva.mu, c.dt);
        // reconstruct the shape variables from the full-system rollout
        AgentState2 s1 = make_agent2(records[k].agents[0].pos, records[k].agents[0].heading, 60);
        AgentState2 s2 = make_agent2(records[k].agents[1].pos, records[k].agents[1].heading, 60);
        TvaShape from_full = shape_from_states(s1, s2);
        worst = std::max(worst, std::abs(from_full.rho - shape.rho));
        worst = std::max(worst, std::abs(angle_diff(from_full.psi, shape.psi)));
        worst = std::max(worst, std::abs(angle_diff(from_full.phi, shape.phi)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("scheduled K change takes effect at its tick") {
    SimConfig c;
    c.name = "events";
    c.law = Law::Tva;
    c.dt = 0.04;
    c.duration = 2.0;
    c.agents = {{{0, 0}, 0.3, 60.0},
                {{300, 0}, 0.1, 60.0},
                {{600, 0}, -0.2, 60.0},
                {{900, 0}, 0.0, 60.0}};
    c.tva = {1.0, 3};
    c.events = {{1.0, 1}};
    c.avoidance.range_mm = 0.0;
    auto records = run(c);
    for (const StepRecord& r : records) {
        CHECK(r.effective_k == (r.t >= 1.0 ? 1 : 3));
    }
}
