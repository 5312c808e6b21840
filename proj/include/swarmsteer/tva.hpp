#pragma once

#include <array>
#include <span>
#include <vector>

#include "swarmsteer/frenet.hpp"
#include "swarmsteer/vec.hpp"

namespace swarmsteer {

// K-nearest neighbor set of one agent; never contains the focal agent.
struct Neighborhood {
    std::vector<int> members;
};

struct TvaParams {
    double mu = 1.0;  // alignment gain, 1/s
    int K = 3;
};

// Two-agent planar shape variables: separation rho (mm), baseline angle psi
// and heading mismatch phi (radians, wrapped to (-pi, pi]).
struct TvaShape {
    double rho = 0.0;
    double psi = 0.0;
    double phi = 0.0;
};

// K nearest agents to agent i by Euclidean distance, ties broken by lower
// index. Throws InsufficientAgentsError when K >= number of agents.
Neighborhood k_nearest(std::span<const Vec2> positions, int i, int K);
Neighborhood k_nearest(std::span<const Vec3> positions, int i, int K);

// Mean velocity of the neighborhood members.
Vec2 com_velocity(std::span<const AgentState2> states, const Neighborhood& nbhd);
Vec3 com_velocity(std::span<const AgentState3> states, const Neighborhood& nbhd);

struct ComDirection2 {
    Vec2 direction;
    int used_k = 0;
};

struct ComDirection3 {
    Vec3 direction;
    int used_k = 0;
};

// Unit direction of the neighborhood COM velocity. When |v_COM| falls below
// 1e-9 x (mean neighbor speed) the neighborhood is widened to K+1 before
// giving up with DegenerateNeighborhoodError.
ComDirection2 com_direction_with_fallback(std::span<const AgentState2> states, int i, int K);
ComDirection3 com_direction_with_fallback(std::span<const AgentState3> states, int i, int K);

// Misalignment measure 1 - x_i . x_n in [0, 2]. Both inputs must be unit
// vectors (norm within 1e-6 of 1).
double contrast(Vec2 x_i, Vec2 x_n);
double contrast(Vec3 x_i, Vec3 x_n);

// Alignment steering: u = mu (x_n . y_i) / nu_i, and in 3D additionally
// v = mu (x_n . z_i) / nu_i.
Curvature2 tva_controls(const AgentState2& s, Vec2 x_n, double mu);
Curvature3 tva_controls(const AgentState3& s, Vec3 x_n, double mu);

// Shape variables of an ordered pair (agent 1, agent 2).
TvaShape shape_from_states(const AgentState2& a1, const AgentState2& a2);

// One 4th-order step of the closed-loop two-agent shape dynamics
//   rhodot = nu1 cos(psi) - nu2 cos(psi - phi)
//   psidot = -mu sin(phi) - [nu1 sin(psi) - nu2 sin(psi - phi)] / rho
//   phidot = -2 mu sin(phi).
// Angles are re-wrapped after the step. phi = 0 is preserved exactly.
TvaShape shape_step_closed_loop(TvaShape s, double nu1, double nu2, double mu, double dt);

// Closed-form contrast decay: Theta(t) = 2 e^{-4 mu t} / (C + e^{-4 mu t}),
// C = 2/Theta(0) - 1. Theta(0) = 0 and 2 are exact constants.
double theta_closed_form(double theta0, double mu, double t);

using Mat3 = std::array<std::array<double, 3>, 3>;

// Relative rigid motion of the pair, built two independent ways: directly
// from poses (frame dot products) and from the scalar shape variables. The
// two must agree; tests cross-check them.
Mat3 shape_matrix_from_poses(const AgentState2& a1, const AgentState2& a2);
Mat3 shape_matrix_from_shape(const TvaShape& s);

}  // namespace swarmsteer
