#pragma once

#include <array>
#include <utility>
#include <vector>

#include "swarmsteer/frenet.hpp"
#include "swarmsteer/vec.hpp"

namespace swarmsteer {

// Relative motion of a two-agent pair: baseline r = r1 - r2 (mm), relative
// velocity g = rdot (mm/s), and its quarter turn h = perp(g).
struct RelativeState {
    Vec2 r;
    Vec2 g;
    Vec2 h;
};

// Scalar shape variables of the pair. rho = |r|, gamma and lambda are the
// components of g along and transverse to the baseline, delta = |g|, so
// gamma^2 + lambda^2 = delta^2.
struct MmcShape {
    double rho = 0.0;     // mm
    double gamma = 0.0;   // mm/s
    double lambda = 0.0;  // mm/s
    double delta = 0.0;   // mm/s
};

struct MmcParams {
    double mu = 1e-3;   // feedback gain, 1/mm
    double k_d = 0.0;   // dissipation gain, mm^-6 s^3 (0 recovers the pure law)
    double E_d = 0.0;   // target energy level, mm^4/s^2
};

// Decompose a pair of agent states into relative motion and shape variables.
// Throws CollocationError when the agents coincide.
std::pair<RelativeState, MmcShape> shape_from_pair(const AgentState2& a1,
                                                   const AgentState2& a2);

// Pure mutual-camouflage command, u = -mu * lambda (1/s). This is the common
// quantity shared by both agents; agent i steers with curvature u / nu_i.
double mmc_u(const MmcShape& shape, double mu);

// Command with the dissipative stabilizer:
//   u_tot = -mu*lambda + k_d * lambda * gamma * (E(rho, gamma) - E_d).
double mmc_u_dissipative(const MmcShape& shape, const MmcParams& params);

// Conserved quantity E(rho, gamma) = rho^2 (delta^2 - gamma^2) e^{-2 mu rho}.
double conserved_energy(double rho, double gamma, double delta, double mu);

// Common command for a live pair; k_d = 0 in params gives the pure law.
double mmc_command(const AgentState2& a1, const AgentState2& a2, const MmcParams& params);

struct ReducedState {
    double rho = 0.0;    // mm
    double gamma = 0.0;  // mm/s
};

// One 4th-order step of the reduced dynamics
//   rhodot = gamma,  gammadot = (1/rho - mu)(delta^2 - gamma^2).
// With `conserve` set, the result is projected back onto the level set
// E = E(rho_in, gamma_in) by a 1D correction of gamma (of rho when gamma sits
// on or next to the +-delta boundary).
ReducedState reduced_step(ReducedState s, double delta, double mu, double dt, bool conserve);

// Two-agent reference trajectory under the pure law, integrated at a fine
// substep (dt_fine <= dt_coarse / 20 recommended) and sampled on the coarse
// control grid. Used as the oracle for the position-error metric.
struct PairTrajectory {
    double dt = 0.0;  // coarse spacing, s
    std::vector<std::array<AgentState2, 2>> states;
};

PairTrajectory ideal_pair_trajectory(const AgentState2& a1, const AgentState2& a2,
                                     const MmcParams& params, double dt_fine,
                                     double duration, double dt_coarse = 0.04);

// Euclidean position error per step per agent, mm. Inputs are indexed
// [step][agent]; throws AlignmentError on shape mismatch.
std::vector<std::vector<double>> error_metric(const std::vector<std::vector<Vec2>>& expt,
                                              const std::vector<std::vector<Vec2>>& ideal);

}  // namespace swarmsteer
