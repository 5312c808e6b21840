#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmsteer/frenet.hpp"
#include "swarmsteer/mmc.hpp"
#include "swarmsteer/tva.hpp"
#include "swarmsteer/vec.hpp"

namespace swarmsteer {

enum class Law { Mmc, Tva };

struct AgentSpec {
    Vec2 pos;            // mm
    double heading = 0;  // rad
    double speed = 0;    // mm/s
};

struct AvoidanceParams {
    double range_mm = 300.0;
    double omega_sat = 50.0;            // rad/s
    double cone_halfangle = kPi / 2.0;  // rad, forward cone
};

// Scheduled neighborhood-size change, effective from time t onward.
struct KEvent {
    double t = 0;
    int K = 1;
};

struct Waypoint {
    double t = 0;
    Vec2 pos;
};

// Scripted external agent. It moves on straight segments between waypoints
// with exact arrival, is excluded from every neighborhood and from
// Theta_total, and influences the swarm only through collision avoidance.
struct PerturberScript {
    std::vector<Waypoint> waypoints;
};

struct NoiseParams {
    double heading_sigma = 0.0;  // rad per control step
    std::uint64_t seed = 0;
};

struct MmcConfig {
    double mu = 1e-3;           // 1/mm
    double k_d = 0.0;           // mm^-6 s^3
    std::optional<double> E_d;  // defaults to E(rho_0, gamma_0)
};

struct SimConfig {
    std::string name = "run";
    Law law = Law::Tva;
    double dt = 0.04;       // s (25 Hz)
    double duration = 10.0; // s
    std::vector<AgentSpec> agents;
    MmcConfig mmc;
    TvaParams tva;
    AvoidanceParams avoidance;
    std::vector<KEvent> events;
    std::optional<PerturberScript> perturber;
    NoiseParams noise;
    double u_max = kDefaultCurvatureMax;  // 1/mm
};

struct AgentRecord {
    Vec2 pos;
    double heading = 0;      // rad
    double u = 0;            // commanded curvature, 1/mm
    double omega_deg_s = 0;  // commanded turning rate
    double theta = 0;        // contrast (TVA)
    int used_k = 0;
    bool avoidance = false;
    bool clamped = false;
};

// One control tick. Real agents come first; a perturber, when scripted, is
// appended as the last row.
struct StepRecord {
    double t = 0;
    std::vector<AgentRecord> agents;
    double theta_total = 0;
    bool has_mmc = false;
    double rho = 0;             // mm
    double gamma = 0;           // mm/s
    double lambda = 0;          // mm/s
    double energy = 0;          // mm^4/s^2
    double energy_pct_err = 0;  // vs the run's E_d, percent
    bool perturber_contact = false;
    int effective_k = 0;
};

struct AvoidanceDecision {
    double omega = 0;  // signed, rad/s
    int obstacle = -1; // index into the obstacle span
};

// Saturated-turn avoidance: trips when an obstacle sits within range and
// inside the forward cone. Steers away from the nearest such obstacle,
// counter-clockwise on a dead-ahead tie.
std::optional<AvoidanceDecision> avoidance_override(const AgentState2& s,
                                                    std::span<const Vec2> obstacles,
                                                    const AvoidanceParams& params);

// Neighborhood size in force at time t (most recent event at or before t).
int apply_events(double t, int initial_k, std::span<const KEvent> events);

// Connected groups of agents under the pair relation "headings aligned within
// angle_tol and mutually within 2x the group's spatial scale". The scale of a
// heading-aligned group is its largest nearest-neighbor spacing.
int cluster_count(std::span<const Vec2> positions, std::span<const double> headings,
                  double angle_tol = 5.0 * kPi / 180.0);
int cluster_count(const StepRecord& final_record, int n_real,
                  double angle_tol = 5.0 * kPi / 180.0);

Vec2 perturber_position(const PerturberScript& script, double t);
double perturber_heading(const PerturberScript& script, double t);

// Throws ConfigError when a SimConfig violates its invariants.
void validate(const SimConfig& config);

// Energy target an MMC run will regulate to (explicit E_d or the initial E).
double resolved_energy_target(const SimConfig& config);

// Deterministic closed-loop rollout at the configured control rate. Produces
// floor(duration/dt) + 1 records; identical configs give identical output.
std::vector<StepRecord> run(const SimConfig& config);

}  // namespace swarmsteer
