#pragma once

#include "swarmsteer/vec.hpp"

namespace swarmsteer {

// Natural curvature commands, 1/mm.
struct Curvature2 {
    double u = 0.0;
};

struct Curvature3 {
    double u = 0.0;
    double v = 0.0;
};

// Unit-mass self-steering particle in the plane: position r (mm), unit
// tangent x, unit normal y = perp(x), constant speed nu (mm/s).
struct AgentState2 {
    Vec2 r;
    Vec2 x;
    Vec2 y;
    double nu = 0.0;
};

// 3D agent with right-handed orthonormal frame {x, y, z}.
struct AgentState3 {
    Vec3 r;
    Vec3 x;
    Vec3 y;
    Vec3 z;
    double nu = 0.0;
};

AgentState2 make_agent2(Vec2 position, double heading, double speed);

// Heading angle of the tangent, (-pi, pi].
double heading_of(const AgentState2& s);

// Re-orthonormalize a drifted frame. Preserves the tangent direction exactly;
// in 2D the normal is reset to perp(x). Throws FrameDegeneracyError on a
// near-zero tangent.
AgentState2 renormalize(AgentState2 s);
AgentState3 renormalize(AgentState3 s);

// One classical 4th-order fixed step of the frame dynamics with constant
// curvature, followed by renormalization. Speed is untouched.
AgentState2 step_frame_2d(const AgentState2& s, Curvature2 c, double dt);
AgentState3 step_frame_3d(const AgentState3& s, Curvature3 c, double dt);

// Turning rate in degrees/second for a speed (mm/s) and curvature (1/mm).
double turning_rate_deg_s(double nu, double u);

inline constexpr double kDefaultCurvatureMax = 10.0;  // 1/mm

struct ClampResult {
    double u = 0.0;
    bool clamped = false;
};

ClampResult clamp_curvature(double u, double u_max);

}  // namespace swarmsteer
