#include "swarmsteer/frenet.hpp"

#include <algorithm>
#include <cmath>

#include "swarmsteer/error.hpp"

namespace swarmsteer {

namespace {

constexpr double kDegenerateTangent = 1e-6;

struct Deriv2 {
    Vec2 dr, dx, dy;
};

Deriv2 rhs2(const AgentState2& s, double u) {
    return {s.nu * s.x, s.nu * u * s.y, -(s.nu * u) * s.x};
}

AgentState2 advance2(const AgentState2& s, const Deriv2& d, double h) {
    AgentState2 out = s;
    out.r += h * d.dr;
    out.x += h * d.dx;
    out.y += h * d.dy;
    return out;
}

struct Deriv3 {
    Vec3 dr, dx, dy, dz;
};

}  // namespace

AgentState2 make_agent2(Vec2 position, double heading, double speed) {
    AgentState2 s;
    s.r = position;
    s.x = {std::cos(heading), std::sin(heading)};
    s.y = perp(s.x);
    s.nu = speed;
    return s;
}

double heading_of(const AgentState2& s) { return std::atan2(s.x.y, s.x.x); }

AgentState2 renormalize(AgentState2 s) {
    double n = s.x.norm();
    if (!(n > kDegenerateTangent)) {
        throw FrameDegeneracyError("near-zero tangent in 2D frame renormalization");
    }
    s.x = s.x / n;
    s.y = perp(s.x);
    return s;
}

AgentState3 renormalize(AgentState3 s) {
    double n = s.x.norm();
    if (!(n > kDegenerateTangent)) {
        throw FrameDegeneracyError("near-zero tangent in 3D frame renormalization");
    }
    s.x = s.x / n;
    s.y = s.y - s.y.dot(s.x) * s.x;
    double ny = s.y.norm();
    if (!(ny > kDegenerateTangent)) {
        throw FrameDegeneracyError("degenerate normal in 3D frame renormalization");
    }
    s.y = s.y / ny;
    s.z = s.x.cross(s.y);
    return s;
}

AgentState2 step_frame_2d(const AgentState2& s, Curvature2 c, double dt) {
    Deriv2 k1 = rhs2(s, c.u);
    Deriv2 k2 = rhs2(advance2(s, k1, 0.5 * dt), c.u);
    Deriv2 k3 = rhs2(advance2(s, k2, 0.5 * dt), c.u);
    Deriv2 k4 = rhs2(advance2(s, k3, dt), c.u);
    AgentState2 out = s;
    out.r += (dt / 6.0) * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
    out.x += (dt / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.y += (dt / 6.0) * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
    if (!out.r.finite() || !out.x.finite() || !out.y.finite()) {
        throw IntegrationError("non-finite 2D frame state after step");
    }
    return renormalize(out);
}

AgentState3 step_frame_3d(const AgentState3& s, Curvature3 c, double dt) {
    auto rhs = [&](const AgentState3& a) {
        Deriv3 d;
        d.dr = a.nu * a.x;
        d.dx = a.nu * (c.u * a.y + c.v * a.z);
        d.dy = -(a.nu * c.u) * a.x;
        d.dz = -(a.nu * c.v) * a.x;
        return d;
    };
    auto advance = [](const AgentState3& a, const Deriv3& d, double h) {
        AgentState3 out = a;
        out.r += h * d.dr;
        out.x += h * d.dx;
        out.y += h * d.dy;
        out.z += h * d.dz;
        return out;
    };
    Deriv3 k1 = rhs(s);
    Deriv3 k2 = rhs(advance(s, k1, 0.5 * dt));
    Deriv3 k3 = rhs(advance(s, k2, 0.5 * dt));
    Deriv3 k4 = rhs(advance(s, k3, dt));
    AgentState3 out = s;
    out.r += (dt / 6.0) * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
    out.x += (dt / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.y += (dt / 6.0) * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
    out.z += (dt / 6.0) * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
    if (!out.r.finite() || !out.x.finite() || !out.y.finite() || !out.z.finite()) {
        throw IntegrationError("non-finite 3D frame state after step");
    }
    return renormalize(out);
}

double turning_rate_deg_s(double nu, double u) { return (180.0 / kPi) * nu * u; }

ClampResult clamp_curvature(double u, double u_max) {
    if (u > u_max) return {u_max, true};
    if (u < -u_max) return {-u_max, true};
    return {u, false};
}

}  // namespace swarmsteer
