#include "swarmsteer/tva.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swarmsteer/error.hpp"

namespace swarmsteer {

namespace {

constexpr double kVcomRelativeEps = 1e-9;
constexpr double kUnitNormTol = 1e-6;
constexpr double kCollocationRho = 1e-9;  // mm

template <typename V>
Neighborhood k_nearest_impl(std::span<const V> positions, int i, int K) {
    int n = static_cast<int>(positions.size());
    if (i < 0 || i >= n) {
        throw ContractViolationError("k_nearest: focal index out of range");
    }
    if (K < 1 || K >= n) {
        throw InsufficientAgentsError("k_nearest: need K in [1, n-1], got K=" +
                                      std::to_string(K) + " with n=" + std::to_string(n));
    }
    std::vector<std::pair<double, int>> by_dist;
    by_dist.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        by_dist.emplace_back((positions[j] - positions[i]).norm2(), j);
    }
    std::sort(by_dist.begin(), by_dist.end());
    Neighborhood nbhd;
    nbhd.members.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) nbhd.members.push_back(by_dist[static_cast<std::size_t>(k)].second);
    return nbhd;
}

template <typename State, typename V>
V com_velocity_impl(std::span<const State> states, const Neighborhood& nbhd) {
    if (nbhd.members.empty()) {
        throw ContractViolationError("com_velocity: empty neighborhood");
    }
    V sum{};
    for (int j : nbhd.members) {
        sum += states[static_cast<std::size_t>(j)].nu * states[static_cast<std::size_t>(j)].x;
    }
    return sum / static_cast<double>(nbhd.members.size());
}

template <typename State>
double mean_neighbor_speed(std::span<const State> states, const Neighborhood& nbhd) {
    double sum = 0.0;
    for (int j : nbhd.members) sum += states[static_cast<std::size_t>(j)].nu;
    return sum / static_cast<double>(nbhd.members.size());
}

template <typename State, typename V, typename Out>
Out com_direction_impl(std::span<const State> states, int i, int K) {
    std::vector<V> positions;
    positions.reserve(states.size());
    for (const auto& s : states) positions.push_back(s.r);
    int n = static_cast<int>(states.size());

    Neighborhood nbhd = k_nearest_impl<V>(positions, i, K);
    V v = com_velocity_impl<State, V>(states, nbhd);
    double eps = kVcomRelativeEps * mean_neighbor_speed(states, nbhd);
    if (v.norm() >= eps) {
        return {v.normalized(), K};
    }
    if (K + 1 >= n) {
        throw DegenerateNeighborhoodError(
            "COM velocity vanished and no additional neighbor is available");
    }
    nbhd = k_nearest_impl<V>(positions, i, K + 1);
    v = com_velocity_impl<State, V>(states, nbhd);
    eps = kVcomRelativeEps * mean_neighbor_speed(states, nbhd);
    if (v.norm() >= eps) {
        return {v.normalized(), K + 1};
    }
    throw DegenerateNeighborhoodError("COM velocity vanished even with K+1 neighbors");
}

template <typename V>
double contrast_impl(V x_i, V x_n) {
    if (std::abs(x_i.norm() - 1.0) > kUnitNormTol || std::abs(x_n.norm() - 1.0) > kUnitNormTol) {
        throw ContractViolationError("contrast requires unit directions");
    }
    return 1.0 - x_i.dot(x_n);
}

}  // namespace

Neighborhood k_nearest(std::span<const Vec2> positions, int i, int K) {
    return k_nearest_impl<Vec2>(positions, i, K);
}

Neighborhood k_nearest(std::span<const Vec3> positions, int i, int K) {
    return k_nearest_impl<Vec3>(positions, i, K);
}

Vec2 com_velocity(std::span<const AgentState2> states, const Neighborhood& nbhd) {
    return com_velocity_impl<AgentState2, Vec2>(states, nbhd);
}

Vec3 com_velocity(std::span<const AgentState3> states, const Neighborhood& nbhd) {
    return com_velocity_impl<AgentState3, Vec3>(states, nbhd);
}

ComDirection2 com_direction_with_fallback(std::span<const AgentState2> states, int i, int K) {
    return com_direction_impl<AgentState2, Vec2, ComDirection2>(states, i, K);
}

ComDirection3 com_direction_with_fallback(std::span<const AgentState3> states, int i, int K) {
    return com_direction_impl<AgentState3, Vec3, ComDirection3>(states, i, K);
}

double contrast(Vec2 x_i, Vec2 x_n) { return contrast_impl(x_i, x_n); }

double contrast(Vec3 x_i, Vec3 x_n) { return contrast_impl(x_i, x_n); }

Curvature2 tva_controls(const AgentState2& s, Vec2 x_n, double mu) {
    return {mu * x_n.dot(s.y) / s.nu};
}

Curvature3 tva_controls(const AgentState3& s, Vec3 x_n, double mu) {
    return {mu * x_n.dot(s.y) / s.nu, mu * x_n.dot(s.z) / s.nu};
}

TvaShape shape_from_states(const AgentState2& a1, const AgentState2& a2) {
    Vec2 r = a2.r - a1.r;
    TvaShape sh;
    sh.rho = r.norm();
    if (!(sh.rho > kCollocationRho)) {
        throw CollocationError("agents are collocated (rho < 1e-9 mm)");
    }
    double vartheta = std::atan2(r.y, r.x);
    double theta1 = heading_of(a1);
    double theta2 = heading_of(a2);
    sh.psi = wrap_angle(kPi - vartheta + theta1);
    sh.phi = wrap_angle(theta1 - theta2);
    return sh;
}

namespace {

struct ShapeDeriv {
    double drho, dpsi, dphi;
};

ShapeDeriv shape_rhs(const TvaShape& s, double nu1, double nu2, double mu) {
    double sp = std::sin(s.phi);
    return {nu1 * std::cos(s.psi) - nu2 * std::cos(s.psi - s.phi),
            -mu * sp - (nu1 * std::sin(s.psi) - nu2 * std::sin(s.psi - s.phi)) / s.rho,
            -2.0 * mu * sp};
}

}  // namespace

TvaShape shape_step_closed_loop(TvaShape s, double nu1, double nu2, double mu, double dt) {
    auto at = [&](double h, const ShapeDeriv& d) {
        TvaShape t;
        t.rho = s.rho + h * d.drho;
        t.psi = s.psi + h * d.dpsi;
        t.phi = s.phi + h * d.dphi;
        if (!(t.rho > 0.0)) {
            throw CollocationError("closed-loop shape step crossed rho = 0");
        }
        return t;
    };
    ShapeDeriv k1 = shape_rhs(s, nu1, nu2, mu);
    ShapeDeriv k2 = shape_rhs(at(0.5 * dt, k1), nu1, nu2, mu);
    ShapeDeriv k3 = shape_rhs(at(0.5 * dt, k2), nu1, nu2, mu);
    ShapeDeriv k4 = shape_rhs(at(dt, k3), nu1, nu2, mu);
    TvaShape out;
    out.rho = s.rho + (dt / 6.0) * (k1.drho + 2.0 * k2.drho + 2.0 * k3.drho + k4.drho);
    out.psi = wrap_angle(s.psi + (dt / 6.0) * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi));
    out.phi = wrap_angle(s.phi + (dt / 6.0) * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi));
    if (!(out.rho > 0.0)) {
        throw CollocationError("closed-loop shape step crossed rho = 0");
    }
    return out;
}

double theta_closed_form(double theta0, double mu, double t) {
    if (theta0 == 0.0) return 0.0;
    if (theta0 == 2.0) return 2.0;
    if (!(theta0 > 0.0) || !(theta0 < 2.0)) {
        throw ContractViolationError("theta_closed_form requires Theta(0) in [0, 2]");
    }
    double c = 2.0 / theta0 - 1.0;
    double e = std::exp(-4.0 * mu * t);
    return 2.0 * e / (c + e);
}

Mat3 shape_matrix_from_poses(const AgentState2& a1, const AgentState2& a2) {
    Vec2 r = a2.r - a1.r;
    return {{{a1.x.dot(a2.x), a1.x.dot(a2.y), a1.x.dot(r)},
             {a1.y.dot(a2.x), a1.y.dot(a2.y), a1.y.dot(r)},
             {0.0, 0.0, 1.0}}};
}

Mat3 shape_matrix_from_shape(const TvaShape& s) {
    double cp = std::cos(s.phi), sp = std::sin(s.phi);
    double cpsi = std::cos(s.psi), spsi = std::sin(s.psi);
    return {{{cp, sp, -s.rho * cpsi},
             {-sp, cp, s.rho * spsi},
             {0.0, 0.0, 1.0}}};
}

}  // namespace swarmsteer
