#include "swarmsteer/mmc.hpp"

#include <cmath>
#include <string>

#include "swarmsteer/error.hpp"

namespace swarmsteer {

namespace {

constexpr double kCollocationRho = 1e-9;  // mm
constexpr int kProjectionMaxIter = 50;

// Safeguarded Newton with bisection fallback on a bracketed root.
// f must have opposite signs at lo and hi.
template <typename F, typename DF>
double solve_bracketed(F f, DF df, double lo, double hi, double flo, double scale) {
    double x = 0.5 * (lo + hi);
    double fx = f(x);
    bool lo_negative = flo < 0.0;
    for (int it = 0; it < kProjectionMaxIter; ++it) {
        if (std::abs(fx) <= 1e-13 * scale) return x;
        if ((fx < 0.0) == lo_negative) {
            lo = x;
        } else {
            hi = x;
        }
        double d = df(x);
        double step = d != 0.0 ? fx / d : 0.0;
        double cand = x - step;
        if (!(cand > lo) || !(cand < hi) || step == 0.0) {
            cand = 0.5 * (lo + hi);
        }
        if (cand == x) return x;
        x = cand;
        fx = f(x);
    }
    throw ProjectionError("level-set projection did not converge in 50 iterations");
}

struct ReducedDeriv {
    double drho, dgamma;
};

ReducedDeriv reduced_rhs(double rho, double gamma, double delta, double mu) {
    return {gamma, (1.0 / rho - mu) * (delta * delta - gamma * gamma)};
}

}  // namespace

std::pair<RelativeState, MmcShape> shape_from_pair(const AgentState2& a1,
                                                   const AgentState2& a2) {
    RelativeState rel;
    rel.r = a1.r - a2.r;
    rel.g = a1.nu * a1.x - a2.nu * a2.x;
    rel.h = perp(rel.g);
    MmcShape sh;
    sh.rho = rel.r.norm();
    if (!(sh.rho > kCollocationRho)) {
        throw CollocationError("agents are collocated (rho < 1e-9 mm)");
    }
    sh.gamma = rel.r.dot(rel.g) / sh.rho;
    sh.lambda = rel.r.dot(rel.h) / sh.rho;
    sh.delta = rel.g.norm();
    return {rel, sh};
}

double mmc_u(const MmcShape& shape, double mu) { return -mu * shape.lambda; }

double mmc_u_dissipative(const MmcShape& shape, const MmcParams& params) {
    double e = conserved_energy(shape.rho, shape.gamma, shape.delta, params.mu);
    return -params.mu * shape.lambda +
           params.k_d * shape.lambda * shape.gamma * (e - params.E_d);
}

double conserved_energy(double rho, double gamma, double delta, double mu) {
    return rho * rho * (delta * delta - gamma * gamma) * std::exp(-2.0 * mu * rho);
}

double mmc_command(const AgentState2& a1, const AgentState2& a2, const MmcParams& params) {
    MmcShape sh = shape_from_pair(a1, a2).second;
    return params.k_d == 0.0 ? mmc_u(sh, params.mu) : mmc_u_dissipative(sh, params);
}

namespace {

// Restore E(rho, gamma) = e_target by scaling gamma (rho held). The root in
// the scale factor c of A (delta^2 - c^2 gamma^2) - e_target is bracketed on
// [0, delta/|gamma|].
double project_gamma(double rho, double gamma, double delta, double mu, double e_target) {
    double a = rho * rho * std::exp(-2.0 * mu * rho);
    double root2 = delta * delta - e_target / a;
    if (root2 < 0.0) {
        throw ProjectionError("gamma projection infeasible at this rho");
    }
    // Closed form exists; keep the safeguarded solve for the generic path but
    // seed the bracket tightly around it.
    double target = std::sqrt(root2);
    double g = std::abs(gamma);
    auto f = [&](double c) { return a * (delta * delta - c * c * g * g) - e_target; };
    auto df = [&](double c) { return -2.0 * a * c * g * g; };
    double lo = 0.0;
    double hi = std::max(1.5 * target / g, 1.0);
    double flo = f(lo);
    if (flo < 0.0) {
        throw ProjectionError("gamma projection bracket lost");
    }
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw ProjectionError("gamma projection bracket lost");
    }
    double c = solve_bracketed(f, df, lo, hi, flo, std::max(e_target, 1.0));
    return std::copysign(c * g, gamma);
}

// Restore the level set by moving rho on its current side of the peak 1/mu.
double project_rho(double rho, double gamma, double delta, double mu, double e_target) {
    double lam2 = delta * delta - gamma * gamma;
    if (!(lam2 > 0.0)) {
        throw ProjectionError("rho projection infeasible: gamma on the delta boundary");
    }
    double t = e_target / lam2;  // want rho^2 e^{-2 mu rho} = t
    auto g = [&](double r) { return r * r * std::exp(-2.0 * mu * r) - t; };
    auto dg = [&](double r) { return 2.0 * r * (1.0 - mu * r) * std::exp(-2.0 * mu * r); };
    double peak = 1.0 / mu;
    double lo, hi;
    if (rho <= peak) {
        lo = 1e-12;
        hi = peak;
        if (g(hi) < 0.0) throw ProjectionError("rho projection infeasible: target above peak");
    } else {
        lo = peak;
        hi = rho;
        while (g(hi) > 0.0) {
            hi *= 2.0;
            if (hi > 1e12) throw ProjectionError("rho projection bracket lost");
        }
        if (g(lo) < 0.0) throw ProjectionError("rho projection infeasible: target above peak");
    }
    double flo = g(lo);
    return solve_bracketed(g, dg, lo, hi, flo, std::max(e_target, 1.0));
}

}  // namespace

ReducedState reduced_step(ReducedState s, double delta, double mu, double dt, bool conserve) {
    double e0 = conserve ? conserved_energy(s.rho, s.gamma, delta, mu) : 0.0;

    ReducedDeriv k1 = reduced_rhs(s.rho, s.gamma, delta, mu);
    ReducedDeriv k2 = reduced_rhs(s.rho + 0.5 * dt * k1.drho, s.gamma + 0.5 * dt * k1.dgamma, delta, mu);
    ReducedDeriv k3 = reduced_rhs(s.rho + 0.5 * dt * k2.drho, s.gamma + 0.5 * dt * k2.dgamma, delta, mu);
    ReducedDeriv k4 = reduced_rhs(s.rho + dt * k3.drho, s.gamma + dt * k3.dgamma, delta, mu);
    ReducedState out;
    out.rho = s.rho + (dt / 6.0) * (k1.drho + 2.0 * k2.drho + 2.0 * k3.drho + k4.drho);
    out.gamma = s.gamma + (dt / 6.0) * (k1.dgamma + 2.0 * k2.dgamma + 2.0 * k3.dgamma + k4.dgamma);

    if (!(out.rho > 0.0) || !std::isfinite(out.rho) || !std::isfinite(out.gamma)) {
        throw DomainExitError("reduced MMC state left rho > 0");
    }
    if (!conserve) return out;

    bool gamma_on_boundary = std::abs(delta - std::abs(out.gamma)) <= 1e-6 * delta;
    bool gamma_tiny = std::abs(out.gamma) <= 1e-12 * delta;
    if (gamma_on_boundary || gamma_tiny) {
        out.rho = project_rho(out.rho, out.gamma, delta, mu, e0);
        return out;
    }
    double a = out.rho * out.rho * std::exp(-2.0 * mu * out.rho);
    if (delta * delta - e0 / a < 0.0) {
        out.rho = project_rho(out.rho, out.gamma, delta, mu, e0);
    } else {
        out.gamma = project_gamma(out.rho, out.gamma, delta, mu, e0);
    }
    return out;
}

namespace {

struct PairDeriv {
    Vec2 dr1, dx1, dy1, dr2, dx2, dy2;
};

PairDeriv pair_rhs(const AgentState2& a1, const AgentState2& a2, const MmcParams& params) {
    double u = mmc_command(a1, a2, params);
    double u1 = u / a1.nu;
    double u2 = u / a2.nu;
    return {a1.nu * a1.x, a1.nu * u1 * a1.y, -(a1.nu * u1) * a1.x,
            a2.nu * a2.x, a2.nu * u2 * a2.y, -(a2.nu * u2) * a2.x};
}

void pair_advance(AgentState2& a1, AgentState2& a2, const AgentState2& b1,
                  const AgentState2& b2, const PairDeriv& d, double h) {
    a1.r = b1.r + h * d.dr1;
    a1.x = b1.x + h * d.dx1;
    a1.y = b1.y + h * d.dy1;
    a2.r = b2.r + h * d.dr2;
    a2.x = b2.x + h * d.dx2;
    a2.y = b2.y + h * d.dy2;
}

void pair_rk4(AgentState2& a1, AgentState2& a2, const MmcParams& params, double h) {
    AgentState2 s1 = a1, s2 = a2;
    PairDeriv k1 = pair_rhs(s1, s2, params);
    AgentState2 t1 = s1, t2 = s2;
    pair_advance(t1, t2, s1, s2, k1, 0.5 * h);
    PairDeriv k2 = pair_rhs(t1, t2, params);
    pair_advance(t1, t2, s1, s2, k2, 0.5 * h);
    PairDeriv k3 = pair_rhs(t1, t2, params);
    pair_advance(t1, t2, s1, s2, k3, h);
    PairDeriv k4 = pair_rhs(t1, t2, params);
    double w = h / 6.0;
    a1.r = s1.r + w * (k1.dr1 + 2.0 * k2.dr1 + 2.0 * k3.dr1 + k4.dr1);
    a1.x = s1.x + w * (k1.dx1 + 2.0 * k2.dx1 + 2.0 * k3.dx1 + k4.dx1);
    a1.y = s1.y + w * (k1.dy1 + 2.0 * k2.dy1 + 2.0 * k3.dy1 + k4.dy1);
    a2.r = s2.r + w * (k1.dr2 + 2.0 * k2.dr2 + 2.0 * k3.dr2 + k4.dr2);
    a2.x = s2.x + w * (k1.dx2 + 2.0 * k2.dx2 + 2.0 * k3.dx2 + k4.dx2);
    a2.y = s2.y + w * (k1.dy2 + 2.0 * k2.dy2 + 2.0 * k3.dy2 + k4.dy2);
    a1 = renormalize(a1);
    a2 = renormalize(a2);
    if (!a1.r.finite() || !a2.r.finite()) {
        throw IntegrationError("non-finite pair state in fine-step integration");
    }
}

}  // namespace

PairTrajectory ideal_pair_trajectory(const AgentState2& a1, const AgentState2& a2,
                                     const MmcParams& params, double dt_fine,
                                     double duration, double dt_coarse) {
    if (!(dt_fine > 0.0) || !(dt_coarse > 0.0) || !(duration > 0.0)) {
        throw ContractViolationError("ideal_pair_trajectory requires positive timing");
    }
    MmcParams pure = params;
    pure.k_d = 0.0;  // the reference is the undamped law
    int substeps = static_cast<int>(std::ceil(dt_coarse / dt_fine - 1e-12));
    substeps = std::max(substeps, 1);
    double h = dt_coarse / substeps;
    long ticks = static_cast<long>(std::floor(duration / dt_coarse + 1e-9));

    PairTrajectory out;
    out.dt = dt_coarse;
    out.states.reserve(static_cast<std::size_t>(ticks) + 1);
    AgentState2 s1 = renormalize(a1), s2 = renormalize(a2);
    out.states.push_back({s1, s2});
    for (long k = 0; k < ticks; ++k) {
        for (int j = 0; j < substeps; ++j) {
            pair_rk4(s1, s2, pure, h);
        }
        out.states.push_back({s1, s2});
    }
    return out;
}

std::vector<std::vector<double>> error_metric(const std::vector<std::vector<Vec2>>& expt,
                                              const std::vector<std::vector<Vec2>>& ideal) {
    if (expt.size() != ideal.size()) {
        throw AlignmentError("error_metric: series lengths differ (" +
                             std::to_string(expt.size()) + " vs " +
                             std::to_string(ideal.size()) + ")");
    }
    std::vector<std::vector<double>> e(expt.size());
    for (std::size_t k = 0; k < expt.size(); ++k) {
        if (expt[k].size() != ideal[k].size()) {
            throw AlignmentError("error_metric: agent counts differ at step " +
                                 std::to_string(k));
        }
        e[k].reserve(expt[k].size());
        for (std::size_t i = 0; i < expt[k].size(); ++i) {
            e[k].push_back((expt[k][i] - ideal[k][i]).norm());
        }
    }
    return e;
}

}  // namespace swarmsteer
