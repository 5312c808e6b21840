#include "swarmsteer/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "swarmsteer/error.hpp"
#include "swarmsteer/rng.hpp"

namespace swarmsteer {

namespace {

constexpr double kVcomRelativeEps = 1e-9;

long tick_count(double duration, double dt) {
    return static_cast<long>(std::floor(duration / dt + 1e-9));
}

Vec2 rotate(Vec2 v, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Per-tick control decisions. Agents with a frozen command (avoidance
// override or a clamped law output) hold it for the whole step; the rest
// re-evaluate the smooth law at every integrator stage.
struct TickPlan {
    std::vector<double> u_cmd;
    std::vector<bool> frozen;
    std::vector<Neighborhood> nbhd;   // TVA: topology frozen for the tick
    std::vector<Vec2> x_n_snapshot;   // fallback direction for degenerate stages
    MmcParams mmc;                    // resolved E_d
};

struct Deriv2 {
    Vec2 dr, dx, dy;
};

class Engine {
public:
    explicit Engine(const SimConfig& config)
        : cfg_(config), noise_rng_(Rng::substream(config.noise.seed, 1)) {
        for (const AgentSpec& a : cfg_.agents) {
            states_.push_back(make_agent2(a.pos, a.heading, a.speed));
        }
        if (cfg_.law == Law::Mmc) {
            mmc_params_.mu = cfg_.mmc.mu;
            mmc_params_.k_d = cfg_.mmc.k_d;
            mmc_params_.E_d = resolved_energy_target(cfg_);
        }
    }

    std::vector<StepRecord> rollout() {
        long ticks = tick_count(cfg_.duration, cfg_.dt);
        std::vector<StepRecord> records;
        records.reserve(static_cast<std::size_t>(ticks) + 1);
        for (long k = 0; k <= ticks; ++k) {
            double t = static_cast<double>(k) * cfg_.dt;
            TickPlan plan;
            StepRecord rec;
            try {
                plan = plan_tick(t, rec);
            } catch (const Error& e) {
                throw_with_context(e, k, -1);
            }
            records.push_back(std::move(rec));
            if (k == ticks) break;
            try {
                advance(plan, t);
            } catch (const Error& e) {
                throw_with_context(e, k, -1);
            }
        }
        return records;
    }

private:
    [[noreturn]] void throw_with_context(const Error& e, long step, int agent) {
        std::string ctx = " [step " + std::to_string(step);
        if (agent >= 0) ctx += ", agent " + std::to_string(agent);
        ctx += "]";
        throw Error(std::string(e.what()) + ctx);
    }

    int n_real() const { return static_cast<int>(cfg_.agents.size()); }

    std::vector<Vec2> positions() const {
        std::vector<Vec2> p;
        p.reserve(states_.size());
        for (const auto& s : states_) p.push_back(s.r);
        return p;
    }

    TickPlan plan_tick(double t, StepRecord& rec) {
        int n = n_real();
        TickPlan plan;
        plan.u_cmd.assign(static_cast<std::size_t>(n), 0.0);
        plan.frozen.assign(static_cast<std::size_t>(n), false);
        plan.mmc = mmc_params_;

        rec.t = t;
        rec.agents.resize(static_cast<std::size_t>(n));
        rec.has_mmc = cfg_.law == Law::Mmc;

        int k_eff = cfg_.law == Law::Tva ? apply_events(t, cfg_.tva.K, cfg_.events) : 0;
        rec.effective_k = k_eff;

        // Law commands from the beginning-of-tick snapshot.
        std::vector<double> u_law(static_cast<std::size_t>(n), 0.0);
        if (cfg_.law == Law::Mmc) {
            auto [rel, shape] = shape_from_pair(states_[0], states_[1]);
            double u_common = cfg_.mmc.k_d == 0.0 ? mmc_u(shape, mmc_params_.mu)
                                                  : mmc_u_dissipative(shape, mmc_params_);
            for (int i = 0; i < n; ++i) {
                u_law[static_cast<std::size_t>(i)] = u_common / states_[static_cast<std::size_t>(i)].nu;
            }
            rec.rho = shape.rho;
            rec.gamma = shape.gamma;
            rec.lambda = shape.lambda;
            rec.energy = conserved_energy(shape.rho, shape.gamma, shape.delta, mmc_params_.mu);
            rec.energy_pct_err = 100.0 * std::abs(rec.energy - mmc_params_.E_d) /
                                 std::abs(mmc_params_.E_d);
        } else {
            plan.nbhd.resize(static_cast<std::size_t>(n));
            plan.x_n_snapshot.resize(static_cast<std::size_t>(n));
            std::vector<Vec2> pos = positions();
            for (int i = 0; i < n; ++i) {
                ComDirection2 com;
                try {
                    com = com_direction_with_fallback(states_, i, k_eff);
                } catch (const Error& e) {
                    throw IntegrationError(std::string(e.what()) + " [agent " +
                                           std::to_string(i) + "]");
                }
                auto iu = static_cast<std::size_t>(i);
                plan.nbhd[iu] = k_nearest(std::span<const Vec2>(pos), i, com.used_k);
                plan.x_n_snapshot[iu] = com.direction;
                u_law[iu] = tva_controls(states_[iu], com.direction, cfg_.tva.mu).u;
                rec.agents[iu].used_k = com.used_k;
                rec.agents[iu].theta = contrast(states_[iu].x, com.direction);
            }
            if (n == 2) {
                // Equal by symmetry; store one shared value so the logged pair
                // is bit-identical.
                double common = 1.0 - states_[0].x.dot(states_[1].x) /
                                          (states_[0].x.norm() * states_[1].x.norm());
                rec.agents[0].theta = common;
                rec.agents[1].theta = common;
            }
            for (int i = 0; i < n; ++i) rec.theta_total += rec.agents[static_cast<std::size_t>(i)].theta;
        }

        // Avoidance override and curvature clamp.
        for (int i = 0; i < n; ++i) {
            auto iu = static_cast<std::size_t>(i);
            std::vector<Vec2> obstacles;
            std::vector<int> obstacle_ids;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                obstacles.push_back(states_[static_cast<std::size_t>(j)].r);
                obstacle_ids.push_back(j);
            }
            if (cfg_.perturber) {
                obstacles.push_back(perturber_position(*cfg_.perturber, t));
                obstacle_ids.push_back(-2);  // perturber marker
            }
            std::optional<AvoidanceDecision> avoid =
                avoidance_override(states_[iu], obstacles, cfg_.avoidance);

            AgentRecord& ar = rec.agents[iu];
            ar.pos = states_[iu].r;
            ar.heading = heading_of(states_[iu]);
            if (avoid) {
                ar.avoidance = true;
                if (obstacle_ids[static_cast<std::size_t>(avoid->obstacle)] == -2) {
                    rec.perturber_contact = true;
                }
                ClampResult cl = clamp_curvature(avoid->omega / states_[iu].nu, cfg_.u_max);
                plan.u_cmd[iu] = cl.u;
                plan.frozen[iu] = true;
                ar.clamped = cl.clamped;
                ar.u = cl.u;
                // Exact saturated rate unless the curvature clamp cut it.
                ar.omega_deg_s = cl.clamped ? turning_rate_deg_s(states_[iu].nu, cl.u)
                                            : (180.0 / kPi) * avoid->omega;
            } else {
                ClampResult cl = clamp_curvature(u_law[iu], cfg_.u_max);
                plan.u_cmd[iu] = cl.u;
                plan.frozen[iu] = cl.clamped;
                ar.clamped = cl.clamped;
                ar.u = cl.u;
                ar.omega_deg_s = turning_rate_deg_s(states_[iu].nu, cl.u);
            }
        }

        if (cfg_.perturber) {
            AgentRecord pr;
            pr.pos = perturber_position(*cfg_.perturber, t);
            pr.heading = perturber_heading(*cfg_.perturber, t);
            rec.agents.push_back(pr);
        }
        return plan;
    }

    // Curvatures for one integrator stage, honoring frozen commands.
    std::vector<double> stage_curvatures(const std::vector<AgentState2>& st,
                                         const TickPlan& plan) const {
        int n = n_real();
        std::vector<double> u(static_cast<std::size_t>(n), 0.0);
        if (cfg_.law == Law::Mmc) {
            bool any_live = false;
            for (int i = 0; i < n; ++i) any_live |= !plan.frozen[static_cast<std::size_t>(i)];
            double u_common = 0.0;
            if (any_live) {
                MmcShape shape = shape_from_pair(st[0], st[1]).second;
                u_common = plan.mmc.k_d == 0.0 ? mmc_u(shape, plan.mmc.mu)
                                               : mmc_u_dissipative(shape, plan.mmc);
            }
            for (int i = 0; i < n; ++i) {
                auto iu = static_cast<std::size_t>(i);
                u[iu] = plan.frozen[iu]
                            ? plan.u_cmd[iu]
                            : clamp_curvature(u_common / st[iu].nu, cfg_.u_max).u;
            }
        } else {
            for (int i = 0; i < n; ++i) {
                auto iu = static_cast<std::size_t>(i);
                if (plan.frozen[iu]) {
                    u[iu] = plan.u_cmd[iu];
                    continue;
                }
                Vec2 v{};
                double speed_sum = 0.0;
                for (int j : plan.nbhd[iu].members) {
                    auto ju = static_cast<std::size_t>(j);
                    v += st[ju].nu * st[ju].x;
                    speed_sum += st[ju].nu;
                }
                double count = static_cast<double>(plan.nbhd[iu].members.size());
                v = v / count;
                double eps = kVcomRelativeEps * (speed_sum / count);
                Vec2 dir = v.norm() >= eps ? v.normalized() : plan.x_n_snapshot[iu];
                u[iu] = clamp_curvature(tva_controls(st[iu], dir, cfg_.tva.mu).u, cfg_.u_max).u;
            }
        }
        return u;
    }

    std::vector<Deriv2> derivatives(const std::vector<AgentState2>& st,
                                    const TickPlan& plan) const {
        std::vector<double> u = stage_curvatures(st, plan);
        std::vector<Deriv2> d(st.size());
        for (std::size_t i = 0; i < st.size(); ++i) {
            const AgentState2& s = st[i];
            d[i] = {s.nu * s.x, s.nu * u[i] * s.y, -(s.nu * u[i]) * s.x};
        }
        return d;
    }

    void advance(const TickPlan& plan, double t) {
        double dt = cfg_.dt;
        std::vector<AgentState2> s0 = states_;
        auto blend = [&](const std::vector<Deriv2>& d, double h) {
            std::vector<AgentState2> out = s0;
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i].r += h * d[i].dr;
                out[i].x += h * d[i].dx;
                out[i].y += h * d[i].dy;
            }
            return out;
        };
        std::vector<Deriv2> k1 = derivatives(s0, plan);
        std::vector<Deriv2> k2 = derivatives(blend(k1, 0.5 * dt), plan);
        std::vector<Deriv2> k3 = derivatives(blend(k2, 0.5 * dt), plan);
        std::vector<Deriv2> k4 = derivatives(blend(k3, dt), plan);
        for (std::size_t i = 0; i < states_.size(); ++i) {
            AgentState2& s = states_[i];
            double w = dt / 6.0;
            s.r = s0[i].r + w * (k1[i].dr + 2.0 * k2[i].dr + 2.0 * k3[i].dr + k4[i].dr);
            s.x = s0[i].x + w * (k1[i].dx + 2.0 * k2[i].dx + 2.0 * k3[i].dx + k4[i].dx);
            s.y = s0[i].y + w * (k1[i].dy + 2.0 * k2[i].dy + 2.0 * k3[i].dy + k4[i].dy);
            if (!s.r.finite() || !s.x.finite()) {
                throw IntegrationError("non-finite agent state [agent " + std::to_string(i) + "]");
            }
            s = renormalize(s);
        }
        if (cfg_.noise.heading_sigma > 0.0) {
            for (std::size_t i = 0; i < states_.size(); ++i) {
                double kick = noise_rng_.normal(0.0, cfg_.noise.heading_sigma);
                states_[i].x = rotate(states_[i].x, kick);
                states_[i].y = perp(states_[i].x);
            }
        }
        (void)t;
    }

    SimConfig cfg_;
    std::vector<AgentState2> states_;
    MmcParams mmc_params_;
    Rng noise_rng_;
};

}  // namespace

std::optional<AvoidanceDecision> avoidance_override(const AgentState2& s,
                                                    std::span<const Vec2> obstacles,
                                                    const AvoidanceParams& params) {
    if (params.range_mm <= 0.0) return std::nullopt;
    int best = -1;
    double best_dist = 0.0;
    double best_bearing = 0.0;
    for (int j = 0; j < static_cast<int>(obstacles.size()); ++j) {
        Vec2 d = obstacles[static_cast<std::size_t>(j)] - s.r;
        double dist = d.norm();
        if (dist > params.range_mm) continue;
        double bearing = std::atan2(d.dot(s.y), d.dot(s.x));
        if (std::abs(bearing) > params.cone_halfangle) continue;
        if (best < 0 || dist < best_dist) {
            best = j;
            best_dist = dist;
            best_bearing = bearing;
        }
    }
    if (best < 0) return std::nullopt;
    double omega = best_bearing > 0.0 ? -params.omega_sat : params.omega_sat;
    return AvoidanceDecision{omega, best};
}

int apply_events(double t, int initial_k, std::span<const KEvent> events) {
    int k = initial_k;
    for (const KEvent& e : events) {
        if (e.t <= t) k = e.K;
        else break;
    }
    return k;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

int cluster_count(std::span<const Vec2> positions, std::span<const double> headings,
                  double angle_tol) {
    int n = static_cast<int>(positions.size());
    if (n == 0) return 0;
    auto aligned = [&](int i, int j) {
        return std::abs(angle_diff(headings[static_cast<std::size_t>(i)],
                                   headings[static_cast<std::size_t>(j)])) <= angle_tol;
    };

    UnionFind heading_groups(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (aligned(i, j)) heading_groups.unite(i, j);

    // Spatial scale per heading group: largest nearest-neighbor spacing.
    std::vector<double> scale(static_cast<std::size_t>(n), 0.0);
    for (int root = 0; root < n; ++root) {
        if (heading_groups.find(root) != root) continue;
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (heading_groups.find(i) == root) members.push_back(i);
        double s = 1.0;  // mm floor
        for (int i : members) {
            double nn = -1.0;
            for (int j : members) {
                if (j == i) continue;
                double d = (positions[static_cast<std::size_t>(j)] -
                            positions[static_cast<std::size_t>(i)]).norm();
                if (nn < 0.0 || d < nn) nn = d;
            }
            if (nn > s) s = nn;
        }
        scale[static_cast<std::size_t>(root)] = s;
    }

    UnionFind clusters(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (heading_groups.find(i) != heading_groups.find(j)) continue;
            if (!aligned(i, j)) continue;
            double limit = 2.0 * scale[static_cast<std::size_t>(heading_groups.find(i))];
            double d = (positions[static_cast<std::size_t>(j)] -
                        positions[static_cast<std::size_t>(i)]).norm();
            if (d <= limit) clusters.unite(i, j);
        }
    }
    int count = 0;
    for (int i = 0; i < n; ++i)
        if (clusters.find(i) == i) ++count;
    return count;
}

int cluster_count(const StepRecord& final_record, int n_real, double angle_tol) {
    std::vector<Vec2> pos;
    std::vector<double> hdg;
    for (int i = 0; i < n_real && i < static_cast<int>(final_record.agents.size()); ++i) {
        pos.push_back(final_record.agents[static_cast<std::size_t>(i)].pos);
        hdg.push_back(final_record.agents[static_cast<std::size_t>(i)].heading);
    }
    return cluster_count(pos, hdg, angle_tol);
}

Vec2 perturber_position(const PerturberScript& script, double t) {
    const auto& wp = script.waypoints;
    if (wp.empty()) throw ConfigError("perturber script has no waypoints");
    if (t <= wp.front().t) return wp.front().pos;
    if (t >= wp.back().t) return wp.back().pos;
    for (std::size_t k = 1; k < wp.size(); ++k) {
        if (t <= wp[k].t) {
            double span = wp[k].t - wp[k - 1].t;
            double f = span > 0.0 ? (t - wp[k - 1].t) / span : 1.0;
            return wp[k - 1].pos + f * (wp[k].pos - wp[k - 1].pos);
        }
    }
    return wp.back().pos;
}

double perturber_heading(const PerturberScript& script, double t) {
    const auto& wp = script.waypoints;
    if (wp.size() < 2) return 0.0;
    std::size_t seg = wp.size() - 1;
    for (std::size_t k = 1; k < wp.size(); ++k) {
        if (t <= wp[k].t) {
            seg = k;
            break;
        }
    }
    Vec2 d = wp[seg].pos - wp[seg - 1].pos;
    if (d.norm2() == 0.0) return 0.0;
    return std::atan2(d.y, d.x);
}

void validate(const SimConfig& c) {
    if (!(c.dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(c.duration > 0.0)) throw ConfigError("duration must be > 0");
    if (c.agents.size() < 2) throw ConfigError("need at least 2 agents");
    for (std::size_t i = 0; i < c.agents.size(); ++i) {
        const AgentSpec& a = c.agents[i];
        if (!(a.speed > 0.0)) throw ConfigError("agent " + std::to_string(i) + ": speed must be > 0");
        if (!std::isfinite(a.heading) || !a.pos.finite()) {
            throw ConfigError("agent " + std::to_string(i) + ": non-finite pose");
        }
    }
    if (c.avoidance.range_mm < 0.0) throw ConfigError("avoidance range must be >= 0");
    if (c.avoidance.omega_sat < 0.0) throw ConfigError("omega_sat must be >= 0");
    if (!(c.u_max > 0.0)) throw ConfigError("u_max must be > 0");
    int n = static_cast<int>(c.agents.size());
    if (c.law == Law::Mmc) {
        if (n != 2) throw ConfigError("MMC runs take exactly 2 agents");
        if (!(c.mmc.mu > 0.0)) throw ConfigError("mmc.mu must be > 0");
        if (c.mmc.k_d < 0.0) throw ConfigError("mmc.k_d must be >= 0");
    } else {
        if (!(c.tva.mu > 0.0)) throw ConfigError("tva.mu must be > 0");
        if (c.tva.K < 1 || c.tva.K > n - 1) {
            throw ConfigError("tva.K must be in [1, n-1]");
        }
        double prev = -1.0;
        for (const KEvent& e : c.events) {
            if (e.t < prev) throw ConfigError("events must be time-sorted");
            prev = e.t;
            if (e.K < 1 || e.K > n - 1) throw ConfigError("event K must be in [1, n-1]");
        }
    }
    if (c.perturber) {
        if (c.perturber->waypoints.empty()) throw ConfigError("perturber needs waypoints");
        double prev = -std::numeric_limits<double>::infinity();
        for (const Waypoint& w : c.perturber->waypoints) {
            if (w.t <= prev) throw ConfigError("perturber waypoints must be time-monotone");
            prev = w.t;
        }
    }
    if (c.noise.heading_sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
}

double resolved_energy_target(const SimConfig& c) {
    if (c.mmc.E_d) return *c.mmc.E_d;
    AgentState2 a1 = make_agent2(c.agents[0].pos, c.agents[0].heading, c.agents[0].speed);
    AgentState2 a2 = make_agent2(c.agents[1].pos, c.agents[1].heading, c.agents[1].speed);
    MmcShape sh = shape_from_pair(a1, a2).second;
    return conserved_energy(sh.rho, sh.gamma, sh.delta, c.mmc.mu);
}

std::vector<StepRecord> run(const SimConfig& config) {
    validate(config);
    Engine engine(config);
    return engine.rollout();
}

}  // namespace swarmsteer
