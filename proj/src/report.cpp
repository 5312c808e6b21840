#include "swarmsteer/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "swarmsteer/compare.hpp"
#include "swarmsteer/csv.hpp"
#include "swarmsteer/error.hpp"

namespace swarmsteer {

namespace {

const std::set<std::string>& property_kinds() {
    static const std::set<std::string> kinds = {
        "theta_total_below_at",
        "final_theta_total_below",
        "final_heading_spread_below_deg",
        "final_cluster_count_at_least",
        "energy_tail_pct_below",
        "energy_tail_pct_above",
        "error_slope_positive",
        "theta_matches_closed_form",
        "rho_holds_within_rel",
        "theta_jump_after_perturber",
    };
    return kinds;
}

int real_agent_count(const SimConfig& config) {
    return static_cast<int>(config.agents.size());
}

std::vector<double> final_headings(const SimConfig& config, std::span<const StepRecord> records) {
    std::vector<double> h;
    int n = real_agent_count(config);
    const StepRecord& last = records.back();
    for (int i = 0; i < n; ++i) h.push_back(last.agents[static_cast<std::size_t>(i)].heading);
    return h;
}

double energy_tail_pct_mean(std::span<const StepRecord> records, double duration) {
    double cutoff = 0.8 * duration - 1e-9;
    double sum = 0;
    long count = 0;
    for (const StepRecord& r : records) {
        if (r.t < cutoff) continue;
        sum += r.energy_pct_err;
        ++count;
    }
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

// Position-error trend of the run against the fine-step reference from the
// same initial conditions.
double error_slope(const SimConfig& config, std::span<const StepRecord> records) {
    AgentState2 a1 = make_agent2(config.agents[0].pos, config.agents[0].heading,
                                 config.agents[0].speed);
    AgentState2 a2 = make_agent2(config.agents[1].pos, config.agents[1].heading,
                                 config.agents[1].speed);
    MmcParams params{config.mmc.mu, 0.0, 0.0};
    PairTrajectory ideal = ideal_pair_trajectory(a1, a2, params, config.dt / 20.0,
                                                 config.duration, config.dt);
    std::size_t ticks = std::min(records.size(), ideal.states.size());
    std::vector<double> t(ticks), mean_e(ticks);
    for (std::size_t k = 0; k < ticks; ++k) {
        t[k] = records[k].t;
        double e0 = (records[k].agents[0].pos - ideal.states[k][0].r).norm();
        double e1 = (records[k].agents[1].pos - ideal.states[k][1].r).norm();
        mean_e[k] = 0.5 * (e0 + e1);
    }
    return linear_slope(t, mean_e);
}

struct PerturberStats {
    bool contact = false;
    double t_contact = -1.0;
    double max_jump_after = 0.0;
};

PerturberStats perturber_stats(std::span<const StepRecord> records) {
    PerturberStats st;
    std::size_t k0 = 0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].perturber_contact) {
            st.contact = true;
            st.t_contact = records[k].t;
            k0 = k;
            break;
        }
    }
    if (!st.contact) return st;
    for (std::size_t k = k0 + 1; k < records.size(); ++k) {
        double jump = records[k].theta_total - records[k - 1].theta_total;
        st.max_jump_after = std::max(st.max_jump_after, jump);
    }
    return st;
}

double max_theta_error_vs_closed_form(const SimConfig& config,
                                      std::span<const StepRecord> records) {
    double theta0 = records.front().agents[0].theta;
    double worst = 0.0;
    for (const StepRecord& r : records) {
        double predicted = theta_closed_form(theta0, config.tva.mu, r.t);
        worst = std::max(worst, std::abs(r.agents[0].theta - predicted));
    }
    return worst;
}

}  // namespace

bool known_property_kind(const std::string& kind) {
    return property_kinds().count(kind) > 0;
}

double heading_spread(std::span<const double> headings) {
    double worst = 0.0;
    for (std::size_t i = 0; i < headings.size(); ++i) {
        for (std::size_t j = i + 1; j < headings.size(); ++j) {
            worst = std::max(worst, std::abs(angle_diff(headings[i], headings[j])));
        }
    }
    return worst;
}

RunReport evaluate_run(const std::string& name, const SimConfig& config,
                       std::span<const StepRecord> records,
                       std::span<const ExpectedProperty> expected) {
    if (records.empty()) throw ContractViolationError("evaluate_run: no records");
    RunReport report;
    report.name = name;

    int n = real_agent_count(config);
    const StepRecord& last = records.back();

    long avoidance_events = 0, clamp_events = 0;
    double max_theta_total = 0.0;
    for (const StepRecord& r : records) {
        for (int i = 0; i < n; ++i) {
            avoidance_events += r.agents[static_cast<std::size_t>(i)].avoidance ? 1 : 0;
            clamp_events += r.agents[static_cast<std::size_t>(i)].clamped ? 1 : 0;
        }
        max_theta_total = std::max(max_theta_total, r.theta_total);
    }
    report.metrics.push_back({"records", static_cast<double>(records.size())});
    report.metrics.push_back({"avoidance_events", static_cast<double>(avoidance_events)});
    report.metrics.push_back({"clamp_events", static_cast<double>(clamp_events)});

    PerturberStats pstats;
    if (config.law == Law::Tva) {
        std::vector<double> headings = final_headings(config, records);
        report.metrics.push_back({"final_theta_total", last.theta_total});
        report.metrics.push_back({"max_theta_total", max_theta_total});
        report.metrics.push_back(
            {"final_heading_spread_deg", heading_spread(headings) * 180.0 / kPi});
        report.metrics.push_back(
            {"final_cluster_count", static_cast<double>(cluster_count(last, n))});
        if (config.perturber) {
            pstats = perturber_stats(records);
            report.metrics.push_back({"t_first_perturber_contact", pstats.t_contact});
            report.metrics.push_back({"max_theta_jump_after_contact", pstats.max_jump_after});
        }
    } else {
        report.metrics.push_back({"energy_target", resolved_energy_target(config)});
        report.metrics.push_back({"final_energy_pct_err", last.energy_pct_err});
        report.metrics.push_back(
            {"energy_tail_pct_mean", energy_tail_pct_mean(records, config.duration)});
        report.metrics.push_back({"final_rho_mm", last.rho});
    }

    for (const ExpectedProperty& prop : expected) {
        PropertyResult res;
        res.kind = prop.kind;
        res.threshold = prop.value;
        if (prop.kind == "theta_total_below_at") {
            double best_gap = std::numeric_limits<double>::infinity();
            for (const StepRecord& r : records) {
                double gap = std::abs(r.t - prop.arg);
                if (gap < best_gap) {
                    best_gap = gap;
                    res.observed = r.theta_total;
                }
            }
            res.pass = res.observed < prop.value;
            res.detail = "Theta_total at t=" + format_double(prop.arg);
        } else if (prop.kind == "final_theta_total_below") {
            res.observed = last.theta_total;
            res.pass = res.observed < prop.value;
        } else if (prop.kind == "final_heading_spread_below_deg") {
            std::vector<double> headings = final_headings(config, records);
            res.observed = heading_spread(headings) * 180.0 / kPi;
            res.pass = res.observed < prop.value;
        } else if (prop.kind == "final_cluster_count_at_least") {
            res.observed = static_cast<double>(cluster_count(last, n));
            res.pass = res.observed >= prop.value;
        } else if (prop.kind == "energy_tail_pct_below") {
            res.observed = energy_tail_pct_mean(records, config.duration);
            res.pass = res.observed < prop.value;
        } else if (prop.kind == "energy_tail_pct_above") {
            res.observed = energy_tail_pct_mean(records, config.duration);
            res.pass = res.observed > prop.value;
        } else if (prop.kind == "error_slope_positive") {
            if (config.law != Law::Mmc) {
                res.detail = "only defined for MMC runs";
            } else {
                res.observed = error_slope(config, records);
                res.pass = res.observed > prop.value;
            }
        } else if (prop.kind == "theta_matches_closed_form") {
            if (config.law != Law::Tva || n != 2) {
                res.detail = "needs a two-agent TVA run";
            } else {
                res.observed = max_theta_error_vs_closed_form(config, records);
                res.pass = res.observed < prop.value;
            }
        } else if (prop.kind == "rho_holds_within_rel") {
            if (config.law != Law::Mmc) {
                res.detail = "only defined for MMC runs";
            } else {
                double rho0 = records.front().rho;
                double worst = 0.0;
                for (const StepRecord& r : records) {
                    worst = std::max(worst, std::abs(r.rho - rho0) / rho0);
                }
                res.observed = worst;
                res.pass = res.observed < prop.value;
            }
        } else if (prop.kind == "theta_jump_after_perturber") {
            if (!config.perturber) {
                res.detail = "run has no perturber";
            } else {
                if (!pstats.contact) {
                    res.detail = "perturber never triggered avoidance";
                } else {
                    res.observed = pstats.max_jump_after;
                    res.pass = res.observed > prop.value;
                }
            }
        } else {
            throw ConfigError("unknown expected property kind '" + prop.kind + "'");
        }
        report.all_pass = report.all_pass && res.pass;
        report.properties.push_back(std::move(res));
    }
    return report;
}

void print_report(std::ostream& os, const RunReport& report) {
    os << "== " << report.name << " ==\n";
    for (const PropertyResult& p : report.properties) {
        os << (p.pass ? "  [PASS] " : "  [FAIL] ") << p.kind << ": observed "
           << format_double(p.observed) << " vs " << format_double(p.threshold);
        if (!p.detail.empty()) os << "  (" << p.detail << ")";
        os << "\n";
    }
    for (const Metric& m : report.metrics) {
        os << "    " << m.name << " = " << format_double(m.value) << "\n";
    }
}

std::string report_json(const RunReport& report) {
    nlohmann::json doc;
    doc["name"] = report.name;
    doc["all_pass"] = report.all_pass;
    doc["properties"] = nlohmann::json::array();
    for (const PropertyResult& p : report.properties) {
        doc["properties"].push_back({{"kind", p.kind},
                                     {"pass", p.pass},
                                     {"observed", p.observed},
                                     {"threshold", p.threshold},
                                     {"detail", p.detail}});
    }
    doc["metrics"] = nlohmann::json::object();
    for (const Metric& m : report.metrics) doc["metrics"][m.name] = m.value;
    return doc.dump(2) + "\n";
}

}  // namespace swarmsteer
