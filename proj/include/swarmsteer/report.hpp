#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "swarmsteer/sim.hpp"

namespace swarmsteer {

// Machine-checkable assertion attached to an experiment. `value` is the
// threshold; `arg` is a secondary parameter where the kind needs one.
//
// Kinds:
//   theta_total_below_at          Theta_total(arg seconds) < value
//   final_theta_total_below       Theta_total at the last tick < value
//   final_heading_spread_below_deg  max pairwise heading gap < value degrees
//   final_cluster_count_at_least  cluster_count(final) >= value
//   energy_tail_pct_below         mean |E-E_d|/E_d (%) over final 20% < value
//   energy_tail_pct_above         same statistic > value
//   error_slope_positive          linear trend of mean position error vs the
//                                 fine-step reference is > value (mm/s)
//   theta_matches_closed_form     max |Theta_sim - Theta_analytic| < value
//   rho_holds_within_rel          max |rho - rho_0|/rho_0 < value
//   theta_jump_after_perturber    some tick-to-tick Theta_total rise after the
//                                 perturber's first contact > value
struct ExpectedProperty {
    std::string kind;
    double value = 0.0;
    double arg = 0.0;
};

bool known_property_kind(const std::string& kind);

struct PropertyResult {
    std::string kind;
    bool pass = false;
    double observed = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct Metric {
    std::string name;
    double value = 0.0;
};

struct RunReport {
    std::string name;
    bool all_pass = true;
    std::vector<PropertyResult> properties;
    std::vector<Metric> metrics;
};

// Evaluate a finished run against its expected properties and collect the
// summary metrics. MMC slope checks integrate the fine-step reference
// internally from the run's initial conditions.
RunReport evaluate_run(const std::string& name, const SimConfig& config,
                       std::span<const StepRecord> records,
                       std::span<const ExpectedProperty> expected);

void print_report(std::ostream& os, const RunReport& report);
std::string report_json(const RunReport& report);

// Largest pairwise absolute heading difference, radians.
double heading_spread(std::span<const double> headings);

}  // namespace swarmsteer
