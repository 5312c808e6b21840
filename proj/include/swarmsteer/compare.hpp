#pragma once

#include <vector>

#include "swarmsteer/csv.hpp"

namespace swarmsteer {

struct AgentErrorSummary {
    int agent_id = 0;
    double max_e = 0;
    double mean_e = 0;
    double final_e = 0;
};

// Row-by-row comparison of two trajectory logs sharing the same (t, agent)
// grid: position error per agent per tick, its per-tick mean and linear
// trend, and the percent energy error series when both logs carry E.
struct CompareResult {
    std::vector<double> t;
    std::vector<int> agent_ids;
    std::vector<std::vector<double>> e;  // [agent][tick], mm
    std::vector<double> mean_e;          // per tick, mm
    std::vector<double> energy_pct;      // per tick; empty unless both MMC
    double slope_mm_per_s = 0.0;
    std::vector<AgentErrorSummary> agents;
};

CompareResult compare_trajectories(const TrajectoryData& run, const TrajectoryData& ideal);

// Least-squares slope of y against x.
double linear_slope(std::span<const double> x, std::span<const double> y);

}  // namespace swarmsteer
