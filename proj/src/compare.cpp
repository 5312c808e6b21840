#include "swarmsteer/compare.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "swarmsteer/error.hpp"

namespace swarmsteer {

double linear_slope(std::span<const double> x, std::span<const double> y) {
    std::size_t n = x.size();
    if (n < 2 || y.size() != n) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

CompareResult compare_trajectories(const TrajectoryData& run, const TrajectoryData& ideal) {
    if (run.rows.size() != ideal.rows.size()) {
        throw AlignmentError("trajectories differ in row count (" +
                             std::to_string(run.rows.size()) + " vs " +
                             std::to_string(ideal.rows.size()) + ")");
    }
    CompareResult out;
    std::map<int, std::vector<double>> per_agent;
    std::vector<double> tick_sum;
    std::vector<int> tick_count;

    double last_t = -std::numeric_limits<double>::infinity();
    std::size_t tick = 0;
    bool both_mmc = run.has_mmc && ideal.has_mmc;

    for (std::size_t i = 0; i < run.rows.size(); ++i) {
        const TrajRow& a = run.rows[i];
        const TrajRow& b = ideal.rows[i];
        if (a.t != b.t || a.agent_id != b.agent_id) {
            throw AlignmentError("row " + std::to_string(i + 2) +
                                 ": grids differ (t=" + format_double(a.t) + "/" +
                                 format_double(b.t) + ", agent " + std::to_string(a.agent_id) +
                                 "/" + std::to_string(b.agent_id) + ")");
        }
        if (a.t > last_t) {
            last_t = a.t;
            out.t.push_back(a.t);
            tick_sum.push_back(0.0);
            tick_count.push_back(0);
            tick = out.t.size() - 1;
            if (both_mmc) {
                double ref = std::abs(b.energy) > 0.0 ? std::abs(b.energy) : 1.0;
                out.energy_pct.push_back(100.0 * std::abs(a.energy - b.energy) / ref);
            }
        } else if (a.t < last_t) {
            throw AlignmentError("row " + std::to_string(i + 2) + ": time went backwards");
        }
        double e = std::hypot(a.x_mm - b.x_mm, a.y_mm - b.y_mm);
        per_agent[a.agent_id].push_back(e);
        tick_sum[tick] += e;
        tick_count[tick] += 1;
    }

    out.mean_e.resize(out.t.size());
    for (std::size_t k = 0; k < out.t.size(); ++k) {
        out.mean_e[k] = tick_count[k] > 0 ? tick_sum[k] / tick_count[k] : 0.0;
    }
    for (auto& [id, series] : per_agent) {
        out.agent_ids.push_back(id);
        AgentErrorSummary s;
        s.agent_id = id;
        double sum = 0;
        for (double e : series) {
            s.max_e = std::max(s.max_e, e);
            sum += e;
        }
        s.mean_e = series.empty() ? 0.0 : sum / static_cast<double>(series.size());
        s.final_e = series.empty() ? 0.0 : series.back();
        out.agents.push_back(s);
        out.e.push_back(std::move(series));
    }
    out.slope_mm_per_s = linear_slope(out.t, out.mean_e);
    return out;
}

}  // namespace swarmsteer
