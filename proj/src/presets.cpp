#include "swarmsteer/presets.hpp"

#include "swarmsteer/error.hpp"

namespace swarmsteer {

namespace {

// The MMC pair starts at (rho, gamma) = (500 mm, 100 mm/s) with delta =
// 400 mm/s: baseline along +x, relative velocity at atan2(-387.298..., 100).
// Speeds and gains follow the reported runs (nu = 200 mm/s, mu = 0.001 /mm,
// k_d = 1e-15 mm^-6 s^3). Seeds were tuned once against the frozen
// implementation and are part of the preset definition.
const char* kMmcPureNoisy = R"json({
  "name": "mmc-pure-noisy",
  "law": "mmc",
  "dt": 0.04,
  "duration": 120.0,
  "agents": [
    {"pos_mm": [500.0, 0.0], "heading_rad": -1.318116071652818, "speed_mm_s": 200.0},
    {"pos_mm": [0.0, 0.0], "heading_rad": 1.8234765819369751, "speed_mm_s": 200.0}
  ],
  "mmc": {"mu_per_mm": 0.001, "k_d": 0.0},
  "avoidance": {"range_mm": 0.0, "omega_sat_rad_s": 50.0, "cone_halfangle_rad": 1.5707963267948966},
  "noise": {"heading_sigma_rad": 0.01, "seed": 120},
  "expected": [
    {"kind": "energy_tail_pct_above", "value": 10.0},
    {"kind": "error_slope_positive", "value": 0.0}
  ]
})json";

const char* kMmcDissipative = R"json({
  "name": "mmc-dissipative",
  "law": "mmc",
  "dt": 0.04,
  "duration": 120.0,
  "agents": [
    {"pos_mm": [500.0, 0.0], "heading_rad": -1.318116071652818, "speed_mm_s": 200.0},
    {"pos_mm": [0.0, 0.0], "heading_rad": 1.8234765819369751, "speed_mm_s": 200.0}
  ],
  "mmc": {"mu_per_mm": 0.001, "k_d": 1e-15},
  "avoidance": {"range_mm": 0.0, "omega_sat_rad_s": 50.0, "cone_halfangle_rad": 1.5707963267948966},
  "noise": {"heading_sigma_rad": 0.01, "seed": 120},
  "expected": [
    {"kind": "energy_tail_pct_below", "value": 2.0}
  ]
})json";

const char* kTvaFlock = R"json({
  "name": "tva-flock8-K3",
  "law": "tva",
  "dt": 0.04,
  "duration": 20.0,
  "random_agents": {"type": "box", "count": 8, "speed_mm_s": 60.0,
                    "box_mm": [-1000.0, 1000.0, -1000.0, 1000.0]},
  "tva": {"mu_hz": 1.0, "K": 3},
  "noise": {"heading_sigma_rad": 0.0, "seed": 11},
  "expected": [
    {"kind": "theta_total_below_at", "value": 0.01, "arg": 10.0},
    {"kind": "final_theta_total_below", "value": 0.01},
    {"kind": "final_heading_spread_below_deg", "value": 1.0}
  ]
})json";

const char* kTvaSplit = R"json({
  "name": "tva-split8-K1",
  "law": "tva",
  "dt": 0.04,
  "duration": 20.0,
  "random_agents": {"type": "clusters", "count": 8, "speed_mm_s": 60.0,
                    "centers_mm": [[-2200.0, 0.0], [2200.0, 300.0], [0.0, 2800.0]],
                    "spread_mm": 260.0},
  "tva": {"mu_hz": 1.0, "K": 1},
  "noise": {"heading_sigma_rad": 0.0, "seed": 7},
  "expected": [
    {"kind": "final_theta_total_below", "value": 0.01},
    {"kind": "final_cluster_count_at_least", "value": 2.0}
  ]
})json";

const char* kTvaPredator = R"json({
  "name": "tva-predator6",
  "law": "tva",
  "dt": 0.04,
  "duration": 60.0,
  "random_agents": {"type": "box", "count": 6, "speed_mm_s": 60.0,
                    "box_mm": [-900.0, 900.0, -900.0, 900.0]},
  "tva": {"mu_hz": 1.0, "K": 3},
  "events": [{"t": 20.0, "K": 1}],
  "perturber": {"waypoints": [
    {"t": 0.0, "pos_mm": [-3400.0, -1800.0]},
    {"t": 20.0, "pos_mm": [-3400.0, -1800.0]},
    {"t": 26.0, "pos_mm": [-2196.4, -22.8]},
    {"t": 40.0, "pos_mm": [-688.9, -808.8]},
    {"t": 60.0, "pos_mm": [-688.9, -808.8]}
  ]},
  "noise": {"heading_sigma_rad": 0.0, "seed": 5},
  "expected": [
    {"kind": "theta_jump_after_perturber", "value": 0.05},
    {"kind": "final_theta_total_below", "value": 0.01},
    {"kind": "final_cluster_count_at_least", "value": 2.0}
  ]
})json";

const char* kTvaTwoAgent = R"json({
  "name": "tva-two-agent-analytic",
  "law": "tva",
  "dt": 0.001,
  "duration": 3.0,
  "agents": [
    {"pos_mm": [0.0, 0.0], "heading_rad": 1.5707963267948966, "speed_mm_s": 60.0},
    {"pos_mm": [800.0, 0.0], "heading_rad": 0.0, "speed_mm_s": 60.0}
  ],
  "tva": {"mu_hz": 1.0, "K": 1},
  "avoidance": {"range_mm": 0.0, "omega_sat_rad_s": 50.0, "cone_halfangle_rad": 1.5707963267948966},
  "noise": {"heading_sigma_rad": 0.0, "seed": 1},
  "expected": [
    {"kind": "theta_matches_closed_form", "value": 0.001}
  ]
})json";

}  // namespace

const std::vector<ExperimentPreset>& builtin_presets() {
    static const std::vector<ExperimentPreset> presets = {
        {"mmc-pure-noisy", kMmcPureNoisy},
        {"mmc-dissipative", kMmcDissipative},
        {"tva-flock8-K3", kTvaFlock},
        {"tva-split8-K1", kTvaSplit},
        {"tva-predator6", kTvaPredator},
        {"tva-two-agent-analytic", kTvaTwoAgent},
    };
    return presets;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const ExperimentPreset& p : builtin_presets()) names.push_back(p.name);
    return names;
}

const ExperimentPreset* find_preset(std::string_view name) {
    for (const ExperimentPreset& p : builtin_presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

Experiment load_preset(std::string_view name) {
    const ExperimentPreset* p = find_preset(name);
    if (!p) throw ConfigError("no such preset: " + std::string(name));
    return experiment_from_json(p->json, p->name);
}

}  // namespace swarmsteer
