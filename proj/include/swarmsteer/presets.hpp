#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "swarmsteer/config.hpp"

namespace swarmsteer {

struct ExperimentPreset {
    std::string name;
    std::string json;  // config source, parsed on demand
};

// The six bundled experiments mirroring the reported runs: the two MMC
// comparisons (pure law under noise vs dissipative stabilization) and the
// four TVA studies (flocking, splitting, perturbation, two-agent analytic).
const std::vector<ExperimentPreset>& builtin_presets();

std::vector<std::string> preset_names();

// nullptr when no preset has that name.
const ExperimentPreset* find_preset(std::string_view name);

Experiment load_preset(std::string_view name);

}  // namespace swarmsteer
