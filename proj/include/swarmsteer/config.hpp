#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swarmsteer/report.hpp"
#include "swarmsteer/sim.hpp"

namespace swarmsteer {

// A runnable experiment: the simulation config plus its checkable claims.
struct Experiment {
    SimConfig config;
    std::vector<ExpectedProperty> expected;
};

// Parse an experiment from JSON. Random initial conditions (key
// "random_agents") are materialized here from the config seed, so the
// returned config always carries an explicit agent list. `seed_override`
// replaces noise.seed before materialization.
Experiment experiment_from_json(const std::string& json_text, const std::string& origin,
                                std::optional<std::uint64_t> seed_override = std::nullopt);

Experiment load_experiment(const std::filesystem::path& path,
                           std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace swarmsteer
