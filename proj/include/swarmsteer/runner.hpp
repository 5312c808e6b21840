#pragma once

#include <filesystem>
#include <iosfwd>

#include "swarmsteer/compare.hpp"
#include "swarmsteer/config.hpp"
#include "swarmsteer/presets.hpp"
#include "swarmsteer/report.hpp"

namespace swarmsteer {

struct RunOutputs {
    RunReport report;
    std::filesystem::path dir;
};

// Run one experiment and write its artifacts under out_root/<name>/:
// trajectory.csv, metrics.csv, report.json, ideal.csv (MMC), and the SVG
// panels when plots is set.
RunOutputs execute_experiment(const Experiment& experiment,
                              const std::filesystem::path& out_root, bool plots,
                              std::ostream& log);

// Run every bundled preset; returns the CLI exit code (0 all pass, 2 any
// property failure).
int run_all_presets(const std::filesystem::path& out_root, bool plots, std::ostream& log);

// Write comparison artifacts (errors.csv, energy.csv, summary.json).
void write_compare_outputs(const CompareResult& result, const std::filesystem::path& out_dir,
                           std::ostream& log);

}  // namespace swarmsteer
