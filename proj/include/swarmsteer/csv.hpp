#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "swarmsteer/sim.hpp"

namespace swarmsteer {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// One trajectory row: base columns, plus MMC shape columns when present.
struct TrajRow {
    double t = 0;
    int agent_id = 0;
    double x_mm = 0;
    double y_mm = 0;
    double heading_rad = 0;
    double u_per_mm = 0;
    double omega_deg_s = 0;
    double theta_i = 0;
    int used_k = 0;
    bool avoidance = false;
    bool clamped = false;
    double rho_mm = 0;
    double gamma_mm_s = 0;
    double lambda_mm_s = 0;
    double energy = 0;
    double energy_pct_err = 0;
};

struct TrajectoryData {
    bool has_mmc = false;
    std::vector<TrajRow> rows;
};

std::string trajectory_csv_header(bool mmc);

// Serialize records to the pinned column order. LF line endings.
std::string trajectory_csv(std::span<const StepRecord> records, bool mmc);
void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const StepRecord> records, bool mmc);

// Parse and validate a trajectory CSV. Throws CsvSchemaError naming the first
// offending column or row.
TrajectoryData read_trajectory_csv(const std::filesystem::path& path);
TrajectoryData parse_trajectory_csv(const std::string& text, const std::string& origin);

// Free-form numeric table writer used for metrics and comparison series.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string table_csv(const CsvTable& table);
void write_table_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace swarmsteer
