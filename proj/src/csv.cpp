#include "swarmsteer/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "swarmsteer/error.hpp"

namespace swarmsteer {

namespace {

const char* kBaseColumns[] = {"t",       "agent_id",    "x_mm",    "y_mm",
                              "heading_rad", "u_per_mm", "omega_deg_s", "theta_i",
                              "used_K",  "avoidance",   "clamped"};
const char* kMmcColumns[] = {"rho_mm", "gamma_mm_s", "lambda_mm_s", "E", "E_pct_err"};

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& tok, const std::string& origin, std::size_t row,
                    const char* column) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw CsvSchemaError(origin + ": row " + std::to_string(row) + ", column '" +
                             column + "': bad number '" + tok + "'");
    }
    return v;
}

long parse_int(const std::string& tok, const std::string& origin, std::size_t row,
               const char* column) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw CsvSchemaError(origin + ": row " + std::to_string(row) + ", column '" +
                             column + "': bad integer '" + tok + "'");
    }
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trajectory_csv_header(bool mmc) {
    std::string h;
    for (const char* c : kBaseColumns) {
        if (!h.empty()) h += ',';
        h += c;
    }
    if (mmc) {
        for (const char* c : kMmcColumns) {
            h += ',';
            h += c;
        }
    }
    return h;
}

std::string trajectory_csv(std::span<const StepRecord> records, bool mmc) {
    std::string out = trajectory_csv_header(mmc);
    out += '\n';
    for (const StepRecord& rec : records) {
        for (std::size_t i = 0; i < rec.agents.size(); ++i) {
            const AgentRecord& a = rec.agents[i];
            out += format_double(rec.t);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += format_double(a.pos.x);
            out += ',';
            out += format_double(a.pos.y);
            out += ',';
            out += format_double(a.heading);
            out += ',';
            out += format_double(a.u);
            out += ',';
            out += format_double(a.omega_deg_s);
            out += ',';
            out += format_double(a.theta);
            out += ',';
            out += std::to_string(a.used_k);
            out += ',';
            out += a.avoidance ? '1' : '0';
            out += ',';
            out += a.clamped ? '1' : '0';
            if (mmc) {
                out += ',';
                out += format_double(rec.rho);
                out += ',';
                out += format_double(rec.gamma);
                out += ',';
                out += format_double(rec.lambda);
                out += ',';
                out += format_double(rec.energy);
                out += ',';
                out += format_double(rec.energy_pct_err);
            }
            out += '\n';
        }
    }
    return out;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const StepRecord> records, bool mmc) {
    write_file(path, trajectory_csv(records, mmc));
}

TrajectoryData parse_trajectory_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvSchemaError(origin + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    TrajectoryData data;
    std::string base = trajectory_csv_header(false);
    std::string with_mmc = trajectory_csv_header(true);
    if (line == with_mmc) {
        data.has_mmc = true;
    } else if (line == base) {
        data.has_mmc = false;
    } else {
        // Name the first column that deviates.
        std::vector<std::string> got = split_line(line);
        std::vector<std::string> want = split_line(with_mmc);
        std::size_t k = 0;
        while (k < got.size() && k < want.size() && got[k] == want[k]) ++k;
        std::string offending = k < got.size() ? got[k] : "<missing>";
        throw CsvSchemaError(origin + ": header mismatch at column " + std::to_string(k + 1) +
                             " ('" + offending + "')");
    }

    std::size_t expect = data.has_mmc ? 16 : 11;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> tok = split_line(line);
        if (tok.size() != expect) {
            throw CsvSchemaError(origin + ": row " + std::to_string(row) + " has " +
                                 std::to_string(tok.size()) + " fields, expected " +
                                 std::to_string(expect));
        }
        TrajRow r;
        r.t = parse_double(tok[0], origin, row, "t");
        r.agent_id = static_cast<int>(parse_int(tok[1], origin, row, "agent_id"));
        r.x_mm = parse_double(tok[2], origin, row, "x_mm");
        r.y_mm = parse_double(tok[3], origin, row, "y_mm");
        r.heading_rad = parse_double(tok[4], origin, row, "heading_rad");
        r.u_per_mm = parse_double(tok[5], origin, row, "u_per_mm");
        r.omega_deg_s = parse_double(tok[6], origin, row, "omega_deg_s");
        r.theta_i = parse_double(tok[7], origin, row, "theta_i");
        r.used_k = static_cast<int>(parse_int(tok[8], origin, row, "used_K"));
        r.avoidance = parse_int(tok[9], origin, row, "avoidance") != 0;
        r.clamped = parse_int(tok[10], origin, row, "clamped") != 0;
        if (data.has_mmc) {
            r.rho_mm = parse_double(tok[11], origin, row, "rho_mm");
            r.gamma_mm_s = parse_double(tok[12], origin, row, "gamma_mm_s");
            r.lambda_mm_s = parse_double(tok[13], origin, row, "lambda_mm_s");
            r.energy = parse_double(tok[14], origin, row, "E");
            r.energy_pct_err = parse_double(tok[15], origin, row, "E_pct_err");
        }
        data.rows.push_back(r);
    }
    return data;
}

TrajectoryData read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trajectory_csv(ss.str(), path.filename().string());
}

std::string table_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_table_csv(const std::filesystem::path& path, const CsvTable& table) {
    write_file(path, table_csv(table));
}

}  // namespace swarmsteer
