#include "swarmsteer/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "swarmsteer/csv.hpp"
#include "swarmsteer/error.hpp"
#include "swarmsteer/svg_plot.hpp"

namespace swarmsteer {

namespace {

// Present the fine-step reference on the trajectory schema so it can be fed
// back through `compare`.
std::vector<StepRecord> records_from_pair_trajectory(const PairTrajectory& traj,
                                                     const MmcParams& params) {
    std::vector<StepRecord> records;
    records.reserve(traj.states.size());
    double e_ref = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const AgentState2& a1 = traj.states[k][0];
        const AgentState2& a2 = traj.states[k][1];
        MmcShape sh = shape_from_pair(a1, a2).second;
        double u_common = mmc_u(sh, params.mu);
        StepRecord rec;
        rec.t = static_cast<double>(k) * traj.dt;
        rec.has_mmc = true;
        rec.rho = sh.rho;
        rec.gamma = sh.gamma;
        rec.lambda = sh.lambda;
        rec.energy = conserved_energy(sh.rho, sh.gamma, sh.delta, params.mu);
        if (k == 0) e_ref = rec.energy;
        rec.energy_pct_err = 100.0 * std::abs(rec.energy - e_ref) / std::abs(e_ref);
        for (const AgentState2* a : {&a1, &a2}) {
            AgentRecord ar;
            ar.pos = a->r;
            ar.heading = heading_of(*a);
            ar.u = u_common / a->nu;
            ar.omega_deg_s = turning_rate_deg_s(a->nu, ar.u);
            rec.agents.push_back(ar);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PlotSeries> trajectory_series(std::span<const StepRecord> records, int n_real) {
    std::vector<PlotSeries> series(static_cast<std::size_t>(n_real));
    for (int i = 0; i < n_real; ++i) {
        series[static_cast<std::size_t>(i)].label = "agent " + std::to_string(i);
    }
    for (const StepRecord& rec : records) {
        for (int i = 0; i < n_real; ++i) {
            series[static_cast<std::size_t>(i)].points.push_back(
                rec.agents[static_cast<std::size_t>(i)].pos);
        }
    }
    return series;
}

void write_tva_plots(const std::filesystem::path& dir, const SimConfig& config,
                     std::span<const StepRecord> records) {
    int n = static_cast<int>(config.agents.size());
    std::vector<PlotSeries> traj = trajectory_series(records, n);
    write_line_plot(dir / "trajectories.svg", traj,
                    {"Agent trajectories", "x (mm)", "y (mm)", true, true});

    PlotSeries theta{"Theta_total", {}};
    for (const StepRecord& r : records) theta.points.push_back({r.t, r.theta_total});
    std::vector<PlotSeries> contrast_series{theta};
    write_line_plot(dir / "contrast.svg", contrast_series,
                    {"Contrast vs time", "t (s)", "Theta_total", false, false});

    std::vector<PlotSeries> curves(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) curves[static_cast<std::size_t>(i)].label = "agent " + std::to_string(i);
    for (const StepRecord& r : records) {
        for (int i = 0; i < n; ++i) {
            curves[static_cast<std::size_t>(i)].points.push_back(
                {r.t, r.agents[static_cast<std::size_t>(i)].u});
        }
    }
    write_line_plot(dir / "curvature.svg", curves,
                    {"Commanded curvature", "t (s)", "u (1/mm)", false, false});
}

void write_mmc_plots(const std::filesystem::path& dir,
                     std::span<const StepRecord> records,
                     std::span<const StepRecord> ideal_records, const CompareResult& cmp) {
    write_line_plot(dir / "trajectories.svg", trajectory_series(records, 2),
                    {"Trajectories (run)", "x (mm)", "y (mm)", true, true});
    write_line_plot(dir / "trajectories_ideal.svg", trajectory_series(ideal_records, 2),
                    {"Trajectories (reference)", "x (mm)", "y (mm)", true, true});

    PlotSeries phase_run{"run", {}}, phase_ideal{"reference", {}};
    for (const StepRecord& r : records) phase_run.points.push_back({r.rho, r.gamma});
    for (const StepRecord& r : ideal_records) phase_ideal.points.push_back({r.rho, r.gamma});
    std::vector<PlotSeries> phase{phase_run, phase_ideal};
    write_line_plot(dir / "phase.svg", phase,
                    {"Phase plot", "rho (mm)", "gamma (mm/s)", false, false});

    std::vector<PlotSeries> curves(2);
    for (int i = 0; i < 2; ++i) curves[static_cast<std::size_t>(i)].label = "agent " + std::to_string(i);
    for (const StepRecord& r : records) {
        for (int i = 0; i < 2; ++i) {
            curves[static_cast<std::size_t>(i)].points.push_back(
                {r.t, r.agents[static_cast<std::size_t>(i)].u});
        }
    }
    write_line_plot(dir / "curvature.svg", curves,
                    {"Commanded curvature", "t (s)", "u (1/mm)", false, false});

    std::vector<PlotSeries> err(cmp.e.size());
    for (std::size_t i = 0; i < cmp.e.size(); ++i) {
        err[i].label = "agent " + std::to_string(cmp.agent_ids[i]);
        for (std::size_t k = 0; k < cmp.t.size(); ++k) {
            err[i].points.push_back({cmp.t[k], cmp.e[i][k]});
        }
    }
    write_line_plot(dir / "error.svg", err,
                    {"Position error vs reference", "t (s)", "e (mm)", false, false});

    PlotSeries cum{"cumulative mean", {}};
    double sum = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        sum += records[k].energy_pct_err;
        cum.points.push_back({records[k].t, sum / static_cast<double>(k + 1)});
    }
    std::vector<PlotSeries> energy{cum};
    write_line_plot(dir / "energy_error.svg", energy,
                    {"Conserved-quantity error", "t (s)", "|E - E_d|/E_d (%)", false, false});
}

CsvTable tva_metrics(const SimConfig& config, std::span<const StepRecord> records) {
    CsvTable table;
    table.columns = {"t", "theta_total", "effective_K", "avoidance_count", "clamp_count",
                     "perturber_contact"};
    int n = static_cast<int>(config.agents.size());
    for (const StepRecord& r : records) {
        double avoid = 0, clamp = 0;
        for (int i = 0; i < n; ++i) {
            avoid += r.agents[static_cast<std::size_t>(i)].avoidance ? 1 : 0;
            clamp += r.agents[static_cast<std::size_t>(i)].clamped ? 1 : 0;
        }
        table.rows.push_back({r.t, r.theta_total, static_cast<double>(r.effective_k), avoid,
                              clamp, r.perturber_contact ? 1.0 : 0.0});
    }
    return table;
}

CsvTable mmc_metrics(std::span<const StepRecord> records, const CompareResult& cmp) {
    CsvTable table;
    table.columns = {"t", "rho_mm", "gamma_mm_s", "lambda_mm_s", "E", "E_pct_err",
                     "E_pct_err_cumavg", "e0_mm", "e1_mm"};
    double sum = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const StepRecord& r = records[k];
        sum += r.energy_pct_err;
        double e0 = k < cmp.t.size() && cmp.e.size() > 0 ? cmp.e[0][k] : 0.0;
        double e1 = k < cmp.t.size() && cmp.e.size() > 1 ? cmp.e[1][k] : 0.0;
        table.rows.push_back({r.t, r.rho, r.gamma, r.lambda, r.energy, r.energy_pct_err,
                              sum / static_cast<double>(k + 1), e0, e1});
    }
    return table;
}

}  // namespace

RunOutputs execute_experiment(const Experiment& experiment,
                              const std::filesystem::path& out_root, bool plots,
                              std::ostream& log) {
    const SimConfig& config = experiment.config;
    std::vector<StepRecord> records = run(config);

    std::filesystem::path dir = out_root / config.name;
    std::filesystem::create_directories(dir);
    bool mmc = config.law == Law::Mmc;
    write_trajectory_csv(dir / "trajectory.csv", records, mmc);

    CompareResult cmp;
    std::vector<StepRecord> ideal_records;
    if (mmc) {
        AgentState2 a1 = make_agent2(config.agents[0].pos, config.agents[0].heading,
                                     config.agents[0].speed);
        AgentState2 a2 = make_agent2(config.agents[1].pos, config.agents[1].heading,
                                     config.agents[1].speed);
        MmcParams params{config.mmc.mu, 0.0, 0.0};
        PairTrajectory ideal = ideal_pair_trajectory(a1, a2, params, config.dt / 20.0,
                                                     config.duration, config.dt);
        ideal_records = records_from_pair_trajectory(ideal, params);
        write_trajectory_csv(dir / "ideal.csv", ideal_records, true);
        TrajectoryData run_data = parse_trajectory_csv(trajectory_csv(records, true), "run");
        TrajectoryData ideal_data =
            parse_trajectory_csv(trajectory_csv(ideal_records, true), "ideal");
        cmp = compare_trajectories(run_data, ideal_data);
        write_table_csv(dir / "metrics.csv", mmc_metrics(records, cmp));
    } else {
        write_table_csv(dir / "metrics.csv", tva_metrics(config, records));
    }

    RunReport report = evaluate_run(config.name, config, records, experiment.expected);
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        out << report_json(report);
    }
    if (plots) {
        std::filesystem::path plot_dir = dir / "plots";
        std::filesystem::create_directories(plot_dir);
        if (mmc) {
            write_mmc_plots(plot_dir, records, ideal_records, cmp);
        } else {
            write_tva_plots(plot_dir, config, records);
        }
    }
    print_report(log, report);
    return {std::move(report), dir};
}

int run_all_presets(const std::filesystem::path& out_root, bool plots, std::ostream& log) {
    bool all_pass = true;
    std::vector<std::pair<std::string, bool>> verdicts;
    for (const ExperimentPreset& preset : builtin_presets()) {
        Experiment exp = experiment_from_json(preset.json, preset.name);
        RunOutputs out = execute_experiment(exp, out_root, plots, log);
        verdicts.emplace_back(preset.name, out.report.all_pass);
        all_pass = all_pass && out.report.all_pass;
    }
    log << "\npreset summary:\n";
    for (const auto& [name, pass] : verdicts) {
        log << "  " << (pass ? "[PASS] " : "[FAIL] ") << name << "\n";
    }
    return all_pass ? 0 : 2;
}

void write_compare_outputs(const CompareResult& result, const std::filesystem::path& out_dir,
                           std::ostream& log) {
    std::filesystem::create_directories(out_dir);

    CsvTable errors;
    errors.columns = {"t"};
    for (int id : result.agent_ids) errors.columns.push_back("e" + std::to_string(id) + "_mm");
    errors.columns.push_back("mean_e_mm");
    for (std::size_t k = 0; k < result.t.size(); ++k) {
        std::vector<double> row{result.t[k]};
        for (const auto& series : result.e) row.push_back(series[k]);
        row.push_back(result.mean_e[k]);
        errors.rows.push_back(std::move(row));
    }
    write_table_csv(out_dir / "errors.csv", errors);

    if (!result.energy_pct.empty()) {
        CsvTable energy;
        energy.columns = {"t", "E_pct_err"};
        for (std::size_t k = 0; k < result.t.size(); ++k) {
            energy.rows.push_back({result.t[k], result.energy_pct[k]});
        }
        write_table_csv(out_dir / "energy.csv", energy);
    }

    nlohmann::json doc;
    doc["slope_mm_per_s"] = result.slope_mm_per_s;
    doc["agents"] = nlohmann::json::array();
    for (const AgentErrorSummary& a : result.agents) {
        doc["agents"].push_back({{"agent_id", a.agent_id},
                                 {"max_e_mm", a.max_e},
                                 {"mean_e_mm", a.mean_e},
                                 {"final_e_mm", a.final_e}});
    }
    {
        std::ofstream out(out_dir / "summary.json", std::ios::binary);
        out << doc.dump(2) << "\n";
    }
    log << "error trend slope: " << format_double(result.slope_mm_per_s) << " mm/s\n";
    for (const AgentErrorSummary& a : result.agents) {
        log << "agent " << a.agent_id << ": max " << format_double(a.max_e) << " mm, mean "
            << format_double(a.mean_e) << " mm, final " << format_double(a.final_e) << " mm\n";
    }
}

}  // namespace swarmsteer
