// Acceptance suite: runs every agreed behavioral criterion at its stated
// tolerance and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "swarmsteer/compare.hpp"
#include "swarmsteer/config.hpp"
#include "swarmsteer/csv.hpp"
#include "swarmsteer/error.hpp"
#include "swarmsteer/frenet.hpp"
#include "swarmsteer/mmc.hpp"
#include "swarmsteer/presets.hpp"
#include "swarmsteer/report.hpp"
#include "swarmsteer/rng.hpp"
#include "swarmsteer/runner.hpp"
#include "swarmsteer/sim.hpp"
#include "swarmsteer/tva.hpp"

using namespace swarmsteer;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    std::function<std::string()> check;  // empty string = pass, else failure detail
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }

// Each preset is executed once and shared by the criteria that inspect it.
struct PresetCache {
    std::vector<StepRecord> records;
    SimConfig config;
    RunReport report;
};

PresetCache& preset_cache(const std::string& name) {
    static std::map<std::string, PresetCache> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        Experiment exp = load_preset(name);
        PresetCache pc;
        pc.config = exp.config;
        pc.records = run(exp.config);
        pc.report = evaluate_run(name, exp.config, pc.records, exp.expected);
        it = cache.emplace(name, std::move(pc)).first;
    }
    return it->second;
}

double report_metric(const RunReport& report, const std::string& name) {
    for (const Metric& m : report.metrics) {
        if (m.name == name) return m.value;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string require(bool ok, const std::string& what) {
    return ok ? std::string() : what;
}

// --- criterion 1: energy conservation of the reduced dynamics -------------

std::string criterion_energy_conservation() {
    auto t0 = std::chrono::steady_clock::now();
    double delta = 400.0, mu = 0.001;

    ReducedState s{500.0, 100.0};
    double e0 = conserved_energy(s.rho, s.gamma, delta, mu);
    double worst_on = 0.0;
    for (int k = 0; k < 2500; ++k) {  // 100 s at 25 Hz, projection on
        s = reduced_step(s, delta, mu, 0.04, true);
        worst_on = std::max(worst_on,
                            std::abs(conserved_energy(s.rho, s.gamma, delta, mu) - e0) / e0);
    }

    ReducedState f{500.0, 100.0};
    double worst_off = 0.0;
    for (int k = 0; k < 100000; ++k) {  // 100 s at dt = 1e-3, projection off
        f = reduced_step(f, delta, mu, 1e-3, false);
        worst_off = std::max(worst_off,
                             std::abs(conserved_energy(f.rho, f.gamma, delta, mu) - e0) / e0);
    }
    double elapsed = seconds_since(t0);

    std::string err;
    err += require(worst_on < 1e-9, "projected drift " + fmt(worst_on) + " >= 1e-9; ");
    err += require(worst_off < 1e-6, "unprojected drift " + fmt(worst_off) + " >= 1e-6; ");
    err += require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s >= 1 s; ");
    return err;
}

// --- criterion 2: dissipative stabilization under heading noise -----------

std::string criterion_dissipative_stabilization() {
    auto t0 = std::chrono::steady_clock::now();
    const PresetCache& dis = preset_cache("mmc-dissipative");
    const PresetCache& pure = preset_cache("mmc-pure-noisy");

    double dis_tail = report_metric(dis.report, "energy_tail_pct_mean");
    double pure_tail = report_metric(pure.report, "energy_tail_pct_mean");
    double slope = 0.0;
    for (const PropertyResult& p : pure.report.properties) {
        if (p.kind == "error_slope_positive") slope = p.observed;
    }
    double elapsed = seconds_since(t0);

    std::string err;
    err += require(dis_tail < 2.0, "dissipative tail mean " + fmt(dis_tail) + "% >= 2%; ");
    err += require(pure_tail > 10.0, "pure tail mean " + fmt(pure_tail) + "% <= 10%; ");
    err += require(slope > 0.0, "pure error slope " + fmt(slope) + " <= 0; ");
    err += require(elapsed < 10.0, "runtime " + fmt(elapsed) + " s >= 10 s; ");
    return err;
}

// --- criterion 3: fixed-point orbit -----------------------------------------

std::string criterion_fixed_point_orbit() {
    SimConfig c;
    c.name = "fixed-point";
    c.law = Law::Mmc;
    c.dt = 0.04;
    c.duration = 60.0;
    c.agents = {{{1000, 0}, kPi / 2, 200.0}, {{0, 0}, -kPi / 2, 200.0}};
    c.mmc.mu = 0.001;
    c.avoidance.range_mm = 0.0;
    auto records = run(c);
    double worst = 0.0;
    for (const StepRecord& r : records) {
        worst = std::max(worst, std::abs(r.rho - 1000.0) / 1000.0);
    }
    return require(worst < 1e-3, "rho deviation " + fmt(worst) + " >= 0.1%");
}

// --- criterion 4: contrast decay matches the closed form --------------------

std::string run_theta_case(double theta0) {
    double phi0 = std::acos(1.0 - theta0);
    SimConfig c;
    c.name = "analytic";
    c.law = Law::Tva;
    c.dt = 1e-3;
    c.duration = 3.0;
    c.agents = {{{0, 0}, phi0, 60.0}, {{800, 0}, 0.0, 60.0}};
    c.tva = {1.0, 1};
    c.avoidance.range_mm = 0.0;
    auto records = run(c);
    double measured0 = records.front().agents[0].theta;
    double worst = 0.0;
    for (const StepRecord& r : records) {
        worst = std::max(worst,
                         std::abs(r.agents[0].theta - theta_closed_form(measured0, 1.0, r.t)));
    }
    return require(worst < 1e-3, "Theta(0)=" + fmt(theta0) + ": max gap " + fmt(worst) +
                                     " >= 1e-3; ");
}

std::string criterion_contrast_closed_form() {
    std::string err = run_theta_case(1.0);
    Rng rng(20260809);
    for (int k = 0; k < 5; ++k) {
        err += run_theta_case(rng.uniform(0.1, 1.9));
    }
    return err;
}

// --- criterion 5: conservation on the aligned manifold ----------------------

std::string criterion_aligned_manifold() {
    TvaShape s{700.0, 2.0, 0.0};
    double invariant = s.rho * std::sin(s.psi);
    double worst = 0.0;
    bool psi_in_band = true;
    for (int k = 0; k < 10000; ++k) {  // 10 s at 1 ms
        s = shape_step_closed_loop(s, 60.0, 80.0, 1.0, 1e-3);
        worst = std::max(worst, std::abs(s.rho * std::sin(s.psi) - invariant) /
                                    std::abs(invariant));
        psi_in_band = psi_in_band && s.psi > 0.0 && s.psi < kPi;
    }
    std::string err;
    err += require(worst < 1e-6, "rho sin(psi) drift " + fmt(worst) + " >= 1e-6; ");
    err += require(psi_in_band, "psi left (0, pi); ");
    return err;
}

// --- criteria 6-8: preset behaviors ------------------------------------------

std::string criterion_preset(const std::string& name) {
    const PresetCache& pc = preset_cache(name);
    std::string err;
    for (const PropertyResult& p : pc.report.properties) {
        if (!p.pass) {
            err += p.kind + ": observed " + fmt(p.observed) + " vs " + fmt(p.threshold);
            if (!p.detail.empty()) err += " (" + p.detail + ")";
            err += "; ";
        }
    }
    return err;
}

// --- criterion 9: algebraic identities ---------------------------------------

std::string criterion_identities() {
    std::string err;
    Rng rng(99);

    // steering law vs lateral-acceleration form, 2D and 3D
    double worst2 = 0.0;
    for (int k = 0; k < 1000; ++k) {
        AgentState2 s = make_agent2({0, 0}, rng.uniform(-kPi, kPi), rng.uniform(10, 300));
        double a = rng.uniform(-kPi, kPi);
        Vec2 xn{std::cos(a), std::sin(a)};
        double mu = rng.uniform(0.1, 3.0);
        Curvature2 c = tva_controls(s, xn, mu);
        Vec2 lat = (s.nu * s.nu * c.u) * s.y;
        Vec2 expect = mu * s.nu * (xn - xn.dot(s.x) * s.x);
        worst2 = std::max(worst2, (lat - expect).norm() / std::max(1.0, expect.norm()));
    }
    err += require(worst2 <= 1e-12, "2D lateral-acceleration gap " + fmt(worst2) + "; ");

    double worst3 = 0.0;
    for (int k = 0; k < 1000; ++k) {
        double z = rng.uniform(-1, 1), a = rng.uniform(-kPi, kPi);
        double r = std::sqrt(std::max(0.0, 1 - z * z));
        Vec3 x{r * std::cos(a), r * std::sin(a), z};
        Vec3 helper = std::abs(x.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        AgentState3 s;
        s.x = x;
        s.y = helper.cross(x).normalized();
        s.z = x.cross(s.y);
        s.nu = rng.uniform(10, 300);
        s = renormalize(s);
        double z2 = rng.uniform(-1, 1), a2 = rng.uniform(-kPi, kPi);
        double r2 = std::sqrt(std::max(0.0, 1 - z2 * z2));
        Vec3 xn{r2 * std::cos(a2), r2 * std::sin(a2), z2};
        double mu = rng.uniform(0.1, 3.0);
        Curvature3 c = tva_controls(s, xn, mu);
        Vec3 lat = (s.nu * s.nu) * (c.u * s.y + c.v * s.z);
        Vec3 expect = mu * s.nu * (xn - xn.dot(s.x) * s.x);
        worst3 = std::max(worst3, (lat - expect).norm() / std::max(1.0, expect.norm()));
    }
    err += require(worst3 <= 1e-12, "3D lateral-acceleration gap " + fmt(worst3) + "; ");

    // pose-built vs shape-built relative rigid motion
    double worst_m = 0.0;
    for (int k = 0; k < 1000; ++k) {
        AgentState2 a1 = make_agent2({rng.uniform(-500, 500), rng.uniform(-500, 500)},
                                     rng.uniform(-kPi, kPi), 60);
        AgentState2 a2 = make_agent2({rng.uniform(-500, 500), rng.uniform(-500, 500)},
                                     rng.uniform(-kPi, kPi), 60);
        if ((a1.r - a2.r).norm() < 1.0) a2.r.x += 10.0;
        Mat3 mp = shape_matrix_from_poses(a1, a2);
        Mat3 ms = shape_matrix_from_shape(shape_from_states(a1, a2));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                worst_m = std::max(worst_m, std::abs(mp[i][j] - ms[i][j]) /
                                                std::max(1.0, std::abs(mp[i][j])));
    }
    err += require(worst_m <= 1e-12, "shape-matrix gap " + fmt(worst_m) + "; ");

    // finite-difference contrast rate converges at first order
    auto worst_fd = [](double dt) {
        TvaShape s{800, 0.4, 1.8};
        double worst = 0.0;
        double prev = 1.0 - std::cos(s.phi);
        for (int k = 1; k <= static_cast<int>(2.0 / dt); ++k) {
            s = shape_step_closed_loop(s, 60, 60, 1.0, dt);
            double theta = 1.0 - std::cos(s.phi);
            double fd = (theta - prev) / dt;
            worst = std::max(worst, std::abs(fd + 2.0 * prev * (2.0 - prev)));
            prev = theta;
        }
        return worst;
    };
    double e1 = worst_fd(2e-3), e2 = worst_fd(1e-3), e3 = worst_fd(5e-4);
    bool first_order = e2 / e1 > 0.3 && e2 / e1 < 0.7 && e3 / e2 > 0.3 && e3 / e2 < 0.7;
    err += require(first_order, "contrast-rate FD not O(dt): " + fmt(e1) + ", " + fmt(e2) +
                                    ", " + fmt(e3) + "; ");
    return err;
}

// --- criterion 10: determinism of the preset battery -------------------------

std::string criterion_determinism() {
    fs::path root = fs::temp_directory_path() /
                    ("swarmsteer-acceptance-" + std::to_string(::getpid()));
    fs::path a = root / "a", b = root / "b";
    std::ostringstream sink;
    run_all_presets(a, false, sink);
    run_all_presets(b, false, sink);

    std::string err;
    int compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        fs::path rel = fs::relative(entry.path(), a);
        std::ifstream fa(entry.path(), std::ios::binary);
        std::ifstream fb(b / rel, std::ios::binary);
        std::ostringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        ++compared;
        if (sa.str() != sb.str()) {
            err += rel.string() + " differs between runs; ";
        }
    }
    if (compared < 6) err += "expected at least one CSV per preset; ";
    std::error_code ec;
    fs::remove_all(root, ec);
    return err;
}

const char* kDescriptions[] = {
    "reduced-dynamics energy conservation (projection on/off)",
    "dissipative stabilization vs pure-law divergence under noise",
    "fixed-point orbit holds rho within 0.1% for 60 s",
    "two-agent contrast decay matches the closed form",
    "aligned-manifold conservation of rho sin(psi)",
    "flocking preset: contrast and heading spread",
    "splitting preset: aligned subgroups",
    "perturbation preset: jump, realignment, split",
    "algebraic identities (steering forms, shape matrix, contrast rate)",
    "preset battery determinism (byte-identical CSVs)",
};

}  // namespace

int main() {
    std::vector<Criterion> criteria{
        {"C1", criterion_energy_conservation},
        {"C2", criterion_dissipative_stabilization},
        {"C3", criterion_fixed_point_orbit},
        {"C4", criterion_contrast_closed_form},
        {"C5", criterion_aligned_manifold},
        {"C6", [] { return criterion_preset("tva-flock8-K3"); }},
        {"C7", [] { return criterion_preset("tva-split8-K1"); }},
        {"C8", [] { return criterion_preset("tva-predator6"); }},
        {"C9", criterion_identities},
        {"C10", criterion_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        try {
            detail = criteria[i].check();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        bool pass = detail.empty();
        failures += pass ? 0 : 1;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << criteria[i].name << ": "
                  << kDescriptions[i];
        if (!pass) std::cout << " -- " << detail;
        std::cout << "\n";
    }
    std::cout << (failures == 0 ? "acceptance: all criteria passed"
                                : "acceptance: " + std::to_string(failures) + " criterion(s) failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}
