#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "swarmsteer/config.hpp"
#include "swarmsteer/error.hpp"
#include "swarmsteer/frenet.hpp"
#include "swarmsteer/mmc.hpp"
#include "swarmsteer/presets.hpp"
#include "swarmsteer/report.hpp"
#include "swarmsteer/sim.hpp"
#include "swarmsteer/tva.hpp"
#include "swarmsteer/vec.hpp"

namespace py = pybind11;
using namespace swarmsteer;

namespace {

std::string vec2_repr(const Vec2& v) {
    return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
}

std::string vec3_repr(const Vec3& v) {
    return "Vec3(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " +
           std::to_string(v.z) + ")";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Deterministic steering-law swarm simulation core";

    py::register_exception<Error>(m, "SwarmError");

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init<double, double>())
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("dot", &Vec2::dot)
        .def("norm", &Vec2::norm)
        .def("__repr__", &vec2_repr);

    py::class_<Vec3>(m, "Vec3")
        .def(py::init<>())
        .def(py::init<double, double, double>())
        .def_readwrite("x", &Vec3::x)
        .def_readwrite("y", &Vec3::y)
        .def_readwrite("z", &Vec3::z)
        .def("dot", &Vec3::dot)
        .def("norm", &Vec3::norm)
        .def("__repr__", &vec3_repr);

    m.def("perp", &perp, "Counter-clockwise quarter turn of a Vec2");
    m.def("wrap_angle", &wrap_angle);

    py::class_<Curvature2>(m, "Curvature2")
        .def(py::init<>())
        .def(py::init([](double u) { return Curvature2{u}; }), py::arg("u"))
        .def_readwrite("u", &Curvature2::u);

    py::class_<Curvature3>(m, "Curvature3")
        .def(py::init<>())
        .def(py::init([](double u, double v) { return Curvature3{u, v}; }),
             py::arg("u"), py::arg("v"))
        .def_readwrite("u", &Curvature3::u)
        .def_readwrite("v", &Curvature3::v);

    py::class_<AgentState2>(m, "AgentState2")
        .def(py::init<>())
        .def_readwrite("r", &AgentState2::r)
        .def_readwrite("x", &AgentState2::x)
        .def_readwrite("y", &AgentState2::y)
        .def_readwrite("nu", &AgentState2::nu);

    py::class_<AgentState3>(m, "AgentState3")
        .def(py::init<>())
        .def_readwrite("r", &AgentState3::r)
        .def_readwrite("x", &AgentState3::x)
        .def_readwrite("y", &AgentState3::y)
        .def_readwrite("z", &AgentState3::z)
        .def_readwrite("nu", &AgentState3::nu);

    m.def("make_agent2", &make_agent2, py::arg("position"), py::arg("heading"),
          py::arg("speed"));
    m.def("heading_of", &heading_of);
    m.def("renormalize2", py::overload_cast<AgentState2>(&renormalize));
    m.def("renormalize3", py::overload_cast<AgentState3>(&renormalize));
    m.def("step_frame_2d", &step_frame_2d, py::arg("state"), py::arg("curvature"),
          py::arg("dt"));
    m.def("step_frame_3d", &step_frame_3d, py::arg("state"), py::arg("curvature"),
          py::arg("dt"));
    m.def("turning_rate_deg_s", &turning_rate_deg_s, py::arg("nu"), py::arg("u"));

    py::class_<RelativeState>(m, "RelativeState")
        .def_readonly("r", &RelativeState::r)
        .def_readonly("g", &RelativeState::g)
        .def_readonly("h", &RelativeState::h);

    py::class_<MmcShape>(m, "MmcShape")
        .def(py::init<>())
        .def_readwrite("rho", &MmcShape::rho)
        .def_readwrite("gamma", &MmcShape::gamma)
        .def_readwrite("lambda_", &MmcShape::lambda)
        .def_readwrite("delta", &MmcShape::delta);

    py::class_<MmcParams>(m, "MmcParams")
        .def(py::init<>())
        .def(py::init([](double mu, double k_d, double e_d) {
                 return MmcParams{mu, k_d, e_d};
             }),
             py::arg("mu"), py::arg("k_d") = 0.0, py::arg("E_d") = 0.0)
        .def_readwrite("mu", &MmcParams::mu)
        .def_readwrite("k_d", &MmcParams::k_d)
        .def_readwrite("E_d", &MmcParams::E_d);

    m.def("shape_from_pair", &shape_from_pair);
    m.def("mmc_u", &mmc_u, py::arg("shape"), py::arg("mu"));
    m.def("mmc_u_dissipative", &mmc_u_dissipative, py::arg("shape"), py::arg("params"));
    m.def("conserved_energy", &conserved_energy, py::arg("rho"), py::arg("gamma"),
          py::arg("delta"), py::arg("mu"));
    m.def("mmc_command", &mmc_command);

    py::class_<ReducedState>(m, "ReducedState")
        .def(py::init<>())
        .def(py::init([](double rho, double gamma) { return ReducedState{rho, gamma}; }),
             py::arg("rho"), py::arg("gamma"))
        .def_readwrite("rho", &ReducedState::rho)
        .def_readwrite("gamma", &ReducedState::gamma);

    m.def("reduced_step", &reduced_step, py::arg("state"), py::arg("delta"), py::arg("mu"),
          py::arg("dt"), py::arg("conserve"));

    py::class_<PairTrajectory>(m, "PairTrajectory")
        .def_readonly("dt", &PairTrajectory::dt)
        .def_readonly("states", &PairTrajectory::states);

    m.def("ideal_pair_trajectory", &ideal_pair_trajectory, py::arg("a1"), py::arg("a2"),
          py::arg("params"), py::arg("dt_fine"), py::arg("duration"),
          py::arg("dt_coarse") = 0.04);
    m.def("error_metric", &error_metric);

    py::class_<Neighborhood>(m, "Neighborhood")
        .def(py::init<>())
        .def_readwrite("members", &Neighborhood::members);

    py::class_<TvaParams>(m, "TvaParams")
        .def(py::init<>())
        .def(py::init([](double mu, int k) { return TvaParams{mu, k}; }), py::arg("mu"),
             py::arg("K"))
        .def_readwrite("mu", &TvaParams::mu)
        .def_readwrite("K", &TvaParams::K);

    py::class_<TvaShape>(m, "TvaShape")
        .def(py::init<>())
        .def(py::init([](double rho, double psi, double phi) {
                 return TvaShape{rho, psi, phi};
             }),
             py::arg("rho"), py::arg("psi"), py::arg("phi"))
        .def_readwrite("rho", &TvaShape::rho)
        .def_readwrite("psi", &TvaShape::psi)
        .def_readwrite("phi", &TvaShape::phi);

    m.def("k_nearest",
          [](const std::vector<Vec2>& positions, int i, int k) {
              return k_nearest(std::span<const Vec2>(positions), i, k);
          });
    m.def("com_velocity", [](const std::vector<AgentState2>& states, const Neighborhood& n) {
        return com_velocity(std::span<const AgentState2>(states), n);
    });

    py::class_<ComDirection2>(m, "ComDirection2")
        .def_readonly("direction", &ComDirection2::direction)
        .def_readonly("used_k", &ComDirection2::used_k);

    m.def("com_direction_with_fallback",
          [](const std::vector<AgentState2>& states, int i, int k) {
              return com_direction_with_fallback(std::span<const AgentState2>(states), i, k);
          });
    m.def("contrast", py::overload_cast<Vec2, Vec2>(&contrast));
    m.def("contrast3", py::overload_cast<Vec3, Vec3>(&contrast));
    m.def("tva_controls", py::overload_cast<const AgentState2&, Vec2, double>(&tva_controls));
    m.def("tva_controls3", py::overload_cast<const AgentState3&, Vec3, double>(&tva_controls));
    m.def("shape_from_states", &shape_from_states);
    m.def("shape_step_closed_loop", &shape_step_closed_loop, py::arg("shape"), py::arg("nu1"),
          py::arg("nu2"), py::arg("mu"), py::arg("dt"));
    m.def("theta_closed_form", &theta_closed_form, py::arg("theta0"), py::arg("mu"),
          py::arg("t"));
    m.def("shape_matrix_from_poses", &shape_matrix_from_poses);
    m.def("shape_matrix_from_shape", &shape_matrix_from_shape);

    py::enum_<Law>(m, "Law").value("Mmc", Law::Mmc).value("Tva", Law::Tva);

    py::class_<AgentSpec>(m, "AgentSpec")
        .def(py::init<>())
        .def_readwrite("pos", &AgentSpec::pos)
        .def_readwrite("heading", &AgentSpec::heading)
        .def_readwrite("speed", &AgentSpec::speed);

    py::class_<AvoidanceParams>(m, "AvoidanceParams")
        .def(py::init<>())
        .def_readwrite("range_mm", &AvoidanceParams::range_mm)
        .def_readwrite("omega_sat", &AvoidanceParams::omega_sat)
        .def_readwrite("cone_halfangle", &AvoidanceParams::cone_halfangle);

    py::class_<KEvent>(m, "KEvent")
        .def(py::init<>())
        .def_readwrite("t", &KEvent::t)
        .def_readwrite("K", &KEvent::K);

    py::class_<Waypoint>(m, "Waypoint")
        .def(py::init<>())
        .def_readwrite("t", &Waypoint::t)
        .def_readwrite("pos", &Waypoint::pos);

    py::class_<PerturberScript>(m, "PerturberScript")
        .def(py::init<>())
        .def_readwrite("waypoints", &PerturberScript::waypoints);

    py::class_<NoiseParams>(m, "NoiseParams")
        .def(py::init<>())
        .def_readwrite("heading_sigma", &NoiseParams::heading_sigma)
        .def_readwrite("seed", &NoiseParams::seed);

    py::class_<MmcConfig>(m, "MmcConfig")
        .def(py::init<>())
        .def_readwrite("mu", &MmcConfig::mu)
        .def_readwrite("k_d", &MmcConfig::k_d)
        .def_readwrite("E_d", &MmcConfig::E_d);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("name", &SimConfig::name)
        .def_readwrite("law", &SimConfig::law)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("duration", &SimConfig::duration)
        .def_readwrite("agents", &SimConfig::agents)
        .def_readwrite("mmc", &SimConfig::mmc)
        .def_readwrite("tva", &SimConfig::tva)
        .def_readwrite("avoidance", &SimConfig::avoidance)
        .def_readwrite("events", &SimConfig::events)
        .def_readwrite("perturber", &SimConfig::perturber)
        .def_readwrite("noise", &SimConfig::noise)
        .def_readwrite("u_max", &SimConfig::u_max);

    py::class_<AgentRecord>(m, "AgentRecord")
        .def_readonly("pos", &AgentRecord::pos)
        .def_readonly("heading", &AgentRecord::heading)
        .def_readonly("u", &AgentRecord::u)
        .def_readonly("omega_deg_s", &AgentRecord::omega_deg_s)
        .def_readonly("theta", &AgentRecord::theta)
        .def_readonly("used_k", &AgentRecord::used_k)
        .def_readonly("avoidance", &AgentRecord::avoidance)
        .def_readonly("clamped", &AgentRecord::clamped);

    py::class_<StepRecord>(m, "StepRecord")
        .def_readonly("t", &StepRecord::t)
        .def_readonly("agents", &StepRecord::agents)
        .def_readonly("theta_total", &StepRecord::theta_total)
        .def_readonly("has_mmc", &StepRecord::has_mmc)
        .def_readonly("rho", &StepRecord::rho)
        .def_readonly("gamma", &StepRecord::gamma)
        .def_readonly("lambda_", &StepRecord::lambda)
        .def_readonly("energy", &StepRecord::energy)
        .def_readonly("energy_pct_err", &StepRecord::energy_pct_err)
        .def_readonly("perturber_contact", &StepRecord::perturber_contact)
        .def_readonly("effective_k", &StepRecord::effective_k);

    m.def("avoidance_override",
          [](const AgentState2& s, const std::vector<Vec2>& obstacles,
             const AvoidanceParams& p) -> py::object {
              auto d = avoidance_override(s, std::span<const Vec2>(obstacles), p);
              if (!d) return py::none();
              return py::make_tuple(d->omega, d->obstacle);
          });
    m.def("apply_events", [](double t, int initial_k, const std::vector<KEvent>& events) {
        return apply_events(t, initial_k, std::span<const KEvent>(events));
    });
    m.def("cluster_count",
          [](const std::vector<Vec2>& positions, const std::vector<double>& headings,
             double angle_tol) {
              return cluster_count(std::span<const Vec2>(positions),
                                   std::span<const double>(headings), angle_tol);
          },
          py::arg("positions"), py::arg("headings"),
          py::arg("angle_tol") = 5.0 * kPi / 180.0);
    m.def("validate_config", &validate);
    m.def("run", &run, "Deterministic closed-loop rollout of a SimConfig");

    py::class_<ExpectedProperty>(m, "ExpectedProperty")
        .def(py::init<>())
        .def_readwrite("kind", &ExpectedProperty::kind)
        .def_readwrite("value", &ExpectedProperty::value)
        .def_readwrite("arg", &ExpectedProperty::arg);

    py::class_<Experiment>(m, "Experiment")
        .def(py::init<>())
        .def_readwrite("config", &Experiment::config)
        .def_readwrite("expected", &Experiment::expected);

    m.def("experiment_from_json", &experiment_from_json, py::arg("json_text"),
          py::arg("origin") = "json",
          py::arg("seed_override") = py::none());
    m.def("load_experiment", &load_experiment, py::arg("path"),
          py::arg("seed_override") = py::none());

    py::class_<PropertyResult>(m, "PropertyResult")
        .def_readonly("kind", &PropertyResult::kind)
        .def_readonly("pass_", &PropertyResult::pass)
        .def_readonly("observed", &PropertyResult::observed)
        .def_readonly("threshold", &PropertyResult::threshold)
        .def_readonly("detail", &PropertyResult::detail);

    py::class_<Metric>(m, "Metric")
        .def_readonly("name", &Metric::name)
        .def_readonly("value", &Metric::value);

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("name", &RunReport::name)
        .def_readonly("all_pass", &RunReport::all_pass)
        .def_readonly("properties", &RunReport::properties)
        .def_readonly("metrics", &RunReport::metrics);

    m.def("evaluate_run",
          [](const std::string& name, const SimConfig& config,
             const std::vector<StepRecord>& records,
             const std::vector<ExpectedProperty>& expected) {
              return evaluate_run(name, config, records, expected);
          });
    m.def("heading_spread", [](const std::vector<double>& headings) {
        return heading_spread(std::span<const double>(headings));
    });

    m.def("preset_names", &preset_names);
    m.def("load_preset", &load_preset);
}
