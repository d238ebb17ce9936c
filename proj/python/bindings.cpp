#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cpsguard/errors.hpp"
#include "cpsguard/reports.hpp"
#include "cpsguard/subspaces.hpp"

namespace py = pybind11;
using namespace cpsguard;

namespace {

// Attacks cross the boundary as (T+1) x s arrays, one row per time step.
AttackSequence to_attack(const Mat& rows) { return AttackSequence(rows.transpose()); }
Mat from_attack(const AttackSequence& e) { return e.frames().transpose(); }

Tol make_tol(double rank_rel, double residual_rel) {
  Tol tol{rank_rel, residual_rel};
  tol.check();
  return tol;
}

py::object to_python(const Json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

py::dict certificate_dict(const UndetectabilityCertificate& c) {
  py::dict out;
  out["undetectable"] = c.undetectable;
  out["induced_state"] = c.induced_state ? py::cast(*c.induced_state) : py::none();
  out["residual"] = c.residual;
  out["threshold"] = c.threshold;
  out["theta_in_null_omega"] = c.theta_in_null_omega;
  out["theta_in_v"] = c.theta_in_v;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Detectability of data-deception attacks on discrete-time LTI systems";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
  error.call_once_and_store_result(
      [&] { return py::exception<Error>(m, "CpsguardError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error.get_stored(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<LtiSystem>(m, "LtiSystem")
      .def(py::init<Mat, Mat, Mat, Mat>(), py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"))
      .def_property_readonly("A", &LtiSystem::a)
      .def_property_readonly("B", &LtiSystem::b)
      .def_property_readonly("C", &LtiSystem::c)
      .def_property_readonly("D", &LtiSystem::d)
      .def_property_readonly("n", &LtiSystem::n)
      .def_property_readonly("p", &LtiSystem::p)
      .def_property_readonly("s", &LtiSystem::s)
      .def("validate", [](const LtiSystem& sys) {
        const ValidationReport r = validate(sys);
        py::dict out;
        out["observable"] = r.observable;
        out["bd_injective"] = r.bd_injective;
        out["ok"] = r.ok();
        return out;
      });

  py::class_<SideInformation>(m, "SideInformation")
      .def(py::init([](const Mat& omega) { return SideInformation(omega); }), py::arg("omega"))
      .def_static("none", &SideInformation::none, py::arg("n"))
      .def_property_readonly("omega", &SideInformation::omega)
      .def_property_readonly("q", &SideInformation::q)
      .def_property_readonly("null_basis",
                             [](const SideInformation& s) { return s.null_basis().basis(); });

  py::class_<ZeroDynamicsMode>(m, "ZeroDynamicsMode")
      .def_readonly("lam", &ZeroDynamicsMode::lambda)
      .def_readonly("g", &ZeroDynamicsMode::g)
      .def_readonly("theta", &ZeroDynamicsMode::theta)
      .def_readonly("pencil_residual", &ZeroDynamicsMode::pencil_residual)
      .def_readonly("channels", &ZeroDynamicsMode::channels)
      .def("__repr__", [](const ZeroDynamicsMode& mode) {
        return "ZeroDynamicsMode(lam=" + std::to_string(mode.lambda.real()) + "+" +
               std::to_string(mode.lambda.imag()) + "j)";
      });

  m.def("obs_matrix", py::overload_cast<const LtiSystem&, Index>(&obs_matrix), py::arg("sys"), py::arg("t"));
  m.def("io_matrix", &io_matrix, py::arg("sys"), py::arg("t"));
  m.def("ctrl_matrix", &ctrl_matrix, py::arg("sys"), py::arg("t"));

  m.def("simulate", [](const LtiSystem& sys, const Vec& x0, const Mat& attack, const SideInformation& side) {
    const Trajectory tr = simulate(sys, x0, to_attack(attack), side);
    return py::make_tuple(Mat(tr.outputs.transpose()), tr.side_value);
  }, py::arg("sys"), py::arg("x0"), py::arg("attack"), py::arg("side"),
     "Returns (outputs with one row per step, y_omega).");

  m.def("weakly_unobservable", [](const LtiSystem& sys, double rank_rel, double residual_rel) {
    return weakly_unobservable(sys, make_tol(rank_rel, residual_rel)).basis();
  }, py::arg("sys"), py::arg("rank_rel") = 1e-10, py::arg("residual_rel") = 1e-8);
  m.def("output_nulling_reachable", [](const LtiSystem& sys, Index k) {
    return output_nulling_reachable(sys, k).basis();
  }, py::arg("sys"), py::arg("k"));
  m.def("zero_state_attack_exists", [](const LtiSystem& sys) { return zero_state_attack_exists(sys); },
        py::arg("sys"));

  m.def("certify_undetectable", [](const LtiSystem& sys, const SideInformation& side, const Mat& attack,
                                   double rank_rel, double residual_rel) {
    return certificate_dict(certify_undetectable(sys, side, to_attack(attack), make_tol(rank_rel, residual_rel)));
  }, py::arg("sys"), py::arg("side"), py::arg("attack"), py::arg("rank_rel") = 1e-10,
     py::arg("residual_rel") = 1e-8);
  m.def("is_zero_state_inducing", [](const LtiSystem& sys, const Mat& attack) {
    return is_zero_state_inducing(sys, to_attack(attack));
  }, py::arg("sys"), py::arg("attack"));
  m.def("extensible_forever", [](const LtiSystem& sys, const SideInformation& side, const Mat& attack) {
    const AttackSequence e = to_attack(attack);
    return extension_verdict(sys, side, e, certify_undetectable(sys, side, e)).extensible_forever;
  }, py::arg("sys"), py::arg("side"), py::arg("attack"));

  m.def("find_zero_dynamics_modes", [](const LtiSystem& sys, std::vector<Complex> hints, bool allow_unstable) {
    ModeSearchOptions opts;
    opts.lambda_hints = std::move(hints);
    opts.allow_unstable = allow_unstable;
    return find_zero_dynamics_modes(sys, {}, opts);
  }, py::arg("sys"), py::arg("lambda_hints") = std::vector<Complex>{}, py::arg("allow_unstable") = false);
  m.def("zero_dynamics_attack", [](const ZeroDynamicsMode& mode, Index t, double scale) {
    return from_attack(zero_dynamics_attack(mode, t, scale));
  }, py::arg("mode"), py::arg("t"), py::arg("scale") = 1.0);
  m.def("zero_state_synthesize", [](const LtiSystem& sys, Index t) {
    return from_attack(zero_state_synthesize(sys, t));
  }, py::arg("sys"), py::arg("t"));
  m.def("undetectable_from_theta", [](const LtiSystem& sys, const SideInformation& side, const Vec& theta, Index t) {
    return from_attack(undetectable_from_theta(sys, side, theta, t));
  }, py::arg("sys"), py::arg("side"), py::arg("theta"), py::arg("t"));
  m.def("extend_attack", [](const LtiSystem& sys, const SideInformation& side, const Mat& attack, Index t_prime) {
    const AttackSequence e = to_attack(attack);
    return from_attack(extend_attack(sys, side, e, certify_undetectable(sys, side, e), t_prime));
  }, py::arg("sys"), py::arg("side"), py::arg("attack"), py::arg("t_prime"));

  m.def("run_detector", [](const LtiSystem& sys, const SideInformation& side, const Vec& y_omega,
                           const Mat& outputs, Index window, double residual_rel) {
    DetectorConfig config = DetectorConfig::with_default_window(side, make_tol(1e-10, residual_rel));
    if (window > 0) config.window_len = window;
    const DetectionTrace trace = run_detector(sys.a(), sys.c(), config, y_omega, outputs.transpose());
    py::list epochs;
    for (const EpochRecord& e : trace.epochs) {
      py::dict rec;
      rec["k"] = e.k;
      rec["attack"] = e.decision == Decision::kAttack;
      rec["residual"] = e.residual;
      epochs.append(rec);
    }
    return epochs;
  }, py::arg("sys"), py::arg("side"), py::arg("y_omega"), py::arg("outputs"), py::arg("window") = 0,
     py::arg("residual_rel") = 1e-8,
     "One record per decision epoch; window 0 means n+1.");

  m.def("load_scenario", [](const std::string& path) {
    const Scenario sc = load_scenario(path);
    py::dict out;
    out["system"] = sc.system;
    out["side"] = sc.side;
    out["x0"] = sc.x0 ? py::cast(*sc.x0) : py::none();
    out["attack"] = sc.attack ? py::cast(from_attack(*sc.attack)) : py::none();
    return out;
  }, py::arg("path"));
  m.def("analyze", [](const std::string& path, std::vector<Complex> hints) {
    return to_python(analyze_report(load_scenario(path), hints));
  }, py::arg("path"), py::arg("lambda_hints") = std::vector<Complex>{});
  m.def("repro_aircraft", [](const std::string& path, Index window, Index horizon, double scale) {
    ReproOptions opts;
    opts.window_len = window;
    opts.horizon = horizon;
    opts.scale = scale;
    return to_python(repro_aircraft(load_scenario(path), opts).report);
  }, py::arg("path"), py::arg("window") = 5, py::arg("horizon") = 30, py::arg("scale") = 10.0);
}
