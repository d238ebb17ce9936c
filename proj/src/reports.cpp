#include "cpsguard/reports.hpp"

#include <algorithm>
#include <cmath>

#include "cpsguard/errors.hpp"
#include "cpsguard/subspaces.hpp"

namespace cpsguard {
namespace {

Json series_of(const DetectionTrace& trace) {
  Json out = Json::array();
  for (const EpochRecord& e : trace.epochs) {
    out.push_back({{"k", e.k},
                   {"decision", e.decision == Decision::kAttack ? 1 : 0},
                   {"residual", e.residual}});
  }
  return out;
}

Json detector_summary(const SideInformation& side,
                      const DetectionTrace& trace) {
  Json omega = Json::array();
  for (Index i = 0; i < side.omega().rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < side.omega().cols(); ++j) {
      row.push_back(side.omega()(i, j));
    }
    omega.push_back(std::move(row));
  }
  const auto alarm = trace.first_alarm();
  return {{"omega", std::move(omega)},
          {"verdict", std::string(to_string(trace.verdict()))},
          {"first_alarm", alarm ? Json(*alarm) : Json(nullptr)},
          {"series", series_of(trace)}};
}

double max_residual(const DetectionTrace& trace) {
  double out = 0.0;
  for (const EpochRecord& e : trace.epochs) out = std::max(out, e.residual);
  return out;
}

Json expectation(const std::string& name, const Json& expected,
                 const Json& observed, bool pass) {
  return {{"name", name},
          {"expected", expected},
          {"observed", observed},
          {"pass", pass}};
}

// The verified mode near the published lambda whose g points closest to the
// published direction.
ZeroDynamicsMode published_mode(const LtiSystem& sys,
                                const PublishedAttack& published,
                                const Tol& tol) {
  ModeSearchOptions search;
  search.lambda_hints = {Complex(published.lambda, 0.0)};
  const std::vector<ZeroDynamicsMode> modes =
      find_zero_dynamics_modes(sys, tol, search);
  const Vec dir = published.direction.normalized();
  const ZeroDynamicsMode* best = nullptr;
  double best_cos = -1.0;
  for (const ZeroDynamicsMode& m : modes) {
    if (!m.is_real() || std::abs(m.lambda.real() - published.lambda) > 1e-3) {
      continue;
    }
    const double cos = std::abs(m.g.real().normalized().dot(dir));
    if (cos > best_cos) {
      best_cos = cos;
      best = &m;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorCode::kNoModes,
                "no real zero-dynamics mode near the published lambda");
  }
  ZeroDynamicsMode mode = *best;
  if (mode.g.real().dot(dir) < 0.0) {
    mode.g = -mode.g;
    mode.theta = -mode.theta;
  }
  return mode;
}

}  // namespace

Json analyze_report(const Scenario& scenario,
                    const std::vector<Complex>& lambda_hints, const Tol& tol) {
  const LtiSystem& sys = scenario.system;
  const ValidationReport validation = validate(sys, tol);
  const SubspaceBasis v = weakly_unobservable(sys, tol);
  const SubspaceBasis w1 = output_nulling_reachable(sys, 1, tol);
  const SubspaceBasis w1v = intersect(w1, v, tol);
  const SubspaceBasis nv = intersect(scenario.side.null_basis(), v, tol);

  Json modes = Json::array();
  try {
    ModeSearchOptions search;
    search.lambda_hints = lambda_hints;
    for (const ZeroDynamicsMode& m : find_zero_dynamics_modes(sys, tol, search)) {
      modes.push_back(mode_to_json(m));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoModes) throw;
  }

  return {{"n", sys.n()},
          {"p", sys.p()},
          {"s", sys.s()},
          {"q", scenario.side.q()},
          {"validation",
           {{"observable", validation.observable},
            {"bd_injective", validation.bd_injective}}},
          {"dim_v", v.dim()},
          {"dim_w1", w1.dim()},
          {"dim_w1_cap_v", w1v.dim()},
          {"zero_state_attack_exists", w1v.dim() > 0},
          {"dim_null_omega_cap_v", nv.dim()},
          {"zero_dynamics_attack_exists", !modes.empty()},
          {"zero_dynamics_modes", std::move(modes)}};
}

ReproResult repro_aircraft(const Scenario& scenario,
                           const ReproOptions& options) {
  const PublishedAttack published;
  const LtiSystem& sys = scenario.system;
  const Tol& tol = options.tol;
  if (sys.s() != published.direction.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "the aircraft experiment needs four attack channels");
  }
  if (options.horizon < options.window_len - 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "the horizon must reach the first decision epoch l-1");
  }

  const ZeroDynamicsMode mode = published_mode(sys, published, tol);
  const AttackSequence attack =
      zero_dynamics_attack(mode, options.horizon, options.scale);
  const Vec x0 = scenario.x0.value_or(Vec::Zero(sys.n()));

  const SideInformation without = SideInformation::none(sys.n());
  const SideInformation& with = scenario.side;
  auto detect = [&](const SideInformation& side, const AttackSequence& a) {
    const Trajectory traj = simulate(sys, x0, a, side);
    const DetectorConfig config{options.window_len, tol, side};
    return batch_decide(sys.a(), sys.c(), config, traj.side_value, traj).trace;
  };

  const DetectionTrace trace_without = detect(without, attack);
  const DetectionTrace trace_with = detect(with, attack);
  const DetectionTrace clean_with =
      detect(with, AttackSequence::zero(sys.s(), options.horizon));
  const double floor =
      std::max(max_residual(trace_without), max_residual(clean_with));

  const UndetectabilityCertificate cert_without =
      certify_undetectable(sys, without, attack, tol);
  const UndetectabilityCertificate cert_with =
      certify_undetectable(sys, with, attack, tol);

  // The attack built from the printed coefficients themselves.
  Mat printed(sys.s(), options.horizon + 1);
  for (Index k = 0; k <= options.horizon; ++k) {
    printed.col(k) = published.scale *
                     std::pow(published.lambda, static_cast<double>(k)) *
                     published.direction;
  }
  const AttackSequence printed_attack(printed);
  const DetectionTrace printed_without = detect(without, printed_attack);
  const DetectionTrace printed_with = detect(with, printed_attack);

  const bool attacking = !attack.is_zero();
  const Index first_epoch = options.window_len - 1;
  const double lambda_err = std::abs(mode.lambda.real() - published.lambda);
  const double g_err =
      (mode.g.real() - published.direction).cwiseAbs().maxCoeff();
  const auto first_with = trace_with.first_alarm();
  const double first_residual = trace_with.epochs.front().residual;

  Json expectations = Json::array();
  expectations.push_back(expectation(
      "without_side_information_never_alarms", "NoAttack",
      std::string(to_string(trace_without.verdict())),
      trace_without.verdict() == Decision::kNoAttack));
  if (attacking) {
    expectations.push_back(expectation(
        "with_side_information_alarms_at_first_epoch", first_epoch,
        first_with ? Json(*first_with) : Json(nullptr),
        first_with.has_value() && *first_with == first_epoch));
    expectations.push_back(expectation(
        "first_alarm_residual_margin", 1e3 * floor, first_residual,
        first_residual >= 1e3 * floor));
  } else {
    expectations.push_back(expectation(
        "with_side_information_never_alarms", "NoAttack",
        std::string(to_string(trace_with.verdict())),
        trace_with.verdict() == Decision::kNoAttack));
  }
  expectations.push_back(expectation("certificate_without_side_information",
                                     "undetectable",
                                     cert_without.undetectable ? "undetectable"
                                                               : "detectable",
                                     cert_without.undetectable));
  const bool want_undetectable_with = !attacking;
  expectations.push_back(expectation(
      "certificate_with_side_information",
      want_undetectable_with ? "undetectable" : "detectable",
      cert_with.undetectable ? "undetectable" : "detectable",
      cert_with.undetectable == want_undetectable_with));
  expectations.push_back(expectation(
      "mode_matches_published_coefficients", published.print_precision,
      std::max(lambda_err, g_err),
      lambda_err <= published.print_precision &&
          g_err <= published.print_precision));

  bool pass = true;
  for (const Json& e : expectations) pass = pass && e.at("pass").get<bool>();

  Json report = {
      {"experiment", "aircraft zero-dynamics attack"},
      {"window", options.window_len},
      {"horizon", options.horizon},
      {"scale", options.scale},
      {"tol",
       {{"rank_rel", tol.rank_rel}, {"residual_rel", tol.residual_rel}}},
      {"mode", mode_to_json(mode)},
      {"detectors",
       {{"without_side_information", detector_summary(without, trace_without)},
        {"with_side_information", detector_summary(with, trace_with)}}},
      {"certificates",
       {{"without_side_information", certificate_to_json(cert_without)},
        {"with_side_information", certificate_to_json(cert_with)}}},
      {"residual_floor", floor},
      {"printed_coefficients_attack",
       {{"without_side_information",
         {{"verdict", std::string(to_string(printed_without.verdict()))},
          {"max_residual", max_residual(printed_without)}}},
        {"with_side_information",
         {{"verdict", std::string(to_string(printed_with.verdict()))},
          {"max_residual", max_residual(printed_with)}}}}},
      {"expectations", std::move(expectations)},
      {"pass", pass}};

  return ReproResult{std::move(report), pass,         mode,
                     attack,            trace_without, trace_with,
                     floor};
}

}  // namespace cpsguard
