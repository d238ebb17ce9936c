// cpsguard: analyze, attack and monitor LTI systems described by scenario files.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cpsguard/errors.hpp"
#include "cpsguard/reports.hpp"
#include "cpsguard/subspaces.hpp"

namespace {

using namespace cpsguard;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kFlagged = 2;

struct Common {
  std::string scenario;
  std::string out;
  double tol = Tol{}.residual_rel;

  Tol tolerance() const {
    Tol t;
    t.residual_rel = tol;
    return t;
  }
};

// Writes to --out when given, stdout otherwise.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::vector<Complex> hints_of(const std::vector<double>& raw) {
  return {raw.begin(), raw.end()};
}

void add_common(CLI::App* cmd, Common& c, bool needs_scenario = true) {
  auto* opt = cmd->add_option("--scenario", c.scenario, "Scenario file");
  if (needs_scenario) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output file (default stdout)");
  cmd->add_option("--tol", c.tol, "Relative residual tolerance")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detectability analysis, attack synthesis and detection for "
               "LTI systems with side initial-state information"};
  app.require_subcommand(1);

  Common common;
  std::vector<double> lambda_hints;

  auto* analyze = app.add_subcommand("analyze", "Subspace and mode summary");
  add_common(analyze, common);
  analyze->add_option("--lambda-hint", lambda_hints, "Candidate zero locations");

  std::string kind = "zero-dynamics";
  Index horizon = 30;
  double scale = 1.0;
  std::size_t mode_index = 0;
  std::optional<double> near_lambda;
  std::vector<double> theta;
  std::string attack_path;
  auto* synth = app.add_subcommand("synthesize", "Write an attack file");
  add_common(synth, common);
  synth->add_option("--kind", kind)
      ->check(CLI::IsMember({"zero-dynamics", "zero-state", "from-theta", "extend"}));
  synth->add_option("--horizon", horizon, "Final time T (T' for extend)")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--scale", scale, "Zero-dynamics attack amplitude");
  synth->add_option("--lambda-hint", lambda_hints);
  synth->add_option("--mode-index", mode_index, "Which zero-dynamics mode");
  synth->add_option("--lambda", near_lambda, "Pick the mode closest to this value")
      ->excludes("--mode-index");
  synth->add_option("--theta", theta, "Induced state for from-theta");
  synth->add_option("--attack", attack_path, "Attack to extend")
      ->check(CLI::ExistingFile);

  std::string expect;
  auto* certify = app.add_subcommand("certify", "Certify an attack");
  add_common(certify, common);
  certify->add_option("--attack", attack_path)->required()->check(CLI::ExistingFile);
  certify->add_option("--expect", expect)
      ->check(CLI::IsMember({"undetectable", "detectable"}));

  auto* sim = app.add_subcommand("simulate", "Write a measurement log");
  add_common(sim, common);
  sim->add_option("--attack", attack_path)->check(CLI::ExistingFile);
  sim->add_option("--horizon", horizon, "Final time when no attack is given");

  std::string log_path;
  Index window = 0;
  bool csv = false;
  auto* detect = app.add_subcommand("detect", "Run the windowed detector on a log");
  add_common(detect, common);
  detect->add_option("--log", log_path, "Measurement log ('-' for stdin)")
      ->required();
  detect->add_option("--window", window, "Window length l (default n+1)");
  detect->add_flag("--csv", csv, "Emit k,decision,residual CSV");

  ReproOptions repro_opts;
  std::string series_csv;
  auto* repro = app.add_subcommand("repro-aircraft",
                                   "Replay the aircraft zero-dynamics experiment");
  add_common(repro, common, false);
  repro->add_option("--window", repro_opts.window_len);
  repro->add_option("--horizon", repro_opts.horizon);
  repro->add_option("--scale", repro_opts.scale);
  repro->add_option("--series-csv", series_csv,
                    "Per-epoch residuals of both detectors as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    const Tol tol = common.tolerance();

    if (*analyze) {
      const Scenario sc = load_scenario(common.scenario, tol);
      emit(common.out, format_report(analyze_report(sc, hints_of(lambda_hints), tol)));
      return kOk;
    }

    if (*synth) {
      const Scenario sc = load_scenario(common.scenario, tol);
      const LtiSystem& sys = sc.system;
      AttackSequence attack = AttackSequence::zero(sys.s(), 0);
      if (kind == "zero-dynamics") {
        ModeSearchOptions search;
        search.lambda_hints = hints_of(lambda_hints);
        const auto modes = find_zero_dynamics_modes(sys, tol, search);
        if (near_lambda) {
          const auto closer = [&](const auto& x, const auto& y) {
            return std::abs(x.lambda - *near_lambda) < std::abs(y.lambda - *near_lambda);
          };
          mode_index = std::min_element(modes.begin(), modes.end(), closer) - modes.begin();
        }
        if (mode_index >= modes.size()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "--mode-index out of range (" +
                          std::to_string(modes.size()) + " modes)");
        }
        attack = zero_dynamics_attack(modes[mode_index], horizon, scale);
      } else if (kind == "zero-state") {
        attack = zero_state_synthesize(sys, horizon, tol);
      } else if (kind == "from-theta") {
        if (static_cast<Index>(theta.size()) != sys.n()) {
          throw Error(ErrorCode::kDimensionMismatch, "--theta needs n values");
        }
        const Vec th = Eigen::Map<const Vec>(theta.data(), sys.n());
        attack = undetectable_from_theta(sys, sc.side, th, horizon, tol);
      } else {
        if (attack_path.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "extend needs --attack");
        }
        const AttackSequence base = load_attack(attack_path);
        const auto cert = certify_undetectable(sys, sc.side, base, tol);
        attack = extend_attack(sys, sc.side, base, cert, horizon, tol);
      }
      emit(common.out, attack_to_json(attack).dump(2));
      return kOk;
    }

    if (*certify) {
      const Scenario sc = load_scenario(common.scenario, tol);
      const AttackSequence attack = load_attack(attack_path);
      const auto cert = certify_undetectable(sc.system, sc.side, attack, tol);
      Json report = {{"certificate", certificate_to_json(cert)},
                     {"class", class_to_json(classify(sc.system, sc.side, attack, tol))}};
      if (cert.undetectable && !attack.is_zero() &&
          attack.horizon() >= sc.system.n() - 1) {
        report["extension"] = verdict_to_json(
            extension_verdict(sc.system, sc.side, attack, cert, tol));
      }
      emit(common.out, format_report(report));
      if (!expect.empty() && (expect == "undetectable") != cert.undetectable) {
        return kFlagged;
      }
      return kOk;
    }

    if (*sim) {
      const Scenario sc = load_scenario(common.scenario, tol);
      const AttackSequence attack = !attack_path.empty()
                                        ? load_attack(attack_path)
                                    : sc.attack ? *sc.attack
                                                : AttackSequence::zero(sc.system.s(), horizon);
      const Vec x0 = sc.x0.value_or(Vec::Zero(sc.system.n()));
      std::ostringstream log;
      write_log(log, simulate(sc.system, x0, attack, sc.side));
      emit(common.out, log.str());
      return kOk;
    }

    if (*detect) {
      const Scenario sc = load_scenario(common.scenario, tol);
      MeasurementLog log;
      if (log_path == "-") {
        log = read_log(std::cin);
      } else {
        std::ifstream in(log_path);
        if (!in) throw Error(ErrorCode::kParseError, "cannot open " + log_path);
        log = read_log(in);
      }
      DetectorConfig config = DetectorConfig::with_default_window(sc.side, tol);
      if (window > 0) config.window_len = window;
      const DetectionTrace trace =
          run_detector(sc.system.a(), sc.system.c(), config, log.y_omega, log.outputs);
      std::ostringstream text;
      if (csv) {
        write_trace_csv(text, trace);
      } else {
        write_trace(text, trace);
      }
      emit(common.out, text.str());
      return trace.verdict() == Decision::kAttack ? kFlagged : kOk;
    }

    if (*repro) {
      const std::string path = common.scenario.empty()
                                   ? std::string(CPSGUARD_SCENARIO_DIR "/aircraft.json")
                                   : common.scenario;
      const Scenario sc = load_scenario(path, tol);
      repro_opts.tol = tol;
      const ReproResult result = repro_aircraft(sc, repro_opts);
      emit(common.out, format_report(result.report));
      if (!series_csv.empty()) {
        std::ofstream f(series_csv);
        if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + series_csv);
        f << "k,decision_without,residual_without,decision_with,residual_with\n";
        const auto& a = result.trace_without_side_info.epochs;
        const auto& b = result.trace_with_side_info.epochs;
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
          f << a[i].k << ',' << (a[i].decision == Decision::kAttack) << ','
            << a[i].residual << ',' << (b[i].decision == Decision::kAttack)
            << ',' << b[i].residual << '\n';
        }
      }
      return result.pass ? kOk : kFlagged;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
