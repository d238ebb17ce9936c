#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "cpsguard/analysis.hpp"
#include "cpsguard/detector.hpp"
#include "cpsguard/model.hpp"
#include "cpsguard/synthesis.hpp"

namespace cpsguard {

using Json = nlohmann::json;

/// Scenario file:
///   { "n", "p", "s", "q", "A", "B", "C", "D", "Omega",
///     optional "x0", optional "attack": {"T", "frames"} }
/// Matrices are flat row-major arrays with the dimensions given explicitly.
struct Scenario {
  LtiSystem system;
  SideInformation side;
  std::optional<Vec> x0;
  std::optional<AttackSequence> attack;
};

/// Throws ParseError, DimensionMismatch, or (when `check_assumptions`)
/// AssumptionViolated naming the violated assumption.
Scenario parse_scenario(const Json& doc, const Tol& tol = {},
                        bool check_assumptions = true);
Scenario load_scenario(const std::filesystem::path& path, const Tol& tol = {},
                       bool check_assumptions = true);
Json scenario_to_json(const Scenario& scenario);

/// Attack file: {"T": T, "frames": [[a(0)], ..., [a(T)]]}
AttackSequence parse_attack(const Json& doc);
AttackSequence load_attack(const std::filesystem::path& path);
Json attack_to_json(const AttackSequence& attack);

/// Measurement log: a header record {"y_omega": [...]} followed by one
/// {"k": index, "y": [...]} record per line, k = 0, 1, 2, ...
struct MeasurementLog {
  Vec y_omega;
  /// p x N
  Mat outputs;
};

MeasurementLog read_log(std::istream& in);
void write_log(std::ostream& out, const Trajectory& trajectory);

/// One {"k", "decision", "residual"} line per epoch.
void write_trace(std::ostream& out, const DetectionTrace& trace);
/// CSV with columns k,decision,residual (decision 1 = Attack).
void write_trace_csv(std::ostream& out, const DetectionTrace& trace);

Json certificate_to_json(const UndetectabilityCertificate& cert);
Json verdict_to_json(const ExtensionVerdict& verdict);
Json mode_to_json(const ZeroDynamicsMode& mode);
Json class_to_json(const AttackClass& cls);

/// Rounds every floating-point value to 12 significant digits so reports
/// are stable across platforms, then serializes with 2-space indentation.
std::string format_report(const Json& report);

}  // namespace cpsguard
