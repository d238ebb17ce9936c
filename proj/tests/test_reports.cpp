#include <gtest/gtest.h>

#include <fstream>

#include "cpsguard/errors.hpp"
#include "cpsguard/reports.hpp"
#include "cpsguard/subspaces.hpp"
#include "support/generators.hpp"

using namespace cpsguard;
using namespace cpsguard::testing;

namespace {

const std::filesystem::path kDir(CPSGUARD_SCENARIO_DIR);

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

Scenario aircraft() { return load_scenario(kDir / "aircraft.json"); }

Json expectation(const Json& report, const std::string& name) {
  for (const Json& e : report.at("expectations")) {
    if (e.at("name") == name) return e;
  }
  ADD_FAILURE() << "missing expectation " << name;
  return Json();
}

}  // namespace

TEST(AnalyzeReport, AircraftMatchesRegressionValues) {
  const Json expected = read_json(kDir / "aircraft.expected.json");
  const Json r = analyze_report(aircraft(), {Complex(0.9779, 0.0)});
  for (const char* key : {"dim_v", "dim_w1", "dim_w1_cap_v", "dim_null_omega_cap_v",
                          "zero_state_attack_exists", "zero_dynamics_attack_exists"}) {
    EXPECT_EQ(r.at(key), expected.at(key)) << key;
  }
  bool near = false;
  for (const Json& m : r.at("zero_dynamics_modes")) {
    near = near || std::abs(m.at("lambda_re").get<double>() - 0.9779) < 1e-3;
  }
  EXPECT_TRUE(near);
  EXPECT_TRUE(r.at("validation").at("observable").get<bool>());
}

TEST(AnalyzeReport, NoInputAuthority) {
  const Json doc = {{"n", 2}, {"p", 2}, {"s", 1}, {"q", 0},
                    {"A", {0.5, 0, 0, 0.3}}, {"B", {0, 0}}, {"C", {0, 0, 1, 1}},
                    {"D", {1, 0}}, {"Omega", Json::array()}};
  const Json r = analyze_report(parse_scenario(doc));
  EXPECT_FALSE(r.at("zero_state_attack_exists").get<bool>());
  EXPECT_FALSE(r.at("zero_dynamics_attack_exists").get<bool>());
  EXPECT_TRUE(r.at("zero_dynamics_modes").empty());
  EXPECT_EQ(r.at("dim_v"), 0);
}

TEST(AnalyzeReport, PlantedZeroState) {
  Rng rng(7);
  const LtiSystem sys = planted_zero_state_system(rng);
  const Scenario sc{sys, SideInformation::none(sys.n()), std::nullopt, std::nullopt};
  const Json r = analyze_report(sc);
  EXPECT_TRUE(r.at("zero_state_attack_exists").get<bool>());
  EXPECT_GE(r.at("dim_w1_cap_v").get<int>(), 1);
}

TEST(ReproAircraft, DefaultRunPasses) {
  const ReproResult r = repro_aircraft(aircraft());
  EXPECT_TRUE(r.pass) << format_report(r.report);
  EXPECT_EQ(r.trace_without_side_info.verdict(), Decision::kNoAttack);
  ASSERT_TRUE(r.trace_with_side_info.first_alarm().has_value());
  const Json expected = read_json(kDir / "aircraft.expected.json").at("repro");
  EXPECT_EQ(*r.trace_with_side_info.first_alarm(),
            expected.at("first_alarm_with_side_information").get<Index>());
  EXPECT_NEAR(r.mode.lambda.real(), expected.at("mode_lambda").get<double>(),
              expected.at("mode_lambda_tol").get<double>());
  EXPECT_EQ(r.mode.channels, expected.at("mode_channels").get<std::vector<Index>>());
  EXPECT_GE(r.trace_with_side_info.epochs.front().residual, 1e3 * r.residual_floor);
  EXPECT_EQ(r.report.at("detectors").at("without_side_information").at("series").size(), 27u);
}

TEST(ReproAircraft, LooseToleranceGivesSameVerdicts) {
  const ReproResult strict = repro_aircraft(aircraft());
  ReproOptions opts;
  opts.tol.residual_rel = 1e-2;
  const ReproResult loose = repro_aircraft(aircraft(), opts);
  EXPECT_TRUE(loose.pass);
  ASSERT_EQ(strict.trace_with_side_info.epochs.size(), loose.trace_with_side_info.epochs.size());
  for (std::size_t i = 0; i < strict.trace_with_side_info.epochs.size(); ++i) {
    EXPECT_EQ(strict.trace_with_side_info.epochs[i].decision,
              loose.trace_with_side_info.epochs[i].decision);
    EXPECT_EQ(strict.trace_without_side_info.epochs[i].decision,
              loose.trace_without_side_info.epochs[i].decision);
  }
}

TEST(ReproAircraft, ZeroScaleNeverAlarms) {
  ReproOptions opts;
  opts.scale = 0.0;
  const ReproResult r = repro_aircraft(aircraft(), opts);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.trace_without_side_info.verdict(), Decision::kNoAttack);
  EXPECT_EQ(r.trace_with_side_info.verdict(), Decision::kNoAttack);
  EXPECT_NE(format_report(r.report).find("with_side_information_never_alarms"), std::string::npos);
}

TEST(ReproAircraft, ReportIsDeterministic) {
  EXPECT_EQ(format_report(repro_aircraft(aircraft()).report),
            format_report(repro_aircraft(aircraft()).report));
  const Json r = repro_aircraft(aircraft()).report;
  EXPECT_TRUE(expectation(r, "mode_matches_published_coefficients").at("pass").get<bool>());
  EXPECT_EQ(r.at("printed_coefficients_attack").at("with_side_information").at("verdict"), "Attack");
}

TEST(ReproAircraft, Errors) {
  ReproOptions opts;
  opts.horizon = 3;
  try {
    repro_aircraft(aircraft(), opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}
