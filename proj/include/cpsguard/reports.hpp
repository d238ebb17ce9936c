#pragma once

#include <vector>

#include "cpsguard/scenario.hpp"

namespace cpsguard {

/// Geometry summary: dim V, dim W_1, dim (W_1 ∩ V), zero-state verdict,
/// zero-dynamics modes and dim (N(Omega) ∩ V).
Json analyze_report(const Scenario& scenario,
                    const std::vector<Complex>& lambda_hints = {},
                    const Tol& tol = {});

/// Coefficients of the published aircraft attack a(k) = 10 (0.9779)^k g.
struct PublishedAttack {
  double lambda = 0.9779;
  double scale = 10.0;
  Vec direction = (Vec(4) << 0.0324, 0.0, -0.6396, 0.3007).finished();
  /// Half a unit in the last printed digit.
  double print_precision = 5e-5;
};

struct ReproOptions {
  Index window_len = 5;
  Index horizon = 30;
  double scale = 10.0;
  Tol tol;
};

/// Result of replaying the aircraft experiment.
struct ReproResult {
  Json report;
  bool pass = false;
  ZeroDynamicsMode mode;
  AttackSequence attack;
  DetectionTrace trace_without_side_info;
  DetectionTrace trace_with_side_info;
  /// Largest residual seen by either detector where no alarm is expected.
  double residual_floor = 0.0;
};

/// Synthesizes the zero-dynamics attack closest to the published one, runs
/// it for k = 0..horizon against detectors with Omega = 0 and with the
/// scenario's Omega, and checks the expected outcomes.
ReproResult repro_aircraft(const Scenario& scenario,
                           const ReproOptions& options = {});

}  // namespace cpsguard
