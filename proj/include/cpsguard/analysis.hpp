#pragma once

#include <optional>
#include <string_view>

#include "cpsguard/model.hpp"

namespace cpsguard {

/// Outcome of the undetectability test for one attack under one side
/// information pattern. The attack is undetectable iff some theta in
/// N(Omega) ∩ V satisfies M_T E = -O_T theta; theta is then the state the
/// attack induces (unique, since O_T is injective for T >= n-1).
struct UndetectabilityCertificate {
  bool undetectable = false;
  /// Present iff undetectable.
  std::optional<Vec> induced_state;
  /// |O_T theta + M_T E| for the best theta in N(Omega) ∩ V.
  double residual = 0.0;
  /// residual_rel * max(1, |M_T E|)
  double threshold = 0.0;
  bool theta_in_null_omega = false;
  bool theta_in_v = false;
  /// dim(N(Omega) ∩ V)
  Index feasible_dim = 0;
};

/// Throws HorizonTooShort when the attack horizon is below n-1.
UndetectabilityCertificate certify_undetectable(const LtiSystem& sys,
                                                const SideInformation& omega,
                                                const AttackSequence& attack,
                                                const Tol& tol = {});

/// M_T E = 0 within residual_rel * max(1, |E| |M_T|).
bool is_zero_state_inducing(const LtiSystem& sys, const AttackSequence& attack,
                            const Tol& tol = {});

struct ExtensionVerdict {
  bool extensible_forever = false;
  /// C_T E + A^{T+1} theta
  Vec test_vector;
  /// Distance of test_vector from V.
  double membership_residual = 0.0;
  double threshold = 0.0;
};

/// Whether an undetectable, nonzero attack admits undetectable extensions to
/// every longer horizon. Throws NotUndetectable for a detectable certificate.
ExtensionVerdict extension_verdict(const LtiSystem& sys,
                                   const SideInformation& omega,
                                   const AttackSequence& attack,
                                   const UndetectabilityCertificate& cert,
                                   const Tol& tol = {});

/// Shape of the frame sequence.
enum class FrameShape {
  kNone,
  /// a(k) = lambda^k g with real lambda.
  kGeometric,
  /// Real part of a complex geometric sequence: a(k+2) = c1 a(k+1) + c0 a(k)
  /// with c1^2 + 4 c0 < 0.
  kConjugatePair,
};

std::string_view to_string(FrameShape shape);

struct FrameShapeFit {
  FrameShape shape = FrameShape::kNone;
  /// Fitted ratio for kGeometric.
  double lambda = 0.0;
  /// Fitted recurrence coefficients for kConjugatePair.
  double c1 = 0.0;
  double c0 = 0.0;
};

FrameShapeFit fit_frame_shape(const AttackSequence& attack,
                              const Tol& tol = {});

struct AttackClass {
  bool undetectable_under_omega = false;
  bool undetectable_under_zero_omega = false;
  bool zero_state_inducing = false;
  bool zero_dynamics_form = false;
  FrameShapeFit shape;
};

AttackClass classify(const LtiSystem& sys, const SideInformation& omega,
                     const AttackSequence& attack, const Tol& tol = {});

}  // namespace cpsguard
