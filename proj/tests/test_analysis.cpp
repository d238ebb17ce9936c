#include <gtest/gtest.h>

#include "cpsguard/analysis.hpp"
#include "cpsguard/errors.hpp"
#include "cpsguard/subspaces.hpp"
#include "cpsguard/synthesis.hpp"
#include "support/aircraft.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace cpsguard;
using namespace cpsguard::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no cpsguard::Error thrown";
  return ErrorCode::kInvalidArgument;
}

// An undetectable attack drawn at random from the solution set of
// [M_T, O_T N(Omega)] [E; xi] = 0.
AttackSequence random_undetectable(Rng& rng, const LtiSystem& sys, const Mat& omega,
                                   Index t) {
  const Mat n_omega = oracle::null_basis(omega);
  Mat stacked(sys.p() * (t + 1), sys.s() * (t + 1) + n_omega.cols());
  stacked << io_matrix(sys, t), obs_matrix(sys, t) * n_omega;
  const Mat nb = oracle::null_basis(stacked);
  if (nb.cols() == 0) return AttackSequence::zero(sys.s(), t);
  const Vec z = nb * random_vector(rng, nb.cols());
  return AttackSequence::from_stacked(z.head(sys.s() * (t + 1)), sys.s());
}

}  // namespace

TEST(CertifyUndetectable, ZeroAttack) {
  const LtiSystem sys = aircraft::system();
  const auto cert = certify_undetectable(sys, SideInformation(aircraft::omega()),
                                         AttackSequence::zero(4, 5));
  EXPECT_TRUE(cert.undetectable);
  ASSERT_TRUE(cert.induced_state.has_value());
  EXPECT_TRUE(cert.induced_state->isZero(0.0));
  EXPECT_TRUE(cert.theta_in_null_omega);
  EXPECT_TRUE(cert.theta_in_v);
}

TEST(CertifyUndetectable, AircraftWithAndWithoutSideInformation) {
  const LtiSystem sys = aircraft::system();
  const AttackSequence e = aircraft::resolved_attack(30);
  const auto blind = certify_undetectable(sys, SideInformation::none(4), e);
  EXPECT_TRUE(blind.undetectable);
  EXPECT_LE(blind.residual, blind.threshold);
  ASSERT_TRUE(blind.induced_state.has_value());
  // The induced state is the scaled theta block of the pencil null vector.
  const aircraft::Mode mode = aircraft::resolved_mode();
  EXPECT_LE((*blind.induced_state - 10.0 * mode.theta).norm(), 1e-8);

  const auto informed = certify_undetectable(sys, SideInformation(aircraft::omega()), e);
  EXPECT_FALSE(informed.undetectable);
  EXPECT_FALSE(informed.induced_state.has_value());
  EXPECT_GT(informed.residual, 1e6 * informed.threshold);
}

TEST(CertifyUndetectable, HorizonTooShort) {
  const LtiSystem sys = aircraft::system();
  EXPECT_EQ(code_of([&] { certify_undetectable(sys, SideInformation::none(4), AttackSequence::zero(4, 2)); }),
            ErrorCode::kHorizonTooShort);
  EXPECT_NO_THROW(certify_undetectable(sys, SideInformation::none(4), AttackSequence::zero(4, 3)));
}

TEST(CertifyUndetectable, DimensionMismatch) {
  const LtiSystem sys = aircraft::system();
  EXPECT_EQ(code_of([&] { certify_undetectable(sys, SideInformation::none(3), AttackSequence::zero(4, 5)); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code_of([&] { certify_undetectable(sys, SideInformation::none(4), AttackSequence::zero(3, 5)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(IsZeroStateInducing, SpecCases) {
  const LtiSystem sys = aircraft::system();
  EXPECT_TRUE(is_zero_state_inducing(sys, AttackSequence::zero(4, 6)));
  EXPECT_FALSE(is_zero_state_inducing(sys, aircraft::resolved_attack(30)));
  const AttackSequence zs = zero_state_synthesize(sys, 12);
  EXPECT_TRUE(is_zero_state_inducing(sys, zs));
  EXPECT_FALSE(zs.frame(0).isZero(1e-12));
}

TEST(ExtensionVerdict, ZeroDynamicsAttackExtendsForever) {
  const LtiSystem sys = aircraft::system();
  const SideInformation none = SideInformation::none(4);
  const AttackSequence e = aircraft::resolved_attack(30);
  const auto cert = certify_undetectable(sys, none, e);
  const ExtensionVerdict v = extension_verdict(sys, none, e, cert);
  EXPECT_TRUE(v.extensible_forever);
  EXPECT_LE(v.membership_residual, v.threshold);
  // The test vector is the state of the shifted system after T+1 steps:
  // C_T E + A^{T+1} theta = lambda^{T+1} * scale * theta.
  const aircraft::Mode mode = aircraft::resolved_mode();
  const Vec expected = 10.0 * std::pow(mode.lambda, 31.0) * mode.theta;
  EXPECT_LE((v.test_vector - expected).norm(), 1e-8);

  const AttackSequence ext = extend_attack(sys, none, e, cert, 30 + 4);
  EXPECT_TRUE(certify_undetectable(sys, none, ext).undetectable);
}

TEST(ExtensionVerdict, FullWeaklyUnobservableSpace) {
  Rng rng(1);
  const LtiSystem sys(random_matrix(rng, 2, 2, 0.5), random_matrix(rng, 2, 1),
                      Mat::Zero(1, 2), Mat::Zero(1, 1));
  ASSERT_TRUE(weakly_unobservable(sys).is_full());
  // (A, C) is unobservable here; the verdict itself only needs V.
  const AttackSequence e = random_attack(rng, 1, 3);
  UndetectabilityCertificate cert;
  cert.undetectable = true;
  cert.induced_state = Vec::Zero(2);
  EXPECT_TRUE(extension_verdict(sys, SideInformation::none(2), e, cert).extensible_forever);
}

TEST(ExtensionVerdict, NegativeVerdictHasNoExtension) {
  Rng rng(2);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 10; ++trial) {
    const LtiSystem sys = random_system(rng);
    const Index t = sys.n() + uniform_index(rng, 0, sys.n());
    const AttackSequence e = random_undetectable(rng, sys, Mat(0, sys.n()), t);
    if (e.is_zero()) continue;
    const SideInformation none = SideInformation::none(sys.n());
    const auto cert = certify_undetectable(sys, none, e);
    ASSERT_TRUE(cert.undetectable);
    const ExtensionVerdict v = extension_verdict(sys, none, e, cert);
    if (v.extensible_forever) continue;
    EXPECT_FALSE(oracle::extension_exists(sys, Mat(0, sys.n()), e, t + sys.n()).feasible);
    EXPECT_EQ(code_of([&] { extend_attack(sys, none, e, cert, t + sys.n()); }),
              ErrorCode::kNotExtensible);
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

TEST(ExtensionVerdict, Errors) {
  const LtiSystem sys = aircraft::system();
  const SideInformation side(aircraft::omega());
  const AttackSequence e = aircraft::resolved_attack(30);
  const auto cert = certify_undetectable(sys, side, e);
  EXPECT_EQ(code_of([&] { extension_verdict(sys, side, e, cert); }), ErrorCode::kNotUndetectable);
  const AttackSequence zero = AttackSequence::zero(4, 5);
  const auto zcert = certify_undetectable(sys, side, zero);
  EXPECT_EQ(code_of([&] { extension_verdict(sys, side, zero, zcert); }), ErrorCode::kInvalidArgument);
}

TEST(Classify, ZeroAttack) {
  const AttackClass cls = classify(aircraft::system(), SideInformation(aircraft::omega()),
                                   AttackSequence::zero(4, 8));
  EXPECT_TRUE(cls.undetectable_under_omega);
  EXPECT_TRUE(cls.undetectable_under_zero_omega);
  EXPECT_TRUE(cls.zero_state_inducing);
}

TEST(Classify, AircraftAttack) {
  const AttackClass cls = classify(aircraft::system(), SideInformation(aircraft::omega()),
                                   aircraft::resolved_attack(30));
  EXPECT_TRUE(cls.undetectable_under_zero_omega);
  EXPECT_FALSE(cls.undetectable_under_omega);
  EXPECT_FALSE(cls.zero_state_inducing);
  EXPECT_TRUE(cls.zero_dynamics_form);
  EXPECT_EQ(cls.shape.shape, FrameShape::kGeometric);
  EXPECT_NEAR(cls.shape.lambda, aircraft::resolved_mode().lambda, 1e-12);
}

TEST(Classify, ConjugatePairShape) {
  Mat frames(2, 12);
  const double r = 0.9, w = 0.7;
  for (Index k = 0; k < 12; ++k) {
    frames(0, k) = std::pow(r, double(k)) * std::cos(w * double(k));
    frames(1, k) = std::pow(r, double(k)) * std::sin(w * double(k) + 0.3);
  }
  const FrameShapeFit fit = fit_frame_shape(AttackSequence(frames));
  EXPECT_EQ(fit.shape, FrameShape::kConjugatePair);
  EXPECT_NEAR(fit.c1, 2 * r * std::cos(w), 1e-10);
  EXPECT_NEAR(fit.c0, -r * r, 1e-10);
  EXPECT_EQ(to_string(fit.shape), "zero-dynamics-pair");
}

TEST(Classify, RandomDenseAttacksAreNotStealthy) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const LtiSystem sys = random_system(rng);
    const Index t = sys.n() + 2;
    const AttackSequence e = random_attack(rng, sys.s(), t);
    const SideInformation side = random_side_information(rng, sys.n());
    const AttackClass cls = classify(sys, side, e);
    EXPECT_EQ(cls.undetectable_under_omega, oracle::undetectable(sys, side.omega(), e).feasible);
    EXPECT_EQ(cls.undetectable_under_zero_omega,
              oracle::undetectable(sys, Mat(0, sys.n()), e).feasible);
    EXPECT_FALSE(cls.zero_state_inducing);
    EXPECT_FALSE(cls.zero_dynamics_form);
  }
}

// Properties.

TEST(AnalysisProperties, SideInformationFastPaths) {
  Rng rng(401);
  for (int trial = 0; trial < 100; ++trial) {
    const LtiSystem sys = trial % 3 == 0 ? planted_zero_state_system(rng) : random_system(rng);
    const Index t = sys.n() - 1 + uniform_index(rng, 0, sys.n());
    AttackSequence e = random_attack(rng, sys.s(), t);
    if (trial % 2 == 0) e = random_undetectable(rng, sys, Mat::Identity(sys.n(), sys.n()), t);

    const SideInformation full(random_matrix(rng, sys.n(), sys.n()));
    ASSERT_EQ(certify_undetectable(sys, full, e).undetectable, is_zero_state_inducing(sys, e))
        << "trial " << trial;

    const SideInformation none = SideInformation::none(sys.n());
    const SubspaceBasis v = weakly_unobservable(sys);
    const Vec me = io_matrix(sys, t) * e.stacked();
    const LeastSquares ls = solve_min_norm(obs_matrix(sys, t) * v.basis(), -me);
    const bool v_only = ls.residual_norm <= Tol{}.residual_rel * std::max(1.0, me.norm());
    ASSERT_EQ(certify_undetectable(sys, none, e).undetectable, v_only) << "trial " << trial;
  }
}

TEST(AnalysisProperties, MonotoneInInformation) {
  Rng rng(402);
  for (int trial = 0; trial < 100; ++trial) {
    const LtiSystem sys = random_system(rng);
    const Index t = sys.n() + 1;
    const AttackSequence e = trial % 2 ? random_attack(rng, sys.s(), t)
                                       : random_undetectable(rng, sys, Mat(0, sys.n()), t);
    const SideInformation side = random_side_information(rng, sys.n());
    const bool blind = certify_undetectable(sys, SideInformation::none(sys.n()), e).undetectable;
    const bool informed = certify_undetectable(sys, side, e).undetectable;
    if (!blind) {
      ASSERT_FALSE(informed) << "trial " << trial;
    }
  }
}

TEST(AnalysisProperties, InducedStateIsUnique) {
  Rng rng(403);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const LtiSystem sys = random_system(rng);
    const Index t = sys.n() + 1;
    const AttackSequence e = random_undetectable(rng, sys, Mat(0, sys.n()), t);
    const auto cert = certify_undetectable(sys, SideInformation::none(sys.n()), e);
    ASSERT_TRUE(cert.undetectable);
    // Whatever the true x(0), the output is explained by x'(0) = x(0) - theta.
    for (int rep = 0; rep < 2; ++rep) {
      const Vec x0 = random_vector(rng, sys.n());
      const Trajectory tr = simulate(sys, x0, e, SideInformation::none(sys.n()));
      const oracle::Fit fit = oracle::least_squares(obs_matrix(sys, t), tr.stacked());
      ASSERT_TRUE(fit.feasible);
      ASSERT_LE((x0 - fit.solution - *cert.induced_state).norm(),
                1e-8 * std::max(1.0, x0.norm()));
    }
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}
