#include "cpsguard/analysis.hpp"

#include <algorithm>

#include "cpsguard/errors.hpp"
#include "cpsguard/subspaces.hpp"

namespace cpsguard {
namespace {

void require_compatible(const LtiSystem& sys, const SideInformation& omega,
                        const AttackSequence& attack) {
  if (omega.n() != sys.n() || attack.channels() != sys.s()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "side information or attack does not match the system");
  }
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

}  // namespace

UndetectabilityCertificate certify_undetectable(const LtiSystem& sys,
                                                const SideInformation& omega,
                                                const AttackSequence& attack,
                                                const Tol& tol) {
  require_compatible(sys, omega, attack);
  const Index t = attack.horizon();
  if (t < sys.n() - 1) {
    throw Error(ErrorCode::kHorizonTooShort,
                "the attack horizon must be at least n-1");
  }

  const SubspaceBasis v = weakly_unobservable(sys, tol);
  const SubspaceBasis feasible = intersect(omega.null_basis(), v, tol);
  const Vec output_change = io_matrix(sys, t) * attack.stacked();

  UndetectabilityCertificate cert;
  cert.feasible_dim = feasible.dim();
  cert.threshold = tol.residual_rel * std::max(1.0, output_change.norm());

  // theta = basis * xi keeps theta inside N(Omega) ∩ V by construction.
  Vec theta = Vec::Zero(sys.n());
  if (feasible.dim() > 0) {
    const LeastSquares ls =
        solve_min_norm(obs_matrix(sys, t) * feasible.basis(), -output_change,
                       tol);
    theta = feasible.basis() * ls.solution;
    cert.residual = ls.residual_norm;
  } else {
    cert.residual = output_change.norm();
  }
  cert.undetectable = cert.residual <= cert.threshold;
  cert.theta_in_null_omega = omega.null_basis().contains(theta, tol);
  cert.theta_in_v = v.contains(theta, tol);
  if (cert.undetectable) cert.induced_state = theta;
  return cert;
}

bool is_zero_state_inducing(const LtiSystem& sys, const AttackSequence& attack,
                            const Tol& tol) {
  if (attack.channels() != sys.s()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "attack does not match the system");
  }
  const Mat m = io_matrix(sys, attack.horizon());
  const Vec e = attack.stacked();
  return tol.accepts((m * e).norm(), e.norm() * spectral_norm(m));
}

ExtensionVerdict extension_verdict(const LtiSystem& sys,
                                   const SideInformation& omega,
                                   const AttackSequence& attack,
                                   const UndetectabilityCertificate& cert,
                                   const Tol& tol) {
  require_compatible(sys, omega, attack);
  if (!cert.undetectable || !cert.induced_state) {
    throw Error(ErrorCode::kNotUndetectable,
                "extension verdicts only apply to undetectable attacks");
  }
  if (attack.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument,
                "extensions are defined for nonzero attacks");
  }
  const Index t = attack.horizon();
  Mat a_power = Mat::Identity(sys.n(), sys.n());
  for (Index k = 0; k <= t; ++k) a_power = a_power * sys.a();

  ExtensionVerdict verdict;
  verdict.test_vector =
      ctrl_matrix(sys, t) * attack.stacked() + a_power * *cert.induced_state;
  const SubspaceBasis v = weakly_unobservable(sys, tol);
  verdict.membership_residual = v.distance(verdict.test_vector);
  verdict.threshold =
      tol.residual_rel * std::max(1.0, verdict.test_vector.norm());
  verdict.extensible_forever =
      verdict.membership_residual <= verdict.threshold;
  return verdict;
}

std::string_view to_string(FrameShape shape) {
  switch (shape) {
    case FrameShape::kNone: return "none";
    case FrameShape::kGeometric: return "zero-dynamics";
    case FrameShape::kConjugatePair: return "zero-dynamics-pair";
  }
  return "none";
}

FrameShapeFit fit_frame_shape(const AttackSequence& attack, const Tol& tol) {
  FrameShapeFit fit;
  const Mat& f = attack.frames();
  const Index t = attack.horizon();
  // a(0) = g must be nonzero for either shape.
  if (f.col(0).isZero(0.0)) return fit;
  const double scale = f.norm();
  if (t == 0) {
    fit.shape = FrameShape::kGeometric;
    return fit;
  }

  const auto head = f.leftCols(t);
  const auto tail = f.rightCols(t);
  const double lambda = head.cwiseProduct(tail).sum() / head.squaredNorm();
  if (tol.accepts((tail - lambda * head).norm(), scale)) {
    fit.shape = FrameShape::kGeometric;
    fit.lambda = lambda;
    return fit;
  }
  if (t < 2) return fit;

  // a(k+2) = c1 a(k+1) + c0 a(k), stacked over all k and channels.
  const Index rows = f.rows() * (t - 1);
  Mat lhs(rows, 2);
  Vec rhs(rows);
  for (Index k = 0; k + 2 <= t; ++k) {
    lhs.block(k * f.rows(), 0, f.rows(), 1) = f.col(k + 1);
    lhs.block(k * f.rows(), 1, f.rows(), 1) = f.col(k);
    rhs.segment(k * f.rows(), f.rows()) = f.col(k + 2);
  }
  const LeastSquares ls = solve_min_norm(lhs, rhs, tol);
  const double c1 = ls.solution(0);
  const double c0 = ls.solution(1);
  if (tol.accepts(ls.residual_norm, scale) && c1 * c1 + 4.0 * c0 < 0.0) {
    fit.shape = FrameShape::kConjugatePair;
    fit.c1 = c1;
    fit.c0 = c0;
  }
  return fit;
}

AttackClass classify(const LtiSystem& sys, const SideInformation& omega,
                     const AttackSequence& attack, const Tol& tol) {
  AttackClass out;
  out.undetectable_under_omega =
      certify_undetectable(sys, omega, attack, tol).undetectable;
  out.undetectable_under_zero_omega =
      certify_undetectable(sys, SideInformation::none(sys.n()), attack, tol)
          .undetectable;
  out.zero_state_inducing = is_zero_state_inducing(sys, attack, tol);
  out.shape = fit_frame_shape(attack, tol);
  out.zero_dynamics_form = out.shape.shape == FrameShape::kGeometric;
  return out;
}

}  // namespace cpsguard
