#pragma once

#include <complex>
#include <vector>

#include "cpsguard/analysis.hpp"
#include "cpsguard/model.hpp"

namespace cpsguard {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// A null vector [theta; g] of the system pencil [lambda I - A, -B; C, D].
/// Driving the system with a(k) = lambda^k g from x(0) = theta keeps the
/// output at zero, so the attack is indistinguishable from starting at
/// -theta without attack.
struct ZeroDynamicsMode {
  Complex lambda;
  CVec g;
  CVec theta;
  /// |P(lambda) [theta; g]| / (|theta| + |g|)
  double pencil_residual = 0.0;
  /// Attack channels the mode uses (indices into the columns of B and D).
  std::vector<Index> channels;

  bool is_real() const { return lambda.imag() == 0.0; }
};

/// (n+p) x (n+s) pencil matrix evaluated at lambda.
CMat pencil(const LtiSystem& sys, Complex lambda);

/// |P(lambda) [theta; g]| / (|theta| + |g|)
double pencil_residual(const LtiSystem& sys, Complex lambda,
                       const CVec& theta, const CVec& g);

struct ModeSearchOptions {
  std::vector<Complex> lambda_hints;
  /// Keep modes with |lambda| > 1 (they grow without bound).
  bool allow_unstable = false;
  /// Acceptance bound on the relative pencil residual.
  double max_residual = 1e-8;
};

/// Candidate lambdas are verified against the full pencil. Candidates:
///   - finite generalized eigenvalues of the pencil when p == s;
///   - for p > s, the zeros of an output-squared-down pencil (a superset);
///   - for s > p, the hints, the eigenvalues of A, and the zeros of every
///     square subsystem built from p of the s channels.
/// Results are sorted by (real, imag); only Im(lambda) >= 0 is reported.
/// Throws NoModes when nothing verifies.
std::vector<ZeroDynamicsMode> find_zero_dynamics_modes(
    const LtiSystem& sys, const Tol& tol = {},
    const ModeSearchOptions& options = {});

/// Null vector of the pencil at a given lambda (restricted to `channels`
/// when nonempty), normalized so |[theta; g]| = 1 with the largest entry of
/// theta real and positive. Throws NoModes when no null vector with g != 0
/// exists at that lambda.
ZeroDynamicsMode mode_at(const LtiSystem& sys, Complex lambda,
                         const std::vector<Index>& channels = {},
                         double max_residual = 1e-8);

/// a(k) = scale * Re(lambda^k g), k = 0..t.
AttackSequence zero_dynamics_attack(const ZeroDynamicsMode& mode, Index t,
                                    double scale);

/// scale * Re(theta): the state the attack above induces.
Vec zero_dynamics_induced_state(const ZeroDynamicsMode& mode, double scale);

/// Attack starting at time 0 with a(0) != 0 and M_t E = 0. Throws
/// NotSynthesizable when W_1 ∩ V = {0}.
AttackSequence zero_state_synthesize(const LtiSystem& sys, Index t,
                                     const Tol& tol = {});

/// Minimum-norm attack with M_t E = -O_t theta. Throws ThetaNotFeasible
/// unless theta lies in N(Omega) ∩ V and the solve succeeds.
AttackSequence undetectable_from_theta(const LtiSystem& sys,
                                       const SideInformation& omega,
                                       const Vec& theta, Index t,
                                       const Tol& tol = {});

/// Appends minimum-norm frames up to t_prime so the longer attack stays
/// undetectable. Throws NotExtensible when the verdict is negative.
AttackSequence extend_attack(const LtiSystem& sys,
                             const SideInformation& omega,
                             const AttackSequence& attack,
                             const UndetectabilityCertificate& cert,
                             Index t_prime, const Tol& tol = {});

}  // namespace cpsguard
