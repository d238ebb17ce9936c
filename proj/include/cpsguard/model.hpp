#pragma once

#include <optional>
#include <string>

#include "cpsguard/numlin.hpp"

namespace cpsguard {

/// Discrete-time plant plus attacker:
///   x(k+1) = A x(k) + B a(k)
///   y(k)   = C x(k) + D a(k)
/// A and C belong to the plant, B and D describe the attacker's reach.
/// Known inputs are expected to be subtracted by the caller beforehand.
class LtiSystem {
 public:
  /// Throws DimensionMismatch or NonFinite.
  LtiSystem(Mat a, Mat b, Mat c, Mat d);

  const Mat& a() const { return a_; }
  const Mat& b() const { return b_; }
  const Mat& c() const { return c_; }
  const Mat& d() const { return d_; }

  Index n() const { return a_.rows(); }
  Index p() const { return c_.rows(); }
  Index s() const { return b_.cols(); }

 private:
  Mat a_, b_, c_, d_;
};

struct ValidationReport {
  bool observable = false;
  bool bd_injective = false;

  bool ok() const { return observable && bd_injective; }
  /// Names the first violated assumption, or "" when ok().
  std::string violation() const;
};

ValidationReport validate(const LtiSystem& sys, const Tol& tol = {});

/// Throws AssumptionViolated naming the failed assumption.
void require_valid(const LtiSystem& sys, const Tol& tol = {});

/// [C; CA; ...; CA^t]
Mat obs_matrix(const Mat& a, const Mat& c, Index t);
Mat obs_matrix(const LtiSystem& sys, Index t);

/// Block lower-triangular input-output matrix: D on the diagonal, C A^{j-1} B
/// on the j-th subdiagonal.
Mat io_matrix(const LtiSystem& sys, Index t);

/// [A^t B, A^{t-1} B, ..., B]; applied to a stacked attack it gives the state
/// change the attack produces.
Mat ctrl_matrix(const LtiSystem& sys, Index t);

/// Side information y_omega = Omega x(0) available to the detector, with the
/// null space of Omega cached. A matrix with zero rows (or an all-zero
/// matrix) means no side information.
class SideInformation {
 public:
  SideInformation(Mat omega, const Tol& tol = {});

  /// A single zero row: the detector knows nothing about x(0).
  static SideInformation none(Index n);

  const Mat& omega() const { return omega_; }
  const SubspaceBasis& null_basis() const { return null_basis_; }
  Index q() const { return omega_.rows(); }
  Index n() const { return omega_.cols(); }

  Vec measure(const Vec& x0) const;

 private:
  Mat omega_;
  SubspaceBasis null_basis_;
};

/// Stacked attack E(T) = [a(0); ...; a(T)], stored as an s x (T+1) matrix
/// whose column k is a(k). Column-major storage makes the stacked vector a
/// plain reshape.
class AttackSequence {
 public:
  explicit AttackSequence(Mat frames);

  static AttackSequence zero(Index channels, Index horizon);
  static AttackSequence from_stacked(const Vec& stacked, Index channels);

  Index channels() const { return frames_.rows(); }
  /// T: the last time index carried by the sequence.
  Index horizon() const { return frames_.cols() - 1; }
  const Mat& frames() const { return frames_; }
  Vec frame(Index k) const { return frames_.col(k); }
  Vec stacked() const;

  bool is_zero() const { return frames_.isZero(0.0); }
  /// Index of the first nonzero frame, if any.
  std::optional<Index> first_attack_time() const;

 private:
  Mat frames_;
};

struct Trajectory {
  /// p x (T+1); column k is y(k).
  Mat outputs;
  Vec initial_state;
  Vec side_value;

  Index horizon() const { return outputs.cols() - 1; }
  /// Y(T) = [y(0); ...; y(T)]
  Vec stacked() const;
};

/// Runs the recursion from x0 under `attack` and records y_omega = Omega x0.
Trajectory simulate(const LtiSystem& sys, const Vec& x0,
                    const AttackSequence& attack, const SideInformation& omega);

}  // namespace cpsguard
