#pragma once

// Dense linear-algebra kernel. Every exact-arithmetic statement used by the
// rest of the library (rank, membership, "there exists a solution") is turned
// into a thresholded test here, with the thresholds carried by `Tol`.

#include <string_view>

#include <Eigen/Dense>

namespace cpsguard {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

struct Tol {
  /// Singular values at or below rank_rel * sigma_max count as zero.
  double rank_rel = 1e-10;
  /// A linear system is feasible when its least-squares residual is at most
  /// residual_rel * max(1, |rhs|).
  double residual_rel = 1e-8;

  /// Throws InvalidArgument unless both values lie in (0, 1).
  void check() const;

  /// residual <= residual_rel * max(1, scale)
  bool accepts(double residual, double scale) const;
};

/// Throws NonFinite if any entry is NaN or Inf.
void require_finite(const Mat& m, std::string_view what);
void require_finite(const Vec& v, std::string_view what);

/// A subspace of R^ambient stored as a matrix with orthonormal columns.
/// A basis with zero columns is the zero subspace.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;

  /// `basis` must already have orthonormal columns (checked to 1e-10).
  static SubspaceBasis from_orthonormal(Mat basis);
  static SubspaceBasis zero(Index ambient_dim);
  static SubspaceBasis full(Index ambient_dim);

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_dim(); }
  const Mat& basis() const { return basis_; }

  Mat projector() const;
  Vec project(const Vec& v) const;
  /// |v - P v|
  double distance(const Vec& v) const;
  /// Membership at tol.residual_rel relative to max(1, |v|).
  bool contains(const Vec& v, const Tol& tol = {}) const;
  /// Largest distance of one subspace's basis vectors from the other, both
  /// ways; zero iff the spans agree.
  double span_distance(const SubspaceBasis& other) const;

 private:
  explicit SubspaceBasis(Mat basis) : basis_(std::move(basis)) {}

  Mat basis_ = Mat(0, 0);
};

/// Count of singular values above tol.rank_rel * sigma_max (0 for a zero
/// matrix).
Index numerical_rank(const Mat& m, const Tol& tol = {});

/// Orthonormal basis of {x : m x = 0}. `reference` floors the scale the rank
/// threshold is taken relative to; pass 1 when the rows of `m` are known to
/// be O(1) so round-off in an all-but-zero matrix is not read as rank.
SubspaceBasis null_space(const Mat& m, const Tol& tol = {},
                         double reference = 0.0);

/// Orthonormal basis of the column span of `m`; `reference` as above.
SubspaceBasis range_space(const Mat& m, const Tol& tol = {},
                          double reference = 0.0);

SubspaceBasis orthogonal_complement(const SubspaceBasis& s);

/// a ∩ b, computed as the null space of [I - P_a; I - P_b].
SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b,
                        const Tol& tol = {});

/// Orthogonal projector onto range(k). Throws RankDeficient unless `k` has
/// full column rank at tol.rank_rel.
Mat projector(const Mat& k, const Tol& tol = {});

struct LeastSquares {
  Vec solution;
  double residual_norm = 0.0;
};

/// Minimum-norm least-squares solution via a truncated SVD.
LeastSquares solve_min_norm(const Mat& m, const Vec& rhs, const Tol& tol = {});

/// solve_min_norm plus the feasibility decision on its residual.
bool is_feasible(const Mat& m, const Vec& rhs, const Tol& tol = {});

}  // namespace cpsguard
