#include "cpsguard/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cpsguard/errors.hpp"

namespace cpsguard {
namespace {

double rank_threshold(const Vec& singular_values, const Tol& tol,
                      double reference) {
  const double sigma_max =
      singular_values.size() > 0 ? singular_values(0) : 0.0;
  return tol.rank_rel * std::max(sigma_max, reference);
}

Index count_above(const Vec& singular_values, double threshold) {
  Index r = 0;
  for (Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > threshold) ++r;
  }
  return r;
}

}  // namespace

void Tol::check() const {
  if (!(rank_rel > 0.0 && rank_rel < 1.0) ||
      !(residual_rel > 0.0 && residual_rel < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "tolerances must lie strictly between 0 and 1");
  }
}

bool Tol::accepts(double residual, double scale) const {
  return residual <= residual_rel * std::max(1.0, scale);
}

void require_finite(const Mat& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNonFinite,
                std::string(what) + " contains NaN or Inf");
  }
}

void require_finite(const Vec& v, std::string_view what) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kNonFinite,
                std::string(what) + " contains NaN or Inf");
  }
}

SubspaceBasis SubspaceBasis::from_orthonormal(Mat basis) {
  require_finite(basis, "subspace basis");
  if (basis.cols() > basis.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "a basis cannot have more columns than its ambient dimension");
  }
  if (basis.cols() > 0) {
    const Mat gram = basis.transpose() * basis;
    const double err =
        (gram - Mat::Identity(basis.cols(), basis.cols())).norm();
    if (err > 1e-10) {
      throw Error(ErrorCode::kInvalidArgument,
                  "basis columns are not orthonormal");
    }
  }
  return SubspaceBasis(std::move(basis));
}

SubspaceBasis SubspaceBasis::zero(Index ambient_dim) {
  return SubspaceBasis(Mat(ambient_dim, 0));
}

SubspaceBasis SubspaceBasis::full(Index ambient_dim) {
  return SubspaceBasis(Mat::Identity(ambient_dim, ambient_dim));
}

Mat SubspaceBasis::projector() const {
  return basis_ * basis_.transpose();
}

Vec SubspaceBasis::project(const Vec& v) const {
  if (v.size() != ambient_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector length does not match the ambient dimension");
  }
  if (dim() == 0) return Vec::Zero(v.size());
  return basis_ * (basis_.transpose() * v);
}

double SubspaceBasis::distance(const Vec& v) const {
  return (v - project(v)).norm();
}

bool SubspaceBasis::contains(const Vec& v, const Tol& tol) const {
  return tol.accepts(distance(v), v.norm());
}

double SubspaceBasis::span_distance(const SubspaceBasis& other) const {
  if (other.ambient_dim() != ambient_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "subspaces live in different ambient spaces");
  }
  const Mat here = basis_ - other.basis_ * (other.basis_.transpose() * basis_);
  const Mat there =
      other.basis_ - basis_ * (basis_.transpose() * other.basis_);
  return std::max(here.norm(), there.norm());
}

Index numerical_rank(const Mat& m, const Tol& tol) {
  require_finite(m, "matrix");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& sv = svd.singularValues();
  return count_above(sv, rank_threshold(sv, tol, 0.0));
}

SubspaceBasis null_space(const Mat& m, const Tol& tol, double reference) {
  require_finite(m, "matrix");
  const Index cols = m.cols();
  if (cols == 0) return SubspaceBasis::zero(0);
  if (m.rows() == 0) return SubspaceBasis::full(cols);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const Index rank = count_above(sv, rank_threshold(sv, tol, reference));
  return SubspaceBasis::from_orthonormal(svd.matrixV().rightCols(cols - rank));
}

SubspaceBasis range_space(const Mat& m, const Tol& tol, double reference) {
  require_finite(m, "matrix");
  if (m.cols() == 0 || m.rows() == 0) return SubspaceBasis::zero(m.rows());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  const Vec& sv = svd.singularValues();
  const Index rank = count_above(sv, rank_threshold(sv, tol, reference));
  return SubspaceBasis::from_orthonormal(svd.matrixU().leftCols(rank));
}

SubspaceBasis orthogonal_complement(const SubspaceBasis& s) {
  const Index n = s.ambient_dim();
  if (s.is_zero()) return SubspaceBasis::full(n);
  if (s.is_full()) return SubspaceBasis::zero(n);
  // The trailing left singular vectors of the basis span its complement.
  Eigen::JacobiSVD<Mat> svd(s.basis(), Eigen::ComputeFullU);
  return SubspaceBasis::from_orthonormal(svd.matrixU().rightCols(n - s.dim()));
}

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b,
                        const Tol& tol) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cannot intersect subspaces of different ambient spaces");
  }
  const Index n = a.ambient_dim();
  if (a.is_zero() || b.is_zero()) return SubspaceBasis::zero(n);
  if (a.is_full()) return b;
  if (b.is_full()) return a;
  Mat stacked(2 * n, n);
  stacked.topRows(n) = Mat::Identity(n, n) - a.projector();
  stacked.bottomRows(n) = Mat::Identity(n, n) - b.projector();
  return null_space(stacked, tol, 1.0);
}

Mat projector(const Mat& k, const Tol& tol) {
  require_finite(k, "matrix");
  if (k.cols() == 0) return Mat::Zero(k.rows(), k.rows());
  if (numerical_rank(k, tol) != k.cols()) {
    throw Error(ErrorCode::kRankDeficient,
                "projector requires a matrix with full column rank");
  }
  // Q Q^T equals K (K^T K)^{-1} K^T without forming the normal equations.
  Eigen::HouseholderQR<Mat> qr(k);
  const Mat q = qr.householderQ() * Mat::Identity(k.rows(), k.cols());
  return q * q.transpose();
}

LeastSquares solve_min_norm(const Mat& m, const Vec& rhs, const Tol& tol) {
  require_finite(m, "matrix");
  require_finite(rhs, "right-hand side");
  if (m.rows() != rhs.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "right-hand side length does not match the row count");
  }
  LeastSquares out;
  out.solution = Vec::Zero(m.cols());
  if (m.size() == 0) {
    out.residual_norm = rhs.norm();
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const Index rank = count_above(sv, rank_threshold(sv, tol, 0.0));
  if (rank > 0) {
    const Vec coeffs = (svd.matrixU().leftCols(rank).transpose() * rhs)
                           .cwiseQuotient(sv.head(rank));
    out.solution = svd.matrixV().leftCols(rank) * coeffs;
  }
  out.residual_norm = (m * out.solution - rhs).norm();
  return out;
}

bool is_feasible(const Mat& m, const Vec& rhs, const Tol& tol) {
  return tol.accepts(solve_min_norm(m, rhs, tol).residual_norm, rhs.norm());
}

}  // namespace cpsguard
