#include "cpsguard/model.hpp"

#include <vector>

#include "cpsguard/errors.hpp"

namespace cpsguard {
namespace {

void require_dims(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, message);
}

void require_horizon(Index t) {
  if (t < 0) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be non-negative");
  }
}

}  // namespace

LtiSystem::LtiSystem(Mat a, Mat b, Mat c, Mat d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  require_dims(a_.rows() == a_.cols() && a_.rows() > 0,
               "A must be square and nonempty");
  require_dims(b_.rows() == a_.rows(), "B must have n rows");
  require_dims(b_.cols() > 0, "the attack must have at least one channel");
  require_dims(c_.cols() == a_.rows() && c_.rows() > 0,
               "C must be p x n with p > 0");
  require_dims(d_.rows() == c_.rows() && d_.cols() == b_.cols(),
               "D must be p x s");
  require_finite(a_, "A");
  require_finite(b_, "B");
  require_finite(c_, "C");
  require_finite(d_, "D");
}

std::string ValidationReport::violation() const {
  if (!observable) return "observability";
  if (!bd_injective) return "injectivity of [B; D]";
  return "";
}

ValidationReport validate(const LtiSystem& sys, const Tol& tol) {
  ValidationReport report;
  report.observable = numerical_rank(obs_matrix(sys, sys.n() - 1), tol) ==
                      sys.n();
  Mat bd(sys.n() + sys.p(), sys.s());
  bd << sys.b(), sys.d();
  report.bd_injective = numerical_rank(bd, tol) == sys.s();
  return report;
}

void require_valid(const LtiSystem& sys, const Tol& tol) {
  const ValidationReport report = validate(sys, tol);
  if (!report.ok()) {
    throw Error(ErrorCode::kAssumptionViolated, report.violation());
  }
}

Mat obs_matrix(const Mat& a, const Mat& c, Index t) {
  require_horizon(t);
  require_dims(a.rows() == a.cols() && c.cols() == a.rows(),
               "A must be square and C must have n columns");
  const Index p = c.rows();
  Mat out(p * (t + 1), a.rows());
  Mat block = c;
  for (Index k = 0; k <= t; ++k) {
    out.middleRows(k * p, p) = block;
    block = block * a;
  }
  return out;
}

Mat obs_matrix(const LtiSystem& sys, Index t) {
  return obs_matrix(sys.a(), sys.c(), t);
}

Mat io_matrix(const LtiSystem& sys, Index t) {
  require_horizon(t);
  const Index p = sys.p();
  const Index s = sys.s();
  // markov[j] = C A^j B
  std::vector<Mat> markov;
  markov.reserve(static_cast<std::size_t>(t));
  Mat ab = sys.b();
  for (Index j = 0; j < t; ++j) {
    markov.push_back(sys.c() * ab);
    ab = sys.a() * ab;
  }
  Mat out = Mat::Zero(p * (t + 1), s * (t + 1));
  for (Index row = 0; row <= t; ++row) {
    out.block(row * p, row * s, p, s) = sys.d();
    for (Index col = 0; col < row; ++col) {
      out.block(row * p, col * s, p, s) =
          markov[static_cast<std::size_t>(row - col - 1)];
    }
  }
  return out;
}

Mat ctrl_matrix(const LtiSystem& sys, Index t) {
  require_horizon(t);
  const Index s = sys.s();
  Mat out(sys.n(), s * (t + 1));
  Mat block = sys.b();
  for (Index j = t; j >= 0; --j) {
    out.middleCols(j * s, s) = block;
    block = sys.a() * block;
  }
  return out;
}

SideInformation::SideInformation(Mat omega, const Tol& tol)
    : omega_(std::move(omega)) {
  require_finite(omega_, "Omega");
  if (omega_.cols() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "Omega must have n columns");
  }
  null_basis_ = null_space(omega_, tol);
}

SideInformation SideInformation::none(Index n) {
  return SideInformation(Mat(0, n));
}

Vec SideInformation::measure(const Vec& x0) const {
  require_dims(x0.size() == n(), "x0 length must equal n");
  return omega_ * x0;
}

AttackSequence::AttackSequence(Mat frames) : frames_(std::move(frames)) {
  require_dims(frames_.rows() > 0 && frames_.cols() > 0,
               "an attack needs at least one channel and one frame");
  require_finite(frames_, "attack frames");
}

AttackSequence AttackSequence::zero(Index channels, Index horizon) {
  require_horizon(horizon);
  return AttackSequence(Mat::Zero(channels, horizon + 1));
}

AttackSequence AttackSequence::from_stacked(const Vec& stacked,
                                            Index channels) {
  require_dims(channels > 0 && stacked.size() % channels == 0 &&
                   stacked.size() > 0,
               "stacked attack length must be a positive multiple of s");
  return AttackSequence(
      Eigen::Map<const Mat>(stacked.data(), channels, stacked.size() / channels));
}

Vec AttackSequence::stacked() const {
  return Eigen::Map<const Vec>(frames_.data(), frames_.size());
}

std::optional<Index> AttackSequence::first_attack_time() const {
  for (Index k = 0; k < frames_.cols(); ++k) {
    if (!frames_.col(k).isZero(0.0)) return k;
  }
  return std::nullopt;
}

Vec Trajectory::stacked() const {
  return Eigen::Map<const Vec>(outputs.data(), outputs.size());
}

Trajectory simulate(const LtiSystem& sys, const Vec& x0,
                    const AttackSequence& attack,
                    const SideInformation& omega) {
  require_dims(x0.size() == sys.n(), "x0 length must equal n");
  require_dims(attack.channels() == sys.s(),
               "attack channel count must equal s");
  require_dims(omega.n() == sys.n(), "Omega must have n columns");
  require_finite(x0, "x0");

  Trajectory traj;
  traj.initial_state = x0;
  traj.side_value = omega.measure(x0);
  traj.outputs.resize(sys.p(), attack.horizon() + 1);
  Vec x = x0;
  for (Index k = 0; k <= attack.horizon(); ++k) {
    const auto a = attack.frames().col(k);
    traj.outputs.col(k) = sys.c() * x + sys.d() * a;
    x = sys.a() * x + sys.b() * a;
  }
  return traj;
}

}  // namespace cpsguard
