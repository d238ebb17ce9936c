#include "cpsguard/detector.hpp"

#include <algorithm>

#include "cpsguard/errors.hpp"

namespace cpsguard {

std::string_view to_string(Decision d) {
  return d == Decision::kAttack ? "Attack" : "NoAttack";
}

DetectorConfig DetectorConfig::with_default_window(
    const SideInformation& omega, const Tol& tol) {
  return DetectorConfig{omega.n() + 1, tol, omega};
}

Decision DetectionTrace::verdict() const {
  return first_alarm() ? Decision::kAttack : Decision::kNoAttack;
}

std::optional<Index> DetectionTrace::first_alarm() const {
  for (const EpochRecord& e : epochs) {
    if (e.decision == Decision::kAttack) return e.k;
  }
  return std::nullopt;
}

DetectorSession::DetectorSession(const Mat& a, const Mat& c,
                                 DetectorConfig config, Vec y_omega)
    : config_(std::move(config)), y_omega_(std::move(y_omega)) {
  config_.tol.check();
  const Index n = a.rows();
  if (a.cols() != n || c.cols() != n || config_.omega.n() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "A, C and Omega disagree on the state dimension");
  }
  if (y_omega_.size() != config_.omega.q()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "y_omega length must equal the number of rows of Omega");
  }
  require_finite(y_omega_, "y_omega");
  const Index l = config_.window_len;
  if (l < n + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "the window length must be at least n+1");
  }
  if (numerical_rank(obs_matrix(a, c, n - 1), config_.tol) != n) {
    throw Error(ErrorCode::kAssumptionViolated, "observability");
  }
  p_ = c.rows();

  const Mat obs = obs_matrix(a, c, l - 1);
  Mat first(config_.omega.q() + obs.rows(), n);
  first << config_.omega.omega(), obs;
  first_complement_ = Mat::Identity(first.rows(), first.rows()) -
                      projector(first, config_.tol);
  steady_complement_ =
      Mat::Identity(obs.rows(), obs.rows()) - projector(obs, config_.tol);
  ring_.assign(static_cast<std::size_t>(l), Vec::Zero(p_));
}

Vec DetectorSession::window() const {
  const Index l = config_.window_len;
  Vec out(p_ * l);
  // Oldest frame sits at head_ once the ring is full.
  for (Index j = 0; j < l; ++j) {
    const std::size_t slot = (head_ + static_cast<std::size_t>(j)) % ring_.size();
    out.segment(j * p_, p_) = ring_[slot];
  }
  return out;
}

std::optional<EpochRecord> DetectorSession::push(const Vec& y) {
  if (y.size() != p_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "output sample length must equal p");
  }
  require_finite(y, "output sample");
  ring_[head_] = y;
  head_ = (head_ + 1) % ring_.size();
  const Index k = next_k_++;
  const Index l = config_.window_len;
  if (k < l - 1) return std::nullopt;

  Vec yhat;
  const Mat* complement = nullptr;
  if (k == l - 1) {
    yhat.resize(y_omega_.size() + p_ * l);
    yhat << y_omega_, window();
    complement = &first_complement_;
  } else {
    yhat = window();
    complement = &steady_complement_;
  }

  EpochRecord rec;
  rec.k = k;
  rec.window_norm = yhat.norm();
  rec.residual = (*complement * yhat).norm();
  rec.threshold = config_.tol.residual_rel * std::max(1.0, rec.window_norm);
  rec.decision = rec.residual <= rec.threshold ? Decision::kNoAttack
                                               : Decision::kAttack;
  trace_.epochs.push_back(rec);
  return rec;
}

DetectionTrace run_detector(const Mat& a, const Mat& c,
                            const DetectorConfig& config, const Vec& y_omega,
                            const Mat& outputs) {
  if (outputs.cols() < config.window_len) {
    throw Error(ErrorCode::kInvalidArgument,
                "the output stream is shorter than the window");
  }
  DetectorSession session(a, c, config, y_omega);
  for (Index k = 0; k < outputs.cols(); ++k) session.push(outputs.col(k));
  return session.trace();
}

BatchResult batch_decide(const Mat& a, const Mat& c,
                         const DetectorConfig& config, const Vec& y_omega,
                         const Trajectory& trajectory) {
  BatchResult out;
  out.trace = run_detector(a, c, config, y_omega, trajectory.outputs);
  out.verdict = out.trace.verdict();
  return out;
}

}  // namespace cpsguard
