#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cpsguard/model.hpp"

namespace cpsguard {

enum class Decision { kNoAttack, kAttack };

std::string_view to_string(Decision d);

struct DetectorConfig {
  /// l >= n+1.
  Index window_len = 0;
  Tol tol;
  SideInformation omega;

  /// The smallest window with guaranteed soundness, l = n+1.
  static DetectorConfig with_default_window(const SideInformation& omega,
                                            const Tol& tol = {});
};

struct EpochRecord {
  Index k = 0;
  Decision decision = Decision::kNoAttack;
  /// |Yhat - Pi_K Yhat|
  double residual = 0.0;
  /// residual_rel * max(1, |Yhat|)
  double threshold = 0.0;
  double window_norm = 0.0;
};

struct DetectionTrace {
  /// Contiguous, starting at k = l-1.
  std::vector<EpochRecord> epochs;

  /// kNoAttack iff every epoch says kNoAttack.
  Decision verdict() const;
  std::optional<Index> first_alarm() const;
};

/// Streaming detector. The first decision (k = l-1) tests [y_omega; window]
/// against the range of [Omega; O_{l-1}]; every later one tests the sliding
/// window against the range of O_{l-1}. Only the last l outputs are kept.
class DetectorSession {
 public:
  /// Throws AssumptionViolated if (A, C) is unobservable, InvalidArgument if
  /// the window is shorter than n+1, RankDeficient if a projector is
  /// ill-posed.
  DetectorSession(const Mat& a, const Mat& c, DetectorConfig config,
                  Vec y_omega);

  /// Feeds y(k) for the next k. Returns the decision once k >= l-1.
  std::optional<EpochRecord> push(const Vec& y);

  const DetectionTrace& trace() const { return trace_; }
  const DetectorConfig& config() const { return config_; }
  /// Index the next pushed output will get.
  Index next_index() const { return next_k_; }

 private:
  Vec window() const;

  DetectorConfig config_;
  Vec y_omega_;
  Index p_ = 0;
  // I - Pi_K for K = [Omega; O_{l-1}] and K = O_{l-1}.
  Mat first_complement_;
  Mat steady_complement_;
  std::vector<Vec> ring_;
  std::size_t head_ = 0;
  Index next_k_ = 0;
  DetectionTrace trace_;
};

/// Feeds the columns of `outputs` (p x N, N >= l) through a fresh session.
DetectionTrace run_detector(const Mat& a, const Mat& c,
                            const DetectorConfig& config, const Vec& y_omega,
                            const Mat& outputs);

struct BatchResult {
  Decision verdict = Decision::kNoAttack;
  DetectionTrace trace;
};

/// NoAttack iff some x(0) explains both Y(T) = O_T x(0) and
/// y_omega = Omega x(0), provided l >= n+1.
BatchResult batch_decide(const Mat& a, const Mat& c,
                         const DetectorConfig& config, const Vec& y_omega,
                         const Trajectory& trajectory);

}  // namespace cpsguard
