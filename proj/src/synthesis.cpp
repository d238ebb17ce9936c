#include "cpsguard/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>

#include "cpsguard/errors.hpp"
#include "cpsguard/subspaces.hpp"

namespace cpsguard {
namespace {

struct Candidate {
  Complex lambda;
  std::vector<Index> channels;
};

// Number of p-subsets of s channels above which the subset scan is skipped.
constexpr std::size_t kMaxChannelSubsets = 256;

std::vector<Index> all_channels(Index s) {
  std::vector<Index> out(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

Mat select_columns(const Mat& m, const std::vector<Index>& cols) {
  Mat out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<Index>(j)) = m.col(cols[j]);
  }
  return out;
}

// Finite generalized eigenvalues of lambda E0 - F0 with
// F0 = [A, B; -C, -D], E0 = diag(I, 0), for square B/D blocks.
std::vector<Complex> square_pencil_zeros(const Mat& a, const Mat& b,
                                         const Mat& c, const Mat& d) {
  const Index n = a.rows();
  const Index m = b.cols();
  Mat f0(n + m, n + m);
  f0 << a, b, -c, -d;
  Mat e0 = Mat::Zero(n + m, n + m);
  e0.topLeftCorner(n, n).setIdentity();
  Eigen::GeneralizedEigenSolver<Mat> ges(f0, e0, false);
  std::vector<Complex> out;
  if (ges.info() != Eigen::Success) return out;
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  for (Index i = 0; i < alphas.size(); ++i) {
    const double beta = betas(i);
    if (std::abs(beta) <= 1e-12 * std::max(1.0, std::abs(alphas(i)))) continue;
    out.push_back(alphas(i) / beta);
  }
  return out;
}

template <typename Scalar>
using DynMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DynVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Among the (near-)null vectors of `p`, the unit vector whose trailing
// `g_rows` entries are largest. Empty when there is no null vector.
template <typename Scalar>
DynVec<Scalar> null_vector_max_g(const DynMat<Scalar>& p, Index g_rows,
                                 double max_residual) {
  Eigen::JacobiSVD<DynMat<Scalar>> svd(p, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > max_residual * std::max(sigma_max, 1.0)) ++rank;
  }
  const Index null_dim = p.cols() - rank;
  if (null_dim == 0) return {};
  const DynMat<Scalar> null_basis = svd.matrixV().rightCols(null_dim);
  const DynMat<Scalar> g_block = null_basis.bottomRows(g_rows);
  Eigen::JacobiSVD<DynMat<Scalar>> gsvd(g_block, Eigen::ComputeFullV);
  return null_basis * gsvd.matrixV().col(0);
}

bool same_lambda(Complex x, Complex y) {
  return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(x));
}

Complex canonical(Complex lambda) {
  if (std::abs(lambda.imag()) <= 1e-12 * std::max(1.0, std::abs(lambda))) {
    return {lambda.real(), 0.0};
  }
  return {lambda.real(), std::abs(lambda.imag())};
}

void for_each_subset(Index s, Index k,
                     const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == s - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

std::size_t binomial(Index s, Index k) {
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) out = out * double(s - k + i) / double(i);
  return static_cast<std::size_t>(std::llround(out));
}

}  // namespace

CMat pencil(const LtiSystem& sys, Complex lambda) {
  const Index n = sys.n();
  CMat out(n + sys.p(), n + sys.s());
  out.topLeftCorner(n, n) =
      lambda * CMat::Identity(n, n) - sys.a().cast<Complex>();
  out.topRightCorner(n, sys.s()) = -sys.b().cast<Complex>();
  out.bottomLeftCorner(sys.p(), n) = sys.c().cast<Complex>();
  out.bottomRightCorner(sys.p(), sys.s()) = sys.d().cast<Complex>();
  return out;
}

double pencil_residual(const LtiSystem& sys, Complex lambda, const CVec& theta,
                       const CVec& g) {
  if (theta.size() != sys.n() || g.size() != sys.s()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta must have n entries and g must have s entries");
  }
  CVec v(sys.n() + sys.s());
  v << theta, g;
  const double scale = theta.norm() + g.norm();
  if (scale == 0.0) return 0.0;
  return (pencil(sys, lambda) * v).norm() / scale;
}

ZeroDynamicsMode mode_at(const LtiSystem& sys, Complex lambda,
                         const std::vector<Index>& channels,
                         double max_residual) {
  const Index n = sys.n();
  const std::vector<Index> chans =
      channels.empty() ? all_channels(sys.s()) : channels;
  const Index m = static_cast<Index>(chans.size());
  const Mat b = select_columns(sys.b(), chans);
  const Mat d = select_columns(sys.d(), chans);

  CVec v;
  if (lambda.imag() == 0.0) {
    Mat p(n + sys.p(), n + m);
    p << lambda.real() * Mat::Identity(n, n) - sys.a(), -b, sys.c(), d;
    const Vec real_v = null_vector_max_g<double>(p, m, max_residual);
    v = real_v.cast<Complex>();
  } else {
    CMat p(n + sys.p(), n + m);
    p << lambda * CMat::Identity(n, n) - sys.a().cast<Complex>(),
        -b.cast<Complex>(), sys.c().cast<Complex>(), d.cast<Complex>();
    v = null_vector_max_g<Complex>(p, m, max_residual);
  }
  if (v.size() == 0 || v.tail(m).norm() <= 1e-8 * v.norm()) {
    throw Error(ErrorCode::kNoModes,
                "no pencil null vector with g != 0 at this lambda");
  }

  v /= v.norm();
  Index pivot = 0;
  v.head(n).cwiseAbs().maxCoeff(&pivot);
  const Complex entry = v(pivot);
  if (std::abs(entry) > 0.0) v *= std::conj(entry) / std::abs(entry);

  ZeroDynamicsMode mode;
  mode.lambda = lambda;
  mode.theta = v.head(n);
  mode.g = CVec::Zero(sys.s());
  for (Index j = 0; j < m; ++j) mode.g(chans[static_cast<std::size_t>(j)]) = v(n + j);
  if (mode.is_real()) {
    mode.theta = mode.theta.real().cast<Complex>();
    mode.g = mode.g.real().cast<Complex>();
  }
  mode.channels = chans;
  mode.pencil_residual = pencil_residual(sys, lambda, mode.theta, mode.g);
  if (mode.pencil_residual > max_residual) {
    throw Error(ErrorCode::kNoModes, "pencil residual above the bound");
  }
  return mode;
}

std::vector<ZeroDynamicsMode> find_zero_dynamics_modes(
    const LtiSystem& sys, const Tol& tol, const ModeSearchOptions& options) {
  const Index p = sys.p();
  const Index s = sys.s();

  std::vector<Candidate> candidates;
  auto add_all = [&](const std::vector<Complex>& lambdas,
                     const std::vector<Index>& channels) {
    for (const Complex& l : lambdas) candidates.push_back({l, channels});
  };

  add_all(options.lambda_hints, {});
  if (p == s) {
    add_all(square_pencil_zeros(sys.a(), sys.b(), sys.c(), sys.d()), {});
  } else if (p > s) {
    // Squaring down the outputs can only add zeros; each is verified below.
    std::mt19937 rng(12345);
    std::normal_distribution<double> normal;
    Mat r(s, p);
    for (Index i = 0; i < r.size(); ++i) r(i) = normal(rng);
    add_all(square_pencil_zeros(sys.a(), sys.b(), r * sys.c(), r * sys.d()),
            {});
  } else {
    Eigen::EigenSolver<Mat> eig(sys.a(), false);
    std::vector<Complex> eigs(eig.eigenvalues().begin(),
                              eig.eigenvalues().end());
    add_all(eigs, {});
    if (binomial(s, p) <= kMaxChannelSubsets) {
      for_each_subset(s, p, [&](const std::vector<Index>& subset) {
        add_all(square_pencil_zeros(sys.a(), select_columns(sys.b(), subset),
                                    sys.c(), select_columns(sys.d(), subset)),
                subset);
      });
    }
  }

  std::vector<ZeroDynamicsMode> modes;
  for (const Candidate& cand : candidates) {
    const Complex lambda = canonical(cand.lambda);
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
      continue;
    }
    if (!options.allow_unstable && std::abs(lambda) > 1.0 + tol.rank_rel) {
      continue;
    }
    const bool seen = std::any_of(
        modes.begin(), modes.end(), [&](const ZeroDynamicsMode& m) {
          return same_lambda(m.lambda, lambda);
        });
    if (seen) continue;
    try {
      modes.push_back(
          mode_at(sys, lambda, cand.channels, options.max_residual));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoModes) throw;
    }
  }
  if (modes.empty()) {
    throw Error(ErrorCode::kNoModes, "no zero-dynamics mode was found");
  }
  std::sort(modes.begin(), modes.end(),
            [](const ZeroDynamicsMode& x, const ZeroDynamicsMode& y) {
              if (x.lambda.real() != y.lambda.real()) {
                return x.lambda.real() < y.lambda.real();
              }
              return x.lambda.imag() < y.lambda.imag();
            });
  return modes;
}

AttackSequence zero_dynamics_attack(const ZeroDynamicsMode& mode, Index t,
                                    double scale) {
  if (t < 0) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be non-negative");
  }
  Mat frames(mode.g.size(), t + 1);
  Complex power(1.0, 0.0);
  for (Index k = 0; k <= t; ++k) {
    frames.col(k) = scale * (power * mode.g).real();
    power *= mode.lambda;
  }
  return AttackSequence(std::move(frames));
}

Vec zero_dynamics_induced_state(const ZeroDynamicsMode& mode, double scale) {
  return scale * mode.theta.real();
}

AttackSequence zero_state_synthesize(const LtiSystem& sys, Index t,
                                     const Tol& tol) {
  if (t < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "zero-state synthesis needs a horizon of at least 1");
  }
  const SubspaceBasis v = weakly_unobservable(sys, tol);
  const SubspaceBasis both =
      intersect(output_nulling_reachable(sys, 1, tol), v, tol);
  if (both.is_zero()) {
    throw Error(ErrorCode::kNotSynthesizable, "W_1 ∩ V is {0}");
  }

  // a(0) with B a(0) = x(1) in W_1 ∩ V and D a(0) = 0.
  Mat bd(sys.n() + sys.p(), sys.s());
  bd << sys.b(), sys.d();
  Vec target = Vec::Zero(sys.n() + sys.p());
  target.head(sys.n()) = both.basis().col(0);
  const LeastSquares first = solve_min_norm(bd, target, tol);
  if (!tol.accepts(first.residual_norm, target.norm())) {
    throw Error(ErrorCode::kNotSynthesizable,
                "could not realize x(1) with an output-nulling first frame");
  }

  Mat frames(sys.s(), t + 1);
  frames.col(0) = first.solution;
  Vec x = sys.b() * first.solution;
  for (Index k = 1; k <= t; ++k) {
    const NullingStep step = output_nulling_step(sys, v, x, tol);
    if (!step.feasible) {
      throw Error(ErrorCode::kNotSynthesizable,
                  "output-nulling continuation failed at step " +
                      std::to_string(k));
    }
    frames.col(k) = step.input;
    x = step.next_state;
  }
  return AttackSequence(std::move(frames));
}

AttackSequence undetectable_from_theta(const LtiSystem& sys,
                                       const SideInformation& omega,
                                       const Vec& theta, Index t,
                                       const Tol& tol) {
  if (theta.size() != sys.n() || omega.n() != sys.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "theta must have n entries");
  }
  if (t < sys.n() - 1) {
    throw Error(ErrorCode::kHorizonTooShort,
                "the attack horizon must be at least n-1");
  }
  const SubspaceBasis feasible =
      intersect(omega.null_basis(), weakly_unobservable(sys, tol), tol);
  if (!feasible.contains(theta, tol)) {
    throw Error(ErrorCode::kThetaNotFeasible,
                "theta is not in N(Omega) ∩ V");
  }
  const Vec rhs = -(obs_matrix(sys, t) * theta);
  const LeastSquares ls = solve_min_norm(io_matrix(sys, t), rhs, tol);
  if (!tol.accepts(ls.residual_norm, rhs.norm())) {
    throw Error(ErrorCode::kThetaNotFeasible,
                "no attack reproduces -O_t theta");
  }
  return AttackSequence::from_stacked(ls.solution, sys.s());
}

AttackSequence extend_attack(const LtiSystem& sys,
                             const SideInformation& omega,
                             const AttackSequence& attack,
                             const UndetectabilityCertificate& cert,
                             Index t_prime, const Tol& tol) {
  const Index t = attack.horizon();
  if (t_prime <= t) {
    throw Error(ErrorCode::kInvalidArgument,
                "the extended horizon must exceed the current one");
  }
  if (!cert.undetectable) {
    throw Error(ErrorCode::kNotExtensible, "the attack is detectable");
  }
  const ExtensionVerdict verdict =
      extension_verdict(sys, omega, attack, cert, tol);
  if (!verdict.extensible_forever) {
    throw Error(ErrorCode::kNotExtensible,
                "C_T E + A^{T+1} theta is not in V");
  }

  // Second block row: O_h z + M_h [a(T+1); ...; a(T')] = 0, h = T' - T - 1.
  const Index h = t_prime - t - 1;
  const Vec rhs = -(obs_matrix(sys, h) * verdict.test_vector);
  const LeastSquares ls = solve_min_norm(io_matrix(sys, h), rhs, tol);
  if (!tol.accepts(ls.residual_norm, rhs.norm())) {
    throw Error(ErrorCode::kNotExtensible,
                "the appended frames could not null the output");
  }
  Mat frames(sys.s(), t_prime + 1);
  frames.leftCols(t + 1) = attack.frames();
  frames.rightCols(h + 1) =
      Eigen::Map<const Mat>(ls.solution.data(), sys.s(), h + 1);
  return AttackSequence(std::move(frames));
}

}  // namespace cpsguard
