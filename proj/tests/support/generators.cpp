#include "generators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cpsguard/subspaces.hpp"

namespace cpsguard::testing {

Mat random_matrix(Rng& rng, Index rows, Index cols, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

Vec random_vector(Rng& rng, Index n, double scale) {
  return random_matrix(rng, n, 1, scale).col(0);
}

Index uniform_index(Rng& rng, Index lo, Index hi) {
  std::uniform_int_distribution<Index> dist(lo, hi);
  return dist(rng);
}

namespace {

Mat scaled_dynamics(Rng& rng, Index n, double radius) {
  Mat a = random_matrix(rng, n, n);
  const double rho = a.eigenvalues().cwiseAbs().maxCoeff();
  if (rho > 1e-6) a *= radius / rho;
  return a;
}

Mat random_feedthrough(Rng& rng, Index p, Index s) {
  switch (uniform_index(rng, 0, 2)) {
    case 0:
      return Mat::Zero(p, s);
    case 1:
      return random_matrix(rng, p, s);
    default: {
      Mat d = Mat::Zero(p, s);
      std::bernoulli_distribution keep(0.35);
      std::normal_distribution<double> dist;
      for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < s; ++j) {
          if (keep(rng)) d(i, j) = dist(rng);
        }
      }
      return d;
    }
  }
}

// No singular value of m strictly between "numerically zero" and "clearly
// nonzero" relative to the largest one.
bool separated(const Mat& m) {
  const Vec sv = Eigen::JacobiSVD<Mat>(m).singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return true;
  for (Index i = 0; i < sv.size(); ++i) {
    const double rel = sv(i) / sv(0);
    if (rel > 1e-13 && rel < 1e-6) return false;
  }
  return true;
}

// Rank decisions on M_t and [M_t O_t] must be unambiguous for every horizon
// the tests use (up to 3n); otherwise exact undetectable attacks can need
// inputs of size 1e10 or more and no tolerance separates the cases.
bool well_conditioned(const LtiSystem& sys) {
  for (Index t = std::max<Index>(sys.n() - 1, 0); t <= 3 * sys.n(); ++t) {
    const Mat m = io_matrix(sys, t);
    Mat joint(m.rows(), m.cols() + sys.n());
    joint << m, obs_matrix(sys, t);
    if (!separated(m) || !separated(joint)) return false;
  }
  return true;
}

}  // namespace

LtiSystem random_system(Rng& rng, const SystemShape& shape) {
  for (;;) {
    const Index n = uniform_index(rng, 1, shape.max_n);
    const Index p = uniform_index(rng, 1, shape.max_p);
    const Index s = uniform_index(rng, 1, shape.max_s);
    LtiSystem sys(scaled_dynamics(rng, n, shape.radius),
                  random_matrix(rng, n, s), random_matrix(rng, p, n),
                  random_feedthrough(rng, p, s));
    if (validate(sys).ok() && well_conditioned(sys)) return sys;
  }
}

LtiSystem planted_zero_state_system(Rng& rng, const SystemShape& shape) {
  for (;;) {
    const LtiSystem base = random_system(rng, shape);
    const SubspaceBasis v = weakly_unobservable(base);
    if (v.is_zero()) continue;
    const Vec mix = random_vector(rng, v.dim());
    const Vec planted = v.basis() * mix.normalized();
    Mat b(base.n(), base.s() + 1);
    b << base.b(), planted;
    Mat d(base.p(), base.s() + 1);
    d << base.d(), Vec::Zero(base.p());
    LtiSystem sys(base.a(), b, base.c(), d);
    if (validate(sys).ok() && well_conditioned(sys)) return sys;
  }
}

SideInformation random_side_information(Rng& rng, Index n) {
  const Index q = uniform_index(rng, 0, n);
  if (q == 0) return SideInformation::none(n);
  return SideInformation(random_matrix(rng, q, n));
}

AttackSequence random_attack(Rng& rng, Index s, Index t, double scale) {
  return AttackSequence(random_matrix(rng, s, t + 1, scale));
}

}  // namespace cpsguard::testing
