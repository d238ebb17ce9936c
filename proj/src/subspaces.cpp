#include "cpsguard/subspaces.hpp"

#include <algorithm>

#include "cpsguard/errors.hpp"

namespace cpsguard {
namespace {

double system_scale(const LtiSystem& sys) {
  return std::max({sys.a().norm(), sys.b().norm(), sys.c().norm(),
                   sys.d().norm()});
}

// Rows annihilating `s`: the transpose of a basis of its complement.
Mat annihilator(const SubspaceBasis& s) {
  return orthogonal_complement(s).basis().transpose();
}

SubspaceBasis next_iterate(const LtiSystem& sys, const SubspaceBasis& current,
                           const Tol& tol) {
  const Index n = sys.n();
  const Index s = sys.s();
  const Index p = sys.p();
  const Mat r = annihilator(current);
  const Index rr = r.rows();

  // [[R A, R B], [C, D]] [x; u] = 0
  Mat constraint(rr + p, n + s);
  if (rr > 0) {
    constraint.topLeftCorner(rr, n) = r * sys.a();
    constraint.topRightCorner(rr, s) = r * sys.b();
  }
  constraint.bottomLeftCorner(p, n) = sys.c();
  constraint.bottomRightCorner(p, s) = sys.d();

  const SubspaceBasis pairs = null_space(constraint, tol, system_scale(sys));
  if (pairs.is_zero()) return SubspaceBasis::zero(n);
  // Null vectors are unit length, so x-parts below rank_rel are round-off.
  return range_space(pairs.basis().topRows(n), tol, 1.0);
}

}  // namespace

std::vector<SubspaceBasis> weakly_unobservable_iterates(const LtiSystem& sys,
                                                        const Tol& tol) {
  std::vector<SubspaceBasis> iterates{SubspaceBasis::full(sys.n())};
  for (Index i = 0; i <= sys.n(); ++i) {
    SubspaceBasis next = next_iterate(sys, iterates.back(), tol);
    const bool settled = next.dim() == iterates.back().dim();
    iterates.push_back(std::move(next));
    if (settled) break;
  }
  return iterates;
}

SubspaceBasis weakly_unobservable(const LtiSystem& sys, const Tol& tol) {
  return weakly_unobservable_iterates(sys, tol).back();
}

SubspaceBasis output_nulling_reachable(const LtiSystem& sys, Index k,
                                       const Tol& tol) {
  if (k < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "output-nulling reachability needs k >= 1");
  }
  const Index n = sys.n();
  const Index s = sys.s();
  const Index p = sys.p();
  const double scale = system_scale(sys);

  SubspaceBasis reach = SubspaceBasis::zero(n);
  for (Index step = 0; step < k; ++step) {
    const Index d = reach.dim();
    // Pairs (x = basis * xi, u) with C x + D u = 0, pushed through A x + B u.
    Mat output(p, d + s);
    Mat advance(n, d + s);
    if (d > 0) {
      output.leftCols(d) = sys.c() * reach.basis();
      advance.leftCols(d) = sys.a() * reach.basis();
    }
    output.rightCols(s) = sys.d();
    advance.rightCols(s) = sys.b();
    const SubspaceBasis pairs = null_space(output, tol, scale);
    if (pairs.is_zero()) {
      reach = SubspaceBasis::zero(n);
      continue;
    }
    reach = range_space(advance * pairs.basis(), tol, advance.norm());
  }
  return reach;
}

bool zero_state_attack_exists(const LtiSystem& sys, const Tol& tol) {
  const SubspaceBasis w1 = output_nulling_reachable(sys, 1, tol);
  if (w1.is_zero()) return false;
  return intersect(w1, weakly_unobservable(sys, tol), tol).dim() > 0;
}

NullingStep output_nulling_step(const LtiSystem& sys,
                                const SubspaceBasis& target, const Vec& x,
                                const Tol& tol) {
  if (x.size() != sys.n() || target.ambient_dim() != sys.n()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "state and subspace must live in R^n");
  }
  const Mat r = annihilator(target);
  const Index rr = r.rows();
  const Index p = sys.p();
  Mat lhs(rr + p, sys.s());
  Vec rhs(rr + p);
  if (rr > 0) {
    lhs.topRows(rr) = r * sys.b();
    rhs.head(rr) = -(r * (sys.a() * x));
  }
  lhs.bottomRows(p) = sys.d();
  rhs.tail(p) = -(sys.c() * x);

  const LeastSquares ls = solve_min_norm(lhs, rhs, tol);
  NullingStep step;
  step.input = ls.solution;
  step.next_state = sys.a() * x + sys.b() * ls.solution;
  step.residual = ls.residual_norm;
  step.feasible = tol.accepts(ls.residual_norm, rhs.norm());
  return step;
}

}  // namespace cpsguard
