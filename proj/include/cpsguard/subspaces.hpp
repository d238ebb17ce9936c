#pragma once

#include <vector>

#include "cpsguard/model.hpp"

namespace cpsguard {

/// Weakly unobservable subspace V: initial states from which some input keeps
/// the output identically zero. Computed by the recursion
///   V^0 = R^n,  V^{i+1} = { x : exists u, A x + B u in V^i, C x + D u = 0 }
/// which is nested and stops changing within n steps.
SubspaceBasis weakly_unobservable(const LtiSystem& sys, const Tol& tol = {});

/// Every iterate V^0, V^1, ... up to and including the fixed point.
std::vector<SubspaceBasis> weakly_unobservable_iterates(const LtiSystem& sys,
                                                        const Tol& tol = {});

/// Output-nulling reachable subspace over k >= 1 steps: states reachable
/// from the origin in k steps with zero output along the way.
SubspaceBasis output_nulling_reachable(const LtiSystem& sys, Index k,
                                       const Tol& tol = {});

/// True iff W_1 ∩ V is nonzero, i.e. an attack starting at time 0 can keep
/// the output untouched for any horizon.
bool zero_state_attack_exists(const LtiSystem& sys, const Tol& tol = {});

/// One step of output nulling inside a subspace: an input u with
/// C x + D u = 0 and A x + B u in `target`, minimum norm.
struct NullingStep {
  Vec input;
  Vec next_state;
  double residual = 0.0;
  bool feasible = false;
};

NullingStep output_nulling_step(const LtiSystem& sys,
                                const SubspaceBasis& target, const Vec& x,
                                const Tol& tol = {});

}  // namespace cpsguard
