"""Detectability analysis, attack synthesis and detection for LTI systems.

Attacks are numpy arrays with one row per time step (shape (T+1, s)) and
output trajectories likewise have one row per step (shape (T+1, p)).
"""

from ._core import (
    CpsguardError,
    LtiSystem,
    SideInformation,
    ZeroDynamicsMode,
    analyze,
    certify_undetectable,
    ctrl_matrix,
    extend_attack,
    extensible_forever,
    find_zero_dynamics_modes,
    io_matrix,
    is_zero_state_inducing,
    load_scenario,
    obs_matrix,
    output_nulling_reachable,
    repro_aircraft,
    run_detector,
    simulate,
    undetectable_from_theta,
    weakly_unobservable,
    zero_dynamics_attack,
    zero_state_attack_exists,
    zero_state_synthesize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
