import pathlib

import numpy as np
import pytest

import cpsguard

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"
AIRCRAFT = str(SCENARIOS / "aircraft.json")


@pytest.fixture(scope="module")
def aircraft():
    return cpsguard.load_scenario(AIRCRAFT)


def test_scenario_shapes(aircraft):
    sys = aircraft["system"]
    assert (sys.n, sys.p, sys.s) == (4, 3, 4)
    assert aircraft["side"].q == 1
    assert sys.validate()["ok"]
    assert aircraft["attack"] is None


def test_weakly_unobservable_dimension(aircraft):
    v = cpsguard.weakly_unobservable(aircraft["system"])
    assert v.shape == (4, 3)
    np.testing.assert_allclose(v.T @ v, np.eye(3), atol=1e-10)


def test_zero_dynamics_attack_detectability(aircraft):
    sys, side = aircraft["system"], aircraft["side"]
    modes = cpsguard.find_zero_dynamics_modes(sys, [0.9779])
    mode = min(modes, key=lambda m: abs(m.lam - 0.977948722442))
    attack = cpsguard.zero_dynamics_attack(mode, 30, 10.0)
    assert attack.shape == (31, 4)
    blind = cpsguard.SideInformation.none(4)
    assert cpsguard.certify_undetectable(sys, blind, attack)["undetectable"]
    assert not cpsguard.certify_undetectable(sys, side, attack)["undetectable"]
    assert cpsguard.extensible_forever(sys, blind, attack)
    longer = cpsguard.extend_attack(sys, blind, attack, 34)
    np.testing.assert_array_equal(longer[:31], attack)

    outputs, y_omega = cpsguard.simulate(sys, np.zeros(4), attack, side)
    assert outputs.shape == (31, 3)
    without = cpsguard.run_detector(sys, blind, np.zeros(0), outputs, window=5)
    with_side = cpsguard.run_detector(sys, side, y_omega, outputs, window=5)
    assert not any(e["attack"] for e in without)
    assert with_side[0]["k"] == 4 and with_side[0]["attack"]


def test_stacked_identity(aircraft):
    sys = aircraft["system"]
    rng = np.random.default_rng(3)
    x0, attack = rng.normal(size=4), rng.normal(size=(7, 4))
    outputs, _ = cpsguard.simulate(sys, x0, attack, cpsguard.SideInformation.none(4))
    stacked = cpsguard.obs_matrix(sys, 6) @ x0 + cpsguard.io_matrix(sys, 6) @ attack.reshape(-1)
    np.testing.assert_allclose(outputs.reshape(-1), stacked, rtol=1e-9, atol=1e-12)


def test_reports(aircraft):
    report = cpsguard.analyze(AIRCRAFT, [0.9779])
    assert report["dim_v"] == 3
    assert report["zero_state_attack_exists"]
    repro = cpsguard.repro_aircraft(AIRCRAFT)
    assert repro["pass"]


def test_errors_carry_codes(aircraft):
    sys = aircraft["system"]
    with pytest.raises(cpsguard.CpsguardError, match="HorizonTooShort|DimensionMismatch"):
        cpsguard.certify_undetectable(sys, aircraft["side"], np.zeros((2, 4)))
    with pytest.raises(cpsguard.CpsguardError, match="ParseError"):
        cpsguard.load_scenario("/nonexistent.json")
