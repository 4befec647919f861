import math

import numpy as np
import pytest

from conftest import HOPF4, TREFOIL, UNKNOT2
from gridmoney.alexander import SerialPolynomial, alexander
from gridmoney.errors import SerialMismatch, StateTooLarge
from gridmoney.griddiag import GridDiagram
from gridmoney.mint import CLASSICAL, MintParams, mint, money_state
from gridmoney.moves import enumerate_class
from gridmoney.statespace import SparseState, basis_state
from gridmoney.verifier import (
    SAMPLED,
    VerifierParams,
    attack_boundary_dimension,
    attack_single_diagram,
    expected_collision_frequency,
    markov_stage,
    remint_collision_stats,
    sample_acceptance,
    verify,
)

UNKNOT = SerialPolynomial((1,))
HOPF = SerialPolynomial((1, -1))

# single-diagram counterfeit at dbar=2, measured once and frozen
UNKNOT2_CURVE = [
    0.504335053113042,
    0.4922766502883234,
    0.4885274831279845,
    0.48508070180163654,
    0.4817634380689176,
]


@pytest.fixture(scope="module")
def bill():
    return mint(MintParams(2, seed=0))


def test_params_validation():
    with pytest.raises(ValueError):
        VerifierParams(1)
    with pytest.raises(ValueError):
        VerifierParams(2, rounds=0)
    with pytest.raises(ValueError):
        VerifierParams(2, mode="maybe")


@pytest.mark.parametrize("rounds", [1, 5, 20])
def test_markov_stage_fixes_money_state(bill, rounds):
    res = markov_stage(bill.state, 2, rounds)
    assert res.acceptance >= 1 - 1e-9
    assert res.damage <= 1e-9
    assert res.residual <= 1e-12


def test_full_pipeline_on_minted_bill(bill):
    report = verify(bill, bill.serial, VerifierParams(2, rounds=5))
    assert report.step_probabilities["step0"] == 1
    assert report.step_probabilities["step1"] == pytest.approx(1.0, abs=1e-12)
    # the d=4 part of the bill lies outside the dimension window [1, 3]
    assert report.step_probabilities["step2"] < 1
    assert report.acceptance_probability == pytest.approx(
        report.step_probabilities["step2"] * report.markov_acceptance, rel=1e-12
    )
    for p in report.round_probabilities:
        assert 0 <= p <= 1


def test_wrong_serial(bill):
    other = SerialPolynomial((1, -1, 1))
    with pytest.raises(SerialMismatch):
        verify(bill, other, VerifierParams(2))


def test_other_bills_serial_has_disjoint_support():
    a = money_state(UNKNOT, 2)
    b = money_state(HOPF, 2)
    assert set(a.diagrams()).isdisjoint(b.diagrams())
    with pytest.raises(SerialMismatch):
        verify(a, HOPF, VerifierParams(2))


def test_verify_twice_identical(bill):
    params = VerifierParams(2, rounds=5)
    first = markov_stage(bill.state, 2, 5)
    second = markov_stage(first.post_state, 2, 5)
    assert second.post_state.allclose(first.post_state, 1e-12)
    assert np.allclose(first.curve, second.curve, rtol=0, atol=1e-12)
    r1 = verify(bill.state, bill.serial, params)
    r2 = verify(bill.state, bill.serial, params)
    assert r1.to_text() == r2.to_text()


def test_support_cap(bill):
    with pytest.raises(StateTooLarge):
        verify(bill, bill.serial, VerifierParams(2, support_cap=10))


def test_classical_bill_has_no_state():
    b = mint(MintParams(2, mode=CLASSICAL, seed=1))
    with pytest.raises(TypeError):
        verify(b, b.serial, VerifierParams(2))


def test_single_diagram_curve_pinned():
    res = attack_single_diagram(UNKNOT2, UNKNOT, VerifierParams(2, rounds=5))
    assert res.curve[0] < 1
    assert np.allclose(res.curve, UNKNOT2_CURVE, rtol=0, atol=1e-12)
    assert all(b <= a + 1e-15 for a, b in zip(res.curve, res.curve[1:]))


def test_single_diagram_serial_checked():
    with pytest.raises(SerialMismatch):
        attack_single_diagram(UNKNOT2, HOPF, VerifierParams(2))


def test_singleton_class_fixed():
    # HOPF4's class at dbar=2 stays at d=4 where q=1; every move keeps it inside
    cls = enumerate_class(HOPF4, 4)
    state = SparseState({g: 1.0 for g in cls}).normalized()
    res = markov_stage(state, 2, 3)
    assert res.acceptance == pytest.approx(1.0, abs=1e-12)


def test_boundary_attack():
    rep = attack_boundary_dimension(VerifierParams(2, rounds=5))
    assert rep.found
    assert rep.diagram.d == 4
    assert rep.step2_probability == 0
    assert rep.markov_acceptance >= 1 - 1e-9
    assert rep.to_text().startswith("boundary diagram")


def test_sampled_mode_runs(bill):
    params = VerifierParams(2, rounds=3, mode=SAMPLED, seed=5)
    report = verify(bill, bill.serial, params)
    assert report.accepted in (True, False)
    if not report.accepted:
        assert report.failed_step in ("step1", "step2", "step3")


def test_sampled_frequency_matches_exact():
    state = basis_state(GridDiagram(3, (0, 1, 2), (1, 2, 0)))
    serial = alexander(GridDiagram(3, (0, 1, 2), (1, 2, 0)))
    exact = verify(state, serial, VerifierParams(2, rounds=2))
    p = exact.acceptance_probability
    n = 2000
    rng = np.random.default_rng(1)
    hits = sum(verify(state, serial, VerifierParams(2, rounds=2, mode=SAMPLED), rng).accepted for _ in range(n))
    assert abs(hits - n * p) <= 3 * math.sqrt(n * p * (1 - p))
    replay = sample_acceptance(exact, 10_000, np.random.default_rng(2))
    assert abs(replay - 10_000 * p) <= 3 * math.sqrt(10_000 * p * (1 - p))


def test_threshold_controls_exact_acceptance(bill):
    low = verify(bill, bill.serial, VerifierParams(2, rounds=2, threshold=0.5))
    high = verify(bill, bill.serial, VerifierParams(2, rounds=2, threshold=0.99))
    assert low.accepted and not high.accepted
    assert high.failed_step == "threshold"


def test_report_text_field_order(bill):
    text = verify(bill, bill.serial, VerifierParams(2, rounds=2)).to_text()
    keys = [line.split()[0] for line in text.splitlines()]
    assert keys == [
        "mode", "dbar", "rounds", "serial", "step0", "step1", "step2",
        "round", "round", "markov_acceptance", "acceptance_probability",
        "damage", "accepted", "failed_step",
    ]


def test_collision_stats():
    r2 = remint_collision_stats(2, 300, seed=0)
    r3 = remint_collision_stats(3, 300, seed=0)
    assert r2.trials == 300 and sum(r2.serial_counts.values()) == 300
    assert r3.pair_frequency < r2.pair_frequency
    assert abs(r2.pair_frequency - expected_collision_frequency(2)) < 0.05


def test_collision_workers_agree():
    a = remint_collision_stats(2, 40, seed=3, workers=1)
    b = remint_collision_stats(2, 40, seed=3, workers=2)
    assert a.serial_counts == b.serial_counts


def test_equal_serials_equal_payloads():
    bills = [mint(MintParams(2, seed=s)) for s in range(20)]
    by_serial = {}
    for b in bills:
        first = by_serial.setdefault(b.serial, b)
        assert first.state.allclose(b.state, 0.0)
