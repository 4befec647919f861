import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import HOPF4, TREFOIL, UNKNOT2
from gridmoney.alexander import SerialPolynomial, alexander
from gridmoney.errors import ZeroProbability
from gridmoney.griddiag import GridDiagram
from gridmoney.markov import apply_B
from gridmoney.mint import MintParams, build_initial_state, mint, q_function, q_table
from gridmoney.statespace import (
    SparseState,
    basis_state,
    contract,
    dimension_window,
    dump_state,
    expand,
    group_by_serial,
    load_state,
    measure_alexander,
    project_dimension,
)

Q2 = q_function(2)


def test_expand_single_diagram():
    g = GridDiagram(3, (0, 1, 2), (1, 2, 0))
    s = expand(basis_state(g), Q2)
    v = s[g]
    assert len(v) == 39
    assert np.allclose(v, 1 / math.sqrt(39), rtol=0, atol=1e-15)
    assert s.norm2() == pytest.approx(1.0, abs=1e-12)


def test_expand_contract_inverse():
    s = build_initial_state(2)
    back, residual = contract(expand(s, Q2), Q2)
    assert residual <= 1e-12
    assert back.allclose(s, 1e-12)


def test_contract_residual_on_half_labels():
    g = GridDiagram(3, (0, 1, 2), (1, 2, 0))
    v = np.zeros(39)
    v[:19] = 1.0
    s = SparseState({g: v}, labelled=True).normalized()
    back, residual = contract(s, Q2)
    assert residual > 0
    assert back.norm2() + residual == pytest.approx(1.0, abs=1e-12)


def test_expand_outside_space():
    with pytest.raises(ValueError):
        expand(basis_state(TREFOIL), Q2)


def test_measure_own_serial():
    bill = mint(MintParams(2, seed=3))
    p, post = measure_alexander(bill.state, bill.serial)
    assert p == pytest.approx(1.0, abs=1e-12)
    assert post.allclose(bill.state, 1e-12)


def test_measure_wrong_serial():
    with pytest.raises(ZeroProbability):
        measure_alexander(basis_state(UNKNOT2), SerialPolynomial((1, -1, 1)))


@given(st.floats(0.01, 0.99))
def test_measure_born_rule(w):
    s = SparseState({UNKNOT2: math.sqrt(w), HOPF4: math.sqrt(1 - w)})
    p, post = measure_alexander(s, alexander(HOPF4))
    assert p == pytest.approx(1 - w, abs=1e-12)
    assert set(post.diagrams()) == {HOPF4}


def test_dimension_window():
    assert dimension_window(2) == (1, 3)
    assert dimension_window(3) == (2, 4)
    assert dimension_window(4) == (2, 6)


def test_project_dimension_minted_bill():
    groups = group_by_serial(build_initial_state(2))
    unknot = groups[SerialPolynomial((1,))]
    table = q_table(2)
    counts = {}
    for g in unknot.diagrams():
        counts[g.d] = counts.get(g.d, 0) + 1
    in_range = sum(table[d] * n for d, n in counts.items() if d <= 3)
    everything = sum(table[d] * n for d, n in counts.items())
    p, _ = project_dimension(unknot.normalized(), 2)
    assert abs(p - in_range / everything) <= 1e-12


def test_project_dimension_boundary_rejected():
    s = SparseState({HOPF4: 1.0})
    with pytest.raises(ZeroProbability):
        project_dimension(s, 2)


def test_project_idempotent():
    s = build_initial_state(2)
    _, once = project_dimension(s, 2)
    p, twice = project_dimension(once, 2)
    assert p == pytest.approx(1.0, abs=1e-12)
    assert twice.allclose(once, 1e-15)


def test_group_by_serial_sums_to_one():
    groups = group_by_serial(build_initial_state(2))
    assert math.fsum(s.norm2() for s in groups.values()) == pytest.approx(1.0, abs=1e-12)


def test_normalise_zero():
    with pytest.raises(ZeroProbability):
        SparseState({}).normalized()


def test_dump_round_trip_diagram_state():
    s = build_initial_state(2)
    text = dump_state(s)
    assert load_state(text).allclose(s, 0.0)
    assert dump_state(load_state(text)) == text


def test_dump_round_trip_labelled_runs():
    # after a B step label vectors are no longer constant, so runs get split
    s = apply_B(expand(basis_state(UNKNOT2), Q2), 2)
    text = dump_state(s)
    back = load_state(text, Q2)
    assert back.labelled and back.allclose(s, 0.0)
    first = text.splitlines()[0].split()
    assert len(first) == 4 and int(first[1]) == 0


def test_load_rejects_bad_runs():
    g = "0102000000010001000000"
    with pytest.raises(ValueError):
        load_state(f"{g} 0 400 0.5", Q2)
    with pytest.raises(ValueError):
        load_state(f"{g} 0.5\n{g} 0.5")


def test_fidelity_and_inner():
    a = SparseState({UNKNOT2: 1.0, HOPF4: 1.0})
    b = SparseState({UNKNOT2: 1.0})
    assert a.inner(b) == 1.0
    assert a.fidelity(b) == pytest.approx(0.5)
