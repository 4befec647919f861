import numpy as np
import pytest
from hypothesis import given, settings

from conftest import HOPF4, FIGURE_EIGHT, SPLIT, TREFOIL, UNKNOT2, diagrams, random_diagram
from gridmoney.alexander import (
    ALLOWED_ENTRIES,
    ZERO_SERIAL,
    SerialPolynomial,
    adjacent_to_outer,
    alexander,
    alexander_matrix,
    crossing_equation,
    delete_adjacent_columns,
    normalize,
    poly_det,
    regions,
)
from gridmoney.errors import DisconnectedProjection
from gridmoney.griddiag import Crossing, crossings, is_connected_projection
from oracles import canonical, cofactor_det, fox_alexander, trim


@pytest.mark.parametrize(
    "g, text",
    [(UNKNOT2, "1"), (TREFOIL, "1,-1,1"), (FIGURE_EIGHT, "1,-3,1"), (SPLIT, "0"), (HOPF4, "1,-1")],
)
def test_golden_serials(g, text):
    assert alexander(g).text() == text


def test_golden_serials_match_oracle():
    for g in (TREFOIL, FIGURE_EIGHT, HOPF4):
        assert alexander(g).coeffs == fox_alexander(g)


def test_golden_diagram_shapes():
    assert len(crossings(TREFOIL)) == 3
    assert len(crossings(FIGURE_EIGHT)) == 4


def test_serial_text_round_trip():
    for text in ("1", "0", "1,-1,1", "1,-3,1", "2,-5,2"):
        assert SerialPolynomial.parse(text).text() == text
    assert SerialPolynomial.parse("0") == ZERO_SERIAL
    assert ZERO_SERIAL.is_zero


@pytest.mark.parametrize("coeffs", [(0, 1), (-1, 2), (1, 0)])
def test_serial_rejects_non_canonical(coeffs):
    with pytest.raises(ValueError):
        SerialPolynomial(coeffs)


def test_regions_unknot_and_hopf():
    assert regions(UNKNOT2).region_count == 2
    assert regions(HOPF4).region_count == 4


def test_regions_disconnected():
    with pytest.raises(DisconnectedProjection):
        regions(SPLIT)


@given(diagrams(max_d=7))
@settings(max_examples=80)
def test_region_count_is_crossings_plus_two(g):
    if is_connected_projection(g):
        assert regions(g).region_count == len(crossings(g)) + 2


def test_crossing_equation_east():
    rm = regions(HOPF4)
    c = Crossing(1, 2, "east", "north")
    q = rm.quadrants(c)
    eq = crossing_equation(c, rm)
    expected = {}
    for region, entry in ((q["NE"], (0, 1)), (q["NW"], (0, -1)), (q["SW"], (1, 0)), (q["SE"], (-1, 0))):
        a = expected.get(region, (0, 0))
        expected[region] = (a[0] + entry[0], a[1] + entry[1])
    assert eq == expected


def test_crossing_equation_west_is_half_turn():
    rm = regions(HOPF4)
    c = Crossing(2, 1, "west", "south")
    q = rm.quadrants(c)
    eq = crossing_equation(c, rm)
    expected = {}
    for region, entry in ((q["SW"], (0, 1)), (q["SE"], (0, -1)), (q["NE"], (1, 0)), (q["NW"], (-1, 0))):
        a = expected.get(region, (0, 0))
        expected[region] = (a[0] + entry[0], a[1] + entry[1])
    assert eq == expected


def test_matrix_shapes():
    assert alexander_matrix(UNKNOT2) == []
    rm = regions(UNKNOT2)
    assert delete_adjacent_columns([], rm) == []
    m = alexander_matrix(HOPF4)
    assert len(m) == 2 and all(len(row) == 4 for row in m)
    m0 = delete_adjacent_columns(m, regions(HOPF4))
    assert len(m0) == 2 and all(len(row) == 2 for row in m0)


@given(diagrams(max_d=7))
@settings(max_examples=80)
def test_matrix_entries_allowed(g):
    if is_connected_projection(g):
        for row in alexander_matrix(g):
            assert all(e in ALLOWED_ENTRIES for e in row)


def test_non_adjacent_pair_rejected():
    rm = regions(TREFOIL)
    bad = next(
        (a, b)
        for a in range(rm.region_count)
        for b in range(rm.region_count)
        if a != b and frozenset((a, b)) not in rm.adjacent_pairs
    )
    with pytest.raises(ValueError):
        delete_adjacent_columns(alexander_matrix(TREFOIL, rm), rm, bad)


def test_poly_det_small():
    assert poly_det([]) == (1,)
    assert trim(poly_det([[(0, 1), (1, 0)], [(1, 0), (0, 1)]])) == (-1, 0, 1)


def test_poly_det_matches_cofactor():
    rng = np.random.default_rng(17)
    for _ in range(150):
        n = int(rng.integers(1, 7))
        m = [[tuple(int(v) for v in rng.integers(-3, 4, size=2)) for _ in range(n)] for _ in range(n)]
        assert trim(poly_det(m)) == cofactor_det(m)


@pytest.mark.parametrize(
    "p, expected",
    [((0, -1, 1), (1, -1)), ((0, 0, 1, 1), (1, 1)), ((), ()), ((0, 0), ()), ((-2, 3), (2, -3))],
)
def test_normalize(p, expected):
    assert normalize(p).coeffs == expected


def test_face_method_matches_fox_oracle():
    rng = np.random.default_rng(2)
    for _ in range(300):
        g = random_diagram(rng, int(rng.integers(2, 7)))
        assert alexander(g).coeffs == fox_alexander(g), g


def test_column_choice_independence():
    rng = np.random.default_rng(23)
    checked = 0
    while checked < 100:
        g = random_diagram(rng, int(rng.integers(3, 8)))
        if not is_connected_projection(g):
            continue
        rm = regions(g)
        want = alexander(g)
        for pair in rm.adjacent_pairs:
            if len(pair) == 2:
                assert alexander(g, tuple(sorted(pair))) == want
        checked += 1


def test_outer_region_has_neighbours():
    rm = regions(TREFOIL)
    assert adjacent_to_outer(rm)
    assert rm.outer_region == rm.region_at(0, 0)
