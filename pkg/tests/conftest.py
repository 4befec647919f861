import numpy as np
import pytest
from hypothesis import strategies as st

from gridmoney.griddiag import GridDiagram
from gridmoney.mint import sample_disjoint_pair
from gridmoney.moves import (
    COLUMNS,
    ROWS,
    cyclic,
    destabilize_pattern,
    stabilize,
    toggle_L,
    transpose,
    transpose_legal,
)

UNKNOT2 = GridDiagram(2, (0, 1), (1, 0))
# Hopf link: two unknots crossing twice
HOPF4 = GridDiagram(4, (0, 1, 2, 3), (2, 3, 0, 1))
TREFOIL = GridDiagram(5, (0, 1, 2, 3, 4), (2, 3, 4, 0, 1))
FIGURE_EIGHT = GridDiagram(6, (5, 1, 0, 3, 2, 4), (3, 4, 2, 1, 5, 0))
# two 2x2 unknots in opposite corners of a 4x4 grid
SPLIT = GridDiagram(4, (0, 1, 2, 3), (1, 0, 3, 2))


@st.composite
def diagrams(draw, min_d=2, max_d=7):
    d = draw(st.integers(min_d, max_d))
    xs = draw(st.permutations(range(d)))
    os = draw(st.permutations(range(d)).filter(lambda p: all(a != b for a, b in zip(xs, p))))
    return GridDiagram(d, tuple(xs), tuple(os))


def random_diagram(rng, d):
    return sample_disjoint_pair(d, rng)[0]


def random_legal_move(g, rng, dmax=9, tries=20):
    """One uniformly chosen move family, retried until a legal instance turns up."""
    for _ in range(tries):
        family = int(rng.integers(4))
        axis = (COLUMNS, ROWS)[int(rng.integers(2))]
        if family == 0:
            return cyclic(g, axis, (1, -1)[int(rng.integers(2))])
        if family == 1:
            i = int(rng.integers(g.d - 1))
            if transpose_legal(g, axis, i):
                return transpose(g, axis, i)
        elif family == 2 and g.d < dmax:
            k = int(rng.integers(4))
            h = g.rotated(k)
            c = int(rng.integers(h.d))
            r = h.xs[c] if rng.integers(2) else h.os[c]
            return stabilize(g, c, r, k)
        elif family == 3:
            k = int(rng.integers(4))
            h = g.rotated(k)
            x, y = (int(v) for v in rng.integers(h.d, size=2))
            if destabilize_pattern(h, x, y) is not None:
                return toggle_L(g, x, y, k)
    return cyclic(g, COLUMNS, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
