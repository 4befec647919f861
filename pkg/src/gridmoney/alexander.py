"""Alexander polynomial of a grid diagram via the region-matrix recipe.

The diagram curve is rasterised onto a ``(2d+1) x (2d+1)`` lattice whose odd
points are cell centres; the free lattice points split into the planar
faces of the projection.  Each crossing contributes one linear equation in
the face variables, two columns belonging to adjacent faces are deleted,
and the determinant of the square remainder, normalised, is the serial.

Polynomials are tuples of Python ints, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import ndimage

from .errors import DisconnectedProjection
from .griddiag import Crossing, GridDiagram, crossings, is_connected_projection

ALLOWED_ENTRIES = {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)}


@dataclass(frozen=True)
class SerialPolynomial:
    """Canonical Alexander polynomial: lowest coefficient positive, no trailing zeros.

    The zero polynomial is the empty tuple.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if self.coeffs:
            if self.coeffs[0] <= 0 or self.coeffs[-1] == 0:
                raise ValueError(f"non-canonical serial coefficients {self.coeffs}")

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def text(self) -> str:
        return ",".join(map(str, self.coeffs)) if self.coeffs else "0"

    __str__ = text

    @classmethod
    def parse(cls, text: str) -> "SerialPolynomial":
        text = text.strip()
        if text == "0":
            return cls(())
        try:
            return cls(tuple(int(t) for t in text.split(",")))
        except ValueError as exc:
            raise ValueError(f"bad serial {text!r}: {exc}") from None


ZERO_SERIAL = SerialPolynomial(())


@dataclass(frozen=True, eq=False)
class RegionMap:
    region_count: int
    region_of: np.ndarray = field(repr=False)  # lattice [X, Y] -> region id, -1 on the curve
    outer_region: int
    adjacent_pairs: frozenset = field(repr=False)  # unordered pairs sharing a curve edge

    def region_at(self, lx: int, ly: int) -> int:
        return int(self.region_of[lx, ly])

    def quadrants(self, c: Crossing) -> dict:
        lx, ly = 2 * c.col + 1, 2 * c.row + 1
        return {
            "NE": self.region_at(lx + 1, ly + 1),
            "NW": self.region_at(lx - 1, ly + 1),
            "SW": self.region_at(lx - 1, ly - 1),
            "SE": self.region_at(lx + 1, ly - 1),
        }


def _curve_lattice(g: GridDiagram) -> np.ndarray:
    size = 2 * g.d + 1
    wall = np.zeros((size, size), dtype=bool)
    for c in range(g.d):
        lo, hi = g.column_span(c)
        wall[2 * c + 1, 2 * lo + 1 : 2 * hi + 2] = True
    for r in range(g.d):
        a, b = g.row_span(r)
        wall[2 * a + 1 : 2 * b + 2, 2 * r + 1] = True
    return wall


def regions(g: GridDiagram) -> RegionMap:
    if not is_connected_projection(g):
        raise DisconnectedProjection("diagram projection is disconnected")
    wall = _curve_lattice(g)
    labels, count = ndimage.label(~wall)
    labels = labels.astype(np.int64) - 1
    pairs = set()
    # even lattice coordinates along a segment are edge interiors; read both sides
    for c in range(g.d):
        lo, hi = g.column_span(c)
        lx = 2 * c + 1
        for ly in range(2 * lo + 2, 2 * hi + 1, 2):
            pairs.add(frozenset((int(labels[lx - 1, ly]), int(labels[lx + 1, ly]))))
    for r in range(g.d):
        a, b = g.row_span(r)
        ly = 2 * r + 1
        for lx in range(2 * a + 2, 2 * b + 1, 2):
            pairs.add(frozenset((int(labels[lx, ly - 1]), int(labels[lx, ly + 1]))))
    return RegionMap(int(count), labels, int(labels[0, 0]), frozenset(pairs))


# (j, k, l, m): starting left of the under-strand just after it passes under, counterclockwise
_LABEL_ORDER = {
    "east": ("NE", "NW", "SW", "SE"),
    "west": ("SW", "SE", "NE", "NW"),
}


def crossing_equation(c: Crossing, rm: RegionMap) -> dict:
    """Region -> (constant, x) coefficients of ``x r_j - x r_k + r_l - r_m``."""
    quad = rm.quadrants(c)
    j, k, l, m = (quad[q] for q in _LABEL_ORDER[c.under_dir])
    out = {}
    for region, contrib in ((j, (0, 1)), (k, (0, -1)), (l, (1, 0)), (m, (-1, 0))):
        c0, c1 = out.get(region, (0, 0))
        out[region] = (c0 + contrib[0], c1 + contrib[1])
    return out


def alexander_matrix(g: GridDiagram, rm: RegionMap = None) -> list:
    """``a x (a+2)`` matrix of degree <= 1 entries, one row per crossing."""
    if rm is None:
        rm = regions(g)
    rows = []
    for c in crossings(g):
        row = [(0, 0)] * rm.region_count
        for region, entry in crossing_equation(c, rm).items():
            row[region] = entry
        rows.append(row)
    return rows


def adjacent_to_outer(rm: RegionMap) -> list:
    return sorted(
        next(iter(p - {rm.outer_region})) for p in rm.adjacent_pairs if rm.outer_region in p and len(p) == 2
    )


def delete_adjacent_columns(m: list, rm: RegionMap, pair: tuple = None) -> list:
    """Drop the columns of two adjacent regions (default: the outer one and its
    lowest-numbered neighbour)."""
    if pair is None:
        pair = (rm.outer_region, adjacent_to_outer(rm)[0])
    elif frozenset(pair) not in rm.adjacent_pairs or pair[0] == pair[1]:
        raise ValueError(f"regions {pair} are not adjacent")
    drop = set(pair)
    return [[e for i, e in enumerate(row) if i not in drop] for row in m]


def _bareiss(a: list) -> int:
    """Fraction-free integer determinant; ``a`` is consumed."""
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            if aik == 0:
                for j in range(k + 1, n):
                    ri[j] = ri[j] * akk // prev
            else:
                for j in range(k + 1, n):
                    ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[-1][-1] if n else 1


def _interpolate(values: list) -> list:
    """Coefficients of the polynomial through ``(t, values[t])`` for ``t = 0..n``.

    Newton forward differences on the integer nodes, kept integral by scaling
    with ``n!`` and dividing exactly at the end.
    """
    n = len(values) - 1
    diffs = list(values)
    forward = [diffs[0]]
    for _ in range(n):
        diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]
        forward.append(diffs[0])
    # n! * P(x) = sum_k forward[k] * (n!/k!) * x(x-1)...(x-k+1), by Horner
    ratio = [1] * (n + 1)  # n!/k!
    for k in range(n - 1, -1, -1):
        ratio[k] = ratio[k + 1] * (k + 1)
    coeffs = [0]
    for k in range(n, -1, -1):
        shifted = [0] + coeffs
        for i, c in enumerate(coeffs):
            shifted[i] -= k * c
        coeffs = shifted
        coeffs[0] += forward[k] * ratio[k]
    scale = ratio[0]
    out = []
    for c in coeffs:
        q, rem = divmod(c, scale)
        if rem:
            raise ArithmeticError("interpolated determinant is not integral")
        out.append(q)
    while out and out[-1] == 0:
        out.pop()
    return out


def poly_det(m: list) -> tuple:
    """Exact determinant of a square matrix of ``(c0, c1)`` = ``c0 + c1 x`` entries.

    Evaluates at ``x = 0..n`` with integer Bareiss elimination and interpolates.
    """
    n = len(m)
    if n == 0:
        return (1,)
    values = []
    for t in range(n + 1):
        values.append(_bareiss([[c0 + c1 * t for c0, c1 in row] for row in m]))
    return tuple(_interpolate(values))


def normalize(p) -> SerialPolynomial:
    """Divide out ``±x^q`` so the lowest-degree coefficient is a positive constant."""
    coeffs = list(p)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return ZERO_SERIAL
    q = next(i for i, c in enumerate(coeffs) if c != 0)
    coeffs = coeffs[q:]
    if coeffs[0] < 0:
        coeffs = [-c for c in coeffs]
    return SerialPolynomial(tuple(coeffs))


def _alexander(g, pair):
    if not is_connected_projection(g):
        return ZERO_SERIAL
    rm = regions(g)
    m0 = delete_adjacent_columns(alexander_matrix(g, rm), rm, pair)
    return normalize(poly_det(m0))


@lru_cache(maxsize=1 << 20)
def _alexander_cached(g):
    return _alexander(g, None)


def alexander(g: GridDiagram, pair: tuple = None) -> SerialPolynomial:
    """Serial number of ``g``; split (disconnected) projections give the zero serial."""
    if pair is None:
        return _alexander_cached(g)
    return _alexander(g, pair)
