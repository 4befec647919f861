"""Planar grid diagrams: validity, geometry and a canonical byte encoding.

A diagram of dimension ``d`` is stored as two permutations of ``range(d)``:
``xs[c]`` is the row of the X in column ``c`` and ``os[c]`` the row of the O.
Coordinates are ``(column, row)`` with row 0 at the bottom.  Vertical edges
run X -> O, horizontal edges run O -> X, and vertical strands always pass
over horizontal ones.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .errors import DimensionTooSmall, MalformedEncoding, NotAPermutation, NotDisjoint

ENCODING_VERSION = 1

X, O = "X", "O"


def _check(d, xs, os):
    if not isinstance(d, int) or d < 2:
        raise DimensionTooSmall(f"grid dimension must be >= 2, got {d!r}")
    for name, perm in (("piX", xs), ("piO", os)):
        if len(perm) != d:
            raise NotAPermutation(f"{name} has length {len(perm)}, expected {d}")
        if sorted(perm) != list(range(d)):
            raise NotAPermutation(f"{name}={list(perm)} is not a permutation of 0..{d - 1}")
    for c in range(d):
        if xs[c] == os[c]:
            raise NotDisjoint(f"X and O share cell ({c}, {xs[c]})")


@dataclass(frozen=True, order=True)
class GridDiagram:
    d: int
    xs: tuple
    os: tuple

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(self.xs))
        object.__setattr__(self, "os", tuple(self.os))
        _check(self.d, self.xs, self.os)

    @classmethod
    def from_markers(cls, d: int, markers: dict) -> "GridDiagram":
        """Build a diagram from a ``{(col, row): "X" | "O"}`` mapping."""
        xs = [None] * d
        os = [None] * d
        for (c, r), kind in markers.items():
            if not (0 <= c < d and 0 <= r < d):
                raise NotAPermutation(f"marker at ({c}, {r}) lies outside a {d}x{d} grid")
            target = xs if kind == X else os
            if target[c] is not None:
                raise NotAPermutation(f"column {c} has two {kind} markers")
            target[c] = r
        if None in xs or None in os:
            raise NotAPermutation("some column is missing a marker")
        return cls(d, tuple(xs), tuple(os))

    def markers(self) -> dict:
        out = {(c, r): X for c, r in enumerate(self.xs)}
        out.update({(c, r): O for c, r in enumerate(self.os)})
        return out

    def marker_at(self, col: int, row: int):
        if 0 <= col < self.d:
            if self.xs[col] == row:
                return X
            if self.os[col] == row:
                return O
        return None

    @cached_property
    def x_col_of_row(self) -> tuple:
        inv = [0] * self.d
        for c, r in enumerate(self.xs):
            inv[r] = c
        return tuple(inv)

    @cached_property
    def o_col_of_row(self) -> tuple:
        inv = [0] * self.d
        for c, r in enumerate(self.os):
            inv[r] = c
        return tuple(inv)

    def column_span(self, col: int) -> tuple:
        a, b = self.xs[col], self.os[col]
        return (a, b) if a < b else (b, a)

    def row_span(self, row: int) -> tuple:
        a, b = self.x_col_of_row[row], self.o_col_of_row[row]
        return (a, b) if a < b else (b, a)

    def rotated(self, quarter_turns: int = 1) -> "GridDiagram":
        """Rotate counterclockwise by ``90 * quarter_turns`` degrees, keeping marker types."""
        g = self
        for _ in range(quarter_turns % 4):
            n = g.d
            g = GridDiagram.from_markers(
                n, {(n - 1 - r, c): kind for (c, r), kind in g.markers().items()}
            )
        return g

    def __str__(self):
        return render(self)


class Crossing(NamedTuple):
    col: int
    row: int
    under_dir: str  # "east" | "west"
    over_dir: str  # "north" | "south"


def validate(d, xs, os) -> GridDiagram:
    """Check an arbitrary candidate record and return the diagram it encodes."""
    try:
        xs = tuple(int(v) for v in xs)
        os = tuple(int(v) for v in os)
    except (TypeError, ValueError) as exc:
        raise NotAPermutation(f"permutation entries must be integers: {exc}") from None
    return GridDiagram(d, xs, os)


def crossings(g: GridDiagram) -> list:
    """All vertical-over-horizontal crossings, sorted by (col, row)."""
    out = []
    for c in range(g.d):
        lo, hi = g.column_span(c)
        over = "north" if g.os[c] > g.xs[c] else "south"
        for r in range(lo + 1, hi):
            a, b = g.row_span(r)
            if a < c < b:
                under = "east" if g.x_col_of_row[r] > g.o_col_of_row[r] else "west"
                out.append(Crossing(c, r, under, over))
    return out


def components(g: GridDiagram) -> tuple:
    """Trace link components.

    Returns ``(count, labels)`` where ``labels`` maps each marker position to a
    component index.  Components are numbered by their smallest column so the
    labelling does not depend on where tracing starts.
    """
    seen = [-1] * g.d
    count = 0
    for start in range(g.d):
        if seen[start] >= 0:
            continue
        c = start
        while seen[c] < 0:
            seen[c] = count
            # X -> O up/down the column, then O -> X along the row of that O
            c = g.x_col_of_row[g.os[c]]
        count += 1
    labels = {}
    for c in range(g.d):
        labels[(c, g.xs[c])] = seen[c]
        labels[(c, g.os[c])] = seen[c]
    return count, labels


def component_cycles(g: GridDiagram) -> list:
    """Columns of each component in traversal order."""
    seen = [False] * g.d
    cycles = []
    for start in range(g.d):
        if seen[start]:
            continue
        cyc = []
        c = start
        while not seen[c]:
            seen[c] = True
            cyc.append(c)
            c = g.x_col_of_row[g.os[c]]
        cycles.append(cyc)
    return cycles


def is_connected_projection(g: GridDiagram) -> bool:
    """True iff the drawn curve is a single connected planar set."""
    n, labels = components(g)
    if n == 1:
        return True
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for cr in crossings(g):
        a = find(labels[(cr.col, g.xs[cr.col])])
        b = find(labels[(g.o_col_of_row[cr.row], cr.row)])
        parent[a] = b
    return len({find(i) for i in range(n)}) == 1


def encode(g: GridDiagram) -> bytes:
    return struct.pack(f"<BH{2 * g.d}H", ENCODING_VERSION, g.d, *g.xs, *g.os)


def decode(data: bytes) -> GridDiagram:
    if len(data) < 3:
        raise MalformedEncoding(f"encoding too short ({len(data)} bytes)")
    version, d = struct.unpack_from("<BH", data)
    if version != ENCODING_VERSION:
        raise MalformedEncoding(f"unknown encoding version {version}")
    if len(data) != 3 + 4 * d:
        raise MalformedEncoding(f"expected {3 + 4 * d} bytes for d={d}, got {len(data)}")
    vals = struct.unpack_from(f"<{2 * d}H", data, 3)
    return validate(d, vals[:d], vals[d:])


def from_hex(text: str) -> GridDiagram:
    try:
        raw = bytes.fromhex(text.strip())
    except ValueError:
        raise MalformedEncoding(f"not a hex string: {text!r}") from None
    return decode(raw)


def parse(text: str) -> GridDiagram:
    """Parse ``"xs;os"`` (comma separated rows, e.g. ``"0,1,2,3;2,3,0,1"``) or a hex encoding."""
    text = text.strip()
    if ";" in text:
        left, right = text.split(";", 1)
        try:
            xs = [int(v) for v in left.split(",")]
            os = [int(v) for v in right.split(",")]
        except ValueError:
            raise MalformedEncoding(f"cannot parse diagram {text!r}") from None
        return validate(len(xs), xs, os)
    return from_hex(text)


def format_perms(g: GridDiagram) -> str:
    return ",".join(map(str, g.xs)) + ";" + ",".join(map(str, g.os))


def render(g: GridDiagram) -> str:
    """ASCII picture, top row first.  ``|`` marks vertical over-strands at crossings."""
    rows = []
    for r in reversed(range(g.d)):
        a, b = g.row_span(r)
        cells = []
        for c in range(g.d):
            kind = g.marker_at(c, r)
            lo, hi = g.column_span(c)
            if kind:
                cells.append(kind)
            elif lo < r < hi:
                cells.append("|")
            elif a < c < b:
                cells.append("-")
            else:
                cells.append(".")
        rows.append(" ".join(cells))
    return "\n".join(rows)


def all_diagrams(d: int) -> Iterable[GridDiagram]:
    """Every grid diagram of dimension ``d`` (``d! * derangements(d)`` of them)."""
    from itertools import permutations

    perms = list(permutations(range(d)))
    for xs in perms:
        for os in perms:
            if all(a != b for a, b in zip(xs, os)):
                yield GridDiagram(d, xs, os)
