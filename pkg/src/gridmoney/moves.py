"""Grid moves: cyclic permutation, adjacent transposition, (de)stabilization.

These are the only transformations applied to diagrams anywhere in the
package.  Every function is pure and returns a new :class:`GridDiagram`.
"""

from __future__ import annotations

from collections import deque

from .errors import (
    ExplosionLimit,
    IllegalDestabilization,
    IllegalTransposition,
    NoMarkerAtPosition,
)
from .griddiag import O, X, GridDiagram

COLUMNS, ROWS = "columns", "rows"
DEFAULT_CLASS_CAP = 200_000


def _opposite(kind):
    return O if kind == X else X


def cyclic(g: GridDiagram, axis: str, direction: int) -> GridDiagram:
    """Shift every column right (``+1``) / left (``-1``), or every row up / down."""
    d = g.d
    if axis == COLUMNS:
        s = direction % d
        xs = tuple(g.xs[(c - s) % d] for c in range(d))
        os = tuple(g.os[(c - s) % d] for c in range(d))
    elif axis == ROWS:
        xs = tuple((r + direction) % d for r in g.xs)
        os = tuple((r + direction) % d for r in g.os)
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return GridDiagram(d, xs, os)


def _spans(g, axis, index):
    if axis == COLUMNS:
        return g.column_span(index), g.column_span(index + 1)
    if axis == ROWS:
        return g.row_span(index), g.row_span(index + 1)
    raise ValueError(f"unknown axis {axis!r}")


def transpose_legal(g: GridDiagram, axis: str, index: int) -> bool:
    """Closed marker spans of the two lines are disjoint or nested."""
    if not 0 <= index < g.d - 1:
        return False
    (a1, b1), (a2, b2) = _spans(g, axis, index)
    disjoint = b1 < a2 or b2 < a1
    nested = (a1 <= a2 and b2 <= b1) or (a2 <= a1 and b1 <= b2)
    return disjoint or nested


def transpose(g: GridDiagram, axis: str, index: int) -> GridDiagram:
    if not transpose_legal(g, axis, index):
        raise IllegalTransposition(f"cannot transpose {axis} {index} and {index + 1}")
    if axis == COLUMNS:
        xs, os = list(g.xs), list(g.os)
        xs[index], xs[index + 1] = xs[index + 1], xs[index]
        os[index], os[index + 1] = os[index + 1], os[index]
        return GridDiagram(g.d, tuple(xs), tuple(os))
    swap = {index: index + 1, index + 1: index}
    return GridDiagram(
        g.d, tuple(swap.get(r, r) for r in g.xs), tuple(swap.get(r, r) for r in g.os)
    )


def _stabilize0(g, x, y):
    kind = g.marker_at(x, y)
    if kind is None:
        raise NoMarkerAtPosition(f"no marker at ({x}, {y})")
    out = {}
    for (c, r), k in g.markers().items():
        if (c, r) == (x, y):
            continue
        out[(c + 1 if c > x else c, r + 1 if r > y else r)] = k
    out[(x + 1, y)] = kind
    out[(x, y + 1)] = kind
    out[(x + 1, y + 1)] = _opposite(kind)
    return GridDiagram.from_markers(g.d + 1, out)


def destabilize_pattern(g: GridDiagram, x: int, y: int):
    """Marker type to place at ``(x, y)`` if the upper-right L there collapses, else None."""
    if not (0 <= x < g.d - 1 and 0 <= y < g.d - 1) or g.d <= 2:
        return None
    if g.marker_at(x, y) is not None:
        return None  # occupied corner: either no L or a full 2x2 box
    right, up, corner = g.marker_at(x + 1, y), g.marker_at(x, y + 1), g.marker_at(x + 1, y + 1)
    if right is None or up is None or corner is None:
        return None
    if right != up or corner == right:
        return None
    return right


def _destabilize0(g, x, y):
    kind = destabilize_pattern(g, x, y)
    if kind is None:
        raise IllegalDestabilization(f"no collapsible L above-right of ({x}, {y})")
    out = {}
    for (c, r), k in g.markers().items():
        if c == x + 1 or r == y + 1:
            continue
        out[(c - 1 if c > x + 1 else c, r - 1 if r > y + 1 else r)] = k
    out[(x, y)] = kind
    return GridDiagram.from_markers(g.d - 1, out)


def stabilize(g: GridDiagram, x: int, y: int, k: int = 0) -> GridDiagram:
    """Replace the marker at ``(x, y)`` by an L of three markers.

    ``k`` selects the orientation: the diagram is rotated ``90 * k`` degrees
    counterclockwise, stabilized at ``(x, y)`` in rotated coordinates with the
    L to the upper right, and rotated back.
    """
    if k % 4 == 0:
        return _stabilize0(g, x, y)
    return _stabilize0(g.rotated(k), x, y).rotated(-k)


def destabilize(g: GridDiagram, x: int, y: int, k: int = 0) -> GridDiagram:
    """Collapse the L to the upper right of the empty cell ``(x, y)`` (rotated by ``k``)."""
    if k % 4 == 0:
        return _destabilize0(g, x, y)
    return _destabilize0(g.rotated(k), x, y).rotated(-k)


def toggle_L(g: GridDiagram, x: int, y: int, k: int):
    """Stabilize if a marker sits at ``(x, y)``, destabilize if an L can collapse there.

    Coordinates are read in the frame rotated by ``k`` quarter turns.  Returns
    the new diagram, or None when neither move applies.  Applying the same
    parameters to the result undoes the move.
    """
    h = g.rotated(k) if k % 4 else g
    if not (0 <= x < h.d and 0 <= y < h.d):
        return None
    if h.marker_at(x, y) is not None:
        out = _stabilize0(h, x, y)
    elif destabilize_pattern(h, x, y) is not None:
        out = _destabilize0(h, x, y)
    else:
        return None
    return out.rotated(-k) if k % 4 else out


def neighbours(g: GridDiagram, dmax: int):
    """Every diagram one legal grid move away with dimension <= ``dmax``."""
    out = set()
    for axis in (COLUMNS, ROWS):
        for direction in (1, -1):
            out.add(cyclic(g, axis, direction))
        for i in range(g.d - 1):
            if transpose_legal(g, axis, i):
                out.add(transpose(g, axis, i))
    for k in range(4):
        for x in range(g.d):
            for y in range(g.d):
                h = toggle_L(g, x, y, k)
                if h is not None and h.d <= dmax:
                    out.add(h)
    out.discard(g)
    return out


def enumerate_class(g: GridDiagram, dmax: int, cap: int = DEFAULT_CLASS_CAP) -> set:
    """Closure of ``g`` under legal grid moves that keep the dimension <= ``dmax``."""
    if g.d > dmax:
        raise ValueError(f"start diagram has d={g.d} > dmax={dmax}")
    seen = {g}
    queue = deque([g])
    while queue:
        cur = queue.popleft()
        for nxt in neighbours(cur, dmax):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > cap:
                    raise ExplosionLimit(f"move class exceeds {cap} diagrams")
                queue.append(nxt)
    return seen
