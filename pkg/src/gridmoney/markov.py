"""The verification Markov chain on configurations ``(G, i)``.

Each update draws ``s = (j, w, x, y, k)`` uniformly from

    {1..8} x {0..qmax^2} x {0..2D-1} x {0..2D-1} x {0..3}

and applies a fixed permutation ``P_s`` of the configuration space.  Labels
are 0-based, so ``i`` ranges over ``0 .. q(d(G)) - 1`` and a diagram-changing
move is accepted only when ``i < q(d(G'))``.

:func:`apply_B` applies the averaged operator ``B = |S|^-1 sum_s P_s`` to a
labelled state.  Since the uniform measure on ``S`` factorises, ``B`` is the
mean over ``j`` of operators that each average only the parameters that
move ``j`` reads.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import SpaceTooLarge
from .griddiag import GridDiagram, all_diagrams
from .mint import q_max, q_table
from .moves import COLUMNS, ROWS, cyclic, toggle_L, transpose, transpose_legal
from .statespace import SparseState

N_MOVE_TYPES = 8
EXHAUSTIVE_LIMIT = 20_000


class MoveId(NamedTuple):
    j: int
    w: int = 0
    x: int = 0
    y: int = 0
    k: int = 0


class Config(NamedTuple):
    G: GridDiagram
    i: int


def move_set_size(dbar: int) -> int:
    return N_MOVE_TYPES * (q_max(dbar) ** 2 + 1) * (2 * dbar) ** 2 * 4


def check_move(s: MoveId, dbar: int):
    side = 2 * dbar
    if not (
        1 <= s.j <= N_MOVE_TYPES
        and 0 <= s.w <= q_max(dbar) ** 2
        and 0 <= s.x < side
        and 0 <= s.y < side
        and 0 <= s.k < 4
    ):
        raise ValueError(f"move {s} outside the move set for dbar={dbar}")


def check_config(c: Config, dbar: int):
    q = q_table(dbar).get(c.G.d, 0)
    if not 0 <= c.i < q:
        raise ValueError(f"label {c.i} outside 0..{q - 1} for d={c.G.d}")


class DiagramMoves(NamedTuple):
    cyclic: tuple  # targets of j = 2, 3, 4, 5
    columns: tuple  # j = 6 target for each x (G itself when illegal)
    rows: tuple  # j = 7 target for each y
    ells: tuple  # j = 8 target for each (x, y, k) in row-major order, None when inapplicable


@lru_cache(maxsize=1 << 18)
def diagram_moves(g: GridDiagram, dbar: int) -> DiagramMoves:
    side = 2 * dbar
    cyc = (cyclic(g, COLUMNS, 1), cyclic(g, COLUMNS, -1), cyclic(g, ROWS, 1), cyclic(g, ROWS, -1))

    def swaps(axis):
        return tuple(
            transpose(g, axis, t) if t + 1 < g.d and transpose_legal(g, axis, t) else g
            for t in range(side)
        )

    ells = tuple(toggle_L(g, x, y, k) for x in range(side) for y in range(side) for k in range(4))
    return DiagramMoves(cyc, swaps(COLUMNS), swaps(ROWS), ells)


def _ell_index(x, y, k, side):
    return (x * side + y) * 4 + k


def apply_move(c: Config, s: MoveId, dbar: int) -> Config:
    """One permutation ``P_s`` of the configuration space."""
    g, i = c
    if s.j == 1:
        return Config(g, (i + s.w) % q_table(dbar)[g.d])
    mv = diagram_moves(g, dbar)
    if 2 <= s.j <= 5:
        return Config(mv.cyclic[s.j - 2], i)
    if s.j == 6:
        return Config(mv.columns[s.x], i)
    if s.j == 7:
        return Config(mv.rows[s.y], i)
    if s.j == 8:
        h = mv.ells[_ell_index(s.x, s.y, s.k, 2 * dbar)]
        if h is not None and i < q_table(dbar).get(h.d, 0):
            return Config(h, i)
        return c
    raise ValueError(f"move type j={s.j} not in 1..8")


def random_move(rng, dbar: int) -> MoveId:
    side = 2 * dbar
    return MoveId(
        int(rng.integers(1, N_MOVE_TYPES + 1)),
        int(rng.integers(0, q_max(dbar) ** 2 + 1)),
        int(rng.integers(0, side)),
        int(rng.integers(0, side)),
        int(rng.integers(0, 4)),
    )


def chain_step(c: Config, rng, dbar: int) -> tuple:
    """Draw ``s`` uniformly and apply it; returns ``(new_config, s)``."""
    s = random_move(rng, dbar)
    return apply_move(c, s, dbar), s


@dataclass
class ChainStats:
    steps: int = 0
    accepted: Counter = field(default_factory=Counter)  # j -> steps that changed the config
    proposed: Counter = field(default_factory=Counter)
    dimensions: Counter = field(default_factory=Counter)
    distinct: set = field(default_factory=set, repr=False)
    final: Config = None

    def report(self) -> str:
        lines = [f"steps {self.steps}"]
        for j in range(1, N_MOVE_TYPES + 1):
            lines.append(f"move {j} accepted {self.accepted[j]} of {self.proposed[j]}")
        for d in sorted(self.dimensions):
            lines.append(f"dimension {d} visits {self.dimensions[d]}")
        lines.append(f"distinct diagrams {len(self.distinct)}")
        return "\n".join(lines)


def run_chain(start: Config, steps: int, dbar: int, rng) -> ChainStats:
    check_config(start, dbar)
    stats = ChainStats()
    cur = start
    stats.distinct.add(cur.G)
    stats.dimensions[cur.G.d] += 1
    for _ in range(steps):
        nxt, s = chain_step(cur, rng, dbar)
        stats.proposed[s.j] += 1
        if nxt != cur:
            stats.accepted[s.j] += 1
        cur = nxt
        stats.distinct.add(cur.G)
        stats.dimensions[cur.G.d] += 1
    stats.steps = steps
    stats.final = cur
    return stats


def residue_counts(q: int, dbar: int) -> list:
    """How many ``w`` in ``0..qmax^2`` fall in each residue class mod ``q``."""
    size = q_max(dbar) ** 2 + 1
    return [(size - 1 - t) // q + 1 for t in range(q)]


def _label_average(v: np.ndarray, dbar: int) -> np.ndarray:
    """Average of ``v`` shifted by every ``w``: weight of shift ``r`` is its residue count."""
    q = len(v)
    size = q_max(dbar) ** 2 + 1
    base, extra = divmod(size, q)
    out = np.full(q, base * math.fsum(v))
    if extra:
        # shifts r < extra carry one more w each: a circular box sum of width `extra`
        ext = np.concatenate(([0.0], np.cumsum(np.concatenate((v, v)))))
        t = np.arange(q)
        out += ext[t + q + 1] - ext[t + q + 1 - extra]
    return out / size


def apply_B(state: SparseState, dbar: int) -> SparseState:
    """Exact ``B|phi>`` for a labelled state (result not renormalised)."""
    if not state.labelled:
        raise TypeError("apply_B acts on labelled (expanded) states")
    table = q_table(dbar)
    side = 2 * dbar
    c_fixed = 1.0 / N_MOVE_TYPES
    c_swap = c_fixed / side
    c_ell = c_fixed / (4 * side * side)
    out = {}

    def add(g, v, scale, stop=None):
        acc = out.get(g)
        if acc is None:
            acc = out[g] = np.zeros(table[g.d])
        if stop is None:
            acc += scale * v
        else:
            acc[:stop] += scale * v[:stop]

    for g in sorted(state.diagrams()):
        v = state[g]
        q = len(v)
        mv = diagram_moves(g, dbar)
        add(g, _label_average(v, dbar), c_fixed)
        for h in mv.cyclic:
            add(h, v, c_fixed)
        for h in mv.columns + mv.rows:
            add(h, v, c_swap)
        stay = np.zeros(q)
        for h in mv.ells:
            if h is None:
                stay += v
                continue
            n = min(table.get(h.d, 0), q)
            if n:
                add(h, v, c_ell, stop=n)
            stay[n:] += v[n:]
        add(g, stay, c_ell)
    return SparseState(out, labelled=True)


def transition_row(c: Config, dbar: int) -> dict:
    """Classical transition probabilities out of ``c`` (grouped, exact rationals as floats)."""
    g, i = c
    table = q_table(dbar)
    side = 2 * dbar
    size = q_max(dbar) ** 2 + 1
    out = Counter()
    q = table[g.d]
    for r, n in enumerate(residue_counts(q, dbar)):
        out[Config(g, (i + r) % q)] += n / (N_MOVE_TYPES * size)
    mv = diagram_moves(g, dbar)
    for h in mv.cyclic:
        out[Config(h, i)] += 1 / N_MOVE_TYPES
    for h in mv.columns + mv.rows:
        out[Config(h, i)] += 1 / (N_MOVE_TYPES * side)
    for h in mv.ells:
        tgt = Config(h, i) if h is not None and i < table.get(h.d, 0) else c
        out[tgt] += 1 / (N_MOVE_TYPES * 4 * side * side)
    return dict(out)


def configuration_space(dbar: int, limit: int = EXHAUSTIVE_LIMIT) -> list:
    """Every configuration ``(G, i)`` with ``2 <= d <= 2*dbar`` and ``i < q(d)``."""
    from .mint import disjoint_pairs

    table = q_table(dbar)
    total = sum(q * disjoint_pairs(d) for d, q in table.items())
    if total > limit:
        raise SpaceTooLarge(f"configuration space has {total} elements (limit {limit})")
    return [Config(g, i) for d in sorted(table) for g in all_diagrams(d) for i in range(table[d])]


def is_permutation_check(s: MoveId, dbar: int, space: list = None) -> bool:
    """True iff ``P_s`` maps the exhaustive configuration space bijectively onto itself."""
    check_move(s, dbar)
    if space is None:
        space = configuration_space(dbar)
    members = set(space)
    image = {apply_move(c, s, dbar) for c in space}
    return len(image) == len(space) and image == members


def B_matrix(dbar: int, space: list = None) -> tuple:
    """Dense ``B`` on the exhaustive space, as ``(matrix, index)`` with ``B[target, source]``."""
    if space is None:
        space = configuration_space(dbar)
    index = {c: n for n, c in enumerate(space)}
    mat = np.zeros((len(space), len(space)))
    for c in space:
        for tgt, p in transition_row(c, dbar).items():
            mat[index[tgt], index[c]] += p
    return mat, index


def labelled_from_configs(weights: dict, dbar: int) -> SparseState:
    """Build a labelled state from ``{Config: amplitude}``."""
    table = q_table(dbar)
    out = {}
    for (g, i), a in weights.items():
        v = out.setdefault(g, np.zeros(table[g.d]))
        v[i] = a
    return SparseState(out, labelled=True)


def configs_of(state: SparseState) -> dict:
    """Inverse of :func:`labelled_from_configs`, dropping zero amplitudes."""
    return {Config(g, int(i)): float(v[i]) for g, v in state.items() for i in np.flatnonzero(v)}


def uniform_class_state(diagrams, dbar: int) -> SparseState:
    """Uniform superposition over every labelled configuration of ``diagrams``."""
    table = q_table(dbar)
    total = sum(table.get(g.d, 0) for g in diagrams)
    amp = 1.0 / math.sqrt(total)
    return SparseState({g: np.full(table[g.d], amp) for g in diagrams}, labelled=True)
