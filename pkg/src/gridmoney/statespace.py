"""Sparse real state vectors over grid diagrams and over labelled configurations.

A *diagram state* maps ``GridDiagram -> amplitude``.  A *labelled state*
(the image of the expansion unitary) maps each diagram to a dense vector of
amplitudes over its labels ``0 .. q(d(G)) - 1``.  Labelled states are dumped
as run-length intervals of equal amplitude.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .alexander import SerialPolynomial, alexander
from .errors import ZeroProbability
from .griddiag import GridDiagram, encode, from_hex

NORM_TOL = 1e-12


class SparseState:
    """Immutable map from diagrams to amplitudes (floats) or label vectors."""

    __slots__ = ("_amps", "labelled")

    def __init__(self, amplitudes: dict, labelled: bool = False):
        if labelled:
            amps = {g: np.asarray(v, dtype=float) for g, v in amplitudes.items()}
            for v in amps.values():
                v.setflags(write=False)
        else:
            amps = {g: float(a) for g, a in amplitudes.items()}
        self._amps = amps
        self.labelled = labelled

    def __len__(self):
        return len(self._amps)

    def __iter__(self):
        return iter(self._amps)

    def __contains__(self, g):
        return g in self._amps

    def __getitem__(self, g):
        return self._amps[g]

    def get(self, g, default=None):
        return self._amps.get(g, default)

    def items(self):
        return self._amps.items()

    def diagrams(self):
        return self._amps.keys()

    def weight_of(self, g) -> float:
        a = self._amps.get(g)
        if a is None:
            return 0.0
        return float(a @ a) if self.labelled else a * a

    def norm2(self) -> float:
        if self.labelled:
            return math.fsum(float(v @ v) for v in self._amps.values())
        return math.fsum(a * a for a in self._amps.values())

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def scaled(self, factor: float) -> "SparseState":
        return SparseState({g: a * factor for g, a in self._amps.items()}, self.labelled)

    def normalized(self) -> "SparseState":
        n = self.norm()
        if n == 0:
            raise ZeroProbability("cannot normalise the zero vector")
        return self.scaled(1.0 / n)

    def inner(self, other: "SparseState") -> float:
        if self.labelled != other.labelled:
            raise TypeError("cannot take inner product of diagram and labelled states")
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        terms = []
        for g, a in small.items():
            b = big.get(g)
            if b is not None:
                terms.append(float(a @ b) if self.labelled else a * b)
        return math.fsum(terms)

    def fidelity(self, other: "SparseState") -> float:
        """``|<self|other>|^2 / (|self|^2 |other|^2)``."""
        return self.inner(other) ** 2 / (self.norm2() * other.norm2())

    def filtered(self, keep: Callable[[GridDiagram], bool]) -> "SparseState":
        return SparseState({g: a for g, a in self._amps.items() if keep(g)}, self.labelled)

    def allclose(self, other: "SparseState", tol: float = NORM_TOL) -> bool:
        if self.labelled != other.labelled:
            return False
        for g in set(self._amps) | set(other._amps):
            a, b = self._amps.get(g), other._amps.get(g)
            if self.labelled:
                a = np.zeros(0) if a is None else a
                b = np.zeros(0) if b is None else b
                n = max(len(a), len(b))
                a = np.pad(a, (0, n - len(a)))
                b = np.pad(b, (0, n - len(b)))
                if np.max(np.abs(a - b), initial=0.0) > tol:
                    return False
            elif abs((a or 0.0) - (b or 0.0)) > tol:
                return False
        return True

    def __repr__(self):
        kind = "labelled" if self.labelled else "diagram"
        return f"<SparseState {kind} support={len(self)} norm={self.norm():.15g}>"


def basis_state(g: GridDiagram) -> SparseState:
    return SparseState({g: 1.0})


def expand(state: SparseState, q: Callable[[int], int]) -> SparseState:
    """Apply the expansion unitary: ``|G>|0> -> |G> (1/sqrt q) sum_i |i>``."""
    if state.labelled:
        raise TypeError("state is already labelled")
    out = {}
    for g, a in state.items():
        n = q(g.d)
        if n <= 0:
            raise ValueError(f"q({g.d}) = {n}: diagram lies outside the configuration space")
        out[g] = np.full(n, a / math.sqrt(n))
    return SparseState(out, labelled=True)


def contract(state: SparseState, q: Callable[[int], int]) -> tuple:
    """Project onto the image of the expansion unitary and invert it.

    Returns ``(diagram_state, residual)`` where ``residual`` is the squared
    weight orthogonal to the uniform-label subspace.  The returned state is
    not renormalised.
    """
    if not state.labelled:
        raise TypeError("state is not labelled")
    out = {}
    residual = []
    for g, v in state.items():
        n = q(g.d)
        if len(v) != n:
            raise ValueError(f"label vector of length {len(v)} for q={n}")
        a = math.fsum(v) / math.sqrt(n)
        out[g] = a
        residual.append(float(v @ v) - a * a)
    return SparseState(out), max(math.fsum(residual), 0.0)


def measure_alexander(state: SparseState, serial: SerialPolynomial) -> tuple:
    """Probability of reading ``serial`` and the renormalised post-measurement state."""
    part = state.filtered(lambda g: alexander(g) == serial)
    p = part.norm2() / state.norm2()
    if p == 0:
        raise ZeroProbability(f"serial {serial} has zero probability")
    return p, part.normalized()


def dimension_window(dbar: int) -> tuple:
    """Inclusive dimension range accepted by the projector: ``[ceil(D/2), floor(3D/2)]``."""
    return (dbar + 1) // 2, (3 * dbar) // 2


def project_dimension(state: SparseState, dbar: int) -> tuple:
    lo, hi = dimension_window(dbar)
    part = state.filtered(lambda g: lo <= g.d <= hi)
    p = part.norm2() / state.norm2()
    if p == 0:
        raise ZeroProbability(f"no weight on dimensions {lo}..{hi}")
    return p, part.normalized()


def group_by_serial(state: SparseState) -> dict:
    """Split a diagram state into unnormalised components of equal serial."""
    groups = {}
    for g, a in state.items():
        groups.setdefault(alexander(g), {})[g] = a
    return {p: SparseState(amps, state.labelled) for p, amps in groups.items()}


def _runs(v: np.ndarray):
    start = 0
    for i in range(1, len(v) + 1):
        if i == len(v) or v[i] != v[start]:
            yield start, i, float(v[start])
            start = i


def dump_state(state: SparseState) -> str:
    """Text dump, one line per (diagram, label run), in canonical key order.

    Labelled states give ``hex start end amplitude`` (``end`` exclusive);
    diagram states give ``hex amplitude``.
    """
    lines = []
    for g in sorted(state.diagrams(), key=encode):
        h = encode(g).hex()
        if state.labelled:
            for start, end, a in _runs(state[g]):
                lines.append(f"{h} {start} {end} {a!r}")
        else:
            lines.append(f"{h} {state[g]!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def load_state(text: str, q: Callable[[int], int] = None) -> SparseState:
    """Inverse of :func:`dump_state`; labelled dumps need ``q`` to size label vectors."""
    amps = {}
    labelled = None
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if labelled is None:
            labelled = len(parts) == 4
        if len(parts) != (4 if labelled else 2):
            raise ValueError(f"line {lineno}: expected {4 if labelled else 2} fields")
        g = from_hex(parts[0])
        if labelled:
            if q is None:
                raise ValueError("labelled dumps need the q table")
            start, end, a = int(parts[1]), int(parts[2]), float(parts[3])
            v = amps.setdefault(g, np.zeros(q(g.d)))
            if not 0 <= start < end <= len(v):
                raise ValueError(f"line {lineno}: label run {start}..{end} out of range")
            v[start:end] = a
        else:
            if g in amps:
                raise ValueError(f"line {lineno}: duplicate diagram")
            amps[g] = float(parts[1])
    return SparseState(amps, labelled=bool(labelled))
