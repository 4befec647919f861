"""Minting: dimension weights, the initial superposition and serial measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import mpmath
import numpy as np

from .alexander import SerialPolynomial, alexander
from .errors import StateTooLarge
from .griddiag import GridDiagram
from .statespace import SparseState, group_by_serial

WEIGHT_DIGITS = 64
DEFAULT_EXACT_CAP = 3
EXACT, CLASSICAL = "exact", "classical"


@lru_cache(maxsize=None)
def derangements(d: int) -> int:
    """Fixed-point-free permutations of ``d`` elements, ``D(d) = d D(d-1) + (-1)^d``."""
    if d < 0:
        raise ValueError("d must be non-negative")
    if d == 0:
        return 1
    return d * derangements(d - 1) + (-1) ** d


def disjoint_pairs(d: int) -> int:
    """Number of grid diagrams of dimension ``d``."""
    return math.factorial(d) * derangements(d) if d >= 2 else 0


def y_weight(d: int, dbar: int):
    """Unnormalised dimension weight as a 64-digit mpmath float (0 outside ``[2, 2*dbar]``)."""
    with mpmath.workdps(WEIGHT_DIGITS):
        if not 2 <= d <= 2 * dbar:
            return mpmath.mpf(0)
        return mpmath.exp(mpmath.mpf(-((d - dbar) ** 2)) / (2 * dbar)) / disjoint_pairs(d)


@lru_cache(maxsize=None)
def q_table(dbar: int) -> dict:
    """``{d: q(d)}`` for ``d`` in ``[2, 2*dbar]``."""
    if dbar < 1:
        raise ValueError("dbar must be positive")
    with mpmath.workdps(WEIGHT_DIGITS):
        ys = {d: y_weight(d, dbar) for d in range(2, 2 * dbar + 1)}
        ymin = min(ys.values())
        return {d: int(mpmath.ceil(y / ymin)) for d, y in ys.items()}


def q_of_d(d: int, dbar: int) -> int:
    return q_table(dbar).get(d, 0)


def q_max(dbar: int) -> int:
    return max(q_table(dbar).values())


def q_function(dbar: int):
    table = q_table(dbar)
    return lambda d: table.get(d, 0)


def dimension_distribution(dbar: int) -> dict:
    """Exact probability of each dimension on the initial state, ``∝ q(d) d! D(d)``."""
    w = {d: q * disjoint_pairs(d) for d, q in q_table(dbar).items()}
    total = sum(w.values())
    return {d: Fraction(v, total) for d, v in w.items()}


@dataclass(frozen=True)
class MintParams:
    dbar: int
    mode: str = EXACT
    seed: int = 0
    exact_cap: int = DEFAULT_EXACT_CAP

    def __post_init__(self):
        if not isinstance(self.dbar, int) or self.dbar < 2:
            raise ValueError(f"security parameter must be an integer >= 2, got {self.dbar!r}")
        if self.mode not in (EXACT, CLASSICAL):
            raise ValueError(f"unknown mint mode {self.mode!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass
class MoneyBill:
    serial: SerialPolynomial
    params: MintParams
    state: SparseState = None  # exact mode
    certificate: GridDiagram = None  # classical mode
    attempts: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.serial.is_zero:
            raise ValueError("a bill never carries the zero serial")
        if (self.state is None) == (self.certificate is None):
            raise ValueError("a bill carries exactly one of state or certificate")


def _check_cap(dbar, cap):
    if dbar > cap:
        raise StateTooLarge(f"exact states are capped at dbar <= {cap}, got {dbar}")


@lru_cache(maxsize=4)
def _initial_state(dbar: int) -> SparseState:
    table = q_table(dbar)
    amps = {}
    for d in range(2, 2 * dbar + 1):
        perms = list(permutations(range(d)))
        root_q = math.sqrt(table[d])
        for xs in perms:
            for os in perms:
                if all(a != b for a, b in zip(xs, os)):
                    amps[GridDiagram(d, xs, os)] = root_q
    return SparseState(amps).normalized()


def build_initial_state(dbar: int, cap: int = DEFAULT_EXACT_CAP) -> SparseState:
    """All grid diagrams with ``2 <= d <= 2*dbar``, amplitude ∝ ``sqrt(q(d))``."""
    _check_cap(dbar, cap)
    return _initial_state(dbar)


@lru_cache(maxsize=4)
def _serial_groups(dbar):
    groups = group_by_serial(_initial_state(dbar))
    return {p: (s.norm2(), s) for p, s in groups.items()}


def serial_groups(dbar: int, cap: int = DEFAULT_EXACT_CAP) -> dict:
    """``{serial: (probability, unnormalised component)}`` for the initial state."""
    _check_cap(dbar, cap)
    return _serial_groups(dbar)


def money_state(serial: SerialPolynomial, dbar: int, cap: int = DEFAULT_EXACT_CAP) -> SparseState:
    """The normalised money state for ``serial``."""
    groups = serial_groups(dbar, cap)
    if serial not in groups:
        raise KeyError(f"no diagram up to d={2 * dbar} has serial {serial}")
    return groups[serial][1].normalized()


def _rng(seed):
    return np.random.default_rng(seed)


def mint_exact(params: MintParams) -> MoneyBill:
    """Measure the serial on the initial state; retry on the zero polynomial."""
    groups = serial_groups(params.dbar, params.exact_cap)
    serials = sorted(groups, key=lambda p: (len(p.coeffs), p.coeffs))
    probs = np.array([groups[p][0] for p in serials])
    probs = probs / probs.sum()
    rng = _rng(params.seed)
    attempts = 0
    while True:
        attempts += 1
        p = serials[rng.choice(len(serials), p=probs)]
        if not p.is_zero:
            return MoneyBill(p, params, state=groups[p][1].normalized(), attempts=attempts)


def sample_dimension(dbar: int, rng) -> int:
    dist = dimension_distribution(dbar)
    ds = sorted(dist)
    return int(ds[rng.choice(len(ds), p=np.array([float(dist[d]) for d in ds]))])


def sample_disjoint_pair(d: int, rng) -> tuple:
    """Uniform grid diagram of dimension ``d`` by rejection; returns ``(G, tries)``."""
    tries = 0
    while True:
        tries += 1
        xs = rng.permutation(d)
        os = rng.permutation(d)
        if np.all(xs != os):
            return GridDiagram(d, tuple(int(v) for v in xs), tuple(int(v) for v in os)), tries


def mint_classical(params: MintParams) -> MoneyBill:
    """Classical stand-in: one diagram drawn from the initial-state distribution.

    The bill carries that diagram as a certificate.  It is not a
    superposition and is not expected to pass exact verification.
    """
    rng = _rng(params.seed)
    attempts = 0
    while True:
        attempts += 1
        d = sample_dimension(params.dbar, rng)
        g, _ = sample_disjoint_pair(d, rng)
        p = alexander(g)
        if not p.is_zero:
            return MoneyBill(p, params, certificate=g, attempts=attempts)


def mint(params: MintParams) -> MoneyBill:
    return mint_exact(params) if params.mode == EXACT else mint_classical(params)
