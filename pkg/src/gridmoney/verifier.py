"""Verification of money states and the attack experiments built on it.

Exact mode propagates the accepted branch of every measurement and reports
its probability.  Sampled mode draws each outcome, stopping at the first
rejection.  Measuring the move-register projector after the controlled
permutation is the same as applying ``B`` and renormalising, so the move
register itself is never simulated.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .alexander import SerialPolynomial, alexander
from .errors import SerialMismatch, StateTooLarge, ZeroProbability
from .griddiag import GridDiagram
from .markov import apply_B
from .mint import CLASSICAL, EXACT, MintParams, MoneyBill, mint, q_function
from .moves import enumerate_class
from .statespace import (
    SparseState,
    basis_state,
    contract,
    dimension_window,
    expand,
    measure_alexander,
    project_dimension,
)

SAMPLED = "sampled"
DEFAULT_ROUNDS = 10
DEFAULT_THRESHOLD = 0.99
DEFAULT_SUPPORT_CAP = 50_000


@dataclass(frozen=True)
class VerifierParams:
    dbar: int
    rounds: int = DEFAULT_ROUNDS
    mode: str = EXACT
    seed: int = 0
    support_cap: int = DEFAULT_SUPPORT_CAP
    threshold: float = DEFAULT_THRESHOLD  # exact mode accepts at or above this probability

    def __post_init__(self):
        if self.dbar < 2:
            raise ValueError("dbar must be >= 2")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.mode not in (EXACT, SAMPLED):
            raise ValueError(f"unknown verifier mode {self.mode!r}")


@dataclass
class MarkovResult:
    """Outcome of the Markov-chain stage on one input state."""

    round_probabilities: list  # conditional success probability of each round
    curve: list  # cumulative acceptance after rounds 1..r
    post_state: SparseState  # diagram state after U^dagger, renormalised (None if rejected)
    residual: float  # weight outside the image of U after the last round
    damage: float  # 1 - fidelity(post_state, input)
    accepted: bool = True  # sampled mode only

    @property
    def acceptance(self) -> float:
        return self.curve[-1] if self.curve else 1.0


@dataclass
class VerificationReport:
    mode: str
    dbar: int
    rounds: int
    serial: SerialPolynomial
    step_probabilities: dict = field(default_factory=dict)  # "step0", "step1", "step2"
    round_probabilities: list = field(default_factory=list)
    acceptance_probability: float = 0.0  # product over every step (exact mode)
    accepted: bool = False
    failed_step: str = None
    post_state: SparseState = field(default=None, repr=False)
    damage: float = 1.0

    @property
    def markov_acceptance(self) -> float:
        return math.prod(self.round_probabilities) if self.round_probabilities else 0.0

    def to_text(self) -> str:
        """Fixed-order text form used by the CLI and golden files."""
        lines = [
            f"mode {self.mode}",
            f"dbar {self.dbar}",
            f"rounds {self.rounds}",
            f"serial {self.serial.text()}",
        ]
        for step in ("step0", "step1", "step2"):
            p = self.step_probabilities.get(step)
            lines.append(f"{step} {'-' if p is None else f'{p:.15g}'}")
        for n, p in enumerate(self.round_probabilities, 1):
            lines.append(f"round {n} {p:.15g}")
        lines.append(f"markov_acceptance {self.markov_acceptance:.15g}")
        lines.append(f"acceptance_probability {self.acceptance_probability:.15g}")
        lines.append(f"damage {self.damage:.6e}")
        lines.append(f"accepted {'yes' if self.accepted else 'no'}")
        lines.append(f"failed_step {self.failed_step or '-'}")
        return "\n".join(lines) + "\n"


def _as_state(subject) -> SparseState:
    if isinstance(subject, MoneyBill):
        if subject.state is None:
            raise TypeError("classical bills carry no quantum state; verify a state instead")
        return subject.state
    if isinstance(subject, GridDiagram):
        return basis_state(subject)
    return subject


def check_encoding(state: SparseState):
    """Step 0: every basis key must be a well-formed grid diagram."""
    for g in state.diagrams():
        if not isinstance(g, GridDiagram):
            raise TypeError(f"basis key {g!r} is not a grid diagram")
    return 1.0


def markov_stage(state: SparseState, dbar: int, rounds: int, rng=None) -> MarkovResult:
    """Apply ``B`` ``rounds`` times to ``U|phi>|0>`` and track each round's outcome probability.

    With ``rng`` given, each round's outcome is drawn and the stage stops at
    the first failure.
    """
    if state.labelled:
        raise TypeError("markov_stage takes a diagram state")
    q = q_function(dbar)
    phi = state.normalized()
    cur = expand(phi, q)
    probs, curve = [], []
    total = 1.0
    for _ in range(rounds):
        nxt = apply_B(cur, dbar)
        p = min(nxt.norm2() / cur.norm2(), 1.0)
        probs.append(p)
        total *= p
        curve.append(total)
        if rng is not None and rng.random() >= p:
            return MarkovResult(probs, curve, None, 0.0, 1.0, accepted=False)
        if p == 0:
            return MarkovResult(probs, curve, None, 0.0, 1.0, accepted=False)
        cur = nxt.normalized()
    post, residual = contract(cur, q)
    post = post.normalized()
    return MarkovResult(probs, curve, post, residual, 1.0 - post.fidelity(phi))


def verify(subject, serial: SerialPolynomial, params: VerifierParams, rng=None) -> VerificationReport:
    """Run verification steps 0-3 on a bill or diagram state.

    Exact mode reports the probability of each outcome along the accepting
    branch.  Sampled mode draws outcomes from ``rng`` (or a generator seeded
    by ``params.seed``).  Raises :class:`SerialMismatch` when the claimed
    serial has no weight in the state.
    """
    state = _as_state(subject)
    if len(state) > params.support_cap:
        raise StateTooLarge(f"state support {len(state)} exceeds cap {params.support_cap}")
    sampled = params.mode == SAMPLED
    if sampled and rng is None:
        rng = np.random.default_rng(params.seed)
    report = VerificationReport(params.mode, params.dbar, params.rounds, serial)
    report.step_probabilities["step0"] = check_encoding(state)

    try:
        p1, s1 = measure_alexander(state, serial)
    except ZeroProbability:
        raise SerialMismatch(f"state has no weight on serial {serial.text()}") from None
    report.step_probabilities["step1"] = p1
    if sampled and rng.random() >= p1:
        report.failed_step = "step1"
        return report

    try:
        p2, s2 = project_dimension(s1, params.dbar)
    except ZeroProbability:
        p2, s2 = 0.0, None
    report.step_probabilities["step2"] = p2
    if s2 is None or (sampled and rng.random() >= p2):
        report.failed_step = "step2"
        return report

    mk = markov_stage(s2, params.dbar, params.rounds, rng if sampled else None)
    report.round_probabilities = mk.round_probabilities
    report.acceptance_probability = p1 * p2 * mk.acceptance
    if not mk.accepted or mk.post_state is None:
        report.failed_step = "step3"
        return report
    report.post_state = mk.post_state
    report.damage = 1.0 - mk.post_state.fidelity(state.normalized())
    report.accepted = sampled or report.acceptance_probability >= params.threshold
    if not report.accepted:
        report.failed_step = "threshold"
    return report


def exact_step_probabilities(report: VerificationReport) -> list:
    """Sequence of outcome probabilities a sampled run draws against."""
    seq = [report.step_probabilities.get("step1", 0.0), report.step_probabilities.get("step2", 0.0)]
    return seq + list(report.round_probabilities)


def sample_acceptance(report: VerificationReport, trials: int, rng) -> int:
    """Replay ``trials`` sampled runs against an exact report; returns the number accepted.

    Along the accepting branch every post-measurement state is fixed, so the
    exact per-outcome probabilities fully determine a sampled run.
    """
    seq = exact_step_probabilities(report)
    if len(seq) < 2 + report.rounds:
        seq = seq + [0.0]  # exact run stopped early: that step rejects
    seq = np.array(seq[: 2 + report.rounds])
    draws = rng.random((trials, len(seq)))
    return int(np.sum(np.all(draws < seq, axis=1)))


def attack_single_diagram(g: GridDiagram, serial: SerialPolynomial, params: VerifierParams) -> MarkovResult:
    """Hand in the single basis state ``|G>``: acceptance curve of the Markov stage."""
    if alexander(g) != serial:
        raise SerialMismatch(f"diagram has serial {alexander(g).text()}, not {serial.text()}")
    return markov_stage(basis_state(g), params.dbar, params.rounds)


@dataclass
class BoundaryReport:
    found: bool
    diagram: GridDiagram = None
    class_size: int = 0
    step2_probability: float = None
    markov_acceptance: float = None
    searched: int = 0

    def to_text(self) -> str:
        if not self.found:
            return f"boundary none_found searched {self.searched}\n"
        from .griddiag import format_perms

        return (
            f"boundary diagram {format_perms(self.diagram)}\n"
            f"class_size {self.class_size}\n"
            f"step2 {self.step2_probability:.15g}\n"
            f"markov_acceptance {self.markov_acceptance:.15g}\n"
        )


def boundary_classes(dbar: int, limit: int = 200, skip_zero: bool = True):
    """Yield ``(G, class)`` for diagrams at ``d = 2*dbar`` whose bounded move class never
    leaves that dimension."""
    from .griddiag import all_diagrams

    top = 2 * dbar
    seen = set()
    tried = 0
    for g in all_diagrams(top):
        if g in seen:
            continue
        if skip_zero and alexander(g).is_zero:
            continue
        tried += 1
        if tried > limit:
            return
        cls = enumerate_class(g, top)
        seen |= cls
        if all(h.d == top for h in cls):
            yield g, cls


def attack_boundary_dimension(params: VerifierParams, limit: int = 200) -> BoundaryReport:
    """Uniform superposition over a top-dimension class: passes the chain, fails the window."""
    tried = 0
    for g, cls in boundary_classes(params.dbar, limit):
        tried += 1
        q = q_function(params.dbar)
        weights = {h: math.sqrt(q(h.d)) for h in cls}
        state = SparseState(weights).normalized()
        lo, hi = dimension_window(params.dbar)
        p2 = state.filtered(lambda h: lo <= h.d <= hi).norm2()
        mk = markov_stage(state, params.dbar, params.rounds)
        return BoundaryReport(True, g, len(cls), p2, mk.acceptance, tried)
    return BoundaryReport(False, searched=tried)


@dataclass
class CollisionReport:
    dbar: int
    trials: int
    mode: str
    serial_counts: Counter
    colliding_pairs: int

    @property
    def pair_frequency(self) -> float:
        pairs = self.trials * (self.trials - 1) // 2
        return self.colliding_pairs / pairs if pairs else 0.0

    def to_text(self) -> str:
        lines = [
            f"dbar {self.dbar} mode {self.mode} trials {self.trials}",
            f"distinct_serials {len(self.serial_counts)}",
            f"collision_frequency {self.pair_frequency:.6f}",
        ]
        for p, n in sorted(self.serial_counts.items(), key=lambda kv: (-kv[1], kv[0].coeffs)):
            lines.append(f"serial {p.text()} count {n}")
        return "\n".join(lines) + "\n"


def _minted_serial(args):
    dbar, mode, seed = args
    return mint(MintParams(dbar, mode=mode, seed=seed)).serial


def remint_collision_stats(
    dbar: int, trials: int, mode: str = CLASSICAL, seed: int = 0, workers: int = 1
) -> CollisionReport:
    """Mint ``trials`` bills with consecutive seeds and count equal-serial pairs.

    Each trial depends only on its own seed, so ``workers > 1`` spreads them
    over processes without changing the result.
    """
    jobs = [(dbar, mode, (seed + t) % 2**64) for t in range(trials)]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            serials = list(pool.map(_minted_serial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        serials = [_minted_serial(job) for job in jobs]
    counts = Counter(serials)
    pairs = sum(n * (n - 1) // 2 for n in counts.values())
    return CollisionReport(dbar, trials, mode, counts, pairs)


def expected_collision_frequency(dbar: int) -> float:
    """Exact pair-collision probability of the exact mint (zero serial excluded)."""
    from .mint import serial_groups

    groups = serial_groups(dbar)
    nonzero = {p: w for p, (w, _) in groups.items() if not p.is_zero}
    total = math.fsum(nonzero.values())
    return math.fsum((w / total) ** 2 for w in nonzero.values())
