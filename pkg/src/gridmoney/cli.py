"""Command-line front end.

Exit codes: 0 accept / success, 1 reject, 2 malformed input, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .alexander import SerialPolynomial, alexander
from .errors import CapacityError, GridMoneyError, InvalidDiagram, MalformedFile, SerialMismatch
from .griddiag import decode, encode, format_perms, parse, render
from .markov import Config, run_chain
from .mint import CLASSICAL, EXACT, MintParams, MoneyBill, mint, q_table
from .moves import cyclic, destabilize, stabilize, transpose
from .statespace import basis_state, dump_state, load_state
from .verifier import (
    DEFAULT_ROUNDS,
    DEFAULT_THRESHOLD,
    SAMPLED,
    VerifierParams,
    attack_boundary_dimension,
    attack_single_diagram,
    remint_collision_stats,
    verify,
)

FILE_VERSION = 1
EXIT_OK, EXIT_REJECT, EXIT_MALFORMED, EXIT_CAPACITY = 0, 1, 2, 3
WORKERS_ENV = "GRIDMONEY_WORKERS"


def bill_to_text(bill: MoneyBill) -> str:
    doc = {
        "version": FILE_VERSION,
        "dbar": bill.params.dbar,
        "mode": bill.params.mode,
        "seed": bill.params.seed,
        "serial": list(bill.serial.coeffs),
    }
    if bill.state is not None:
        doc["payload"] = {"kind": "state", "dump": dump_state(bill.state).splitlines()}
    else:
        doc["payload"] = {"kind": "certificate", "diagram": encode(bill.certificate).hex()}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def bill_from_text(text: str) -> MoneyBill:
    try:
        doc = json.loads(text)
        if doc["version"] != FILE_VERSION:
            raise MalformedFile(f"unsupported money file version {doc['version']}")
        params = MintParams(int(doc["dbar"]), mode=doc["mode"], seed=int(doc["seed"]))
        serial = SerialPolynomial(tuple(doc["serial"]))
        payload = doc["payload"]
        if payload["kind"] == "state":
            state = load_state("\n".join(payload["dump"]))
            if state.labelled or not state.is_normalized(1e-9):
                raise MalformedFile("payload state is not a normalised diagram state")
            return MoneyBill(serial, params, state=state)
        if payload["kind"] == "certificate":
            return MoneyBill(serial, params, certificate=decode(bytes.fromhex(payload["diagram"])))
        raise MalformedFile(f"unknown payload kind {payload['kind']!r}")
    except MalformedFile:
        raise
    except (KeyError, TypeError, ValueError, InvalidDiagram) as exc:
        raise MalformedFile(f"malformed money file: {exc}") from None


def _workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_mint(args):
    params = MintParams(args.dbar, mode=args.mode, seed=args.seed, exact_cap=args.cap)
    bill = mint(params)
    text = bill_to_text(bill)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(bill.serial.text())
    return EXIT_OK


def cmd_verify(args):
    try:
        with open(args.file) as fh:
            bill = bill_from_text(fh.read())
    except OSError as exc:
        raise MalformedFile(str(exc)) from None
    serial = SerialPolynomial.parse(args.serial) if args.serial else bill.serial
    params = VerifierParams(
        bill.params.dbar,
        rounds=args.rounds,
        mode=args.mode,
        seed=args.seed,
        threshold=args.threshold,
    )
    subject = bill.state if bill.state is not None else basis_state(bill.certificate)
    try:
        report = verify(subject, serial, params)
    except SerialMismatch:
        print(f"serial {serial.text()}\nstep1 0\naccepted no\nfailed_step step1")
        return EXIT_REJECT
    sys.stdout.write(report.to_text())
    return EXIT_OK if report.accepted else EXIT_REJECT


def cmd_alexander(args):
    print(alexander(parse(args.diagram)).text())
    return EXIT_OK


def _apply_spec(g, spec):
    name, *vals = spec.split(":")
    if name == "cyclic":
        axis, step = vals
        return cyclic(g, axis, int(step))
    if name == "transpose":
        axis, index = vals
        return transpose(g, axis, int(index))
    if name in ("stabilize", "destabilize"):
        x, y, *k = (int(v) for v in vals)
        fn = stabilize if name == "stabilize" else destabilize
        return fn(g, x, y, k[0] if k else 0)
    raise ValueError(f"unknown move {spec!r}")


def _show(g):
    print(format_perms(g))
    print(render(g))


def cmd_moves(args):
    g = parse(args.diagram)
    for spec in args.apply or []:
        g = _apply_spec(g, spec)
    _show(g)
    print(f"serial {alexander(g).text()}")
    return EXIT_OK


def cmd_chain(args):
    g = parse(args.diagram)
    stats = run_chain(Config(g, args.label), args.steps, args.dbar, np.random.default_rng(args.seed))
    final = stats.final
    _show(final.G)
    print(f"label {final.i}")
    if args.stats:
        print(stats.report())
    return EXIT_OK


def cmd_attack(args):
    params = VerifierParams(args.dbar, rounds=args.rounds)
    if args.kind == "single":
        if not args.diagram:
            raise ValueError("attack single needs a diagram")
        g = parse(args.diagram)
        res = attack_single_diagram(g, alexander(g), params)
        for n, p in enumerate(res.curve, 1):
            print(f"round {n} acceptance {p:.15g}")
    elif args.kind == "boundary":
        sys.stdout.write(attack_boundary_dimension(params).to_text())
    else:
        for dbar in args.collision_dbar or [args.dbar]:
            rep = remint_collision_stats(dbar, args.trials, mode=args.mint_mode, seed=args.seed, workers=_workers())
            sys.stdout.write(rep.to_text())
    return EXIT_OK


def cmd_qtable(args):
    for d, q in sorted(q_table(args.dbar).items()):
        print(f"{d} {q}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridmoney", description="Mint, verify and attack grid-diagram money states")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mint", help="mint a bill")
    m.add_argument("--dbar", type=int, required=True)
    m.add_argument("--mode", choices=(EXACT, CLASSICAL), default=EXACT)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--cap", type=int, default=3, help="largest dbar for exact states")
    m.add_argument("--out", default="-")
    m.set_defaults(func=cmd_mint)

    v = sub.add_parser("verify", help="verify a money file")
    v.add_argument("file")
    v.add_argument("--serial")
    v.add_argument("--rounds", type=int, default=DEFAULT_ROUNDS)
    v.add_argument("--mode", choices=(EXACT, SAMPLED), default=EXACT)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("alexander", help="serial number of a diagram")
    a.add_argument("diagram", help='"xs;os" rows or hex encoding')
    a.set_defaults(func=cmd_alexander)

    mv = sub.add_parser("moves", help="apply grid moves")
    mv.add_argument("diagram")
    mv.add_argument(
        "--apply",
        action="append",
        help="cyclic:AXIS:±1 | transpose:AXIS:i | stabilize:x:y[:k] | destabilize:x:y[:k]; repeatable",
    )
    mv.set_defaults(func=cmd_moves)

    c = sub.add_parser("chain", help="run the classical Markov chain")
    c.add_argument("diagram")
    c.add_argument("--dbar", type=int, default=2)
    c.add_argument("--steps", type=int, default=1000)
    c.add_argument("--label", type=int, default=0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--stats", action="store_true")
    c.set_defaults(func=cmd_chain)

    at = sub.add_parser("attack", help="counterfeiting experiments")
    at.add_argument("kind", choices=("single", "boundary", "collision"))
    at.add_argument("diagram", nargs="?")
    at.add_argument("--dbar", type=int, default=2)
    at.add_argument("--rounds", type=int, default=DEFAULT_ROUNDS)
    at.add_argument("--trials", type=int, default=1000)
    at.add_argument("--seed", type=int, default=0)
    at.add_argument("--mint-mode", choices=(EXACT, CLASSICAL), default=CLASSICAL)
    at.add_argument("--collision-dbar", type=int, nargs="+")
    at.set_defaults(func=cmd_attack)

    qt = sub.add_parser("qtable", help="print q(d) for a security parameter")
    qt.add_argument("--dbar", type=int, required=True)
    qt.set_defaults(func=cmd_qtable)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (MalformedFile, InvalidDiagram) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (GridMoneyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
