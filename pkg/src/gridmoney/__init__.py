"""Simulator for quantum money built from knots drawn as grid diagrams."""

__version__ = "0.1.0"

from .alexander import SerialPolynomial, alexander
from .errors import GridMoneyError
from .griddiag import GridDiagram
from .mint import MintParams, MoneyBill, mint, q_table
from .statespace import SparseState
from .verifier import VerificationReport, VerifierParams, verify

__all__ = [
    "GridDiagram",
    "GridMoneyError",
    "MintParams",
    "MoneyBill",
    "SerialPolynomial",
    "SparseState",
    "VerificationReport",
    "VerifierParams",
    "alexander",
    "mint",
    "q_table",
    "verify",
]
