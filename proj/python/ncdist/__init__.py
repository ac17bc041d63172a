"""Bounds on the nonclassical distance of quantum-optical states.

State descriptions may be given as dicts or JSON text, e.g. ``{"kind": "cat", "parity": "odd", "beta": 1.2}``.
"""

import json

from ._ncdist import (
    DEFAULT_SEED,
    DEFAULT_TAIL_TOL,
    InvalidArgument,
    NcdistError,
    NumericalError,
    SchemaError,
    TruncationTooSmall,
    acceptance_groups,
    cat_qmax,
    fidelity,
    figure,
    gamma_n,
    trace_distance,
    verify,
)
from . import _ncdist

__all__ = [
    "DEFAULT_SEED",
    "DEFAULT_TAIL_TOL",
    "InvalidArgument",
    "NcdistError",
    "NumericalError",
    "SchemaError",
    "TruncationTooSmall",
    "acceptance_groups",
    "canonical_id",
    "cat_qmax",
    "density",
    "fidelity",
    "figure",
    "gamma_n",
    "qsup",
    "report",
    "trace_distance",
    "verify",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def report(doc, tail_tol=DEFAULT_TAIL_TOL, trunc=0, seed=DEFAULT_SEED):
    """Bound report as a dict with lowers, uppers, best_lower, best_upper and exact."""
    return json.loads(_ncdist.report_json(_text(doc), tail_tol, trunc, seed))


def qsup(doc, tail_tol=DEFAULT_TAIL_TOL, trunc=0, seed=DEFAULT_SEED):
    """Husimi supremum (value, argmax, method, certificate) as a dict."""
    return json.loads(_ncdist.qsup_json(_text(doc), tail_tol, trunc, seed))


def density(doc, tail_tol=DEFAULT_TAIL_TOL):
    """Dense density matrix over the state's default truncation."""
    return _ncdist.density(_text(doc), tail_tol)


def canonical_id(doc):
    return _ncdist.canonical_id(_text(doc))
