"""Python interface to the fgamma library."""

import json

from ._core import (
    Generator,
    InvariantError,
    UserError,
    bound,
    delta_f,
    f_divergence_discrete,
    k_quantity,
    lambda_empirical,
    run_cli,
    verify,
)
from . import _core

__all__ = [
    "Generator",
    "InvariantError",
    "UserError",
    "bound",
    "delta_f",
    "estimate",
    "f_divergence_discrete",
    "k_quantity",
    "lambda_empirical",
    "rademacher",
    "run_cli",
    "verify",
]


def _rows(points):
    rows = []
    for p in points:
        try:
            rows.append([float(v) for v in p])
        except TypeError:
            rows.append([float(p)])
    return rows


def estimate(gen, class_spec, q, p, seed=0):
    """Estimate D_f^Gamma(q || p). `class_spec` is a config-style dict."""
    if isinstance(gen, str):
        gen = Generator(gen)
    return _core._estimate(gen, json.dumps(class_spec), _rows(q), _rows(p), seed)


def rademacher(class_spec, points, draws=100, seed=0):
    """Monte Carlo empirical Rademacher complexity of a class on `points`."""
    return _core._rademacher(json.dumps(class_spec), _rows(points), draws, seed)
