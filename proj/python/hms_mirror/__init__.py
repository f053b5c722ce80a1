"""Mirror symmetry for elliptic curves.

Documents (objects, morphisms, reports) are plain dicts in the same JSON layout
the ``hms`` command line reads and writes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import _core
from ._core import DEFAULT_TOL, HMSError

__all__ = ["DEFAULT_TOL", "HMSError", "theta", "verify", "suite_names", "compose", "mirror", "hom"]


def _rational(value: int | Fraction | str) -> tuple[int, int]:
    f = Fraction(value)
    return f.numerator, f.denominator


def theta(
    tau: complex,
    z: complex,
    characteristic: int | Fraction | str = 0,
    delta: int | Fraction | str = 0,
    beta: float = 0.0,
    level: int = 1,
    freq: int = 1,
    deriv: int = 0,
    tol: float = DEFAULT_TOL,
) -> complex:
    """D^deriv theta[a, delta*tau + beta](level*tau, freq*z), D = -(1/2 pi i) d/dz."""
    value, _ = _core.theta(complex(tau), complex(z), _rational(characteristic), _rational(delta),
                           float(beta), level, freq, deriv, tol)
    return value


def suite_names() -> list[str]:
    return list(_core.suite_names())


def verify(suite: str = "all", tau: complex = 1j, seed: int = 1, tol: float | None = None) -> list[dict[str, Any]]:
    return json.loads(_core.verify(suite, complex(tau), seed, tol))


def compose(side: str, first: dict, second: dict, tau: complex = 1j, tol: float = DEFAULT_TOL) -> dict:
    """second o first; side "a" takes point sums / intertwiners, side "b" sections / fiber maps."""
    return json.loads(_core.compose(side, json.dumps(first), json.dumps(second), complex(tau), tol))


def mirror(doc: dict, tau: complex = 1j) -> dict:
    return json.loads(_core.mirror(json.dumps(doc), complex(tau)))


def hom(source: dict, target: dict, degree: int = 0) -> dict:
    return json.loads(_core.hom(json.dumps(source), json.dumps(target), degree))
