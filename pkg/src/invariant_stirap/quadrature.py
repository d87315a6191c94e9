"""Adaptive Gauss-Kronrod quadrature with a hard convergence check."""
from __future__ import annotations

import warnings

import numpy as np
from scipy import integrate

from .errors import QuadratureFailure

EPSABS = 1e-10
# Large integrals (energy cost at tiny epsilon is ~1e4) cannot meet 1e-10
# absolute in double precision, so the acceptance test is
# err <= max(EPSABS, EPSREL * |value|).
EPSREL = 1e-12


def integrate_smooth(f, a: float, b: float, *, epsabs: float = EPSABS, epsrel: float = EPSREL,
                     points=None, limit: int = 500) -> float:
    """Integrate a smooth scalar function over ``[a, b]``.

    Raises :class:`QuadratureFailure` when QUADPACK's error estimate does not
    meet the tolerance.
    """
    if b == a:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(
            lambda x: float(f(x)), a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, points=points
        )
    if not np.isfinite(value) or err > max(epsabs, epsrel * abs(value)):
        raise QuadratureFailure(
            f"quadrature on [{a}, {b}] did not converge: value={value!r}, error estimate={err!r}"
        )
    return float(value)
