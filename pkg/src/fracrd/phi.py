"""phi-functions of exponential integrators on the nonpositive real axis.

    phi_1(z) = (e^z - 1)/z,  phi_2(z) = (e^z - 1 - z)/z^2,
    phi_3(z) = (e^z - 1 - z - z^2/2)/z^3,   phi_j(0) = 1/j!

For |z| < TAYLOR_RADIUS the Taylor series sum_k z^k/(k+j)! is used; outside it
the closed form via expm1 and the recurrence phi_{j+1} = (phi_j - 1/j!)/z.
"""

from __future__ import annotations

from math import factorial

import numpy as np

TAYLOR_RADIUS = 1.0
# 1/(25+1)! ~ 2.5e-27, far below double precision at |z| = 1
TAYLOR_DEGREE = 25

_COEFFS = {j: [1.0 / factorial(k + j) for k in range(TAYLOR_DEGREE + 1)] for j in (1, 2, 3)}


def _taylor(j: int, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for c in reversed(_COEFFS[j]):
        acc = acc * z + c
    return acc


def _direct(j: int, z: np.ndarray) -> np.ndarray:
    p = np.expm1(z) / z
    for i in range(1, j):
        p = (p - 1.0 / factorial(i)) / z
    return p


def phi_eval(j: int, z):
    """Evaluate phi_j elementwise for z <= 0.

    Returns a float for scalar input and an array otherwise.
    """
    if j not in (1, 2, 3):
        raise ValueError(f"phi index must be 1, 2 or 3, got {j}")
    zz = np.asarray(z, dtype=np.float64)
    if np.any(zz > 0):
        raise ValueError("phi_eval is defined here for z <= 0 only")
    if not np.isfinite(zz).all():
        raise ValueError("phi_eval received non-finite arguments")
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz)
    out = np.empty_like(zz)
    small = np.abs(zz) < TAYLOR_RADIUS
    out[small] = _taylor(j, zz[small])
    out[~small] = _direct(j, zz[~small])
    return float(out[0]) if scalar else out
