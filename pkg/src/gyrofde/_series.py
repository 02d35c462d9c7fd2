"""Dimensionless drift-shape brackets with cancellation-free small-x series.

With x = t/Tc and a = exp(-x), the three shapes below underlie the drift
terms of the error budget and of the Allan variance.  Evaluated directly
they lose all precision for x << 1 (their leading orders are x^3/3, x^5/20,
and x^2/2 while the operands are O(x)), so below the cutover each switches
to its exact alternating power series, summed to machine precision.
"""

from __future__ import annotations

import math

_CUTOVER = 0.5
_TOL = 1e-18


def atrk_inflight_shape(x: float) -> float:
    """x - (3 - 4 e^-x + e^-2x)/2; ~ x^3/3 for small x."""
    if x >= _CUTOVER:
        a = math.exp(-x)
        return x - (3.0 - 4.0 * a + a * a) / 2.0
    total, powx, fact, k = 0.0, x * x, 2.0, 2
    while True:
        k += 1
        powx *= x
        fact *= k
        term = (2.0 ** k - 4.0) / (2.0 * fact) * powx
        total += term if k % 2 else -term
        if abs(term) < _TOL * max(abs(total), 1e-300):
            return total


def xtrk_inflight_shape(x: float) -> float:
    """x^3/3 - x^2 + x(1 - 2 e^-x) + (1 - e^-2x)/2; ~ x^5/20 for small x."""
    if x >= _CUTOVER:
        a = math.exp(-x)
        return x ** 3 / 3.0 - x * x + x * (1.0 - 2.0 * a) + (1.0 - a * a) / 2.0
    total, powx, fact, k = 0.0, x ** 4, 24.0, 4
    while True:
        k += 1
        powx *= x
        fact *= k
        term = (2.0 * k - 2.0 ** (k - 1)) / fact * powx
        total += -term if k % 2 else term
        if abs(term) < _TOL * max(abs(total), 1e-300):
            return total


def xminus_em(x: float) -> float:
    """x - (1 - e^-x); ~ x^2/2 for small x."""
    if x >= _CUTOVER:
        return x - (-math.expm1(-x))
    total, term, k = 0.0, x, 1
    while True:
        k += 1
        term *= -x / k
        total -= term  # sum_{k>=2} (-1)^k x^k / k!
        if abs(term) < _TOL * max(abs(total), 1e-300):
            return total
