"""Quadrature on the half line (0, inf) for matrix- or scalar-valued integrands.

The default rule is double exponential: substitute ``lam = c * exp(pi/2 * sinh(t))``
and apply the trapezoidal rule in ``t``. Integrands of the form
``lam**p * rational(lam)`` become doubly exponentially decaying in ``t``,
so algebraic endpoint behaviour costs nothing extra. A Gauss-Legendre rule
on the rational map ``lam = c * u / (1 - u)`` is kept for comparison; it
converges slowly when ``lam**p`` has a branch point at zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import AccuracyError

__all__ = ["Transform", "QuadratureSpec", "integrate_half_line"]

# tail of the trapezoidal sum is cut where the integrand is below exp(-_TAIL)
_TAIL = 40.0
# |log(lam / center)| never exceeds this, so nodes stay finite in double precision
_LOG_SPAN = 600.0
_MAX_GROWTH = 4


class Transform(enum.Enum):
    TanhSinh = "tanh-sinh"
    RationalMap = "rational"


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 400
    transform: Transform = Transform.TanhSinh
    abs_tol: float = 1e-8

    def __post_init__(self):
        if self.nodes < 16:
            raise ValueError(f"nodes must be at least 16, got {self.nodes}")
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")


def _de_window(decay: float) -> tuple[float, float]:
    """Half-width in log(lam) and the relative size of the discarded tails."""
    span = min(_TAIL / decay, _LOG_SPAN)
    return span, math.exp(-decay * span) / decay


def _de_rule(n: int, center: float, span: float) -> tuple[np.ndarray, np.ndarray]:
    T = math.asinh(2.0 * span / math.pi)
    t = np.linspace(-T, T, n)
    h = t[1] - t[0]
    u = 0.5 * math.pi * np.sinh(t)
    lam = center * np.exp(u)
    w = h * lam * 0.5 * math.pi * np.cosh(t)
    return lam, w


def _rational_rule(n: int, center: float) -> tuple[np.ndarray, np.ndarray]:
    x, wx = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (x + 1.0)
    lam = center * u / (1.0 - u)
    w = 0.5 * wx * center / (1.0 - u) ** 2
    return lam, w


def _weighted_sum(values: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.tensordot(w, values, axes=(0, 0))


def integrate_half_line(
    integrand: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = QuadratureSpec(),
    *,
    center: float = 1.0,
    decay: tuple[float, float] = (1.0, 1.0),
) -> tuple[np.ndarray, float]:
    """Integrate ``integrand`` over (0, inf).

    Parameters
    ----------
    integrand : callable
        Maps a 1-D array of nodes ``lam`` to an array whose leading axis runs
        over the nodes.
    spec : QuadratureSpec
        Node count, transform and absolute tolerance.
    center : float
        Scale at which the integrand turns over; nodes are centred on it.
    decay : (float, float)
        Exponents ``(a, b)`` with ``integrand(lam) * lam ~ lam**a`` as lam -> 0
        and ``~ lam**-b`` as lam -> inf. Both must be positive.

    Returns
    -------
    value, est_error
        The integral and an error estimate from comparing against the rule
        with half as many nodes. The node count is doubled, up to four times
        ``spec.nodes``, until ``est_error <= abs_tol * max(1, |value|)``.

    Raises
    ------
    AccuracyError
        If the tolerance is still not met at the node cap.
    """
    a, b = decay
    if not (a > 0 and b > 0):
        raise ValueError(f"integrand does not decay at both ends (exponents {decay})")
    if not center > 0:
        raise ValueError("center must be positive")
    n = spec.nodes
    while True:
        if spec.transform is Transform.TanhSinh:
            # odd count keeps the coarse rule nested in the fine one
            m = n | 1
            span, tail = _de_window(min(a, b))
            lam, w = _de_rule(m, center, span)
            vals = integrand(lam)
            fine = _weighted_sum(vals, w)
            coarse = _weighted_sum(vals[::2], 2.0 * w[::2])
        else:
            lam, w = _rational_rule(n, center)
            fine = _weighted_sum(integrand(lam), w)
            lam2, w2 = _rational_rule(n // 2, center)
            coarse = _weighted_sum(integrand(lam2), w2)
        est = float(np.linalg.norm(np.atleast_1d(fine - coarse)))
        scale = max(1.0, float(np.linalg.norm(np.atleast_1d(fine))))
        if spec.transform is Transform.TanhSinh:
            est += tail * float(np.linalg.norm(np.atleast_1d(fine)))
        if est <= spec.abs_tol * scale:
            return fine, est
        truncation_bound = spec.transform is Transform.TanhSinh and tail > spec.abs_tol
        if n >= _MAX_GROWTH * spec.nodes or truncation_bound:
            raise AccuracyError(
                f"quadrature did not reach tolerance {spec.abs_tol:g} with {n} nodes "
                f"(estimated error {est:.3g})",
                est,
            )
        n *= 2
