"""Tsallis and Umegaki relative entropies and the Tsallis lower-bound family."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AccuracyError,
    DeformedDomainError,
    HermitianMatrix,
    ParameterError,
    Q_ONE_TOL,
    apply_spectral,
    as_hermitian,
    log_q,
    matrix_power,
)

__all__ = [
    "DensityPair",
    "umegaki_relative_entropy",
    "tsallis_relative_entropy",
    "tsallis_relative_entropy_forms",
    "state_overlap",
    "state_overlap_bound",
    "tsallis_lower_bound",
    "best_lower_bound",
]

TRACE_TOL = 1e-10
EIGEN_FLOOR = 1e-12
FORMS_RTOL = 1e-10


def _require_pd(X: HermitianMatrix, name: str) -> None:
    if not X.is_positive_definite():
        raise DeformedDomainError(
            f"{name} must be positive definite (min eigenvalue {X.eigenvalues[0]!r})"
        )


@dataclass(frozen=True)
class DensityPair:
    """Two full-rank states: unit trace, eigenvalues at least 1e-12."""

    rho: HermitianMatrix
    sigma: HermitianMatrix

    def __post_init__(self):
        for name in ("rho", "sigma"):
            X = as_hermitian(getattr(self, name))
            object.__setattr__(self, name, X)
            tr = X.trace()
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"{name} has trace {tr!r}, expected 1")
            if X.eigenvalues[0] < EIGEN_FLOOR:
                raise ValueError(
                    f"{name} has eigenvalue {X.eigenvalues[0]!r} below {EIGEN_FLOOR}"
                )
        if self.rho.dim != self.sigma.dim:
            raise ValueError("rho and sigma differ in dimension")


def umegaki_relative_entropy(X, Y) -> float:
    """``Tr X (log X - log Y)``."""
    X, Y = as_hermitian(X), as_hermitian(Y)
    _require_pd(X, "X")
    _require_pd(Y, "Y")
    logX = np.asarray(apply_spectral(X, np.log))
    logY = np.asarray(apply_spectral(Y, np.log))
    return float(np.vdot(np.asarray(X), logX - logY).real)


def tsallis_relative_entropy_forms(X, Y, p: float) -> tuple[float, float]:
    """The two expressions of ``D_p(X|Y)`` for ``0 <= p < 1``.

    Returns ``Tr(X - X**p Y**(1-p)) / (1-p)`` and
    ``Tr X**p (log_{2-p} X - log_{2-p} Y)``.
    """
    X, Y = as_hermitian(X), as_hermitian(Y)
    _require_pd(X, "X")
    _require_pd(Y, "Y")
    if not 0 <= p < 1:
        raise ParameterError(f"needs 0 <= p < 1, got p={p}")
    Xp = np.asarray(matrix_power(X, p))
    Y1p = np.asarray(matrix_power(Y, 1.0 - p))
    quotient = (X.trace() - float(np.vdot(Xp, Y1p).real)) / (1.0 - p)
    lX = np.asarray(apply_spectral(X, lambda t: log_q(t, 2.0 - p)))
    lY = np.asarray(apply_spectral(Y, lambda t: log_q(t, 2.0 - p)))
    deformed = float(np.vdot(Xp, lX - lY).real)
    return quotient, deformed


def tsallis_relative_entropy(X, Y, p: float) -> float:
    """Tsallis relative entropy ``D_p(X|Y)`` for ``p`` in [0, 1]; Umegaki at ``p = 1``.

    Both closed forms are evaluated and must agree to ``1e-10`` relative,
    plus an allowance for the ``1/(1-p)`` cancellation near ``p = 1``.
    """
    if not 0 <= p <= 1:
        raise ParameterError(f"needs 0 <= p <= 1, got p={p}")
    if abs(1.0 - p) < Q_ONE_TOL:
        return umegaki_relative_entropy(X, Y)
    a, b = tsallis_relative_entropy_forms(X, Y, p)
    X = as_hermitian(X)
    cancel = 64 * np.finfo(float).eps * X.dim * (abs(X.trace()) + abs(a)) / (1.0 - p)
    if abs(a - b) > FORMS_RTOL * (1.0 + abs(a)) + cancel:
        raise AccuracyError(f"forms of D_p disagree: {a!r} vs {b!r}", abs(a - b))
    return a


def state_overlap(rho, sigma, p: float) -> float:
    """``Tr rho**(1-p) sigma**p`` for positive definite arguments."""
    r1 = np.asarray(matrix_power(rho, 1.0 - p))
    sp = np.asarray(matrix_power(sigma, p))
    return float(np.vdot(r1, sp).real)


def state_overlap_bound(pair: DensityPair, p: float) -> float:
    """``Tr rho**(1-p) sigma**p``, which never exceeds one for states."""
    if not 0 <= p <= 1:
        raise ParameterError(f"needs 0 <= p <= 1, got p={p}")
    val = state_overlap(pair.rho, pair.sigma, p)
    if val > 1.0 + 1e-10:
        raise AccuracyError(f"Tr rho^(1-p) sigma^p = {val!r} exceeds 1", val - 1.0)
    return val


def tsallis_lower_bound(X, Y, q: float, p: float) -> float:
    """``(Tr X - (Tr X)**p (Tr Y)**(1-p)) / (1-p)``, a lower bound on ``D_q(X|Y)``.

    Valid for ``0 < q <= 1`` and ``p <= q``; ``p = 1`` (only with ``q = 1``)
    takes the limit ``Tr X log(Tr X / Tr Y)``.
    """
    if not 0 < q <= 1:
        raise ParameterError(f"needs 0 < q <= 1, got q={q}")
    if p > q:
        raise ParameterError(f"needs p <= q, got p={p} > q={q}")
    X, Y = as_hermitian(X), as_hermitian(Y)
    _require_pd(X, "X")
    _require_pd(Y, "Y")
    a, b = X.trace(), Y.trace()
    lr = math.log(a / b)
    if abs(1.0 - p) < Q_ONE_TOL:
        return a * lr
    # a - a**p b**(1-p) = a * (1 - (b/a)**(1-p))
    return -a * math.expm1(-(1.0 - p) * lr) / (1.0 - p)


def best_lower_bound(X, Y, q: float, grid) -> tuple[float, float]:
    """Largest :func:`tsallis_lower_bound` over ``grid``; ties go to the smallest ``p``."""
    grid = [float(p) for p in grid]
    if not grid:
        raise ValueError("empty grid")
    bad = [p for p in grid if p > q]
    if bad:
        raise ParameterError(f"grid points {bad} exceed q={q}")
    best_p, best = None, -math.inf
    for p in sorted(grid):
        val = tsallis_lower_bound(X, Y, q, p)
        if val > best:
            best_p, best = p, val
    return best_p, best
