"""Fréchet differentials of matrix powers, log_q and exp_q.

Two independent routes are provided for each differential:

* the first-divided-difference (Daleckii-Krein) formula in the eigenbasis of
  ``x``, exact up to rounding, for any differentiable scalar function;
* quadrature of resolvent integral representations,
  ``D(x**p) h = c_p * int_0^inf (x+lam)^-1 h (x+lam)^-1 lam**p dlam``,
  evaluated with batched resolvents and no eigendecomposition of ``x``.

A central finite difference is available as a third, crude check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    DeformedDomainError,
    DomainConstraint,
    HermitianMatrix,
    ParameterError,
    Q_ONE_TOL,
    apply_spectral,
    as_hermitian,
    check_domain,
    exp_q,
    matrix_power,
)
from .quadrature import QuadratureSpec, integrate_half_line

__all__ = [
    "FrechetMethod",
    "FrechetResult",
    "loewner_matrix",
    "dfrechet_divided_difference",
    "dfrechet_finite_difference",
    "dfrechet_power_integral",
    "dfrechet_power",
    "dfrechet_log_q",
    "dfrechet_exp_q",
    "classical_power_integral",
    "log_q_integral",
]

CLUSTER_TOL = 1e-7
_EXACT_TOL = 1e-12


class FrechetMethod(enum.Enum):
    DividedDifference = "dd"
    Quadrature = "quad"
    ClosedForm = "closed"


@dataclass(frozen=True)
class FrechetResult:
    value: HermitianMatrix | np.ndarray
    method: FrechetMethod
    est_error: float = 0.0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.value, dtype=dtype)

    def scaled(self, factor: float) -> "FrechetResult":
        return FrechetResult(
            _wrap(factor * np.asarray(self.value)), self.method, abs(factor) * self.est_error
        )


def _wrap(M: np.ndarray, hermitian: bool | None = None) -> HermitianMatrix | np.ndarray:
    if hermitian is None:
        hermitian = np.allclose(M, M.conj().T, rtol=0, atol=1e-10 * max(1.0, np.abs(M).max()))
    return HermitianMatrix(M) if hermitian else M


def _as_direction(h) -> tuple[np.ndarray, bool]:
    if isinstance(h, HermitianMatrix):
        return np.asarray(h.entries), True
    H = np.asarray(h)
    return H, bool(np.allclose(H, H.conj().T, rtol=0, atol=0))


def _isclose(a: float, b: float) -> bool:
    return abs(a - b) <= _EXACT_TOL


# ---------------------------------------------------------------------------
# divided differences
# ---------------------------------------------------------------------------


def loewner_matrix(lam: np.ndarray, f, fprime) -> np.ndarray:
    """First divided differences ``f[lam_i, lam_j]``.

    Pairs closer than ``1e-7 * (1 + |lam_i|)`` use ``f'`` at their midpoint.
    """
    lam = np.asarray(lam, dtype=float)
    with np.errstate(all="ignore"):
        fl = np.asarray(f(lam), dtype=float)
    if not np.all(np.isfinite(fl)):
        bad = lam[~np.isfinite(fl)][0]
        raise DeformedDomainError(f"eigenvalue {bad!r} is outside the domain of f")
    li, lj = lam[:, None], lam[None, :]
    diff = li - lj
    close = np.abs(diff) < CLUSTER_TOL * (1.0 + np.abs(li))
    with np.errstate(all="ignore"):
        L = (fl[:, None] - fl[None, :]) / np.where(close, 1.0, diff)
        mid = np.asarray(fprime(0.5 * (li + lj)), dtype=float)
    return np.where(close, np.broadcast_to(mid, L.shape), L)


def dfrechet_divided_difference(x, h, f, fprime) -> FrechetResult:
    """Daleckii-Krein formula: ``U (f[lam_i, lam_j] * (U^* h U)_ij) U^*``.

    Parameters
    ----------
    x : HermitianMatrix or array_like
        Base point; its spectrum must lie in the domain of ``f``.
    h : array_like
        Direction. Need not be Hermitian.
    f, fprime : callable
        Scalar function and its derivative, vectorized over numpy arrays.
    """
    x = as_hermitian(x)
    H, herm = _as_direction(h)
    dec = x.spectral
    U = dec.eigenvectors
    L = loewner_matrix(dec.eigenvalues, f, fprime)
    Ht = U.conj().T @ H @ U
    val = U @ (L * Ht) @ U.conj().T
    est = 8 * np.finfo(float).eps * x.dim * float(np.linalg.norm(val))
    return FrechetResult(_wrap(val, herm), FrechetMethod.DividedDifference, est)


def dfrechet_finite_difference(x, h, f, eps: float = 1e-5) -> np.ndarray:
    """Central difference ``(f(x + eps h) - f(x - eps h)) / (2 eps)`` for Hermitian ``h``."""
    x = as_hermitian(x)
    h = as_hermitian(h)
    plus = np.asarray(apply_spectral(HermitianMatrix(x.entries + eps * h.entries), f))
    minus = np.asarray(apply_spectral(HermitianMatrix(x.entries - eps * h.entries), f))
    return (plus - minus) / (2.0 * eps)


# ---------------------------------------------------------------------------
# resolvent integrals
# ---------------------------------------------------------------------------


def _resolvent_integral(
    X: np.ndarray, H: np.ndarray, p: float, spec: QuadratureSpec
) -> tuple[np.ndarray, float]:
    """``int_0^inf (X+lam)^-1 H (X+lam)^-1 lam**p dlam`` for positive definite X, -1 < p < 1."""
    n = X.shape[0]
    I = np.eye(n)
    # rough spectral scale from Gershgorin-free quantities: no eigensolve on this path
    scale = float(np.trace(X).real) / n
    center = max(scale, 1e-300)

    def integrand(lam: np.ndarray) -> np.ndarray:
        R = np.linalg.inv(X[None, :, :] + lam[:, None, None] * I)
        return (R @ H @ R) * (lam**p)[:, None, None]

    return integrate_half_line(integrand, spec, center=center, decay=(p + 1.0, 1.0 - p))


def _check_pd(x: HermitianMatrix, what: str = "x") -> None:
    if not x.is_positive_definite():
        raise DeformedDomainError(
            f"{what} must be positive definite (min eigenvalue {x.eigenvalues[0]!r})"
        )


def _power_window_integral(X: np.ndarray, H: np.ndarray, p: float, spec) -> tuple[np.ndarray, float]:
    if 0 < p < 1:
        c = math.sin(p * math.pi) / math.pi
        val, est = _resolvent_integral(X, H, p, spec)
        return c * val, c * est
    if -1 < p < 0:
        # d/dx (x+lam)^-1 carries a minus sign
        c = -math.sin((p + 1.0) * math.pi) / math.pi
        val, est = _resolvent_integral(X, H, p, spec)
        return c * val, abs(c) * est
    raise ParameterError(f"no resolvent representation for exponent {p}")


def dfrechet_power_integral(x, h, p: float, spec: QuadratureSpec = QuadratureSpec()) -> FrechetResult:
    """``D(x**p) h`` by quadrature for ``p`` in (-1, 0), (0, 1) or (1, 2).

    For 1 < p < 2 the product rule ``D(x**(s+1)) h = h x**s + x D(x**s) h`` is
    applied with s = p - 1; for Hermitian ``h`` the symmetrized form
    ``(h x**s + x**s h)/2 + D(x**s)((x h + h x)/2)`` is used instead so the
    result is exactly Hermitian.
    """
    x = as_hermitian(x)
    _check_pd(x)
    H, herm = _as_direction(h)
    X = np.asarray(x.entries)
    if (-1 < p < 0) or (0 < p < 1):
        val, est = _power_window_integral(X, H, p, spec)
    elif 1 < p < 2:
        s = p - 1.0
        Xs = np.asarray(matrix_power(x, s).entries)
        if herm:
            inner, est = _power_window_integral(X, 0.5 * (X @ H + H @ X), s, spec)
            val = 0.5 * (H @ Xs + Xs @ H) + inner
        else:
            inner, est = _power_window_integral(X, H, s, spec)
            val = H @ Xs + X @ inner
            est *= float(np.linalg.norm(X, 2))
    else:
        raise ParameterError(
            f"exponent p={p} is outside the supported windows (-1,0), (0,1), (1,2)"
        )
    if herm:
        val = 0.5 * (val + val.conj().T)
    return FrechetResult(_wrap(val, herm), FrechetMethod.Quadrature, est)


def dfrechet_power(x, h, p: float, spec: QuadratureSpec = QuadratureSpec()) -> FrechetResult:
    """``D(x**p) h`` for any real ``p``: closed forms at 0, 1, 2; quadrature inside
    the windows; divided differences elsewhere."""
    x = as_hermitian(x)
    _check_pd(x)
    H, herm = _as_direction(h)
    if _isclose(p, 0.0):
        return FrechetResult(_wrap(np.zeros_like(H, dtype=float), herm), FrechetMethod.ClosedForm)
    if _isclose(p, 1.0):
        return FrechetResult(_wrap(H.copy(), herm), FrechetMethod.ClosedForm)
    if _isclose(p, 2.0):
        X = np.asarray(x.entries)
        return FrechetResult(_wrap(X @ H + H @ X, herm), FrechetMethod.ClosedForm)
    if (-1 < p < 0) or (0 < p < 1) or (1 < p < 2):
        return dfrechet_power_integral(x, h, p, spec)
    return dfrechet_divided_difference(x, h, lambda t: t**p, lambda t: p * t ** (p - 1))


# ---------------------------------------------------------------------------
# deformed logarithm
# ---------------------------------------------------------------------------


def dfrechet_log_q(
    x, h, q: float, spec: QuadratureSpec = QuadratureSpec(), *, via: str = "integral"
) -> FrechetResult:
    """``D log_q(x) h`` for positive definite ``x`` and ``q > 1``.

    ``via="integral"`` (only for 1 < q < 2) integrates
    ``sin((q-1)pi)/((q-1)pi) * int (x+lam)^-1 h (x+lam)^-1 lam**(q-1) dlam``;
    ``via="power"`` uses ``D(x**(q-1)) h / (q-1)``.
    """
    if not q > 1:
        raise ParameterError(f"the integral forms of D log_q need q > 1, got q={q}")
    x = as_hermitian(x)
    _check_pd(x)
    if via == "integral":
        if not q < 2:
            raise ParameterError(f"the direct log_q integral needs 1 < q < 2, got q={q}")
        H, herm = _as_direction(h)
        p = q - 1.0
        c = math.sin(p * math.pi) / (p * math.pi)
        val, est = _resolvent_integral(np.asarray(x.entries), H, p, spec)
        val = c * val
        if herm:
            val = 0.5 * (val + val.conj().T)
        return FrechetResult(_wrap(val, herm), FrechetMethod.Quadrature, c * est)
    if via == "power":
        return dfrechet_power(x, h, q - 1.0, spec).scaled(1.0 / (q - 1.0))
    raise ValueError(f"unknown route {via!r}")


# ---------------------------------------------------------------------------
# deformed exponential
# ---------------------------------------------------------------------------


def _exp_q_prime(q: float):
    return lambda t: exp_q(t, q) ** (2.0 - q)


def dfrechet_exp_q(
    x, h, q: float, spec: QuadratureSpec = QuadratureSpec(), *, method: str = "auto"
) -> FrechetResult:
    """``D exp_q(x) h``.

    With ``p = 1/(q-1)`` and ``y = x + p``, ``exp_q(x) = ((q-1) y)**p``. For
    q > 1, ``y`` is positive definite and the differential is
    ``(q-1)**p * D(y**p) h``; for q < 1, ``z = -y`` is positive definite and
    it is ``-(1-q)**p * D(z**p) h``. Dispatch on q:

    ========================  =========================================
    q < 0                     -1 < p < 0, resolvent quadrature
    q = 0                     closed form ``z^-1 h z^-1``
    0 < q < 1, 1 < q < 3/2    divided differences (no integral form)
    q = 3/2                   closed form ``(y h + h y) / 4``
    3/2 < q < 2               1 < p < 2, product rule plus quadrature
    q = 2                     closed form ``h``
    q > 2                     0 < p < 1, resolvent quadrature
    ========================  =========================================

    ``method="dd"`` forces the divided-difference route for any q. The
    returned ``method`` field always names the route actually taken.
    """
    x = as_hermitian(x)
    c = DomainConstraint(q)
    chk = check_domain(x, c)
    if not chk.ok:
        raise DeformedDomainError(
            f"D exp_q needs {c.describe()}; worst eigenvalue {chk.worst_eigenvalue!r}"
        )
    if method not in ("auto", "dd"):
        raise ValueError(f"unknown method {method!r}")
    H, herm = _as_direction(h)

    def dd() -> FrechetResult:
        return dfrechet_divided_difference(x, H, lambda t: exp_q(t, q), _exp_q_prime(q))

    if method == "dd" or abs(q - 1.0) < Q_ONE_TOL or (0 < q < 1) or (1 < q < 1.5 - _EXACT_TOL):
        return dd()

    p = 1.0 / (q - 1.0)
    X = np.asarray(x.entries)
    n = x.dim
    if q > 1:
        if _isclose(q, 2.0):
            return FrechetResult(_wrap(H.copy(), herm), FrechetMethod.ClosedForm)
        Y = X + p * np.eye(n)
        if _isclose(q, 1.5):
            return FrechetResult(_wrap((Y @ H + H @ Y) / 4.0, herm), FrechetMethod.ClosedForm)
        res = dfrechet_power_integral(HermitianMatrix(Y), H, p, spec)
        return res.scaled((q - 1.0) ** p)
    Z = -(X + p * np.eye(n))
    if _isclose(q, 0.0):
        Zi = np.linalg.inv(Z)
        val = Zi @ H @ Zi
        if herm:
            val = 0.5 * (val + val.conj().T)
        return FrechetResult(_wrap(val, herm), FrechetMethod.ClosedForm)
    res = dfrechet_power_integral(HermitianMatrix(Z), H, p, spec)
    return res.scaled(-((1.0 - q) ** p))


# ---------------------------------------------------------------------------
# scalar representations
# ---------------------------------------------------------------------------


def classical_power_integral(t: float, q: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``sin((q-1)pi)/((q-1)pi) * int lam**(q-1) / (t+lam)**2 dlam``, equal to t**(q-2) for 1 < q < 2."""
    if not 1 < q < 2:
        raise ParameterError(f"needs 1 < q < 2, got q={q}")
    p = q - 1.0
    c = math.sin(p * math.pi) / (p * math.pi)
    val, _ = integrate_half_line(
        lambda lam: lam**p / (t + lam) ** 2, spec, center=t, decay=(p + 1.0, 1.0 - p)
    )
    return float(c * val)


def log_q_integral(t: float, q: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``sin((q-1)pi)/((q-1)pi) * int (t-1)/(t+lam) * lam**(q-1)/(1+lam) dlam``, equal to log_q t for 1 < q < 2."""
    if not 1 < q < 2:
        raise ParameterError(f"needs 1 < q < 2, got q={q}")
    p = q - 1.0
    c = math.sin(p * math.pi) / (p * math.pi)
    val, _ = integrate_half_line(
        lambda lam: (t - 1.0) / (t + lam) * lam**p / (1.0 + lam),
        spec,
        center=math.sqrt(t),
        decay=(p + 1.0, 1.0 - p),
    )
    return float(c * val)
