"""Hermitian matrices, spectral calculus and the deformed exp/log pair.

The deformed logarithm and exponential are

    log_q x = (x**(q-1) - 1) / (q-1),     x > 0
    exp_q x = (1 + (q-1) x)**(1/(q-1)),   1 + (q-1) x > 0

with the classical log/exp at q = 1. Both are evaluated through
``expm1``/``log1p`` so that nothing blows up as q approaches one.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "DeformedDomainError",
    "ParameterError",
    "AccuracyError",
    "Q_ONE_TOL",
    "HermitianMatrix",
    "SpectralDecomposition",
    "Regime",
    "DeformParams",
    "DomainConstraint",
    "DomainSide",
    "DomainCheck",
    "as_hermitian",
    "spectral",
    "log_q",
    "exp_q",
    "log_q_scalar",
    "exp_q_scalar",
    "apply_spectral",
    "exp_q_matrix",
    "log_q_matrix",
    "matrix_power",
    "check_domain",
    "parse_matrix_json",
    "matrix_to_json",
]

# below this distance from one, q is treated as exactly one
Q_ONE_TOL = 1e-8
HERMITIAN_TOL = 1e-12


class DeformedDomainError(ValueError):
    """An argument lies outside the domain of a deformed function."""


class ParameterError(ValueError):
    """A deformation parameter lies outside the supported regime."""


class AccuracyError(ArithmeticError):
    """A numerical procedure failed to reach its requested accuracy."""

    def __init__(self, message: str, est_error: float):
        super().__init__(message)
        self.est_error = est_error


def _is_classical(q: float) -> bool:
    return abs(q - 1.0) < Q_ONE_TOL


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values: np.ndarray | None = None) -> np.ndarray:
        lam = self.eigenvalues if values is None else values
        U = self.eigenvectors
        return (U * lam) @ U.conj().T


class HermitianMatrix:
    """Dense self-adjoint matrix.

    The input is symmetrized as ``(M + M^*) / 2`` on construction, so small
    round-off asymmetry coming from random pipelines is absorbed silently.
    Real input stays real; complex input with vanishing imaginary part is
    demoted to real.
    """

    __array_priority__ = 20

    def __init__(self, entries):
        if isinstance(entries, HermitianMatrix):
            entries = entries._data
        M = np.array(entries, dtype=complex if np.iscomplexobj(entries) else float)
        if M.ndim == 0:
            M = M.reshape(1, 1)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {M.shape}")
        M = 0.5 * (M + M.conj().T)
        if np.iscomplexobj(M) and not np.any(M.imag):
            M = M.real.copy()
        M.setflags(write=False)
        self._data = M

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self._data

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim})"

    @cached_property
    def spectral(self) -> SpectralDecomposition:
        lam, U = np.linalg.eigh(self._data)
        return SpectralDecomposition(lam, U)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectral.eigenvalues

    def trace(self) -> float:
        return float(np.trace(self._data).real)

    def is_positive_definite(self) -> bool:
        return bool(self.eigenvalues[0] > 0)

    @classmethod
    def diag(cls, values) -> "HermitianMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls(np.eye(dim))

    # arithmetic keeps results Hermitian where that is guaranteed
    def __add__(self, other):
        if isinstance(other, HermitianMatrix):
            return HermitianMatrix(self._data + other._data)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, HermitianMatrix):
            return HermitianMatrix(self._data - other._data)
        return NotImplemented

    def __neg__(self):
        return HermitianMatrix(-self._data)

    def __mul__(self, scalar):
        if np.isscalar(scalar) and np.isreal(scalar):
            return HermitianMatrix(float(scalar) * self._data)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        return self._data @ np.asarray(other)

    def __rmatmul__(self, other):
        return np.asarray(other) @ self._data


def as_hermitian(A) -> HermitianMatrix:
    return A if isinstance(A, HermitianMatrix) else HermitianMatrix(A)


def spectral(A) -> SpectralDecomposition:
    return as_hermitian(A).spectral


# ---------------------------------------------------------------------------
# parameters and domains
# ---------------------------------------------------------------------------


class Regime(enum.Enum):
    MainI = "i"
    MainII = "ii"
    MainIII = "iii"
    MainIV = "iv"
    MainV = "v"
    Unclassified = "unclassified"


def _regime_holds(regime: Regime, q: float, r: float) -> bool:
    if regime is Regime.MainI:
        return q < 1 and r >= q
    if regime is Regime.MainII:
        return q <= 0 and r >= q
    if regime is Regime.MainIII:
        return 1 < q <= 2 and r >= q
    if regime is Regime.MainIV:
        return 1.5 <= q <= 2 and r >= q
    if regime is Regime.MainV:
        return q >= 2 and r <= q
    return True


@dataclass(frozen=True)
class DeformParams:
    """A deformation pair (q, r) tagged with the theorem clause it falls under."""

    q: float
    r: float
    regime: Regime = Regime.Unclassified

    def __post_init__(self):
        if self.regime is not Regime.Unclassified and not _regime_holds(
            self.regime, self.q, self.r
        ):
            raise ParameterError(
                f"(q, r) = ({self.q}, {self.r}) is not in regime {self.regime.name}"
            )

    @staticmethod
    def regimes_for(q: float, r: float) -> list[Regime]:
        return [
            reg
            for reg in Regime
            if reg is not Regime.Unclassified and _regime_holds(reg, q, r)
        ]

    @classmethod
    def classify(cls, q: float, r: float) -> "DeformParams":
        regs = cls.regimes_for(q, r)
        return cls(q, r, regs[0] if regs else Regime.Unclassified)


class DomainSide(enum.Enum):
    BoundedAbove = "above"
    BoundedBelow = "below"
    Unconstrained = "none"


@dataclass(frozen=True)
class DomainConstraint:
    """Spectral admissibility for exp_q: A < -1/(q-1) if q < 1, A > -1/(q-1) if q > 1.

    ``margin`` defaults to ``1e-8 * (1 + |bound|)``.
    """

    q: float
    margin: float | None = None

    def __post_init__(self):
        if self.margin is not None and self.margin < 0:
            raise ValueError("margin must be non-negative")

    @property
    def side(self) -> DomainSide:
        if _is_classical(self.q):
            return DomainSide.Unconstrained
        return DomainSide.BoundedAbove if self.q < 1 else DomainSide.BoundedBelow

    @property
    def bound(self) -> float:
        if _is_classical(self.q):
            return float("nan")
        return -1.0 / (self.q - 1.0)

    @property
    def effective_margin(self) -> float:
        if self.margin is not None:
            return self.margin
        if _is_classical(self.q):
            return 0.0
        return 1e-8 * (1.0 + abs(self.bound))

    def admits(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        side = self.side
        if side is DomainSide.Unconstrained:
            return np.isfinite(values)
        if side is DomainSide.BoundedBelow:
            return values > self.bound + self.effective_margin
        return values < self.bound - self.effective_margin

    def describe(self) -> str:
        side = self.side
        if side is DomainSide.Unconstrained:
            return "unconstrained (q = 1)"
        rel = ">" if side is DomainSide.BoundedBelow else "<"
        return f"spectrum {rel} {self.bound:.6g} (q = {self.q:g})"


class DomainCheck(NamedTuple):
    ok: bool
    min_eigenvalue: float
    max_eigenvalue: float
    worst_eigenvalue: float


def check_domain(A, constraint: DomainConstraint) -> DomainCheck:
    """Test whether every eigenvalue of ``A`` satisfies ``constraint``.

    The worst eigenvalue is the one closest to (or furthest past) the bound:
    the minimum for a lower bound, the maximum for an upper bound.
    """
    lam = as_hermitian(A).eigenvalues
    lo, hi = float(lam[0]), float(lam[-1])
    worst = hi if constraint.side is DomainSide.BoundedAbove else lo
    return DomainCheck(bool(np.all(constraint.admits(lam))), lo, hi, worst)


# ---------------------------------------------------------------------------
# scalar deformed functions
# ---------------------------------------------------------------------------


def log_q(x, q: float):
    """Deformed logarithm, elementwise. Requires ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        bad = x[~(x > 0)].flat[0]
        raise DeformedDomainError(f"log_q needs x > 0, got {bad!r}")
    if _is_classical(q):
        return np.log(x)
    return np.expm1((q - 1.0) * np.log(x)) / (q - 1.0)


def exp_q(x, q: float):
    """Deformed exponential, elementwise. Requires ``1 + (q-1) x > 0``."""
    x = np.asarray(x, dtype=float)
    if _is_classical(q):
        return np.exp(x)
    base = (q - 1.0) * x
    bad = ~(base > -1.0)
    if np.any(bad):
        side = "above" if q > 1 else "below"
        raise DeformedDomainError(
            f"exp_q with q={q:g} needs x {side} -1/(q-1) = {-1.0 / (q - 1.0):.6g}, "
            f"got {x[bad].flat[0]!r}"
        )
    return np.exp(np.log1p(base) / (q - 1.0))


def log_q_scalar(x: float, q: float) -> float:
    return float(log_q(x, q))


def exp_q_scalar(x: float, q: float) -> float:
    return float(exp_q(x, q))


# ---------------------------------------------------------------------------
# spectral functional calculus
# ---------------------------------------------------------------------------


def apply_spectral(A, f: Callable[[np.ndarray], np.ndarray]) -> HermitianMatrix:
    """Return ``U diag(f(lambda)) U^*`` for ``A = U diag(lambda) U^*``.

    ``f`` is called once on the full eigenvalue vector. A domain error
    raised by ``f``, or a non-finite value it returns, is reported against
    the offending eigenvalue.
    """
    dec = as_hermitian(A).spectral
    lam = dec.eigenvalues
    with np.errstate(all="ignore"):
        try:
            vals = np.asarray(f(lam))
        except DeformedDomainError:
            # locate the eigenvalue that triggered it
            for v in lam:
                try:
                    f(np.array([v]))
                except DeformedDomainError as exc:
                    raise DeformedDomainError(f"eigenvalue {v!r}: {exc}") from None
            raise
    if np.iscomplexobj(vals):
        if np.any(vals.imag):
            raise DeformedDomainError("spectral function returned complex values")
        vals = vals.real
    vals = np.broadcast_to(vals, lam.shape).astype(float)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise DeformedDomainError(
            f"eigenvalue {lam[bad][0]!r} is outside the domain of the function"
        )
    return HermitianMatrix(dec.reconstruct(vals))


def matrix_power(A, p: float) -> HermitianMatrix:
    """``A**p`` for positive definite ``A`` (any real ``p``)."""
    A = as_hermitian(A)
    if not A.is_positive_definite():
        raise DeformedDomainError(
            f"matrix power needs a positive definite matrix, min eigenvalue "
            f"{A.eigenvalues[0]!r}"
        )
    return apply_spectral(A, lambda t: t**p)


def exp_q_matrix(A, q: float, margin: float | None = None) -> HermitianMatrix:
    A = as_hermitian(A)
    c = DomainConstraint(q, margin)
    chk = check_domain(A, c)
    if not chk.ok:
        raise DeformedDomainError(
            f"exp_q needs {c.describe()}; worst eigenvalue {chk.worst_eigenvalue!r}"
        )
    return apply_spectral(A, lambda t: exp_q(t, q))


def log_q_matrix(A, q: float) -> HermitianMatrix:
    A = as_hermitian(A)
    if not A.is_positive_definite():
        raise DeformedDomainError(
            f"log_q needs a positive definite matrix, min eigenvalue {A.eigenvalues[0]!r}"
        )
    return apply_spectral(A, lambda t: log_q(t, q))


# ---------------------------------------------------------------------------
# JSON matrix literal: {"dim": n, "re": [[...]], "im": [[...]]}
# ---------------------------------------------------------------------------


def parse_matrix_json(obj) -> HermitianMatrix:
    """Parse a matrix literal (a dict, a JSON string, or a path to a JSON file)."""
    if isinstance(obj, (str, bytes)):
        text = obj
        if isinstance(obj, str) and not obj.lstrip().startswith("{"):
            with open(obj, encoding="utf-8") as fh:
                text = fh.read()
        obj = json.loads(text)
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValueError('matrix literal must be an object with at least a "re" field')
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise ValueError(f'"re" must be a square 2-D array, got shape {re.shape}')
    if im.shape != re.shape:
        raise ValueError(f'"im" shape {im.shape} does not match "re" shape {re.shape}')
    dim = obj.get("dim", re.shape[0])
    if dim != re.shape[0]:
        raise ValueError(f'"dim" = {dim} but the matrix is {re.shape[0]}x{re.shape[0]}')
    M = re + 1j * im
    asym = np.abs(M - M.conj().T)
    tol = HERMITIAN_TOL * max(1.0, float(np.max(np.abs(M))))
    if asym.max() > tol:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise ValueError(
            f"matrix is not Hermitian: entry ({i},{j}) = {M[i, j]} vs conjugate of "
            f"({j},{i}) = {np.conj(M[j, i])} (difference {asym[i, j]:.3g})"
        )
    return HermitianMatrix(M)


def matrix_to_json(A) -> dict:
    M = np.asarray(as_hermitian(A).entries)
    out = {"dim": int(M.shape[0]), "re": M.real.tolist()}
    if np.iscomplexobj(M):
        out["im"] = M.imag.tolist()
    return out
