"""Deformed trace functionals and the inequalities built on them.

``G(A) = log_r Tr exp_q(A)`` and ``F(A) = log_r Tr B^* exp_q(A) B`` drive the
five-case generalized Peierls-Bogolyubov inequality

    log_r phi(exp_q(A+B)) - log_r phi(exp_q A)  >=  phi(exp_q A)**(r-2) * phi(D exp_q(A) B)

(reversed in case v). Every check here returns an :class:`InequalityReport`
whose ``slack`` is non-negative exactly when the inequality holds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    DeformParams,
    DomainConstraint,
    DeformedDomainError,
    HermitianMatrix,
    ParameterError,
    Q_ONE_TOL,
    Regime,
    _regime_holds,
    apply_spectral,
    as_hermitian,
    check_domain,
    exp_q,
    exp_q_matrix,
    matrix_power,
)
from .ensembles import EnsembleSpec, generate, random_matrix, stream
from .frechet import dfrechet_exp_q
from .quadrature import QuadratureSpec

__all__ = [
    "PositiveFunctional",
    "InequalityReport",
    "log_r_difference",
    "G_func",
    "F_func",
    "main_theorem_slack",
    "furuichi_slack",
    "classical_pb_slack",
    "variant_pb_slack",
    "VariantDirection",
    "RegimeRow",
    "TracePower",
    "TracePowerConjugated",
    "GTarget",
    "FTarget",
    "ProbeReport",
    "convexity_probe",
    "probe_regime_row",
    "TRACE_POWER_ROWS",
    "TRACE_POWER_CONJ_ROWS",
    "G_ROWS",
    "F_ROWS",
    "F_GAP_ROW",
    "relative_tolerance",
]

INEQUALITY_RTOL = 1e-8
PROBE_RTOL = 1e-7


def relative_tolerance(lhs: float, rhs: float, rtol: float = INEQUALITY_RTOL) -> float:
    return rtol * (1.0 + abs(lhs) + abs(rhs))


# ---------------------------------------------------------------------------
# positive functionals and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PositiveFunctional:
    """``X -> Tr X`` (``C is None``) or ``X -> Tr C^* X C``."""

    C: np.ndarray | None = field(default=None, compare=False)

    @classmethod
    def trace(cls) -> "PositiveFunctional":
        return cls()

    @classmethod
    def conjugated(cls, C) -> "PositiveFunctional":
        return cls(np.asarray(C))

    @property
    def is_trace(self) -> bool:
        return self.C is None

    @property
    def kind(self) -> str:
        return "trace" if self.is_trace else "conjugated"

    def __call__(self, X) -> float:
        X = np.asarray(X)
        if self.C is None:
            return float(np.trace(X).real)
        C = self.C
        # Tr C^* X C = sum_ij conj(C_ij) (X C)_ij
        return float(np.vdot(C, X @ C).real)


@dataclass
class InequalityReport:
    name: str
    case: str
    params: DeformParams
    lhs: float
    rhs: float
    slack: float
    tol: float
    dim: int = 0
    seed: int | None = None
    trial: int | None = None
    notes: str = ""

    @property
    def holds(self) -> bool:
        return self.slack >= -self.tol

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "case": self.case,
            "q": self.params.q,
            "r": self.params.r,
            "dim": self.dim,
            "seed": self.seed,
            "trial": self.trial,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "tol": self.tol,
        }


# ---------------------------------------------------------------------------
# G and F
# ---------------------------------------------------------------------------


def log_r_difference(x1: float, x0: float, r: float) -> float:
    """``log_r x1 - log_r x0`` without cancellation when ``x1 ~ x0``."""
    if not (x1 > 0 and x0 > 0):
        raise DeformedDomainError(f"log_r needs positive arguments, got {x1!r}, {x0!r}")
    lr = math.log(x1 / x0)
    if abs(r - 1.0) < Q_ONE_TOL:
        return lr
    return x0 ** (r - 1.0) * math.expm1((r - 1.0) * lr) / (r - 1.0)


def _log_r(x: float, r: float) -> float:
    if not x > 0:
        raise DeformedDomainError(f"log_r needs a positive argument, got {x!r}")
    if abs(r - 1.0) < Q_ONE_TOL:
        return math.log(x)
    return math.expm1((r - 1.0) * math.log(x)) / (r - 1.0)


def G_func(A, q: float, r: float) -> float:
    """``log_r Tr exp_q(A)``."""
    return _log_r(exp_q_matrix(A, q).trace(), r)


def F_func(A, B, q: float, r: float) -> float:
    """``log_r Tr B^* exp_q(A) B``; equals :func:`G_func` for ``B = I``."""
    E = exp_q_matrix(A, q)
    B = np.asarray(B)
    if B.shape != (E.dim, E.dim):
        raise ValueError(f"B has shape {B.shape}, expected {(E.dim, E.dim)}")
    if np.array_equal(B, np.eye(E.dim)):
        inner = E.trace()
    else:
        inner = PositiveFunctional.conjugated(B)(E)
    if not inner > 0:
        raise DeformedDomainError(f"Tr B^* exp_q(A) B = {inner!r} is not positive")
    return _log_r(inner, r)


# ---------------------------------------------------------------------------
# generalized Peierls-Bogolyubov
# ---------------------------------------------------------------------------

_TRACE_ONLY = {Regime.MainI, Regime.MainIII}
_REVERSED = {Regime.MainV}


def _as_case(case) -> Regime:
    if isinstance(case, Regime):
        if case is Regime.Unclassified:
            raise ParameterError("an explicit case i-v is required")
        return case
    key = str(case).lower()
    for reg in Regime:
        if reg.value == key and reg is not Regime.Unclassified:
            return reg
    raise ParameterError(f"unknown case {case!r}; expected one of i, ii, iii, iv, v")


def _require_domain(X: HermitianMatrix, c: DomainConstraint, operand: str) -> None:
    chk = check_domain(X, c)
    if not chk.ok:
        raise DeformedDomainError(
            f"operand {operand} violates {c.describe()}: worst eigenvalue "
            f"{chk.worst_eigenvalue!r}"
        )


def main_theorem_slack(
    case,
    A,
    B,
    q: float,
    r: float,
    phi: PositiveFunctional = PositiveFunctional(),
    spec: QuadratureSpec = QuadratureSpec(),
    *,
    frechet_method: str = "auto",
) -> InequalityReport:
    """Both sides of one case of the generalized Peierls-Bogolyubov inequality.

    Cases i and iii use the trace and the right side
    ``(Tr e)**(r-2) Tr e**(2-q) B`` with ``e = exp_q(A)``; cases ii, iv and v
    accept any positive functional and use ``phi(e)**(r-2) phi(D exp_q(A) B)``.

    Raises
    ------
    ParameterError
        If ``(q, r)`` is outside the case's regime, or a non-trace functional
        is passed to case i or iii.
    DeformedDomainError
        If ``A`` or ``A + B`` is not admissible for ``exp_q``.
    """
    reg = _as_case(case)
    if not _regime_holds(reg, q, r):
        raise ParameterError(f"(q, r) = ({q}, {r}) is outside the regime of case {reg.value}")
    if reg in _TRACE_ONLY and not phi.is_trace:
        raise ParameterError(f"case {reg.value} is stated for the trace only")
    A = as_hermitian(A)
    B = as_hermitian(B)
    AB = A + B
    c = DomainConstraint(q)
    _require_domain(A, c, "A")
    _require_domain(AB, c, "A+B")

    E0 = exp_q_matrix(A, q)
    E1 = exp_q_matrix(AB, q)
    phi0, phi1 = phi(E0), phi(E1)
    lhs = log_r_difference(phi1, phi0, r)
    notes = ""
    if reg in _TRACE_ONLY:
        W = apply_spectral(A, lambda t: exp_q(t, q) ** (2.0 - q))
        inner = float(np.vdot(np.asarray(W), np.asarray(B)).real)
    else:
        d = dfrechet_exp_q(A, B, q, spec, method=frechet_method)
        inner = phi(d.value)
        notes = f"frechet={d.method.value}"
    rhs = phi0 ** (r - 2.0) * inner
    slack = rhs - lhs if reg in _REVERSED else lhs - rhs
    return InequalityReport(
        name="main",
        case=reg.value,
        params=DeformParams(q, r, reg),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        tol=relative_tolerance(lhs, rhs),
        dim=A.dim,
        notes=notes,
    )


def furuichi_slack(A, B, q: float) -> InequalityReport:
    """Case iii at ``r = q``, computed directly from eigenvalues.

    Independent of :func:`main_theorem_slack`:
    ``(Tr e1**(q-1) ... )`` is replaced by scalar sums over spectra.
    """
    if not 1 < q <= 2:
        raise ParameterError(f"needs 1 < q <= 2, got q={q}")
    A = np.asarray(as_hermitian(A).entries)
    B = np.asarray(as_hermitian(B).entries)
    a, U = np.linalg.eigh(A)
    ab = np.linalg.eigvalsh(A + B)
    k = q - 1.0
    if np.any(1.0 + k * a <= 0) or np.any(1.0 + k * ab <= 0):
        raise DeformedDomainError(f"spectrum below {-1.0 / k:.6g}")
    e0 = (1.0 + k * a) ** (1.0 / k)
    e1 = (1.0 + k * ab) ** (1.0 / k)
    T0, T1 = e0.sum(), e1.sum()
    lhs = (T1**k - T0**k) / k
    Bd = np.einsum("ji,jk,ki->i", U.conj(), B, U).real
    rhs = T0 ** (q - 2.0) * float(np.sum(e0 ** (2.0 - q) * Bd))
    return InequalityReport(
        name="furuichi",
        case="iii",
        params=DeformParams(q, q, Regime.MainIII),
        lhs=float(lhs),
        rhs=rhs,
        slack=float(lhs) - rhs,
        tol=relative_tolerance(lhs, rhs),
        dim=A.shape[0],
    )


def classical_pb_slack(A, B) -> InequalityReport:
    """``log(Tr e^(A+B) / Tr e^A) - Tr(e^A B) / Tr e^A``."""
    A = as_hermitian(A)
    B = as_hermitian(B)
    AB = A + B
    s0 = float(A.eigenvalues[-1])
    s1 = float(AB.eigenvalues[-1])
    E0 = apply_spectral(A, lambda t: np.exp(t - s0))
    E1 = apply_spectral(AB, lambda t: np.exp(t - s1))
    T0, T1 = E0.trace(), E1.trace()
    lhs = math.log(T1 / T0) + (s1 - s0)
    rhs = float(np.vdot(np.asarray(E0), np.asarray(B)).real) / T0
    return InequalityReport(
        name="classical-pb",
        case="iii",
        params=DeformParams(1.0, 1.0),
        lhs=lhs,
        rhs=rhs,
        slack=lhs - rhs,
        tol=relative_tolerance(lhs, rhs),
        dim=A.dim,
    )


# ---------------------------------------------------------------------------
# variant inequality for (Tr A^p)^(1/r)
# ---------------------------------------------------------------------------


class VariantDirection(enum.Enum):
    Convex = "convex"
    Concave = "concave"


def _variant_regime(direction: VariantDirection, p: float, r: float) -> bool:
    if direction is VariantDirection.Convex:
        return p >= 1 and 0 < r <= p
    return (0 < p <= 1 and r >= p) or (p < 0 and r <= p)


def variant_pb_slack(direction, A, B, p: float, r: float) -> InequalityReport:
    """``(Tr (A+B)**p)**(1/r) - (Tr A**p)**(1/r)`` against ``(p/r)(Tr A**p)**((1-r)/r) Tr A**(p-1) B``.

    The convex direction claims ``>=`` (``p >= 1``, ``0 < r <= p``); the concave
    direction claims ``<=`` (``0 < p <= 1, r >= p`` or ``r <= p < 0``).
    """
    direction = VariantDirection(direction) if not isinstance(direction, VariantDirection) else direction
    if not _variant_regime(direction, p, r):
        raise ParameterError(f"(p, r) = ({p}, {r}) is outside the {direction.value} regime")
    A = as_hermitian(A)
    B = as_hermitian(B)
    for name, X in (("A", A), ("B", B)):
        if not X.is_positive_definite():
            raise DeformedDomainError(f"{name} must be positive definite")
    t0 = matrix_power(A, p).trace()
    t1 = matrix_power(A + B, p).trace()
    lhs = t1 ** (1.0 / r) - t0 ** (1.0 / r)
    Ap1 = np.asarray(matrix_power(A, p - 1.0))
    rhs = (p / r) * t0 ** ((1.0 - r) / r) * float(np.vdot(Ap1, np.asarray(B)).real)
    slack = lhs - rhs if direction is VariantDirection.Convex else rhs - lhs
    return InequalityReport(
        name="variant",
        case=direction.value,
        params=DeformParams(p, r),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        tol=relative_tolerance(lhs, rhs),
        dim=A.dim,
    )


# ---------------------------------------------------------------------------
# convexity probes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeRow:
    """One clause of a convexity statement: where it applies and what it claims."""

    label: str
    claim: str | None
    applies: Callable[[float, float], bool]
    grid: tuple[tuple[float, float], ...]

    @property
    def exploratory(self) -> bool:
        return self.claim is None


# (p, r) for (Tr A^p)^(1/r)
TRACE_POWER_ROWS = (
    RegimeRow("i", "concave", lambda p, r: r <= p < 0,
              ((-0.5, -0.5), (-0.5, -2.0), (-2.0, -3.0), (-1.0, -1.0))),
    RegimeRow("ii", "convex", lambda p, r: p < 0 and r > 0,
              ((-0.5, 1.0), (-1.0, 0.5), (-2.0, 3.0))),
    RegimeRow("iii", "concave", lambda p, r: 0 < p <= 1 and r >= p,
              ((0.5, 0.5), (0.5, 2.0), (1.0, 3.0), (0.3, 5.0))),
    RegimeRow("iv", "convex", lambda p, r: p >= 1 and 0 < r <= p,
              ((1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (3.0, 0.5), (1.5, 1.5))),
    RegimeRow("v", "convex", lambda p, r: 0 < p <= 1 and r < 0,
              ((0.5, -1.0), (1.0, -0.5), (0.2, -3.0))),
)

# (p, r) for (Tr B^* A^p B)^(1/r)
TRACE_POWER_CONJ_ROWS = (
    RegimeRow("i", "concave", lambda p, r: -1 <= p < 0 and r <= p,
              ((-0.5, -0.5), (-1.0, -1.0), (-0.5, -2.0), (-1.0, -3.0))),
    RegimeRow("ii", "convex", lambda p, r: -1 <= p < 0 and r > 0,
              ((-0.5, 1.0), (-1.0, 0.5), (-0.3, 2.0))),
    RegimeRow("iii", "concave", lambda p, r: 0 < p <= 1 and r >= p,
              ((0.5, 0.5), (0.5, 2.0), (1.0, 1.0), (0.3, 4.0))),
    RegimeRow("iv", "convex", lambda p, r: 1 <= p <= 2 and 0 < r <= p,
              ((1.0, 1.0), (1.5, 1.0), (2.0, 2.0), (2.0, 0.5))),
    RegimeRow("v", "convex", lambda p, r: 0 < p <= 1 and r < 0,
              ((0.5, -1.0), (1.0, -0.5))),
)

# (q, r) for log_r Tr exp_q(A)
G_ROWS = (
    RegimeRow("i", "convex", lambda q, r: q < 1 and r >= q,
              ((-2.0, -2.0), (-1.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 3.0), (0.9, 1.0), (-0.5, 1.5))),
    RegimeRow("ii", "convex", lambda q, r: 1 < q <= 2 and r >= q,
              ((1.2, 1.2), (1.5, 2.0), (2.0, 2.0), (1.8, 4.0))),
    RegimeRow("iii", "concave", lambda q, r: q >= 2 and r <= q,
              ((2.0, 2.0), (2.5, 2.0), (3.0, 1.0), (5.0, -1.0), (3.0, 3.0))),
)

# (q, r) for log_r Tr B^* exp_q(A) B
F_ROWS = (
    RegimeRow("i", "convex", lambda q, r: q <= 0 and r >= q,
              ((-2.0, -2.0), (-1.0, 0.5), (0.0, 0.0), (0.0, 2.0), (-0.5, 1.5))),
    RegimeRow("ii", "convex", lambda q, r: 1.5 <= q <= 2 and r >= q,
              ((1.5, 1.5), (1.75, 2.0), (2.0, 3.0))),
    RegimeRow("iii", "concave", lambda q, r: q >= 2 and r <= q,
              ((2.0, 2.0), (2.5, 1.0), (3.0, -1.0), (4.0, 4.0))),
)
F_GAP_ROW = RegimeRow("gap", None, lambda q, r: 0 < q < 1.5 and q != 1,
                      ((0.5, 1.0), (1.2, 2.0), (1.2, 1.2), (0.8, 0.8)))


class _Target:
    rows: tuple[RegimeRow, ...] = ()
    name = ""

    def params(self) -> tuple[float, float]:
        raise NotImplementedError

    def classify(self) -> RegimeRow:
        a, b = self.params()
        for row in self.rows:
            if row.applies(a, b):
                return row
        return RegimeRow("unclassified", None, lambda *_: True, ())

    def ensemble(self) -> EnsembleSpec:
        return EnsembleSpec(positive=True)

    def with_params(self, a: float, b: float) -> "_Target":
        raise NotImplementedError

    def needs_B(self) -> bool:
        return False

    def value(self, X: HermitianMatrix, B: np.ndarray | None) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class TracePower(_Target):
    p: float
    r: float
    rows = TRACE_POWER_ROWS
    name = "trace-power"

    def params(self):
        return self.p, self.r

    def with_params(self, a, b):
        return TracePower(a, b)

    def value(self, X, B):
        return matrix_power(X, self.p).trace() ** (1.0 / self.r)


@dataclass(frozen=True)
class TracePowerConjugated(_Target):
    p: float
    r: float
    B: np.ndarray | None = field(default=None, compare=False)
    rows = TRACE_POWER_CONJ_ROWS
    name = "trace-power-conj"

    def params(self):
        return self.p, self.r

    def with_params(self, a, b):
        return TracePowerConjugated(a, b, self.B)

    def needs_B(self):
        return self.B is None

    def value(self, X, B):
        B = self.B if self.B is not None else B
        return PositiveFunctional.conjugated(B)(matrix_power(X, self.p)) ** (1.0 / self.r)


@dataclass(frozen=True)
class GTarget(_Target):
    q: float
    r: float
    rows = G_ROWS
    name = "G"

    def params(self):
        return self.q, self.r

    def with_params(self, a, b):
        return GTarget(a, b)

    def ensemble(self):
        return EnsembleSpec(constraint=DomainConstraint(self.q))

    def value(self, X, B):
        return G_func(X, self.q, self.r)


@dataclass(frozen=True)
class FTarget(_Target):
    q: float
    r: float
    B: np.ndarray | None = field(default=None, compare=False)
    rows = F_ROWS + (F_GAP_ROW,)
    name = "F"

    def params(self):
        return self.q, self.r

    def with_params(self, a, b):
        return FTarget(a, b, self.B)

    def ensemble(self):
        return EnsembleSpec(constraint=DomainConstraint(self.q))

    def needs_B(self):
        return self.B is None

    def value(self, X, B):
        return F_func(X, self.B if self.B is not None else B, self.q, self.r)


@dataclass
class ProbeReport:
    """Worst midpoint violation found. Probing can falsify a claim, never certify it."""

    target: str
    row: str
    claim: str | None
    samples: int
    worst_violation: float
    worst_sample: int
    worst_params: tuple[float, float]
    violations: int
    records: list[dict] = field(default_factory=list, repr=False)

    @property
    def exploratory(self) -> bool:
        return self.claim is None

    @property
    def falsified(self) -> bool:
        return not self.exploratory and self.violations > 0

    def summary(self) -> str:
        if self.exploratory:
            verdict = "exploratory (no claim)"
        elif self.falsified:
            verdict = f"FALSIFIED ({self.violations} genuine violations)"
        else:
            verdict = "no violation found (not a proof)"
        a, b = self.worst_params
        return (
            f"{self.target} row {self.row} [{self.claim or '-'}]: {self.samples} samples, "
            f"worst relative violation {self.worst_violation:.3e} at sample "
            f"{self.worst_sample} (params {a:g}, {b:g}); {verdict}"
        )


def _midpoint_violation(target: _Target, claim: str | None, X, Y, B) -> tuple[float, float, float]:
    fx, fy = target.value(X, B), target.value(Y, B)
    fm = target.value(HermitianMatrix(0.5 * (np.asarray(X) + np.asarray(Y))), B)
    gap = fm - 0.5 * (fx + fy)
    # exploratory rows are scored against convexity
    v = -gap if claim == "concave" else gap
    scale = max(abs(fx), abs(fy), abs(fm), 1e-300)
    return v / scale, v, scale


def probe_regime_row(
    target: _Target,
    row: RegimeRow,
    samples: int = 500,
    seed: int = 0,
    dims=(2, 3, 4),
    *,
    rtol: float = PROBE_RTOL,
) -> ProbeReport:
    """Midpoint test ``f((X+Y)/2)`` vs ``(f(X)+f(Y))/2`` over a row's parameter grid.

    Sample ``i`` uses grid point ``i mod len(grid)``, dimension
    ``dims[i mod len(dims)]`` and the stream ``(seed, i, target.name)``.
    """
    grid = row.grid or (target.params(),)
    worst, worst_i, worst_params, count = -math.inf, -1, grid[0], 0
    records = []
    for i in range(samples):
        a, b = grid[i % len(grid)]
        t = target.with_params(a, b)
        rng = stream(seed, i, f"probe/{target.name}/{row.label}")
        dim = dims[i % len(dims)]
        ens = t.ensemble()
        X = generate(ens, dim, rng)
        Y = generate(ens, dim, rng)
        B = random_matrix(dim, rng) if t.needs_B() else None
        rel, _, _ = _midpoint_violation(t, row.claim, X, Y, B)
        records.append({"sample": i, "a": a, "b": b, "dim": dim, "violation": rel})
        if rel > rtol:
            count += 1
        if rel > worst:
            worst, worst_i, worst_params = rel, i, (a, b)
    return ProbeReport(target.name, row.label, row.claim, samples, worst, worst_i,
                       worst_params, count, records)


def convexity_probe(target: _Target, samples: int = 500, seed: int = 0, dims=(2, 3, 4)) -> ProbeReport:
    """Probe a single parameter point; its regime row decides the claim tested."""
    row = target.classify()
    single = RegimeRow(row.label, row.claim, row.applies, (target.params(),))
    return probe_regime_row(target, single, samples, seed, dims)
