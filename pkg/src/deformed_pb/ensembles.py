"""Seeded random matrices with prescribed spectral constraints.

Every draw comes from a counter-based Philox stream keyed by
``(seed, trial, tag)``, so any single trial of a sweep can be replayed
without re-running the ones before it.
"""

from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass

import numpy as np

from .core import DomainConstraint, DomainSide, HermitianMatrix

__all__ = [
    "stream",
    "EnsembleKind",
    "EnsembleSpec",
    "generate",
    "random_hermitian",
    "random_matrix",
    "random_positive_definite",
    "random_state",
]


def _tag_code(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, trial: int = 0, tag: str = "") -> np.random.Generator:
    """Independent generator for ``(seed, trial, tag)``."""
    if seed < 0 or trial < 0:
        raise ValueError("seed and trial must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial), _tag_code(tag)))
    return np.random.Generator(np.random.Philox(ss))


class EnsembleKind(enum.Enum):
    GaussianHermitian = "gue"
    RealSymmetric = "goe"
    Diagonal = "diag"


def _eigvecs(kind: EnsembleKind, dim: int, rng: np.random.Generator) -> np.ndarray:
    if kind is EnsembleKind.Diagonal:
        return np.eye(dim)
    G = rng.standard_normal((dim, dim))
    if kind is EnsembleKind.GaussianHermitian:
        G = G + 1j * rng.standard_normal((dim, dim))
    _, U = np.linalg.eigh(0.5 * (G + G.conj().T))
    return U


@dataclass(frozen=True)
class EnsembleSpec:
    """Where generated spectra live.

    With a constraint bounded below by ``b`` spectra fall in
    ``[b + offset, b + offset + spectrum_width]``; bounded above, in the
    mirrored interval. ``positive=True`` without a constraint means
    positive definite, ``[offset, offset + spectrum_width]``. Otherwise
    spectra are centred on zero.
    """

    kind: EnsembleKind = EnsembleKind.GaussianHermitian
    constraint: DomainConstraint | None = None
    spectrum_width: float = 2.0
    offset: float = 0.05
    positive: bool = False

    def __post_init__(self):
        if not self.spectrum_width > 0 or not self.offset > 0:
            raise ValueError("spectrum_width and offset must be positive")

    def interval(self) -> tuple[float, float]:
        c = self.constraint
        if c is not None and c.side is DomainSide.BoundedBelow:
            lo = c.bound + max(self.offset, 2 * c.effective_margin)
            return lo, lo + self.spectrum_width
        if c is not None and c.side is DomainSide.BoundedAbove:
            hi = c.bound - max(self.offset, 2 * c.effective_margin)
            return hi - self.spectrum_width, hi
        if self.positive:
            return self.offset, self.offset + self.spectrum_width
        return -0.5 * self.spectrum_width, 0.5 * self.spectrum_width


def generate(spec: EnsembleSpec, dim: int, rng: np.random.Generator) -> HermitianMatrix:
    """Random Hermitian matrix with spectrum inside ``spec.interval()``.

    A Gaussian spectrum is mapped affinely onto a random sub-interval, so
    both spectra hugging the boundary and spectra far from it occur.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    lo, hi = spec.interval()
    width = hi - lo
    raw = np.sort(rng.standard_normal(dim))
    u1, u2 = rng.random(2)
    a = lo + width * 0.5 * u1**2
    b = a + (hi - a) * (0.25 + 0.75 * u2)
    if dim == 1:
        lam = np.array([a + (b - a) * rng.random()])
    else:
        span = raw[-1] - raw[0]
        lam = a + (b - a) * (raw - raw[0]) / span if span > 0 else np.full(dim, 0.5 * (a + b))
    lam = np.clip(lam, lo, hi)
    U = _eigvecs(spec.kind, dim, rng)
    return HermitianMatrix((U * lam) @ U.conj().T)


def random_hermitian(dim: int, rng: np.random.Generator, *, real: bool = False) -> HermitianMatrix:
    G = rng.standard_normal((dim, dim))
    if not real:
        G = G + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix(0.5 * (G + G.conj().T))


def random_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """General complex matrix with standard Gaussian entries."""
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def random_positive_definite(
    dim: int, rng: np.random.Generator, *, offset: float = 0.05, width: float = 2.0
) -> HermitianMatrix:
    return generate(EnsembleSpec(offset=offset, spectrum_width=width, positive=True), dim, rng)


def random_state(dim: int, rng: np.random.Generator, *, floor: float = 1e-3) -> HermitianMatrix:
    """Full-rank density matrix: Haar eigenvectors, Dirichlet eigenvalues above ``floor``."""
    w = rng.dirichlet(np.ones(dim))
    lam = floor + (1.0 - dim * floor) * w
    U = _eigvecs(EnsembleKind.GaussianHermitian, dim, rng)
    rho = (U * lam) @ U.conj().T
    return HermitianMatrix(rho / np.trace(rho).real)
