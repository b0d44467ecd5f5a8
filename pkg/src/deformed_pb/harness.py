"""Seeded verification sweeps over the theorem regimes.

A sweep is described by a :class:`RunConfig`. Trial ``k`` draws all of its
randomness from ``stream(seed, k, purpose)``, so :func:`replay` reproduces
any single trial, bit for bit, without running the others. Trials run in a
process pool when ``jobs > 1`` and are always emitted in trial order.
"""

from __future__ import annotations

import csv
import enum
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import IO, Iterable

import numpy as np

from .core import (
    AccuracyError,
    DeformedDomainError,
    DomainConstraint,
    HermitianMatrix,
    ParameterError,
    Regime,
    _regime_holds,
    exp_q,
    log_q,
)
from .ensembles import (
    EnsembleSpec,
    generate,
    random_hermitian,
    random_matrix,
    random_positive_definite,
    random_state,
    stream,
)
from .entropy import (
    DensityPair,
    state_overlap,
    tsallis_lower_bound,
    tsallis_relative_entropy,
    umegaki_relative_entropy,
)
from .frechet import (
    dfrechet_divided_difference,
    dfrechet_exp_q,
    dfrechet_finite_difference,
    dfrechet_log_q,
    dfrechet_power_integral,
)
from .functionals import (
    F_GAP_ROW,
    F_ROWS,
    FTarget,
    G_ROWS,
    GTarget,
    PositiveFunctional,
    TRACE_POWER_CONJ_ROWS,
    TRACE_POWER_ROWS,
    TracePower,
    TracePowerConjugated,
    VariantDirection,
    _midpoint_violation,
    _variant_regime,
    main_theorem_slack,
    relative_tolerance,
    variant_pb_slack,
)
from .quadrature import QuadratureSpec

__all__ = [
    "Command",
    "OutputFormat",
    "ConfigError",
    "RunConfig",
    "RunSummary",
    "GRIDS",
    "CSV_COLUMNS",
    "default_grid_name",
    "format_grids",
    "run_trial",
    "replay",
    "run",
    "run_single",
]

CSV_COLUMNS = ("name", "case", "q", "r", "dim", "seed", "trial", "lhs", "rhs", "slack", "holds", "tol")
FRECHET_RTOL = 1e-5
LEMMA_TOL = 1e-10
LEMMA_P = tuple(np.linspace(0.0, 1.0, 21))
LIMIT_P = (0.9, 0.99, 0.999)


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


class Command(enum.Enum):
    VerifyMain = "main"
    VerifyVariant = "variant"
    VerifyConvexity = "convexity"
    VerifyEntropy = "entropy"
    FrechetCheck = "frechet"


class OutputFormat(enum.Enum):
    JsonLines = "jsonl"
    Csv = "csv"


# ---------------------------------------------------------------------------
# named grids
# ---------------------------------------------------------------------------


def _qr_grid(qs, rs_for) -> tuple[tuple[float, float], ...]:
    out = []
    for q in qs:
        for r in sorted(set(rs_for(q))):
            out.append((float(q), float(r)))
    return tuple(out)


_Q_LOW = (-2.0, -1.0, -0.5, 0.0)

GRIDS: dict[str, tuple] = {
    "main-i": _qr_grid(_Q_LOW + (0.3, 0.5, 0.9),
                       lambda q: [r for r in (q, q + 0.5, 1.0, 1.5, 3.0) if r >= q]),
    "main-ii": _qr_grid(_Q_LOW, lambda q: [r for r in (q, q + 0.5, 1.0, 1.5, 3.0) if r >= q]),
    "main-iii": _qr_grid((1.1, 1.3, 1.5, 1.8, 2.0), lambda q: (q, q + 0.5, 3.0, 5.0)),
    "main-iv": _qr_grid((1.5, 1.75, 2.0), lambda q: (q, q + 0.5, 3.0, 5.0)),
    "main-v": _qr_grid((2.0, 2.5, 3.0, 5.0),
                       lambda q: [r for r in (q, q - 0.5, 1.0, 0.5, -1.0) if r <= q]),
    "furuichi": ((1.2, 1.2), (1.5, 1.5), (2.0, 2.0)),
    "variant-convex": ((1.0, 1.0), (1.0, 0.5), (1.5, 1.0), (2.0, 1.0), (2.0, 2.0),
                       (3.0, 1.5), (3.0, 3.0), (4.0, 0.5)),
    "variant-concave-pos": ((0.5, 0.5), (0.5, 1.0), (0.3, 2.0), (1.0, 1.0), (0.8, 3.0)),
    "variant-concave-neg": ((-0.5, -0.5), (-0.5, -1.0), (-1.0, -3.0), (-2.0, -2.0)),
    # (family, parameter): power -> exponent p, log -> q, exp -> q
    "frechet": (("power", -0.75), ("power", -0.5), ("power", -0.25), ("power", 0.25),
                ("power", 0.5), ("power", 0.75), ("power", 1.25), ("power", 1.5),
                ("power", 1.75), ("log", 1.25), ("log", 1.5), ("log", 1.75),
                ("exp", -2.0), ("exp", -0.5), ("exp", 0.0), ("exp", 1.5), ("exp", 1.75),
                ("exp", 2.0), ("exp", 2.5), ("exp", 4.0)),
    "frechet-exp": (("exp", -2.0), ("exp", -0.5), ("exp", 0.0), ("exp", 1.5), ("exp", 1.75),
                    ("exp", 2.0), ("exp", 2.5), ("exp", 4.0)),
    "entropy-bound": tuple((q, 0.0) for q in (0.2, 0.5, 0.8, 1.0)),
}
GRIDS["variant-concave"] = GRIDS["variant-concave-pos"] + GRIDS["variant-concave-neg"]

_CONVEXITY_FAMILIES = {
    "trace-power": (TracePower(1.0, 1.0), TRACE_POWER_ROWS),
    "trace-power-conj": (TracePowerConjugated(1.0, 1.0), TRACE_POWER_CONJ_ROWS),
    "G": (GTarget(2.0, 2.0), G_ROWS),
    "F": (FTarget(2.0, 2.0), F_ROWS + (F_GAP_ROW,)),
}
for _name, (_t, _rows) in _CONVEXITY_FAMILIES.items():
    for _row in _rows:
        GRIDS[f"convexity-{_name}-{_row.label}"] = _row.grid

_SELECTORS = {
    Command.VerifyMain: ("i", "ii", "iii", "iv", "v"),
    Command.VerifyVariant: ("convex", "concave"),
    Command.VerifyConvexity: tuple(_CONVEXITY_FAMILIES),
    Command.VerifyEntropy: ("lemma", "bound", "limits"),
    Command.FrechetCheck: ("dd", "quad", "both"),
}


def default_grid_name(command: Command, selector: str) -> str | None:
    if command is Command.VerifyMain:
        return f"main-{selector}"
    if command is Command.VerifyVariant:
        return f"variant-{selector}"
    if command is Command.FrechetCheck:
        return "frechet"
    if command is Command.VerifyEntropy and selector == "bound":
        return "entropy-bound"
    return None


def format_grids() -> str:
    lines = []
    for name in sorted(GRIDS):
        pts = ", ".join(f"({a}, {b})" if not isinstance(a, str) else f"{a}:{b}" for a, b in GRIDS[name])
        lines.append(f"{name}: {pts}")
    lines.append("")
    lines.append("main-theorem regimes: i: q<1, r>=q | ii: q<=0, r>=q | iii: 1<q<=2, r>=q | "
                 "iv: 3/2<=q<=2, r>=q | v: q>=2, r<=q")
    lines.append("variant regimes: convex: p>=1, 0<r<=p | concave: 0<p<=1, r>=p or r<=p<0")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    command: Command
    selector: str
    dims: tuple[int, ...] = (2, 3, 4, 8)
    trials: int = 1000
    seed: int = 0
    grid: tuple | str | None = None
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    out: str | None = None
    format: OutputFormat = OutputFormat.JsonLines
    jobs: int = 1
    tol: float | None = None
    functional: str = "mixed"

    def validate(self) -> "RunConfig":
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ConfigError(f"dims must all be at least 1, got {list(self.dims)}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.functional not in ("trace", "conjugated", "mixed"):
            raise ConfigError(f"unknown functional {self.functional!r}")
        allowed = _SELECTORS[self.command]
        if self.selector not in allowed:
            raise ConfigError(
                f"{self.command.value}: selector must be one of {', '.join(allowed)}, "
                f"got {self.selector!r}"
            )
        grid = self.resolved_grid()
        if self.command is Command.VerifyMain:
            reg = next(r for r in Regime if r.value == self.selector)
            bad = [(q, r) for q, r in grid if not _regime_holds(reg, q, r)]
            if bad:
                raise ConfigError(
                    f"(q, r) = {bad[0]} is outside the regime of case {self.selector}; "
                    f"regime table: {format_grids().splitlines()[-2]}"
                )
            if self.selector in ("i", "iii") and self.functional == "conjugated":
                raise ConfigError(f"case {self.selector} is stated for the trace only")
        elif self.command is Command.VerifyVariant:
            d = VariantDirection(self.selector)
            bad = [(p, r) for p, r in grid if not _variant_regime(d, p, r)]
            if bad:
                raise ConfigError(
                    f"(p, r) = {bad[0]} is outside the {self.selector} regime; "
                    f"regime table: {format_grids().splitlines()[-1]}"
                )
        return self

    def resolved_grid(self) -> tuple:
        g = self.grid
        if g is None:
            name = default_grid_name(self.command, self.selector)
            return GRIDS[name] if name else ()
        if isinstance(g, str):
            if g not in GRIDS:
                raise ConfigError(f"unknown grid {g!r}; see --print-grids")
            return GRIDS[g]
        return tuple(tuple(x) for x in g)

    def total_trials(self) -> int:
        if self.command is Command.VerifyConvexity:
            return self.trials * len(self._convexity_rows())
        return self.trials * len(self.dims)

    def _convexity_rows(self):
        target, rows = _CONVEXITY_FAMILIES[self.selector]
        if self.grid is not None:
            from .functionals import RegimeRow

            grid = self.resolved_grid()
            row = target.with_params(*grid[0]).classify()
            return (RegimeRow(row.label, row.claim, row.applies, grid),)
        return rows

    def header(self) -> dict:
        return {
            "command": self.command.value,
            "selector": self.selector,
            "dims": list(self.dims),
            "trials": self.trials,
            "seed": self.seed,
            "grid": self.grid if isinstance(self.grid, str) or self.grid is None else [list(x) for x in self.grid],
            "nodes": self.quadrature.nodes,
            "abs_tol": self.quadrature.abs_tol,
            "tol": self.tol,
            "functional": self.functional,
        }


# ---------------------------------------------------------------------------
# trials
# ---------------------------------------------------------------------------


def _record(name, case, q, r, dim, cfg, trial, lhs, rhs, slack, tol, **extra) -> dict:
    rec = {
        "name": name,
        "case": case,
        "q": q,
        "r": r,
        "dim": dim,
        "seed": cfg.seed,
        "trial": trial,
        "lhs": lhs,
        "rhs": rhs,
        "slack": slack,
        "holds": bool(slack is not None and slack >= -tol),
        "tol": tol,
    }
    rec.update(extra)
    return rec


def _rtol(cfg: RunConfig, default: float) -> float:
    return default if cfg.tol is None else cfg.tol


def _split(cfg: RunConfig, trial: int) -> tuple[int, int]:
    """(dimension, index within the dimension block) for a flat trial index."""
    return cfg.dims[trial // cfg.trials], trial % cfg.trials


def _main_trial(cfg: RunConfig, trial: int) -> dict:
    dim, k = _split(cfg, trial)
    grid = cfg.resolved_grid()
    q, r = grid[k % len(grid)]
    rng = stream(cfg.seed, trial, f"main/{cfg.selector}")
    ens = EnsembleSpec(constraint=DomainConstraint(q))
    A = generate(ens, dim, rng)
    B = generate(ens, dim, rng) - A
    C = random_matrix(dim, rng)
    trace_only = cfg.selector in ("i", "iii")
    use_conj = not trace_only and (
        cfg.functional == "conjugated" or (cfg.functional == "mixed" and k % 2 == 1)
    )
    phi = PositiveFunctional.conjugated(C) if use_conj else PositiveFunctional.trace()
    try:
        rep = main_theorem_slack(cfg.selector, A, B, q, r, phi, cfg.quadrature)
    except AccuracyError as exc:
        return _record("main", cfg.selector, q, r, dim, cfg, trial, None, None, None,
                       None, error=str(exc))
    tol = relative_tolerance(rep.lhs, rep.rhs, _rtol(cfg, 1e-8))
    return _record("main", cfg.selector, q, r, dim, cfg, trial, rep.lhs, rep.rhs, rep.slack, tol)


def _variant_trial(cfg: RunConfig, trial: int) -> dict:
    dim, k = _split(cfg, trial)
    grid = cfg.resolved_grid()
    p, r = grid[k % len(grid)]
    rng = stream(cfg.seed, trial, f"variant/{cfg.selector}")
    A = random_positive_definite(dim, rng)
    B = random_positive_definite(dim, rng)
    rep = variant_pb_slack(cfg.selector, A, B, p, r)
    tol = relative_tolerance(rep.lhs, rep.rhs, _rtol(cfg, 1e-8))
    return _record("variant", cfg.selector, p, r, dim, cfg, trial, rep.lhs, rep.rhs, rep.slack, tol)


def _convexity_trial(cfg: RunConfig, trial: int) -> dict:
    rows = cfg._convexity_rows()
    row = rows[trial // cfg.trials]
    i = trial % cfg.trials
    base, _ = _CONVEXITY_FAMILIES[cfg.selector]
    a, b = row.grid[i % len(row.grid)]
    target = base.with_params(a, b)
    dim = cfg.dims[i % len(cfg.dims)]
    rng = stream(cfg.seed, trial, f"convexity/{cfg.selector}")
    ens = target.ensemble()
    X = generate(ens, dim, rng)
    Y = generate(ens, dim, rng)
    B = random_matrix(dim, rng) if target.needs_B() else None
    rel, v, scale = _midpoint_violation(target, row.claim, X, Y, B)
    tol = _rtol(cfg, 1e-7) * scale
    claim = row.claim or "exploratory"
    return _record(f"convexity-{cfg.selector}", f"{row.label}:{claim}", a, b, dim, cfg, trial,
                   v, 0.0, -v, tol, exploratory=row.exploratory)


def _entropy_trial(cfg: RunConfig, trial: int) -> dict:
    dim, k = _split(cfg, trial)
    rng = stream(cfg.seed, trial, f"entropy/{cfg.selector}")
    if cfg.selector == "lemma":
        pair = DensityPair(random_state(dim, rng), random_state(dim, rng))
        vals = [state_overlap(pair.rho, pair.sigma, p) for p in LEMMA_P]
        j = int(np.argmax(vals))
        tol = _rtol(cfg, LEMMA_TOL)
        return _record("lemma", "states", float(LEMMA_P[j]), None, dim, cfg, trial,
                       vals[j], 1.0, 1.0 - vals[j], tol)
    if cfg.selector == "bound":
        grid = cfg.resolved_grid()
        q = grid[k % len(grid)][0]
        p = q - 3.0 * float(rng.random())
        X = random_positive_definite(dim, rng) * float(np.exp(rng.normal()))
        Y = random_positive_definite(dim, rng) * float(np.exp(rng.normal()))
        d = tsallis_relative_entropy(X, Y, q)
        lb = tsallis_lower_bound(X, Y, q, p)
        tol = relative_tolerance(d, lb, _rtol(cfg, 1e-8))
        return _record("tsallis-bound", "bound", q, p, dim, cfg, trial, d, lb, d - lb, tol)
    # limits: |D_p - U| must shrink monotonically as p -> 1
    rho, sigma = random_state(dim, rng), random_state(dim, rng)
    u = umegaki_relative_entropy(rho, sigma)
    errs = [abs(tsallis_relative_entropy(rho, sigma, p) - u) for p in LIMIT_P]
    slack = min(errs[0] - errs[1], errs[1] - errs[2])
    return _record("tsallis-limit", "limits", LIMIT_P[-1], None, dim, cfg, trial,
                   errs[-1], errs[0], slack, 0.0)


def _frechet_trial(cfg: RunConfig, trial: int) -> dict:
    dim, k = _split(cfg, trial)
    grid = cfg.resolved_grid()
    family, param = grid[k % len(grid)]
    rng = stream(cfg.seed, trial, "frechet")
    h = random_hermitian(dim, rng)
    if family == "exp":
        x = generate(EnsembleSpec(constraint=DomainConstraint(param)), dim, rng)
        f = lambda t: exp_q(t, param)
        fp = lambda t: exp_q(t, param) ** (2.0 - param)
        quad = lambda: dfrechet_exp_q(x, h, param, cfg.quadrature)
    elif family == "log":
        x = random_positive_definite(dim, rng)
        f = lambda t: log_q(t, param)
        fp = lambda t: t ** (param - 2.0)
        quad = lambda: dfrechet_log_q(x, h, param, cfg.quadrature)
    elif family == "power":
        x = random_positive_definite(dim, rng)
        f = lambda t: t**param
        fp = lambda t: param * t ** (param - 1.0)
        quad = lambda: dfrechet_power_integral(x, h, param, cfg.quadrature)
    else:
        raise ConfigError(f"unknown differential family {family!r}")
    routes = {}
    try:
        if cfg.selector in ("quad", "both"):
            routes["quad"] = np.asarray(quad().value)
    except AccuracyError as exc:
        return _record("frechet", f"{family}", param, None, dim, cfg, trial, None, None, None,
                       None, error=str(exc))
    if cfg.selector in ("dd", "both"):
        routes["dd"] = np.asarray(dfrechet_divided_difference(x, h, f, fp).value)
    routes["fd"] = dfrechet_finite_difference(x, h, f)
    names = sorted(routes)
    worst = 0.0
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            den = max(np.linalg.norm(routes[a]), np.linalg.norm(routes[b]), 1e-300)
            worst = max(worst, float(np.linalg.norm(routes[a] - routes[b]) / den))
    bound = _rtol(cfg, FRECHET_RTOL)
    return _record("frechet", family, param, None, dim, cfg, trial, worst, bound,
                   bound - worst, 0.0)


_TRIALS = {
    Command.VerifyMain: _main_trial,
    Command.VerifyVariant: _variant_trial,
    Command.VerifyConvexity: _convexity_trial,
    Command.VerifyEntropy: _entropy_trial,
    Command.FrechetCheck: _frechet_trial,
}


def run_trial(cfg: RunConfig, trial: int) -> dict:
    """Evaluate flat trial index ``trial`` of the sweep described by ``cfg``."""
    try:
        return _TRIALS[cfg.command](cfg, trial)
    except (DeformedDomainError, ParameterError) as exc:
        return _record(cfg.command.value, cfg.selector, None, None, None, cfg, trial,
                       None, None, None, None, error=f"{type(exc).__name__}: {exc}")


def replay(cfg: RunConfig, trial: int) -> dict:
    cfg.validate()
    if not 0 <= trial < cfg.total_trials():
        raise ConfigError(f"trial {trial} is outside 0..{cfg.total_trials() - 1}")
    return run_trial(cfg, trial)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


@dataclass
class RunSummary:
    trials: int = 0
    violations: int = 0
    errors: int = 0
    exploratory: int = 0
    worst_slack: float = math.inf
    worst_trial: int | None = None
    failing_trials: list[int] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.violations == 0 and self.errors == 0 else 1

    def update(self, rec: dict) -> None:
        self.trials += 1
        if rec.get("error"):
            self.errors += 1
            return
        if rec.get("exploratory"):
            self.exploratory += 1
            return
        slack = rec["slack"]
        if slack < self.worst_slack:
            self.worst_slack, self.worst_trial = slack, rec["trial"]
        if not rec["holds"]:
            self.violations += 1
            self.failing_trials.append(rec["trial"])

    def text(self, cfg: RunConfig) -> str:
        status = "PASS" if self.exit_code == 0 else "FAIL"
        lines = [
            f"{cfg.command.value} {cfg.selector}: {self.trials} trials, "
            f"{self.violations} violations, {self.errors} errors, "
            f"worst slack {self.worst_slack:.6g} (trial {self.worst_trial}) -> {status}"
        ]
        if self.exploratory:
            lines.append(f"  {self.exploratory} exploratory samples recorded without pass/fail")
        for t in self.failing_trials[:10]:
            lines.append(f"  violation: replay with --seed {cfg.seed} --replay-trial {t}")
        if self.errors:
            lines.append("  accuracy/domain errors were recorded per trial (see 'error' fields)")
        return "\n".join(lines)


def _iter_records(cfg: RunConfig) -> Iterable[dict]:
    n = cfg.total_trials()
    if cfg.jobs == 1:
        for t in range(n):
            yield run_trial(cfg, t)
        return
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        yield from pool.map(partial(run_trial, cfg), range(n), chunksize=max(1, n // (8 * cfg.jobs)))


def _csv_row(rec: dict) -> list:
    return ["" if rec.get(c) is None else rec.get(c) for c in CSV_COLUMNS]


def run(cfg: RunConfig, stream_out: IO[str] | None = None, summary_out: IO[str] | None = None,
        *, timestamp: str | None = None) -> tuple[int, RunSummary]:
    """Execute a sweep, writing one report line per trial.

    Returns the exit code (0 all hold, 1 violation or error) and the summary.
    Configuration errors raise :class:`ConfigError`.
    """
    cfg.validate()
    own = None
    if stream_out is None:
        if cfg.out:
            own = open(cfg.out, "w", encoding="utf-8", newline="")
            stream_out = own
        else:
            stream_out = sys.stdout
    summary_out = summary_out if summary_out is not None else (sys.stdout if cfg.out else sys.stderr)
    summary = RunSummary()
    try:
        if cfg.format is OutputFormat.JsonLines:
            head = dict(cfg.header())
            head["timestamp"] = timestamp or time.strftime("%Y-%m-%dT%H:%M:%S%z")
            stream_out.write(json.dumps({"header": head}) + "\n")
            for rec in _iter_records(cfg):
                summary.update(rec)
                stream_out.write(json.dumps(rec) + "\n")
        else:
            writer = csv.writer(stream_out, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for rec in _iter_records(cfg):
                summary.update(rec)
                writer.writerow(_csv_row(rec))
        stream_out.flush()
    finally:
        if own is not None:
            own.close()
    summary_out.write(summary.text(cfg) + "\n")
    return summary.exit_code, summary


def run_single(cfg: RunConfig, A: HermitianMatrix, B: HermitianMatrix, q: float, r: float,
               C: np.ndarray | None = None) -> dict:
    """Check one user-supplied instance (main theorem or variant inequality)."""
    if cfg.command is Command.VerifyMain:
        phi = PositiveFunctional.conjugated(C) if C is not None else PositiveFunctional.trace()
        rep = main_theorem_slack(cfg.selector, A, B, q, r, phi, cfg.quadrature)
    elif cfg.command is Command.VerifyVariant:
        rep = variant_pb_slack(cfg.selector, A, B, q, r)
    else:
        raise ConfigError("single-instance checks exist for 'verify main' and 'verify variant'")
    tol = relative_tolerance(rep.lhs, rep.rhs, _rtol(cfg, 1e-8))
    return _record(rep.name, rep.case, q, r, A.dim, cfg, None, rep.lhs, rep.rhs, rep.slack, tol)
