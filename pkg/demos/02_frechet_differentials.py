"""Frechet differentials of powers, log_q and exp_q by three independent routes."""

import numpy as np

from deformed_pb import (
    DomainConstraint,
    EnsembleSpec,
    apply_spectral,
    dfrechet_divided_difference,
    dfrechet_exp_q,
    dfrechet_finite_difference,
    dfrechet_log_q,
    dfrechet_power_integral,
    exp_q,
    generate,
    random_hermitian,
    random_positive_definite,
    stream,
)

rng = stream(1)
x = random_positive_definite(4, rng)
h = random_hermitian(4, rng)


def gap(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.linalg.norm(a - b) / np.linalg.norm(b)


for p in (-0.5, 0.5, 1.5):
    quad = dfrechet_power_integral(x, h, p)
    dd = dfrechet_divided_difference(x, h, lambda t: t**p, lambda t: p * t ** (p - 1))
    fd = dfrechet_finite_difference(x, h, lambda t: t**p)
    print(f"D(x^{p}) h: quad vs dd {gap(quad, dd):.1e}, dd vs fd {gap(dd, fd):.1e}, "
          f"quadrature error estimate {quad.est_error:.1e}")

a = dfrechet_log_q(x, h, 1.4, via="integral")
b = dfrechet_log_q(x, h, 1.4, via="power")
print(f"D log_1.4: direct integral vs power route {gap(a, b):.1e}")

# every exp_q route, tagged by the method that was used
for q in (-1.0, 0.0, 0.5, 1.25, 1.5, 1.75, 2.0, 3.0):
    y = generate(EnsembleSpec(constraint=DomainConstraint(q)), 4, rng)
    d = dfrechet_exp_q(y, h, q)
    W = apply_spectral(y, lambda t: exp_q(t, q) ** (2 - q))
    trace_gap = np.trace(np.asarray(d)).real - np.vdot(np.asarray(W), np.asarray(h)).real
    print(f"q={q:<5} method={d.method.value:<6} Tr D exp_q(x)h - Tr exp_q(x)^(2-q) h = {trace_gap:+.1e}")
