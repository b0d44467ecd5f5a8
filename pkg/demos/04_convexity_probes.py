"""Randomized midpoint probes of the convexity statements. They can falsify a claim but never prove it."""

from deformed_pb import (
    F_GAP_ROW,
    F_ROWS,
    G_ROWS,
    FTarget,
    GTarget,
    TracePower,
    convexity_probe,
    probe_regime_row,
)

print(convexity_probe(TracePower(2.0, 1.0), samples=200).summary())
for row in G_ROWS:
    print(probe_regime_row(GTarget(2, 2), row, samples=200).summary())
for row in F_ROWS + (F_GAP_ROW,):
    print(probe_regime_row(FTarget(2, 2), row, samples=200).summary())
