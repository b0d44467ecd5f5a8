"""Tsallis relative entropy and its trace lower bounds."""

import numpy as np

from deformed_pb import (
    DensityPair,
    best_lower_bound,
    random_positive_definite,
    random_state,
    state_overlap_bound,
    stream,
    tsallis_lower_bound,
    tsallis_relative_entropy,
    umegaki_relative_entropy,
)

rng = stream(5)
rho, sigma = random_state(3, rng), random_state(3, rng)
pair = DensityPair(rho, sigma)
print("max_p Tr rho^(1-p) sigma^p =", max(state_overlap_bound(pair, p) for p in np.linspace(0, 1, 21)))

u = umegaki_relative_entropy(rho, sigma)
for p in (0.5, 0.9, 0.99, 0.999):
    print(f"D_{p}(rho|sigma) = {tsallis_relative_entropy(rho, sigma, p):.6f}   (Umegaki {u:.6f})")

# the lower bound only sees the traces; it never decreases in p
X = random_positive_definite(3, rng)
Y = random_positive_definite(3, rng)
X, Y = X * (2.0 / X.trace()), Y * (0.5 / Y.trace())
q = 0.8
print("D_q(X|Y) =", tsallis_relative_entropy(X, Y, q))
for p in (-1.0, 0.2, 0.5, 0.8):
    print(f"  bound at p={p:<4}: {tsallis_lower_bound(X, Y, q, p):.6f}")
print("best over grid:", best_lower_bound(X, Y, q, np.linspace(0.2, 0.8, 7)))
