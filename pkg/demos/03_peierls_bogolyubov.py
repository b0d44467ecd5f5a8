"""Deformed Peierls-Bogolyubov inequalities, one case at a time."""

from deformed_pb import (
    DomainConstraint,
    EnsembleSpec,
    PositiveFunctional,
    classical_pb_slack,
    generate,
    main_theorem_slack,
    random_hermitian,
    random_matrix,
    random_positive_definite,
    stream,
    variant_pb_slack,
)

rng = stream(2)
for case, q, r in [("i", 0.5, 0.7), ("ii", -1.0, 1.5), ("iii", 1.5, 2.0), ("iv", 1.75, 1.75), ("v", 3.0, 1.0)]:
    spec = EnsembleSpec(constraint=DomainConstraint(q))
    A = generate(spec, 3, rng)
    B = generate(spec, 3, rng) - A
    phi = PositiveFunctional.trace()
    if case in ("ii", "iv", "v"):
        phi = PositiveFunctional.conjugated(random_matrix(3, rng))
    rep = main_theorem_slack(case, A, B, q, r, phi)
    print(f"case {case:<3} q={q:<5} r={r:<5} {phi.kind:<10} lhs={rep.lhs:+.4f} rhs={rep.rhs:+.4f} "
          f"slack={rep.slack:+.2e} holds={rep.holds}")

# close to q = r = 1 the deformed slack approaches the classical one
A, B = random_hermitian(3, rng), random_hermitian(3, rng)
eps = 1e-5
print("classical slack:", classical_pb_slack(A, B).slack)
print("q=r=1+1e-5     :", main_theorem_slack("iii", A, B, 1 + eps, 1 + eps).slack)

A, B = random_positive_definite(3, rng), random_positive_definite(3, rng)
print("variant, convex p=2 r=1:", variant_pb_slack("convex", A, B, 2.0, 1.0).slack)
print("variant, concave p=0.5 r=2:", variant_pb_slack("concave", A, B, 0.5, 2.0).slack)
