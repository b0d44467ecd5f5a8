"""Deformed logarithm and exponential, on scalars and on Hermitian matrices."""

import numpy as np

from deformed_pb import (
    DomainConstraint,
    EnsembleSpec,
    check_domain,
    exp_q_matrix,
    exp_q_scalar,
    generate,
    log_q_matrix,
    log_q_scalar,
    stream,
)

# exp_2(t) = 1 + t and exp_{3/2}(t) = (1 + t/2)^2
print("exp_2(0.5)    =", exp_q_scalar(0.5, 2.0))
print("exp_1.5(-1)   =", exp_q_scalar(-1.0, 1.5))
print("log_0(2)      =", log_q_scalar(2.0, 0.0))

# q -> 1 recovers exp and log
for q in (0.9, 0.99, 1.0, 1.01):
    print(f"q={q:<5} exp_q(1) = {exp_q_scalar(1.0, q):.6f}")

# exp_q needs the spectrum on one side of -1/(q-1)
q = 2.5
c = DomainConstraint(q)
A = generate(EnsembleSpec(constraint=c), 4, stream(0))
print(c.describe(), "->", check_domain(A, c))

E = exp_q_matrix(A, q)
back = log_q_matrix(E, q)
print("round trip error:", np.linalg.norm(np.asarray(back) - np.asarray(A)))
