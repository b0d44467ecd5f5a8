import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deformed_pb import (
    F_GAP_ROW,
    F_ROWS,
    G_ROWS,
    TRACE_POWER_CONJ_ROWS,
    TRACE_POWER_ROWS,
    DeformedDomainError,
    DomainConstraint,
    EnsembleSpec,
    FTarget,
    GTarget,
    HermitianMatrix,
    ParameterError,
    PositiveFunctional,
    TracePower,
    TracePowerConjugated,
    F_func,
    G_func,
    apply_spectral,
    classical_pb_slack,
    convexity_probe,
    dfrechet_exp_q,
    exp_q,
    exp_q_matrix,
    furuichi_slack,
    generate,
    log_q_scalar,
    log_r_difference,
    main_theorem_slack,
    probe_regime_row,
    random_hermitian,
    random_matrix,
    random_positive_definite,
    stream,
    variant_pb_slack,
)


def admissible_pair(q, dim, rng):
    spec = EnsembleSpec(constraint=DomainConstraint(q))
    A = generate(spec, dim, rng)
    return A, generate(spec, dim, rng) - A


# G and F -------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 5])
def test_G_at_zero(n):
    assert G_func(np.zeros((n, n)), 1.5, 1.5) == pytest.approx(2 * (math.sqrt(n) - 1), abs=1e-15)


def test_G_dim_one_log_two():
    assert G_func(HermitianMatrix.diag([0.0]), 2.0, 2.0) == pytest.approx(0.0, abs=1e-15)


def test_G_matches_eigenvalue_sum(rng):
    A, _ = admissible_pair(1.5, 4, rng)
    lam = np.linalg.eigvalsh(np.asarray(A))
    s = np.sum((1 + 0.5 * lam) ** 2)
    assert G_func(A, 1.5, 2.0) == pytest.approx(s - 1, rel=1e-13)


def test_F_reduces_to_G(rng):
    assert F_func(np.zeros((2, 2)), np.eye(2), 1.5, 1.5) == G_func(np.zeros((2, 2)), 1.5, 1.5)
    for q, r in [(1.5, 2.0), (0.5, 0.3), (3.0, 1.0)]:
        A, _ = admissible_pair(q, 3, rng)
        assert F_func(A, np.eye(3), q, r) == G_func(A, q, r)


def test_F_at_zero_log_two(rng):
    B = random_matrix(3, rng)
    s = np.trace(B.conj().T @ B).real
    assert F_func(np.zeros((3, 3)), B, 2.0, 2.0) == pytest.approx(s - 1, rel=1e-13)


def test_F_matches_direct_recomputation(rng):
    A, _ = admissible_pair(1.8, 4, rng)
    B = random_matrix(4, rng)
    lam, U = np.linalg.eigh(np.asarray(A))
    E = (U * (1 + 0.8 * lam) ** 1.25) @ U.conj().T
    inner = np.trace(B.conj().T @ E @ B).real
    assert F_func(A, B, 1.8, 2.0) == pytest.approx(inner - 1, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(x1=st.floats(1e-3, 1e3), x0=st.floats(1e-3, 1e3), r=st.floats(-3, 5))
def test_log_r_difference_matches_definition(x1, x0, r):
    ref = log_q_scalar(x1, r) - log_q_scalar(x0, r)
    assert log_r_difference(x1, x0, r) == pytest.approx(ref, rel=1e-9, abs=1e-9 * (1 + abs(ref)))


# main theorem ------------------------------------------------------------------


def test_case_iii_zero_perturbation(rng):
    A, _ = admissible_pair(1.5, 3, rng)
    rep = main_theorem_slack("iii", A, np.zeros((3, 3)), 1.5, 1.5)
    assert rep.lhs == 0.0
    assert rep.rhs == pytest.approx(0.0, abs=1e-15)
    assert rep.slack == pytest.approx(0.0, abs=1e-15)


def test_case_iii_commuting_brute_force(rng):
    q = r = 1.5
    for _ in range(20):
        a = rng.uniform(-1.9, 1.0, 2)
        b = rng.uniform(-1.9, 1.0, 2) - a
        rep = main_theorem_slack("iii", HermitianMatrix.diag(a), HermitianMatrix.diag(b), q, r)
        e0 = (1 + 0.5 * a) ** 2
        e1 = (1 + 0.5 * (a + b)) ** 2
        lhs = log_q_scalar(e1.sum(), r) - log_q_scalar(e0.sum(), r)
        rhs = e0.sum() ** (r - 2) * np.sum(e0 ** (2 - q) * b)
        assert rep.slack == pytest.approx(lhs - rhs, abs=1e-13)
        assert rep.slack >= -1e-12


def test_case_i_randomized():
    q, r = 0.5, 0.7
    for t in range(1000):
        rng = stream(1, t, "case-i")
        A, B = admissible_pair(q, (2, 3, 4, 8)[t % 4], rng)
        rep = main_theorem_slack("i", A, B, q, r)
        assert rep.slack >= -1e-9 * (1 + abs(rep.lhs) + abs(rep.rhs))


@pytest.mark.parametrize("case, q, r", [("ii", -1.0, 0.5), ("iv", 1.75, 2.0), ("v", 3.0, 1.0)])
def test_functional_cases_with_conjugation(case, q, r):
    for t in range(200):
        rng = stream(2, t, f"phi/{case}")
        A, B = admissible_pair(q, 3, rng)
        phi = PositiveFunctional.conjugated(random_matrix(3, rng))
        rep = main_theorem_slack(case, A, B, q, r, phi)
        assert rep.slack >= -rep.tol


def test_regime_mismatch_is_parameter_error(rng):
    A, B = admissible_pair(1.5, 2, rng)
    with pytest.raises(ParameterError):
        main_theorem_slack("iii", A, B, 0.5, 1.0)
    with pytest.raises(ParameterError):
        main_theorem_slack("v", A, B, 1.5, 1.5)
    with pytest.raises(ParameterError):
        main_theorem_slack("iii", A, B, 1.5, 1.5, PositiveFunctional.conjugated(np.eye(2)))


def test_domain_error_names_operand():
    A = HermitianMatrix.diag([0.0, 0.0])
    with pytest.raises(DeformedDomainError, match="A\\+B"):
        main_theorem_slack("iii", A, HermitianMatrix.diag([-5.0, 0.0]), 1.5, 1.5)
    with pytest.raises(DeformedDomainError, match="operand A "):
        main_theorem_slack("iii", HermitianMatrix.diag([-5.0, 0.0]), A, 1.5, 1.5)


@pytest.mark.parametrize("q", [1.2, 1.5, 2.0])
def test_furuichi_reduction(q):
    for t in range(100):
        A, B = admissible_pair(q, 3, stream(3, t, "furuichi"))
        a = main_theorem_slack("iii", A, B, q, q)
        b = furuichi_slack(A, B, q)
        assert abs(a.slack - b.slack) <= 1e-12 * (1 + abs(a.lhs) + abs(a.rhs))


def test_classical_limit_chain():
    eps = 1e-5
    for t in range(20):
        rng = stream(4, t, "classical")
        A, B = random_hermitian(3, rng), random_hermitian(3, rng)
        deformed = main_theorem_slack("iii", A, B, 1 + eps, 1 + eps).slack
        classical = classical_pb_slack(A, B).slack
        assert abs(deformed - classical) <= 1e-3 * abs(classical)


def test_rhs_trace_consistency():
    for q, r in [(1.5, 2.0), (1.75, 1.75), (1.2, 3.0)]:
        A, B = admissible_pair(q, 4, stream(5, 0, f"rhs/{q}"))
        rep = main_theorem_slack("iii", A, B, q, r)
        T = exp_q_matrix(A, q).trace()
        d = np.trace(np.asarray(dfrechet_exp_q(A, B, q))).real
        assert rep.rhs == pytest.approx(T ** (r - 2) * d, rel=1e-8)


# variant -------------------------------------------------------------------------


def test_variant_additivity():
    rep = variant_pb_slack("convex", np.eye(2), np.eye(2), 1.0, 1.0)
    assert rep.lhs == pytest.approx(2.0)
    assert rep.rhs == pytest.approx(2.0)
    assert rep.slack == pytest.approx(0.0, abs=1e-15)


def test_variant_scalar_arithmetic():
    # (Tr 4^2)^(1/2) - 1 = 3 and (2/2) * 1 * Tr(A B) = 3
    rep = variant_pb_slack("convex", np.eye(1), 3 * np.eye(1), 2.0, 2.0)
    assert rep.lhs == pytest.approx(3.0)
    assert rep.rhs == pytest.approx(3.0)
    assert rep.slack == pytest.approx(0.0, abs=1e-14)


def test_variant_concave_randomized():
    for t in range(1000):
        rng = stream(6, t, "concave")
        A, B = random_positive_definite(3, rng), random_positive_definite(3, rng)
        rep = variant_pb_slack("concave", A, B, 0.5, 0.5)
        assert rep.slack >= -1e-9 * (1 + abs(rep.lhs) + abs(rep.rhs))


def test_variant_regime_and_positivity():
    with pytest.raises(ParameterError):
        variant_pb_slack("convex", np.eye(2), np.eye(2), 0.5, 0.5)
    with pytest.raises(DeformedDomainError):
        variant_pb_slack("convex", np.eye(2), -np.eye(2), 2.0, 1.0)


# convexity probes ----------------------------------------------------------------


def test_trace_square_is_convex():
    rep = convexity_probe(TracePower(2.0, 1.0), samples=500)
    assert rep.claim == "convex"
    assert not rep.falsified
    assert "not a proof" in rep.summary()


def test_G_concavity_above_two():
    rep = convexity_probe(GTarget(2.5, 2.0), samples=500)
    assert rep.claim == "concave"
    assert not rep.falsified


def test_F_gap_is_exploratory():
    rep = convexity_probe(FTarget(1.2, 2.0), samples=500)
    assert rep.exploratory
    assert not rep.falsified
    assert "exploratory" in rep.summary()


def test_probe_detects_a_false_claim():
    # Tr A^2 is convex, so scoring it as concave must be falsified
    from deformed_pb import RegimeRow

    row = RegimeRow("bogus", "concave", lambda p, r: True, ((2.0, 1.0),))
    rep = probe_regime_row(TracePower(2.0, 1.0), row, samples=50)
    assert rep.falsified


@pytest.mark.parametrize(
    "target, row",
    [(TracePower(1, 1), r) for r in TRACE_POWER_ROWS]
    + [(TracePowerConjugated(1, 1), r) for r in TRACE_POWER_CONJ_ROWS]
    + [(GTarget(2, 2), r) for r in G_ROWS]
    + [(FTarget(2, 2), r) for r in F_ROWS],
    ids=lambda v: getattr(v, "label", getattr(v, "name", None)),
)
def test_regime_rows_not_falsified(target, row):
    rep = probe_regime_row(target, row, samples=100, seed=9)
    assert not rep.falsified, rep.summary()


def test_rows_classify_their_own_grid():
    for target, rows in [(TracePower(1, 1), TRACE_POWER_ROWS), (GTarget(2, 2), G_ROWS),
                         (FTarget(2, 2), F_ROWS + (F_GAP_ROW,))]:
        for row in rows:
            for a, b in row.grid:
                assert row.applies(a, b)
