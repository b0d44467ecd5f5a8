import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from deformed_pb import (
    DensityPair,
    HermitianMatrix,
    ParameterError,
    best_lower_bound,
    random_positive_definite,
    random_state,
    state_overlap,
    state_overlap_bound,
    stream,
    tsallis_lower_bound,
    tsallis_relative_entropy,
    tsallis_relative_entropy_forms,
    umegaki_relative_entropy,
)


def scipy_tsallis(X, Y, p):
    X, Y = np.asarray(X), np.asarray(Y)
    Xp = sla.fractional_matrix_power(X, p)
    Y1p = sla.fractional_matrix_power(Y, 1 - p)
    return np.trace(X - Xp @ Y1p).real / (1 - p)


def scipy_umegaki(X, Y):
    X, Y = np.asarray(X), np.asarray(Y)
    return np.trace(X @ (sla.logm(X) - sla.logm(Y))).real


# Tsallis and Umegaki -------------------------------------------------------------


def test_tsallis_self_is_zero(rng):
    X = random_positive_definite(3, rng)
    assert tsallis_relative_entropy(X, X, 0.5) == pytest.approx(0.0, abs=1e-14)


def test_tsallis_nonnegative_for_states():
    for t in range(200):
        rng = stream(1, t, "nonneg")
        rho, sigma = random_state(3, rng), random_state(3, rng)
        assert tsallis_relative_entropy(rho, sigma, 0.5) >= -1e-12


def test_tsallis_matches_scipy(rng):
    X = random_positive_definite(4, rng) * 2.0
    Y = random_positive_definite(4, rng) * 0.5
    for p in (0.0, 0.3, 0.7):
        assert tsallis_relative_entropy(X, Y, p) == pytest.approx(scipy_tsallis(X, Y, p), rel=1e-10)


def test_tsallis_near_one_approaches_umegaki():
    rng = stream(2, 0, "limit")
    rho, sigma = random_state(3, rng), random_state(3, rng)
    d = tsallis_relative_entropy(rho, sigma, 1 - 1e-6)
    assert d == pytest.approx(umegaki_relative_entropy(rho, sigma), abs=1e-4)


def test_limit_error_decreases():
    for t in range(50):
        rng = stream(3, t, "limits")
        rho, sigma = random_state(4, rng), random_state(4, rng)
        u = umegaki_relative_entropy(rho, sigma)
        errs = [abs(tsallis_relative_entropy(rho, sigma, p) - u) for p in (0.9, 0.99, 0.999)]
        assert errs[0] > errs[1] > errs[2]


def test_two_forms_agree():
    for t in range(100):
        rng = stream(4, t, "forms")
        X = random_positive_definite(3, rng) * float(np.exp(rng.normal()))
        Y = random_positive_definite(3, rng) * float(np.exp(rng.normal()))
        a, b = tsallis_relative_entropy_forms(X, Y, float(rng.random()) * 0.95)
        assert abs(a - b) <= 1e-10 * (1 + abs(a))


def test_tsallis_parameter_range():
    with pytest.raises(ParameterError):
        tsallis_relative_entropy(np.eye(2), np.eye(2), 1.5)


def test_umegaki_self_is_zero(rng):
    X = random_positive_definite(3, rng)
    assert umegaki_relative_entropy(X, X) == pytest.approx(0.0, abs=1e-14)


def test_umegaki_diagonal_kl():
    rho = HermitianMatrix.diag([0.5, 0.5])
    sigma = HermitianMatrix.diag([0.75, 0.25])
    ref = 0.5 * math.log(0.5 / 0.75) + 0.5 * math.log(0.5 / 0.25)
    assert umegaki_relative_entropy(rho, sigma) == pytest.approx(ref, rel=1e-14)


def test_umegaki_matches_scipy_and_is_nonnegative():
    for t in range(50):
        rng = stream(5, t, "umegaki")
        rho, sigma = random_state(4, rng), random_state(4, rng)
        u = umegaki_relative_entropy(rho, sigma)
        assert u >= -1e-10
        assert u == pytest.approx(scipy_umegaki(rho, sigma), rel=1e-8, abs=1e-12)


# state overlap -------------------------------------------------------------------


def test_overlap_endpoints(rng):
    rho = random_state(3, rng)
    sigma = random_state(3, rng)
    assert state_overlap_bound(DensityPair(rho, rho), 0.3) == pytest.approx(1.0, abs=1e-13)
    assert state_overlap_bound(DensityPair(rho, sigma), 0.0) == pytest.approx(1.0, abs=1e-13)


def test_overlap_in_unit_interval():
    for t in range(200):
        rng = stream(6, t, "overlap")
        v = state_overlap_bound(DensityPair(random_state(3, rng), random_state(3, rng)), 0.5)
        assert 0 < v <= 1 + 1e-10


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.floats(0, 1), q=st.floats(0, 1))
def test_overlap_midpoint_cauchy_schwarz(seed, p, q):
    rng = stream(seed, 0, "midpoint")
    rho, sigma = random_state(3, rng), random_state(3, rng)
    mid = state_overlap(rho, sigma, (p + q) / 2)
    bound = math.sqrt(state_overlap(rho, sigma, p) * state_overlap(rho, sigma, q))
    assert mid <= bound + 1e-10


def test_density_pair_validation():
    with pytest.raises(ValueError):
        DensityPair(np.eye(2), np.eye(2) / 2)
    with pytest.raises(ValueError):
        DensityPair(np.diag([1.0, 0.0]), np.eye(2) / 2)


# lower bound ---------------------------------------------------------------------


def test_lower_bound_equal_traces_is_zero(rng):
    X = random_positive_definite(3, rng)
    Y = random_positive_definite(3, rng)
    Y = Y * (X.trace() / Y.trace())
    for p in (-1.0, 0.0, 0.4, 0.8):
        assert tsallis_lower_bound(X, Y, 0.8, p) == pytest.approx(0.0, abs=1e-14)


def test_lower_bound_at_p_equal_q_is_known_bound():
    X = random_positive_definite(3, stream(7)) * 2.0
    Y = random_positive_definite(3, stream(8)) * 0.5
    a, b = X.trace(), Y.trace()
    q = 0.6
    assert tsallis_lower_bound(X, Y, q, q) == pytest.approx((a - a**q * b ** (1 - q)) / (1 - q), rel=1e-13)
    assert tsallis_lower_bound(X, Y, 1.0, 1.0) == pytest.approx(a * math.log(a / b), rel=1e-13)


def test_lower_bound_valid():
    for t in range(500):
        rng = stream(9, t, "bound")
        X = random_positive_definite(3, rng) * float(np.exp(rng.normal()))
        Y = random_positive_definite(3, rng) * float(np.exp(rng.normal()))
        q = float(rng.uniform(0.05, 1.0))
        p = q - 3 * float(rng.random())
        d = tsallis_relative_entropy(X, Y, q)
        lb = tsallis_lower_bound(X, Y, q, p)
        assert lb <= d + 1e-8 * (1 + abs(d) + abs(lb))


def test_lower_bound_rejects_p_above_q():
    with pytest.raises(ParameterError):
        tsallis_lower_bound(np.eye(2), np.eye(2), 0.5, 0.7)
    with pytest.raises(ParameterError):
        tsallis_lower_bound(np.eye(2), np.eye(2), 1.5, 0.7)


@settings(max_examples=300, deadline=None)
@given(
    a=st.floats(1e-3, 1e3),
    b=st.floats(1e-3, 1e3),
    p1=st.floats(-5, 1),
    p2=st.floats(-5, 1),
)
def test_lower_bound_nondecreasing_in_p(a, b, p1, p2):
    # (a - a^p b^(1-p)) / (1-p) is a secant slope of the convex map p -> a^p b^(1-p),
    # so it never decreases as p grows toward q
    lo, hi = sorted((p1, p2))
    X, Y = HermitianMatrix.diag([a]), HermitianMatrix.diag([b])
    f_lo = tsallis_lower_bound(X, Y, 1.0, lo)
    f_hi = tsallis_lower_bound(X, Y, 1.0, hi)
    assert f_lo <= f_hi + 1e-12 * (1 + abs(f_lo) + abs(f_hi))


def test_best_lower_bound_equal_traces():
    X = HermitianMatrix.diag([0.3, 0.7])
    Y = HermitianMatrix.diag([0.6, 0.4])
    p, val = best_lower_bound(X, Y, 0.8, [0.5, 0.2, 0.8])
    assert p == 0.2
    assert val == pytest.approx(0.0, abs=1e-15)


def test_best_lower_bound_singleton(rng):
    X = random_positive_definite(2, rng) * 2
    Y = random_positive_definite(2, rng) * 0.5
    p, val = best_lower_bound(X, Y, 0.8, [0.8])
    assert p == 0.8
    assert val == tsallis_lower_bound(X, Y, 0.8, 0.8)


def test_best_lower_bound_attains_q_on_non_normalized_instance():
    rng = stream(10, 0, "best")
    X = random_positive_definite(3, rng)
    Y = random_positive_definite(3, rng)
    X = X * (2.0 / X.trace())
    Y = Y * (0.5 / Y.trace())
    grid = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]
    p, val = best_lower_bound(X, Y, 0.8, grid)
    assert p == 0.8
    assert val <= tsallis_relative_entropy(X, Y, 0.8)
