import numpy as np
import pytest

from deformed_pb import (
    DomainConstraint,
    EnsembleKind,
    EnsembleSpec,
    check_domain,
    generate,
    random_state,
    stream,
)


def test_diagonal_scalar_above_bound():
    A = generate(EnsembleSpec(kind=EnsembleKind.Diagonal, constraint=DomainConstraint(2.0)), 1,
                 stream(1))
    assert A.dim == 1
    assert float(np.asarray(A)[0, 0]) > -1.0


def test_bounded_above_gaussian():
    spec = EnsembleSpec(constraint=DomainConstraint(0.5))
    A = generate(spec, 4, stream(2))
    assert check_domain(A, spec.constraint).ok
    assert A.eigenvalues[-1] < 2.0


def test_same_stream_same_matrix():
    spec = EnsembleSpec(constraint=DomainConstraint(1.5))
    a = np.asarray(generate(spec, 5, stream(42, 7, "x")))
    b = np.asarray(generate(spec, 5, stream(42, 7, "x")))
    assert np.array_equal(a, b)


def test_streams_are_independent_by_key():
    draws = {key: stream(*key).random() for key in [(1, 0, "a"), (1, 1, "a"), (1, 0, "b"), (2, 0, "a")]}
    assert len(set(draws.values())) == 4


def test_real_symmetric_kind_is_real():
    A = generate(EnsembleSpec(kind=EnsembleKind.RealSymmetric), 4, stream(3))
    assert not np.iscomplexobj(np.asarray(A))


def test_spectrum_inside_interval():
    spec = EnsembleSpec(constraint=DomainConstraint(-1.0), spectrum_width=1.5, offset=0.1)
    lo, hi = spec.interval()
    assert hi == pytest.approx(0.5 - 0.1)
    for t in range(100):
        lam = generate(spec, 6, stream(4, t)).eigenvalues
        assert lam[0] >= lo - 1e-12 and lam[-1] <= hi + 1e-12


def test_random_state_is_full_rank_state():
    for t in range(50):
        rho = random_state(5, stream(5, t))
        assert rho.trace() == pytest.approx(1.0, abs=1e-14)
        assert rho.eigenvalues[0] >= 1e-3 * (1 - 1e-9)
