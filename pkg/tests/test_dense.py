import numpy as np
import pytest

from conftest import match_error, random_complex, u
from corechase.dense import DENSE_CAP, dense_companion, dense_francis, dense_from_cores, matrix_backward_error
from corechase.errors import NoConvergence
from corechase.rotations import CoreTransformation, IndexedCore, make_core


def test_empty_sequence_is_identity():
    assert np.array_equal(dense_from_cores([], None, 4), np.eye(4))


def test_single_flip_permutes():
    flip = IndexedCore(CoreTransformation(0.0, 1.0), 1)
    m = dense_from_cores([flip], None, 3)
    assert np.allclose(np.abs(m), np.eye(3)[[0, 2, 1]])


def test_descending_sequence_is_unitary(rng):
    n = 20
    cores = [IndexedCore(make_core(*random_complex(rng, 2))[0], i) for i in range(n - 2, -1, -1)]
    m = dense_from_cores(cores, None, n)
    assert np.abs(m.conj().T @ m - np.eye(n)).max() <= 10 * n * u


def test_index_out_of_range():
    with pytest.raises(IndexError):
        dense_from_cores([IndexedCore(CoreTransformation(), 3)], None, 4)


def test_companion_layout():
    m = dense_companion([4, 3, 2, 1])
    assert np.array_equal(m, [[0, 0, -4], [1, 0, -3], [0, 1, -2]])


def test_francis_quadratic():
    assert match_error(dense_francis(dense_companion([-1, 0, 1])), [1, -1]) <= 1e-15


def test_francis_trace_identity(rng):
    for _ in range(20):
        h = np.triu(random_complex(rng, (8, 8)), -1)
        ev = dense_francis(h)
        assert abs(ev.sum() - np.trace(h)) <= 1e-10 * np.linalg.norm(h)
        assert match_error(ev, np.linalg.eigvals(h)) <= 1e-8


def test_francis_rejects_non_hessenberg():
    with pytest.raises(ValueError):
        dense_francis(np.ones((3, 3)))
    with pytest.raises(ValueError):
        dense_francis(np.zeros((DENSE_CAP + 1, DENSE_CAP + 1)))


def test_francis_budget():
    h = np.triu(random_complex(np.random.default_rng(0), (12, 12)), -1)
    with pytest.raises(NoConvergence):
        dense_francis(h, max_iter=0)


def test_backward_error_zero_and_planted(rng):
    n = 6
    a = random_complex(rng, (n, n))
    q, _ = np.linalg.qr(random_complex(rng, (n, n)))
    a_hat = q.conj().T @ a @ q
    assert matrix_backward_error(a, q, a_hat) <= 100 * n * u * np.linalg.norm(a)
    e = 1e-6 * random_complex(rng, (n, n))
    err = matrix_backward_error(a, q, a_hat + e)
    assert err == pytest.approx(np.linalg.norm(e), rel=0.1)
