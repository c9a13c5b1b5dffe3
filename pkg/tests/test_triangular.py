import numpy as np
import pytest

from conftest import random_complex, u
from corechase.dense import dense_triangular
from corechase.rotations import CoreTransformation, IndexedCore, make_core
from corechase.triangular import FactoredTriangular, SingularRepresentationError, sine_product_drift


def spike_matrix(t):
    """Upper triangular n x n matrix whose factored form is built from ``t``."""
    r = FactoredTriangular.from_spike(t)
    return r, dense_triangular(r)


def test_from_spike_diagonal_and_last_column(rng):
    # the spike (t, -1) fills the last column; the rest is the identity shift
    t = random_complex(rng, 7)
    r, m = spike_matrix(t)
    expect = np.eye(7, dtype=complex)
    expect[:, -1] = t
    assert np.abs(m - expect).max() <= 50 * u * np.linalg.norm(t)
    assert np.allclose(r.diagonal(), np.diag(m))


def test_from_spike_rejects_bad_input():
    with pytest.raises(ValueError):
        FactoredTriangular.from_spike([])
    with pytest.raises(ValueError):
        FactoredTriangular.from_spike([1.0, np.inf])


def test_column_and_upper_entries_match_dense(rng):
    r, m = spike_matrix(random_complex(rng, 9))
    big = dense_triangular(r, extended=True)
    for j in range(r.n):
        assert np.allclose(r.column(j), big[:, j], atol=1e-13)
        assert np.allclose(r.upper_entries(j), m[:j + 1, j], atol=1e-13)
    with pytest.raises(IndexError):
        r.column(r.n)


def test_diagonal_block(rng):
    r, m = spike_matrix(random_complex(rng, 6))
    assert np.allclose(r.diagonal_block(2), m[2:4, 2:4], atol=1e-13)
    assert np.allclose(r.diagonal_block(5, 1), m[5:6, 5:6], atol=1e-13)
    with pytest.raises(IndexError):
        r.diagonal_block(5, 2)


@pytest.mark.parametrize("direction", ["r2l", "l2r"])
def test_pass_through_equivalence(rng, direction):
    n = 8
    for trial in range(50):
        r, m = spike_matrix(random_complex(rng, n) * 10 ** rng.uniform(-3, 3))
        i = int(rng.integers(0, n - 1))
        g = IndexedCore(make_core(*random_complex(rng, 2))[0], i)
        G = g.core.embed(i, n)
        if direction == "r2l":
            g2 = r.pass_right_to_left(g)
            lhs, rhs = m @ G, g2.core.embed(i, n) @ dense_triangular(r)
        else:
            g2 = r.pass_left_to_right(g)
            lhs, rhs = G @ m, dense_triangular(r) @ g2.core.embed(i, n)
        assert np.abs(lhs - rhs).max() <= 100 * u * np.linalg.norm(m)
        assert np.allclose(np.tril(dense_triangular(r), -1), 0, atol=100 * u * np.linalg.norm(m))


def test_pass_through_index_check(rng):
    r, _ = spike_matrix(random_complex(rng, 4))
    with pytest.raises(IndexError):
        r.pass_right_to_left(IndexedCore(CoreTransformation(), 3))


def test_sine_products_survive_pass_through(rng):
    r, _ = spike_matrix(random_complex(rng, 12))
    before = r.scaled_sine_products()
    for _ in range(200):
        i = int(rng.integers(0, r.n - 1))
        r.pass_right_to_left(IndexedCore(make_core(*random_complex(rng, 2))[0], i))
    after = r.scaled_sine_products()
    for b, a in zip(before, after):
        assert sine_product_drift(b, a) <= 1e-13


def test_scaled_sine_product_survives_underflow():
    from corechase.triangular import k_sine_product_scaled
    s = np.full(400, 1e-3 + 0j)
    p, e = k_sine_product_scaled(s)
    assert abs(p) > 0
    assert np.log10(abs(p)) + e * np.log10(2) == pytest.approx(-1200, abs=1e-9)


def test_recover_y_singular():
    r = FactoredTriangular.from_spike([1.0, 2.0])
    r.cs[:] = 0
    with pytest.raises(SingularRepresentationError):
        r.recover_y()


def test_copy_is_independent(rng):
    r, _ = spike_matrix(random_complex(rng, 5))
    c = r.copy()
    c.cs[0] = 0
    assert r.cs[0] != 0
