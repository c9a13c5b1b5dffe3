import numpy as np
import pytest

from conftest import random_complex, u
from corechase.companion import NoRootsError, Polynomial, build_pencil_state, build_qr_state, preprocess
from corechase.dense import dense_companion
from corechase.qz import dense_pencil


def test_preprocess_strips_zero_roots():
    p, zeros, inf = preprocess([0, 0, 1, 1])
    assert zeros == 2 and not inf
    assert np.array_equal(p.coeffs, [1, 1])
    assert p.zero_roots == 2


def test_preprocess_leaves_clean_input():
    p, zeros, inf = preprocess([1, 2, 3])
    assert np.array_equal(p.coeffs, [1, 2, 3]) and zeros == 0 and not inf


def test_preprocess_monomial():
    p, zeros, _ = preprocess([0, 1, 0])
    assert zeros == 1 and p.degree == 0


def test_preprocess_flags_infinite_eigenvalues():
    p, _, inf = preprocess([1, 2, 0, 0])
    assert inf and p.degree == 1


def test_preprocess_keeps_tiny_coefficients():
    p, _, inf = preprocess([1, 2, 1e-300])
    assert p.degree == 2 and not inf


@pytest.mark.parametrize("raw", [[0, 0, 0], [5], [0, 3, 0, 0][1:2]])
def test_preprocess_no_roots(raw):
    with pytest.raises(NoRootsError):
        preprocess(raw)


def test_preprocess_rejects_nonfinite():
    with pytest.raises(ValueError):
        preprocess([1, np.nan, 1])


def test_qr_state_small_examples():
    s = build_qr_state(Polynomial([-1, 0, 1]))
    assert np.abs(s.to_dense() - [[0, 1], [1, 0]]).max() <= 4 * u
    s = build_qr_state(Polynomial([4, 3, 2, 1]))
    expect = [[0, 0, -4], [1, 0, -3], [0, 1, -2]]
    assert np.abs(s.to_dense() - expect).max() <= 100 * u * np.linalg.norm([4, 3, 2, 1])


@pytest.mark.parametrize("n", [2, 5, 8, 13])
def test_qr_state_of_unity_is_cyclic_shift(n):
    a = np.zeros(n + 1)
    a[0], a[-1] = -1, 1
    shift = np.roll(np.eye(n), 1, axis=0)
    assert np.abs(build_qr_state(Polynomial(a)).to_dense() - shift).max() <= 8 * u


@pytest.mark.parametrize("n", [3, 10, 33, 64])
def test_qr_state_matches_companion(rng, n):
    a = random_complex(rng, n + 1) * 10 ** rng.uniform(-2, 2, n + 1)
    s = build_qr_state(Polynomial(a))
    monic = a / a[-1]
    assert np.abs(s.to_dense() - dense_companion(monic)).max() <= 100 * u * np.linalg.norm(monic)
    assert abs(abs(s.R.alpha) - np.linalg.norm(monic)) <= 10 * n * u * np.linalg.norm(monic)
    assert s.scale == a[-1]


def test_qr_state_without_monicize():
    with pytest.raises(ValueError):
        build_qr_state(Polynomial([1, 2]), monicize=False)
    s = build_qr_state(Polynomial([3, 1]), monicize=False)
    assert np.allclose(s.to_dense(), [[-3]])


def test_pencil_example():
    st = build_pencil_state(Polynomial([7, 5, 3, 2]), norm_scale=False)
    v, w = st.to_dense()
    assert np.allclose(v[:, -1], [-7, -5, -3], atol=1e-14)
    assert np.allclose(w, np.diag([1, 1, 2]), atol=1e-15)


def test_pencil_of_monic_has_identity_w():
    _, w = build_pencil_state(Polynomial([1, 2, 3, 1]), norm_scale=False).to_dense()
    assert np.allclose(w, np.eye(3), atol=1e-15)


def test_pencil_norm_scaling(rng):
    a = random_complex(rng, 9) * 1e5
    st = build_pencil_state(Polynomial(a))
    scaled = a / st.qr.scale
    assert abs(np.linalg.norm(scaled) - 1) <= 4 * u
    v, w = st.to_dense()
    v0, w0 = dense_pencil(scaled)
    assert np.abs(v - v0).max() <= 100 * u and np.abs(w - w0).max() <= 100 * u


def test_pencil_eigenvalues_are_roots(rng):
    from scipy.linalg import eigvals
    from conftest import match_error
    for _ in range(10):
        a = random_complex(rng, 9)
        v, w = build_pencil_state(Polynomial(a)).to_dense()
        lam = eigvals(v, w)
        assert match_error(lam, np.roots(a[::-1])) <= 1e-8


def test_unprocessed_polynomial_rejected():
    with pytest.raises(ValueError):
        build_qr_state(Polynomial([0, 1, 1]))
    with pytest.raises(NoRootsError):
        build_pencil_state(Polynomial([2]))
