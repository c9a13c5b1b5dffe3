import numpy as np
import pytest
from scipy.linalg import eigvals

from conftest import match_error, random_complex, u, unity_roots
from corechase.backerr import coefficient_backward_error, random_poly
from corechase.companion import Polynomial, build_pencil_state, build_qr_state
from corechase.errors import InfiniteEigenvalue
from corechase.qr import k_wilkinson, qr_sweep, solve_qr, wilkinson_shift
from corechase.qz import (
    dense_pencil,
    extract_pencil_eigenvalues,
    k_pencil_matrix,
    qz_initial_core,
    qz_shift,
    qz_sweep,
    solve_qz,
)


def shift_of(v, w):
    m = np.empty((2, 2), complex)
    assert k_pencil_matrix(np.asarray(v, complex), np.asarray(w, complex), m)
    return k_wilkinson(*m.ravel())


def test_shift_of_uncoupled_pencil():
    assert shift_of(np.diag([3, 8]), np.diag([1, 2])) == 4


def test_shift_matches_generalized_eigenvalue(rng):
    for _ in range(50):
        v = random_complex(rng, (2, 2))
        w = np.triu(random_complex(rng, (2, 2)))
        lam = eigvals(v, w)
        expect = lam[np.argmin(np.abs(lam - v[1, 1] / w[1, 1]))]
        assert abs(shift_of(v, w) - expect) <= 1e-12 * max(1, abs(expect))


def test_singular_w_block_is_reported():
    m = np.empty((2, 2), complex)
    assert not k_pencil_matrix(np.eye(2, dtype=complex), np.diag([1, 0]).astype(complex), m)


def test_shift_with_identity_w_matches_qr(rng):
    a = random_complex(rng, 9)
    a /= a[-1]
    st = build_pencil_state(Polynomial(a), norm_scale=False)
    qr = build_qr_state(Polynomial(a))
    assert abs(qz_shift(st) - wilkinson_shift(qr)) <= 1e-12 * abs(wilkinson_shift(qr))


def test_initial_core_annihilates(rng):
    a = random_complex(rng, 5)
    st = build_pencil_state(Polynomial(a))
    v, w = st.to_dense()
    mu = 0.3 - 0.2j
    g = qz_initial_core(st, mu)
    q = (v - mu * w)[:2, 0]
    r = g.core.active.conj().T @ q
    assert abs(r[1]) <= 10 * u * np.linalg.norm(q)


def test_initial_core_zero_shift_monic_is_flip():
    st = build_pencil_state(Polynomial([1, 2, 3, 1]), norm_scale=False)
    g = qz_initial_core(st, 0.0)
    assert abs(g.core.c) <= u and abs(abs(g.core.s) - 1) <= u


def test_identity_w_sweep_matches_qr_sweep(rng):
    a = random_complex(rng, 11)
    a /= a[-1]
    st = build_pencil_state(Polynomial(a), norm_scale=False)
    qr = build_qr_state(Polynomial(a))
    for _ in range(3):
        mu = wilkinson_shift(qr)
        qr_sweep(qr, mu)
        qz_sweep(st, mu)
    v, w = st.to_dense()
    aq = qr.to_dense()
    # the two agree up to a diagonal unitary similarity (implicit Q theorem)
    m = np.linalg.solve(w, v)
    assert np.abs(np.abs(m) - np.abs(aq)).max() <= 1e-12 * np.linalg.norm(aq)


def test_sweep_cost_and_equivalence(rng):
    n = 10
    a = random_complex(rng, n + 1) * 10 ** rng.uniform(-3, 3, n + 1)
    st = build_pencil_state(Polynomial(a))
    st.enable_accumulation()
    v0, w0 = dense_pencil(a / st.qr.scale)
    for _ in range(5):
        before = st.qr.turnovers
        m = st.qr.hi - st.qr.lo
        qz_sweep(st, qz_shift(st))
        assert abs(st.qr.turnovers - before - 5 * m) <= 2
        v, w = st.to_dense()
        uu, zz = st.qr.u_accum, st.z_accum
        assert np.linalg.norm(uu @ v @ zz.conj().T - v0) <= 100 * n * u
        assert np.linalg.norm(uu @ w @ zz.conj().T - w0) <= 100 * n * u
        assert np.abs(np.tril(w, -1)).max() <= 100 * u


@pytest.mark.parametrize("a, roots, tol", [
    ([-2, 0, 2], [1, -1], 1e-14),
    ([-2, 0, 0, 2], unity_roots(3), 1e-13),
    ([0, 0, 1, 1], [0, 0, -1], 1e-14),
])
def test_known_roots(a, roots, tol):
    assert match_error(solve_qz(a).roots, roots) <= tol


def test_tiny_leading_coefficient(rng):
    a = random_complex(rng, 9)
    a[-1] = 1e-10
    res = solve_qz(a)
    assert np.all(np.isfinite(res.roots)) and res.roots.size == 8
    _, das, _ = coefficient_backward_error(a / np.linalg.norm(a), res.roots)
    assert das <= 1e-12


@pytest.mark.parametrize("scale", ["norm", "monic", "none"])
def test_monic_input_agrees_with_qr(rng, scale):
    for _ in range(10):
        a = random_complex(rng, 13)
        a /= a[-1]
        assert match_error(solve_qz(a, scale=scale).roots, solve_qr(a).roots) <= 1e-9


def test_unknown_scale():
    with pytest.raises(ValueError):
        solve_qz([1, 2, 3], scale="max")


def test_accumulated_backward_error():
    p = random_poly(20, 8, 1)
    d = solve_qz(p, accumulate=True).diagnostics
    n = 20
    assert d.delta_A <= 100 * n * u and d.delta_W <= 100 * n * u
    assert max(d.sine_drift.values()) <= 1e-12


def test_infinite_eigenvalue_on_bypassed_preprocessing():
    st = build_pencil_state(Polynomial([1, 2, 1]), norm_scale=False)
    st.qr.qs[:] = 0
    st.qr.qc[:] = 1
    st.W.bs[-1] = 0
    with pytest.raises(InfiniteEigenvalue):
        extract_pencil_eigenvalues(st)
