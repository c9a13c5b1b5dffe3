"""Single-shift companion QZ on the factored pencil ``V - lambda W``.

``V = Q R`` as in the QR code and ``W`` is a second factored triangular.
Per position the misfit ``U`` is passed backwards through ``W`` (giving the
right transformation ``Z``), ``Z`` is passed through ``R``, and the result is
turned over through Q: five turnovers in all, against three for QR.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit
from .companion import Polynomial, PencilState, build_pencil_state, preprocess
from .errors import InfiniteEigenvalue, NoConvergence
from .qr import (
    CORRUPT,
    EXCEPTIONAL_PERIOD,
    MAX_ITER,
    NOCONV,
    OK,
    Diagnostics,
    RootResult,
    _EMPTY,
    _drift,
    _with_zero_roots,
    k_acc_cols,
    k_corrupt,
    k_exceptional,
    k_find_block,
    k_qdiag,
    k_trailing_block,
    k_wilkinson,
    q_diagonal,
)
from .rotations import UNIT_ROUNDOFF, CorruptionError, IndexedCore, k_fuse, k_make_core, make_core
from .rotations import k_turnover_down
from .triangular import k_col_prefix, k_pass_l2r, k_pass_r2l, k_x_prefix

SCALINGS = ("norm", "monic", "none")


@njit
def k_w_block(cc, cs, bc, bs, h, x, w, out):
    """out <- W[h-1:h+1, h-1:h+1] (upper triangular)."""
    k_x_prefix(cc, cs, h, x)
    k_col_prefix(cc, cs, bc, bs, h - 1, x, w)
    out[0, 0] = w[h - 1]
    out[1, 0] = 0.0
    k_col_prefix(cc, cs, bc, bs, h, x, w)
    out[0, 1] = w[h - 1]
    out[1, 1] = w[h]


@njit
def k_pencil_matrix(v, wb, out):
    """out <- W^{-1} V for 2x2 blocks; returns False when W is singular."""
    p = wb[0, 0]
    q = wb[0, 1]
    r = wb[1, 1]
    if p == 0 or r == 0:
        return False
    for j in range(2):
        b = v[1, j] / r
        out[1, j] = b
        out[0, j] = (v[0, j] - q * b) / p
    for i in range(2):
        for j in range(2):
            z = out[i, j]
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                return False
    return True


@njit
def k_qz_shift(qc, qs, cc, cs, bc, bs, wcc, wcs, wbc, wbs, h, x, w, vb, wb, mb,
               exceptional, seed, count):
    k_trailing_block(qc, qs, cc, cs, bc, bs, h, x, w, vb)
    k_w_block(wcc, wcs, wbc, wbs, h, x, w, wb)
    if not k_pencil_matrix(vb, wb, mb):
        return vb[1, 1]
    if exceptional:
        return k_exceptional(mb[1, 1], mb[1, 0], seed, count)
    return k_wilkinson(mb[0, 0], mb[0, 1], mb[1, 0], mb[1, 1])


@njit
def k_qz_sweep(qc, qs, cc, cs, bc, bs, wcc, wcs, wbc, wbs, lo, hi, mu, u, z):
    """One Moler-Stewart step on rows lo..hi; returns the number of turnovers."""
    m = qc.shape[0]
    rll = bs[lo] / cs[lo]
    wll = wbs[lo] / wcs[lo]
    uc, us, _ = k_make_core(k_qdiag(qc, lo) * rll - mu * wll, qs[lo] * rll)
    ph = qc[lo - 1].conjugate() if lo > 0 else 1.0 + 0.0j
    qc[lo], qs[lo] = k_fuse(uc.conjugate(), -us * ph, qc[lo], qs[lo])
    k_acc_cols(u, lo, uc, us)
    for i in range(lo, hi):
        # U^* W = W' Z^*, then V Z = Q X R'
        zc, zs = k_pass_l2r(wcc, wcs, wbc, wbs, i, uc.conjugate(), -us)
        zc = zc.conjugate()
        zs = -zs
        k_acc_cols(z, i, zc, zs)
        xc, xs = k_pass_r2l(cc, cs, bc, bs, i, zc, zs)
        if i < hi - 1:
            uc, us, q0c, q0s, q1c, q1s = k_turnover_down(qc[i], qs[i], qc[i + 1], qs[i + 1],
                                                         xc, xs)
            qc[i] = q0c
            qs[i] = q0s
            qc[i + 1] = q1c
            qs[i + 1] = q1s
            k_acc_cols(u, i + 1, uc, us)
        else:
            ph = qc[hi] if hi < m else 1.0 + 0.0j
            qc[hi - 1], qs[hi - 1] = k_fuse(qc[hi - 1], qs[hi - 1], xc, xs * ph)
    return 5 * (hi - lo) - 1


@njit
def k_solve_qz(qc, qs, cc, cs, bc, bs, wcc, wcs, wbc, wbs, maxit, tol, seed, u, z, stats):
    n = cc.shape[0]
    x = np.empty(n + 1, np.complex128)
    w = np.empty(n + 1, np.complex128)
    vb = np.empty((2, 2), np.complex128)
    wb = np.empty((2, 2), np.complex128)
    mb = np.empty((2, 2), np.complex128)
    hi = n - 1
    its = 0
    sweeps = 0
    turns = 0
    exc = 0
    status = OK
    last_lo = -1
    while hi > 0:
        lo = k_find_block(qc, qs, hi, tol)
        if lo == hi:
            hi -= 1
            its = 0
            continue
        if lo != last_lo:
            # a split inside the window is progress too
            its = 0
            last_lo = lo
        if sweeps >= maxit * n:
            status = NOCONV
            break
        special = its > 0 and its % EXCEPTIONAL_PERIOD == 0
        if special:
            exc += 1
        mu = k_qz_shift(qc, qs, cc, cs, bc, bs, wcc, wcs, wbc, wbs, hi, x, w, vb, wb, mb,
                        special, seed, exc)
        turns += k_qz_sweep(qc, qs, cc, cs, bc, bs, wcc, wcs, wbc, wbs, lo, hi, mu, u, z)
        its += 1
        sweeps += 1
        if (k_corrupt(qc, qs, lo, hi - 1) or k_corrupt(cc, cs, lo, hi + 1)
                or k_corrupt(bc, bs, lo, hi + 1) or k_corrupt(wcc, wcs, lo, hi + 1)
                or k_corrupt(wbc, wbs, lo, hi + 1)):
            status = CORRUPT
            break
    stats[0] = sweeps
    stats[1] = turns
    stats[2] = hi
    stats[3] = exc
    return status


# ---------------------------------------------------------------------------
# Python surface
# ---------------------------------------------------------------------------


def _arrays(state: PencilState):
    s, R, W = state.qr, state.qr.R, state.W
    return (s.qc, s.qs, R.cc, R.cs, R.bc, R.bs, W.cc, W.cs, W.bc, W.bs)


def _acc(state: PencilState):
    u = state.qr.u_accum if state.qr.u_accum is not None else _EMPTY
    z = state.z_accum if state.z_accum is not None else _EMPTY
    return u, z


def qz_initial_core(state: PencilState, mu: complex) -> IndexedCore:
    """Core ``U`` at ``lo`` with ``U^* q`` a multiple of ``e_1``, ``q = (V - mu W) e_lo``."""
    s = state.qr
    lo, hi = s.lo, s.hi
    if hi - lo < 1:
        raise ValueError("active block must have size at least 2")
    rll = s.R.bs[lo] / s.R.cs[lo]
    wll = state.W.bs[lo] / state.W.cs[lo]
    mu = complex(mu)
    for attempt in range(2):
        q0 = k_qdiag(s.qc, lo) * rll - mu * wll
        q1 = s.qs[lo] * rll
        if q0 != 0 or q1 != 0:
            core, _ = make_core(q0, q1)
            return IndexedCore(core, lo)
        mu += UNIT_ROUNDOFF * abs(mu)
    raise ArithmeticError("shifted first column vanished; no initial core")


def qz_shift(state: PencilState) -> complex:
    """Eigenvalue of the trailing 2x2 of ``W^{-1} V`` nearer ``V_hh / W_hh``."""
    s = state.qr
    if s.hi - s.lo < 1:
        raise ValueError("active block must have size at least 2")
    n = state.n
    x = np.empty(n + 1, np.complex128)
    w = np.empty(n + 1, np.complex128)
    blocks = [np.empty((2, 2), np.complex128) for _ in range(3)]
    return complex(k_qz_shift(*_arrays(state), s.hi, x, w, *blocks, False, 0, 0))


def qz_sweep(state: PencilState, mu: complex) -> PencilState:
    s = state.qr
    lo, hi = s.lo, s.hi
    if not 0 <= lo < hi <= state.n - 1:
        raise ValueError(f"invalid active block ({lo}, {hi})")
    s.turnovers += k_qz_sweep(*_arrays(state), lo, hi, complex(mu), *_acc(state))
    s.sweeps += 1
    arrs = _arrays(state)
    for c, sn in zip(arrs[0::2], arrs[1::2]):
        top = hi - 1 if c is s.qc else hi + 1
        if k_corrupt(c, sn, lo, top):
            raise CorruptionError("core unitarity drifted beyond repair during a sweep")
    return state


def extract_pencil_eigenvalues(state: PencilState) -> np.ndarray:
    """``V_kk / W_kk`` of a fully deflated pencil.

    A tiny ``W_kk`` is a legitimately huge root (``det W = a_n`` is never
    zero after preprocessing); only an exact zero or an overflowing ratio
    is reported as infinite.
    """
    s = state.qr
    if np.any(s.qs != 0):
        raise ValueError("state is not fully deflated")
    v = q_diagonal(s.qc) * s.R.diagonal()
    wd = state.W.diagonal()
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lam = v / wd
    bad = np.flatnonzero((wd == 0) | ~np.isfinite(lam))
    if bad.size:
        raise InfiniteEigenvalue(int(bad[0]))
    return lam


def _scaled_pencil(p: Polynomial, scale: str):
    """The pencil for ``p`` under a scaling policy, and its coefficient vector."""
    if scale not in SCALINGS:
        raise ValueError(f"scale must be one of {SCALINGS}, got {scale!r}")
    if scale == "monic":
        p = Polynomial(p.coeffs / p.coeffs[-1], p.zero_roots, complex(p.coeffs[-1]))
    state = build_pencil_state(p, norm_scale=(scale == "norm"))
    return state, p.coeffs / state.qr.scale


def dense_pencil(a) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``(V, W)`` of the companion pencil for coefficients ``a``."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.size - 1
    v = np.zeros((n, n), np.complex128)
    v[1:, :-1] = np.eye(n - 1)
    v[:, -1] = -a[:-1]
    w = np.eye(n, dtype=np.complex128)
    w[-1, -1] = a[-1]
    return v, w


def solve_qz(p, *, scale: str = "norm", max_iter: int = MAX_ITER,
             tol: float = UNIT_ROUNDOFF, seed: int = 0, accumulate: bool = False) -> RootResult:
    """All roots of ``p`` via the companion pencil; ``scale`` in norm/monic/none."""
    if not isinstance(p, Polynomial):
        p = preprocess(p)[0]
    diag = Diagnostics("companionQZ", p.degree + p.zero_roots)
    if p.degree == 0:
        return RootResult(_with_zero_roots(np.empty(0, np.complex128), p), diag)
    state, a = _scaled_pencil(p, scale)
    if accumulate:
        state.enable_accumulation()
    s, R, W = state.qr, state.qr.R, state.W
    before = R.scaled_sine_products() + W.scaled_sine_products()
    stats = np.zeros(4, np.int64)
    status = k_solve_qz(*_arrays(state), max_iter, tol, seed, *_acc(state), stats)
    diag.sweeps, diag.turnovers, diag.exceptional_shifts = int(stats[0]), int(stats[1]), int(stats[3])
    if status == NOCONV:
        raise NoConvergence(int(stats[2]), int(stats[0]))
    if status == CORRUPT:
        raise CorruptionError("core unitarity drifted beyond repair during a sweep")
    after = R.scaled_sine_products() + W.scaled_sine_products()
    diag.sine_drift = _drift(before, after, ("C", "B", "C_W", "B_W"))
    s.lo = s.hi = 0
    if accumulate:
        u, z = state.qr.u_accum, state.z_accum
        v0, w0 = dense_pencil(a)
        v1, w1 = state.to_dense()
        diag.delta_A = float(np.linalg.norm(u @ v1 @ z.conj().T - v0))
        diag.delta_W = float(np.linalg.norm(u @ w1 @ z.conj().T - w0))
    return RootResult(_with_zero_roots(extract_pencil_eigenvalues(state), p), diag)
