"""Single-shift companion QR on the factored form ``A = Q R``.

One iteration creates a misfit core ``U`` from the shifted first column,
fuses ``U^*`` into Q, and chases ``U`` to the bottom: pass it through R
(two turnovers), turn it over through Q (one turnover), repeat.  At the
bottom the misfit fuses into ``Q_{hi-1}``.  Convergence shows up as a
vanishing sine in Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import backend, njit
from .companion import CompanionQRState, Polynomial, build_qr_state, preprocess
from .errors import NoConvergence
from .rotations import (
    MAX_DEFECT,
    UNIT_ROUNDOFF,
    CorruptionError,
    k_defect,
    k_fuse,
    k_make_core,
    k_turnover_down,
)
from .triangular import (
    k_col_prefix,
    k_pass_r2l,
    k_x_prefix,
    sine_product_drift,
)

MAX_ITER = 30
EXCEPTIONAL_PERIOD = 15
_GOLDEN = 0.6180339887498949
_EMPTY = np.zeros((0, 0), np.complex128)

# status codes returned by the solve kernels
OK, NOCONV, CORRUPT = 0, 1, 2


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@njit
def k_qdiag(qc, i):
    """Q[i, i] = conj(c_{i-1}) c_i; missing cores count as the identity."""
    m = qc.shape[0]
    left = 1.0 + 0.0j if i == 0 else qc[i - 1].conjugate()
    right = 1.0 + 0.0j if i == m else qc[i]
    return left * right


@njit
def k_qsuper(qc, qs, i):
    """Q[i-1, i] = -conj(c_{i-2}) conj(s_{i-1}) c_i."""
    m = qc.shape[0]
    far = 1.0 + 0.0j if i < 2 else qc[i - 2].conjugate()
    right = 1.0 + 0.0j if i == m else qc[i]
    return -far * qs[i - 1].conjugate() * right


@njit
def k_trailing_block(qc, qs, cc, cs, bc, bs, h, x, w, out):
    """out <- A[h-1:h+1, h-1:h+1] for A = Q R, in O(h)."""
    k_x_prefix(cc, cs, h, x)
    k_col_prefix(cc, cs, bc, bs, h - 1, x, w)
    r_a = w[h - 2] if h >= 2 else 0.0j
    r_b = w[h - 1]
    k_col_prefix(cc, cs, bc, bs, h, x, w)
    r_c = w[h - 2] if h >= 2 else 0.0j
    r_d = w[h - 1]
    r_e = w[h]
    sub2 = qs[h - 2] if h >= 2 else 0.0j
    d1 = k_qdiag(qc, h - 1)
    d2 = k_qdiag(qc, h)
    sub = qs[h - 1]
    sup = k_qsuper(qc, qs, h)
    out[0, 0] = sub2 * r_a + d1 * r_b
    out[0, 1] = sub2 * r_c + d1 * r_d + sup * r_e
    out[1, 0] = sub * r_b
    out[1, 1] = sub * r_d + d2 * r_e


@njit
def k_wilkinson(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] nearer d; ties go to the smaller (re, im)."""
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mid = 0.5 * (a + d)
    l1 = mid + disc
    l2 = mid - disc
    e1 = abs(l1 - d)
    e2 = abs(l2 - d)
    if e1 < e2:
        return l1
    if e2 < e1:
        return l2
    if l1.real < l2.real or (l1.real == l2.real and l1.imag <= l2.imag):
        return l1
    return l2


@njit
def k_exceptional(anchor, coupling, seed, count):
    """anchor + (3/4)|coupling| e^{i theta}, theta from a golden-ratio Weyl sequence.

    A pure phase rotation of the anchor is useless when the trailing entry is
    tiny (the shift-matrix pattern left behind after a small root deflates),
    so the step length is taken from the coupling, as in LAPACK's ad hoc shifts.
    """
    theta = 2.0 * math.pi * (((seed + count) * _GOLDEN) % 1.0)
    rot = complex(math.cos(theta), math.sin(theta))
    return anchor + 0.75 * abs(coupling) * rot


@njit
def k_acc_cols(u, k, c, s):
    """u <- u G with G the core (c, s) at columns k, k+1."""
    for r in range(u.shape[0]):
        p = u[r, k]
        q = u[r, k + 1]
        u[r, k] = p * c + q * s
        u[r, k + 1] = -p * s.conjugate() + q * c.conjugate()


@njit
def k_qr_sweep(qc, qs, cc, cs, bc, bs, lo, hi, mu, u):
    """One Francis step on rows lo..hi; returns the number of turnovers.

    Q_{lo-1} and Q_hi, when present, are deflated: diag(phi, conj(phi)).
    Moving a core at the neighbouring index past such a phase multiplies its
    sine by phi or conj(phi), which is applied at both ends.
    """
    m = qc.shape[0]
    rll = bs[lo] / cs[lo]
    uc, us, _ = k_make_core(k_qdiag(qc, lo) * rll - mu, qs[lo] * rll)
    ph = qc[lo - 1].conjugate() if lo > 0 else 1.0 + 0.0j
    qc[lo], qs[lo] = k_fuse(uc.conjugate(), -us * ph, qc[lo], qs[lo])
    k_acc_cols(u, lo, uc, us)
    xc, xs = k_pass_r2l(cc, cs, bc, bs, lo, uc, us)
    for i in range(lo, hi - 1):
        uc, us, q0c, q0s, q1c, q1s = k_turnover_down(qc[i], qs[i], qc[i + 1], qs[i + 1],
                                                     xc, xs)
        qc[i] = q0c
        qs[i] = q0s
        qc[i + 1] = q1c
        qs[i + 1] = q1s
        k_acc_cols(u, i + 1, uc, us)
        xc, xs = k_pass_r2l(cc, cs, bc, bs, i + 1, uc, us)
    ph = qc[hi] if hi < m else 1.0 + 0.0j
    qc[hi - 1], qs[hi - 1] = k_fuse(qc[hi - 1], qs[hi - 1], xc, xs * ph)
    return 3 * (hi - lo) - 1


@njit
def k_find_block(qc, qs, hi, tol):
    """Deflate the lowest negligible sine above hi; return the block start."""
    k = hi - 1
    while k >= 0:
        if abs(qs[k]) <= tol:
            qs[k] = 0.0
            qc[k] = qc[k] / abs(qc[k])
            return k + 1
        k -= 1
    return 0


@njit
def k_corrupt(c, s, lo, hi):
    top = min(hi, c.shape[0] - 1)
    for k in range(lo, top + 1):
        d = k_defect(c[k], s[k])
        if not abs(d) <= MAX_DEFECT:
            return True
    return False


@njit
def k_solve_qr(qc, qs, cc, cs, bc, bs, maxit, tol, seed, u, stats):
    """Run sweeps until Q is diagonal.  stats <- sweeps, turnovers, position,
    exceptional shifts.  Returns OK, NOCONV or CORRUPT."""
    n = cc.shape[0]
    x = np.empty(n + 1, np.complex128)
    w = np.empty(n + 1, np.complex128)
    blk = np.empty((2, 2), np.complex128)
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
        k_trailing_block(qc, qs, cc, cs, bc, bs, hi, x, w, blk)
        if its > 0 and its % EXCEPTIONAL_PERIOD == 0:
            exc += 1
            mu = k_exceptional(blk[1, 1], blk[1, 0], seed, exc)
        else:
            mu = k_wilkinson(blk[0, 0], blk[0, 1], blk[1, 0], blk[1, 1])
        turns += k_qr_sweep(qc, qs, cc, cs, bc, bs, lo, hi, mu, u)
        its += 1
        sweeps += 1
        if (k_corrupt(qc, qs, lo, hi - 1) or k_corrupt(cc, cs, lo, hi + 1)
                or k_corrupt(bc, bs, lo, hi + 1)):
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


@dataclass
class Diagnostics:
    method: str
    degree: int
    sweeps: int = 0
    turnovers: int = 0
    exceptional_shifts: int = 0
    sine_drift: dict = field(default_factory=dict)
    delta_A: float | None = None
    delta_W: float | None = None
    backend: str = field(default_factory=backend)


@dataclass
class RootResult:
    roots: np.ndarray
    diagnostics: Diagnostics


def _accumulator(state):
    return state.u_accum if state.u_accum is not None else _EMPTY


def trailing_block(state: CompanionQRState, h: int | None = None) -> np.ndarray:
    """The 2x2 block ``A[h-1:h+1, h-1:h+1]`` (default ``h = hi``)."""
    h = state.hi if h is None else h
    if not 1 <= h <= state.n - 1:
        raise IndexError(f"no 2x2 block ends at row {h}")
    R = state.R
    x = np.empty(state.n + 1, np.complex128)
    w = np.empty(state.n + 1, np.complex128)
    out = np.empty((2, 2), np.complex128)
    k_trailing_block(state.qc, state.qs, R.cc, R.cs, R.bc, R.bs, h, x, w, out)
    return out


def wilkinson_shift(state: CompanionQRState) -> complex:
    if state.hi - state.lo < 1:
        raise ValueError("active block must have size at least 2")
    b = trailing_block(state)
    return complex(k_wilkinson(b[0, 0], b[0, 1], b[1, 0], b[1, 1]))


def _check_state(qc, qs, R, lo, hi):
    if (k_corrupt(qc, qs, lo, hi - 1) or k_corrupt(R.cc, R.cs, lo, hi + 1)
            or k_corrupt(R.bc, R.bs, lo, hi + 1)):
        raise CorruptionError("core unitarity drifted beyond repair during a sweep")


def qr_sweep(state: CompanionQRState, mu: complex) -> CompanionQRState:
    """One implicit single-shift step on the active block, in place."""
    lo, hi = state.lo, state.hi
    if not 0 <= lo < hi <= state.n - 1:
        raise ValueError(f"invalid active block ({lo}, {hi})")
    R = state.R
    state.turnovers += k_qr_sweep(state.qc, state.qs, R.cc, R.cs, R.bc, R.bs, lo, hi,
                                  complex(mu), _accumulator(state))
    state.sweeps += 1
    _check_state(state.qc, state.qs, R, lo, hi)
    return state


def detect_deflations(state: CompanionQRState, tol: float = UNIT_ROUNDOFF) -> tuple[int, int]:
    """Zero every negligible sine in Q and shrink the active block."""
    small = np.abs(state.qs) <= tol
    state.qs[small] = 0.0
    c = state.qc[small]
    mag = np.abs(c)
    state.qc[small] = np.where(mag > 0, c / np.where(mag > 0, mag, 1.0), 1.0)
    hi = min(state.hi, state.n - 1)
    while hi > 0 and state.qs[hi - 1] == 0:
        hi -= 1
    lo = hi
    while lo > 0 and state.qs[lo - 1] != 0:
        lo -= 1
    state.lo, state.hi = lo, hi
    return lo, hi


def q_diagonal(qc: np.ndarray) -> np.ndarray:
    ones = np.ones(1, np.complex128)
    return np.concatenate([ones, qc.conj()]) * np.concatenate([qc, ones])


def extract_eigenvalues(state: CompanionQRState) -> np.ndarray:
    """Eigenvalues ``Q_kk R_kk`` of a fully deflated state."""
    if np.any(state.qs != 0):
        raise ValueError("state is not fully deflated")
    return q_diagonal(state.qc) * state.R.diagonal()


def _with_zero_roots(roots, p: Polynomial):
    return np.concatenate([roots, np.zeros(p.zero_roots, np.complex128)])


def _drift(before, after, names):
    return {name: sine_product_drift(b, a) for name, b, a in zip(names, before, after)}


def solve_qr(p, *, max_iter: int = MAX_ITER, tol: float = UNIT_ROUNDOFF, seed: int = 0,
             accumulate: bool = False) -> RootResult:
    """All roots of ``p`` (a Polynomial or raw ascending coefficients)."""
    from .dense import dense_companion, matrix_backward_error

    if not isinstance(p, Polynomial):
        p = preprocess(p)[0]
    diag = Diagnostics("companionQR", p.degree + p.zero_roots)
    if p.degree == 0:
        return RootResult(_with_zero_roots(np.empty(0, np.complex128), p), diag)
    state = build_qr_state(p)
    if accumulate:
        state.enable_accumulation()
    R = state.R
    before = R.scaled_sine_products()
    stats = np.zeros(4, np.int64)
    status = k_solve_qr(state.qc, state.qs, R.cc, R.cs, R.bc, R.bs, max_iter, tol, seed,
                        _accumulator(state), stats)
    diag.sweeps, diag.turnovers, diag.exceptional_shifts = int(stats[0]), int(stats[1]), int(stats[3])
    if status == NOCONV:
        raise NoConvergence(int(stats[2]), int(stats[0]))
    if status == CORRUPT:
        raise CorruptionError("core unitarity drifted beyond repair during a sweep")
    diag.sine_drift = _drift(before, R.scaled_sine_products(), ("C", "B"))
    state.lo = state.hi = 0
    if accumulate:
        a = p.coeffs / p.coeffs[-1]
        diag.delta_A = matrix_backward_error(dense_companion(a), state.u_accum, state.to_dense())
    return RootResult(_with_zero_roots(extract_eigenvalues(state), p), diag)
