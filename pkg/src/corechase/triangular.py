"""Factored upper-triangular unitary-plus-rank-one matrices.

An n x n upper triangular ``R`` with spike column ``t`` (last column ``t``,
other diagonal entries 1) is embedded in the (n+1) x (n+1) matrix::

    R_ext = C^* (B + alpha e_1 y^T),      R = R_ext[:n, :n]

where ``C = C_1 ... C_n`` and ``B = B_1 ... B_n`` are descending sequences of
cores and ``alpha`` is a positive real scalar.  Only the sines/cosines of C
and B plus alpha are stored; y is implicit and can be recovered in O(n).

Cores are held as four complex arrays (``cc, cs, bc, bs``) so that the
kernels here, and the chasing loops that call them, can run compiled.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit
from .rotations import (
    CoreTransformation,
    IndexedCore,
    k_apply,
    k_apply_adj,
    k_fuse,
    k_make_core,
    k_turnover_down,
    k_turnover_up,
)


class SingularRepresentationError(ArithmeticError):
    """The factored form encodes a numerically singular rank-one part."""


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@njit
def k_from_spike(t, cc, cs, bc, bs):
    n = t.shape[0]
    # z = (t, -1); eliminate bottom-up so that C z = alpha e_1
    acc = -1.0 + 0.0j
    for k in range(n - 1, -1, -1):
        gc, gs, r = k_make_core(t[k], acc)
        cc[k] = gc.conjugate()
        cs[k] = -gs
        acc = r + 0.0j
    for k in range(n - 1):
        bc[k] = cc[k]
        bs[k] = cs[k]
    # B_n = C_n Y_n, Y_n the rotation [[0, -1], [1, 0]] on rows n, n+1
    bc[n - 1], bs[n - 1] = k_fuse(cc[n - 1], cs[n - 1], 0.0j, 1.0 + 0.0j)
    return acc.real


@njit
def k_pass_r2l(cc, cs, bc, bs, i, gc, gs):
    """R G_i = G'_i R'.  Two turnovers; returns G'_i."""
    mc, ms, b0c, b0s, b1c, b1s = k_turnover_down(bc[i], bs[i], bc[i + 1], bs[i + 1], gc, gs)
    bc[i] = b0c
    bs[i] = b0s
    bc[i + 1] = b1c
    bs[i + 1] = b1s
    c0c, c0s, c1c, c1s, hc, hs = k_turnover_up(mc.conjugate(), -ms, cc[i], cs[i],
                                               cc[i + 1], cs[i + 1])
    cc[i] = c0c
    cs[i] = c0s
    cc[i + 1] = c1c
    cs[i + 1] = c1s
    return hc.conjugate(), -hs


@njit
def k_pass_l2r(cc, cs, bc, bs, i, gc, gs):
    """G_i R = R' G'_i.  Two turnovers; returns G'_i."""
    mc, ms, c0c, c0s, c1c, c1s = k_turnover_down(cc[i], cs[i], cc[i + 1], cs[i + 1],
                                                 gc.conjugate(), -gs)
    cc[i] = c0c
    cs[i] = c0s
    cc[i + 1] = c1c
    cs[i + 1] = c1s
    b0c, b0s, b1c, b1s, hc, hs = k_turnover_up(mc.conjugate(), -ms, bc[i], bs[i],
                                               bc[i + 1], bs[i + 1])
    bc[i] = b0c
    bs[i] = b0s
    bc[i + 1] = b1c
    bs[i + 1] = b1s
    return hc, hs


@njit
def k_first_col_cstar(cc, cs, x):
    """x <- C^* e_1 (length n+1)."""
    n = cc.shape[0]
    x[:] = 0.0
    x[0] = 1.0
    for k in range(n):
        x[k], x[k + 1] = k_apply_adj(cc[k], cs[k], x[k], x[k + 1])


@njit
def k_unitary_col(cc, cs, bc, bs, j, v):
    """v <- C^* B e_{j+1} (length n+1)."""
    n = cc.shape[0]
    v[:] = 0.0
    v[j] = 1.0
    for k in range(j, -1, -1):
        v[k], v[k + 1] = k_apply(bc[k], bs[k], v[k], v[k + 1])
    for k in range(n):
        v[k], v[k + 1] = k_apply_adj(cc[k], cs[k], v[k], v[k + 1])


@njit
def k_column(cc, cs, bc, bs, j, x, v):
    """v <- R_ext[:, j] given x = C^* e_1; diagonal entry from the sine ratio."""
    n = cc.shape[0]
    k_unitary_col(cc, cs, bc, bs, j, v)
    f = v[n] / x[n]
    for k in range(n + 1):
        v[k] -= f * x[k]
    v[j] = bs[j] / cs[j]


@njit
def k_diag(cs, bs, k):
    # (C R_ext)[k+1, k] = B[k+1, k]  =>  R_kk = s(B_k) / s(C_k)
    return bs[k] / cs[k]


@njit
def k_recover_y(cc, cs, bc, bs, out):
    """out <- alpha y^T = -rho^{-1} e_{n+1}^T C^* B.  Returns rho."""
    n = cc.shape[0]
    # w = C e_{n+1}; the row e_{n+1}^T C^* is conj(w)
    out[:] = 0.0
    out[n] = 1.0
    for k in range(n - 1, -1, -1):
        out[k], out[k + 1] = k_apply(cc[k], cs[k], out[k], out[k + 1])
    for k in range(n + 1):
        out[k] = out[k].conjugate()
    rho = out[0]
    if rho == 0:
        return rho
    # row vector times B_1 ... B_n
    for k in range(n):
        c = bc[k]
        s = bs[k]
        a = out[k]
        b = out[k + 1]
        out[k] = a * c + b * s
        out[k + 1] = -a * s.conjugate() + b * c.conjugate()
    for k in range(n + 1):
        out[k] = -out[k] / rho
    return rho


@njit
def k_x_prefix(cc, cs, m, x):
    """x[0..m] <- (C^* e_1)[0..m]; only cores 0..m are needed for these rows."""
    x[0] = 1.0
    x[1] = 0.0
    for k in range(m + 1):
        x[k + 1] = 0.0
        x[k], x[k + 1] = k_apply_adj(cc[k], cs[k], x[k], x[k + 1])


@njit
def k_col_prefix(cc, cs, bc, bs, j, x, w):
    """w[0..j] <- R[0..j, j] in O(j), given x from k_x_prefix(.., m >= j, ..).

    The rank-one coefficient alpha*y_j = -(e_{n+1}^T C^* B e_j) / rho is
    formed from the closed form of the row e_{n+1}^T C^*, whose k-th entry
    divided by rho is c_{k-1} / prod_{m<k}(-s_m).
    """
    n = cc.shape[0]
    for k in range(j + 2):
        w[k] = 0.0
    w[j] = 1.0
    for k in range(j, -1, -1):
        w[k], w[k + 1] = k_apply(bc[k], bs[k], w[k], w[k + 1])
    f = 0.0j
    pi = 1.0 + 0.0j
    for k in range(j + 2):
        ck = 1.0 + 0.0j if k == 0 else cc[k - 1]
        f += ck * w[k] / pi
        if k < n:
            pi *= -cs[k]
    for k in range(j + 1):
        w[k], w[k + 1] = k_apply_adj(cc[k], cs[k], w[k], w[k + 1])
    for k in range(j):
        w[k] -= f * x[k]
    w[j] = bs[j] / cs[j]


@njit
def k_sine_product(s):
    p = 1.0 + 0.0j
    for k in range(s.shape[0]):
        p *= s[k]
    return p


@njit
def k_sine_product_scaled(s):
    """prod(s) as (mantissa, binary exponent); immune to under/overflow."""
    p = 1.0 + 0.0j
    e = 0
    for k in range(s.shape[0]):
        p *= s[k]
        a = abs(p)
        if a != 0.0 and (a < 1e-100 or a > 1e100):
            ex = int(np.floor(np.log2(a)))
            p *= 2.0 ** (-ex)
            e += ex
    return p, e


def sine_product_drift(before, after) -> float:
    """Relative change between two scaled sine products."""
    (p0, e0), (p1, e1) = before, after
    if p0 == 0:
        return 0.0 if p1 == 0 else float("inf")
    return float(abs(p1 * 2.0 ** (e1 - e0) - p0) / abs(p0))


# ---------------------------------------------------------------------------
# Python surface
# ---------------------------------------------------------------------------


class FactoredTriangular:
    """O(n) representation of an upper triangular unitary-plus-rank-one matrix."""

    def __init__(self, cc, cs, bc, bs, alpha):
        self.cc = np.ascontiguousarray(cc, dtype=np.complex128)
        self.cs = np.ascontiguousarray(cs, dtype=np.complex128)
        self.bc = np.ascontiguousarray(bc, dtype=np.complex128)
        self.bs = np.ascontiguousarray(bs, dtype=np.complex128)
        self.alpha = float(alpha)

    @classmethod
    def from_spike(cls, t) -> "FactoredTriangular":
        t = np.ascontiguousarray(t, dtype=np.complex128)
        if t.ndim != 1 or t.size < 1:
            raise ValueError("spike must be a nonempty vector")
        if not np.all(np.isfinite(t)):
            raise ValueError("spike entries must be finite")
        n = t.size
        cc, cs, bc, bs = (np.empty(n, np.complex128) for _ in range(4))
        alpha = k_from_spike(t, cc, cs, bc, bs)
        return cls(cc, cs, bc, bs, alpha)

    @property
    def n(self) -> int:
        return self.cc.size

    def copy(self) -> "FactoredTriangular":
        return FactoredTriangular(self.cc.copy(), self.cs.copy(), self.bc.copy(),
                                  self.bs.copy(), self.alpha)

    @property
    def rho(self) -> complex:
        """e_{n+1}^T C^* e_1 = (-1)^n s(C_1) ... s(C_n)."""
        return (-1) ** self.n * complex(k_sine_product(self.cs))

    def sine_products(self) -> tuple[complex, complex]:
        return complex(k_sine_product(self.cs)), complex(k_sine_product(self.bs))

    def scaled_sine_products(self):
        """Sine products of C and B as (mantissa, exponent) pairs."""
        return k_sine_product_scaled(self.cs), k_sine_product_scaled(self.bs)

    def upper_entries(self, j: int) -> np.ndarray:
        """Entries ``R[0..j, j]`` in O(j) work."""
        if not 0 <= j < self.n:
            raise IndexError(j)
        x = np.empty(self.n + 1, np.complex128)
        w = np.empty(self.n + 1, np.complex128)
        k_x_prefix(self.cc, self.cs, j, x)
        k_col_prefix(self.cc, self.cs, self.bc, self.bs, j, x, w)
        return w[:j + 1].copy()

    def c_cores(self) -> list[CoreTransformation]:
        return [CoreTransformation(complex(c), complex(s)) for c, s in zip(self.cc, self.cs)]

    def b_cores(self) -> list[CoreTransformation]:
        return [CoreTransformation(complex(c), complex(s)) for c, s in zip(self.bc, self.bs)]

    def _check_index(self, i):
        if not 0 <= i <= self.n - 2:
            raise IndexError(f"core index {i} outside 0..{self.n - 2}")

    def pass_right_to_left(self, g: IndexedCore) -> IndexedCore:
        """Rewrite ``R g`` as ``g' R'`` in place; returns ``g'``."""
        self._check_index(g.index)
        c, s = k_pass_r2l(self.cc, self.cs, self.bc, self.bs, g.index,
                          complex(g.core.c), complex(g.core.s))
        return IndexedCore(CoreTransformation(complex(c), complex(s)), g.index)

    def pass_left_to_right(self, g: IndexedCore) -> IndexedCore:
        """Rewrite ``g R`` as ``R' g'`` in place; returns ``g'``."""
        self._check_index(g.index)
        c, s = k_pass_l2r(self.cc, self.cs, self.bc, self.bs, g.index,
                          complex(g.core.c), complex(g.core.s))
        return IndexedCore(CoreTransformation(complex(c), complex(s)), g.index)

    def recover_y(self) -> np.ndarray:
        """alpha * y (length n+1), the implicit rank-one row."""
        out = np.empty(self.n + 1, np.complex128)
        rho = k_recover_y(self.cc, self.cs, self.bc, self.bs, out)
        if rho == 0 or not np.isfinite(rho):
            raise SingularRepresentationError("rho vanished; rank-one part unrecoverable")
        return out

    def column(self, j: int) -> np.ndarray:
        """Column j of the extended matrix (length n+1), in O(n)."""
        if not 0 <= j < self.n:
            raise IndexError(j)
        x = np.empty(self.n + 1, np.complex128)
        v = np.empty(self.n + 1, np.complex128)
        k_first_col_cstar(self.cc, self.cs, x)
        k_column(self.cc, self.cs, self.bc, self.bs, j, x, v)
        return v

    def diagonal(self) -> np.ndarray:
        return self.bs / self.cs

    def diagonal_block(self, k: int, size: int = 2) -> np.ndarray:
        if size not in (1, 2) or not 0 <= k <= self.n - size:
            raise IndexError(f"block ({k}, {size}) outside dimension {self.n}")
        block = np.zeros((size, size), np.complex128)
        for jj in range(size):
            col = self.column(k + jj)
            block[:jj + 1, jj] = col[k:k + jj + 1]
        return block
