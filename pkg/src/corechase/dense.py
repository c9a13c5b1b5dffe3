"""Dense reference computations.

Assembly of factored objects into ordinary matrices, an unstructured
single-shift Francis QR on dense upper Hessenberg matrices (the comparison
method for the structured solvers; it shares no kernels with them), and the
matrix-level backward error.
"""

from __future__ import annotations

import math

import numpy as np

from ._jit import njit
from .errors import NoConvergence
from .triangular import FactoredTriangular

#: the dense comparator is O(n^3); refuse anything bigger
DENSE_CAP = 512


def dense_from_cores(cc, cs, dim: int, start: int = 0) -> np.ndarray:
    """Product ``G_start G_start+1 ...`` of cores embedded in a dim x dim identity.

    ``cc``/``cs`` may be arrays of cosines and sines, or ``cc`` may be a list of
    :class:`~corechase.rotations.IndexedCore` (then ``cs`` is ignored).
    """
    m = np.eye(dim, dtype=complex)
    if cs is None:
        items = [(ic.index, complex(ic.core.c), complex(ic.core.s)) for ic in cc]
    else:
        items = [(start + k, complex(c), complex(s)) for k, (c, s) in enumerate(zip(cc, cs))]
    for i, c, s in items:
        if not 0 <= i < dim - 1:
            raise IndexError(f"core index {i} does not fit dimension {dim}")
        block = np.array([[c, -s.conjugate()], [s, c.conjugate()]])
        m[:, i:i + 2] = m[:, i:i + 2] @ block
    return m


def dense_triangular(r: FactoredTriangular, extended: bool = False) -> np.ndarray:
    """Assemble ``C^*(B + alpha e_1 y^T)``; the n x n block unless ``extended``."""
    n = r.n
    cstar = dense_from_cores(r.cc, r.cs, n + 1).conj().T
    b = dense_from_cores(r.bc, r.bs, n + 1)
    ay = r.recover_y()
    b[0, :] += ay
    big = cstar @ b
    return big if extended else big[:n, :n]


def dense_companion(a) -> np.ndarray:
    """Companion matrix of the polynomial with ascending coefficients ``a``."""
    a = np.asarray(a, dtype=complex)
    n = a.size - 1
    m = np.zeros((n, n), dtype=complex)
    m[1:, :-1] = np.eye(n - 1)
    m[:, -1] = -a[:-1] / a[-1]
    return m


def matrix_backward_error(a: np.ndarray, u: np.ndarray, a_hat: np.ndarray) -> float:
    """``||U A_hat U^* - A||_F``."""
    return float(np.linalg.norm(u @ a_hat @ u.conj().T - a))


@njit
def _wilkinson2(a, b, c, d):
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
    if (l1.real, l1.imag) <= (l2.real, l2.imag):
        return l1
    return l2


@njit
def _francis(h, maxit, out):
    n = h.shape[0]
    u = 1.1102230246251565e-16
    hi = n - 1
    its = 0
    total = 0
    while hi >= 0:
        if hi == 0:
            out[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            if abs(h[lo, lo - 1]) <= u * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if total >= maxit * n:
            return -hi - 1
        if its > 0 and its % 15 == 0:
            theta = 2.0 * math.pi * ((total * 0.6180339887498949) % 1.0)
            mu = h[hi, hi] * complex(math.cos(theta), math.sin(theta)) + abs(h[hi, hi - 1])
        else:
            mu = _wilkinson2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        x = h[lo, lo] - mu
        y = h[lo + 1, lo]
        for k in range(lo, hi):
            nrm = math.hypot(abs(x), abs(y))
            if nrm == 0.0:
                c = 1.0 + 0.0j
                s = 0.0j
            else:
                c = x / nrm
                s = y / nrm
            # rows k, k+1 by G^*; columns k, k+1 by G
            j0 = max(lo, k - 1)
            for j in range(j0, hi + 1):
                p = h[k, j]
                q = h[k + 1, j]
                h[k, j] = c.conjugate() * p + s.conjugate() * q
                h[k + 1, j] = -s * p + c * q
            jmax = min(k + 2, hi)
            for i in range(lo, jmax + 1):
                p = h[i, k]
                q = h[i, k + 1]
                h[i, k] = p * c + q * s
                h[i, k + 1] = -p * s.conjugate() + q * c.conjugate()
            if k > lo:
                h[k + 1, k - 1] = 0.0
            if k < hi - 1:
                x = h[k + 1, k]
                y = h[k + 2, k]
        its += 1
        total += 1
    return total


def dense_francis(h, max_iter: int = 30) -> np.ndarray:
    """Eigenvalues of a dense upper Hessenberg matrix by shifted Francis QR."""
    h = np.array(h, dtype=np.complex128, copy=True)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("square matrix required")
    if n > DENSE_CAP:
        raise ValueError(f"dense comparator capped at n = {DENSE_CAP}")
    if n and np.abs(np.tril(h, -2)).max(initial=0.0) != 0.0:
        raise ValueError("matrix is not upper Hessenberg")
    out = np.empty(n, np.complex128)
    status = _francis(h, max_iter, out)
    if status < 0:
        raise NoConvergence(-status - 1, max_iter * n)
    return out
