"""Unitary core transformations, fusion and turnover.

A core transformation acting on rows ``i, i+1`` has the active part::

    [[c, -conj(s)],
     [s,  conj(c)]]        |c|^2 + |s|^2 = 1

i.e. it is a special unitary 2x2 block.  Products of such blocks stay in the
same class, so fusions and turnovers never leave stray diagonal phases behind.

The scalar kernels (``k_*``) take and return plain complex numbers so the
chasing loops can be compiled; :class:`CoreTransformation` and the functions
without the prefix are the convenient Python surface over them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jit import njit

#: unit roundoff of IEEE binary64
UNIT_ROUNDOFF = np.finfo(np.float64).eps / 2
#: the product-preserving quotient for a turnover's second sine is used when it
#: agrees with the directly computed sine to this absolute tolerance; a larger
#: gap means s_hat_j itself lost relative accuracy to cancellation
QUOTIENT_TOL = 8 * UNIT_ROUNDOFF
#: make_core rescales inputs outside this magnitude range
_SAFE_LO, _SAFE_HI = 2.0 ** -500, 2.0 ** 500
#: largest unitarity defect renormalize will silently repair
MAX_DEFECT = 1e-8


class CorruptionError(RuntimeError):
    """A core transformation drifted too far from unitarity to be repaired."""


# ---------------------------------------------------------------------------
# scalar kernels
# ---------------------------------------------------------------------------


@njit
def k_defect(c, s):
    return c.real * c.real + c.imag * c.imag + s.real * s.real + s.imag * s.imag - 1.0


@njit
def k_renormalize(c, s):
    # 1/sqrt(1 + w) ~ 1 - w/2 for the O(u) defects produced here
    f = 1.0 - 0.5 * k_defect(c, s)
    return c * f, s * f


@njit
def k_make_core(x, y):
    big = max(abs(x.real), abs(x.imag), abs(y.real), abs(y.imag))
    if big == 0.0:
        return 1.0 + 0.0j, 0.0j, 0.0
    if _SAFE_LO < big < _SAFE_HI:
        nrm = math.hypot(abs(x), abs(y))
        c, s = k_renormalize(x / nrm, y / nrm)
        return c, s, nrm
    # exact power-of-two scaling so subnormal or huge inputs normalize cleanly
    e = math.frexp(big)[1]
    x = complex(math.ldexp(x.real, -e), math.ldexp(x.imag, -e))
    y = complex(math.ldexp(y.real, -e), math.ldexp(y.imag, -e))
    nrm = math.hypot(abs(x), abs(y))
    c, s = k_renormalize(x / nrm, y / nrm)
    return c, s, math.ldexp(nrm, e)


@njit
def k_fuse(gc, gs, hc, hs):
    c = gc * hc - gs.conjugate() * hs
    s = gs * hc + gc.conjugate() * hs
    return k_renormalize(c, s)


@njit
def k_apply(c, s, x, y):
    return c * x - s.conjugate() * y, s * x + c.conjugate() * y


@njit
def k_apply_adj(c, s, x, y):
    return c.conjugate() * x + s.conjugate() * y, c * y - s * x


@njit
def k_turnover_down(fc, fs, gc, gs, hc, hs):
    """F_j G_{j+1} H_j  ->  F'_{j+1} G'_j H'_{j+1}.

    The pair (F, G) is replaced by (G', H'); s_F s_G = s_G' s_H' is kept to
    high relative accuracy by computing s_H' as a quotient.
    """
    hcc = hc.conjugate()
    hsc = hs.conjugate()
    fcc = fc.conjugate()
    fsc = fs.conjugate()
    # first two columns of the 3x3 product
    a0 = fc * hc - fsc * gc * hs
    a1 = fs * hc + fcc * gc * hs
    a2 = gs * hs
    b0 = -fc * hsc - fsc * gc * hcc
    b1 = -fs * hsc + fcc * gc * hcc
    b2 = gs * hcc

    mc, ms, r1 = k_make_core(a1, a2)
    t1, t2 = k_apply_adj(mc, ms, b1, b2)
    pc, ps, r0 = k_make_core(a0, r1 + 0.0j)
    qc = pc * t1 - ps * b0
    qs = t2
    if ps != 0:
        quot = (fs * gs) / ps
        if abs(quot - t2) <= QUOTIENT_TOL:
            qs = quot
    qc, qs = k_renormalize(qc, qs)
    return mc, ms, pc, ps, qc, qs


@njit
def k_turnover_up(fc, fs, gc, gs, hc, hs):
    """F_{j+1} G_j H_{j+1}  ->  F'_j G'_{j+1} H'_j.

    Mirror image of :func:`k_turnover_down` under the anti-transpose, which
    maps the core (c, s) to (conj(c), s).  The pair (G, H) is replaced by
    (F', G').
    """
    a, b, c, d, e, f = k_turnover_down(hc.conjugate(), hs, gc.conjugate(), gs,
                                       fc.conjugate(), fs)
    return e.conjugate(), f, c.conjugate(), d, a.conjugate(), b


# ---------------------------------------------------------------------------
# Python surface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoreTransformation:
    c: complex = 1.0 + 0.0j
    s: complex = 0.0j

    @property
    def active(self) -> np.ndarray:
        c, s = complex(self.c), complex(self.s)
        return np.array([[c, -s.conjugate()], [s, c.conjugate()]])

    @property
    def defect(self) -> float:
        return abs(abs(self.c) ** 2 + abs(self.s) ** 2 - 1.0)

    def adjoint(self) -> "CoreTransformation":
        return CoreTransformation(complex(self.c).conjugate(), -complex(self.s))

    def embed(self, index: int, dim: int) -> np.ndarray:
        m = np.eye(dim, dtype=complex)
        m[index:index + 2, index:index + 2] = self.active
        return m

    @classmethod
    def identity(cls) -> "CoreTransformation":
        return cls()


@dataclass(frozen=True)
class IndexedCore:
    core: CoreTransformation
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"core index must be nonnegative, got {self.index}")


def make_core(x: complex, y: complex) -> tuple[CoreTransformation, float]:
    """Core G with ``G^* (x, y)^T = (r, 0)^T``; r is real and nonnegative."""
    c, s, r = k_make_core(complex(x), complex(y))
    return CoreTransformation(complex(c), complex(s)), float(r)


def renormalize(core: CoreTransformation) -> CoreTransformation:
    c, s = complex(core.c), complex(core.s)
    w = k_defect(c, s)
    if not abs(w) <= MAX_DEFECT:
        raise CorruptionError(f"unitarity defect {w:.3e} exceeds {MAX_DEFECT:g}")
    c, s = k_renormalize(c, s)
    return CoreTransformation(complex(c), complex(s))


def fuse(g: CoreTransformation, h: CoreTransformation) -> CoreTransformation:
    """The single core equal to the product ``g h`` (same index)."""
    _check(g, h)
    c, s = k_fuse(complex(g.c), complex(g.s), complex(h.c), complex(h.s))
    return CoreTransformation(complex(c), complex(s))


def turnover(g_j: IndexedCore, g_j1: IndexedCore, m_j: IndexedCore
             ) -> tuple[IndexedCore, IndexedCore, IndexedCore]:
    """Refactor a product of three cores into the opposite shape.

    Accepts either ``(j, j+1, j)`` indices, returning ``(j+1, j, j+1)``, or the
    mirrored ``(j+1, j, j+1)`` pattern, returning ``(j, j+1, j)``.  Both sides
    are equal as 3x3 matrices.
    """
    _check(g_j.core, g_j1.core, m_j.core)
    i0, i1, i2 = g_j.index, g_j1.index, m_j.index
    args = []
    for ic in (g_j, g_j1, m_j):
        args += [complex(ic.core.c), complex(ic.core.s)]
    if i1 == i0 + 1 and i2 == i0:
        out = k_turnover_down(*args)
        idx = (i0 + 1, i0, i0 + 1)
    elif i1 == i0 - 1 and i2 == i0:
        out = k_turnover_up(*args)
        idx = (i1, i0, i1)
    else:
        raise ValueError(f"indices {(i0, i1, i2)} do not form a turnover pattern")
    cores = [CoreTransformation(complex(out[k]), complex(out[k + 1])) for k in (0, 2, 4)]
    return tuple(IndexedCore(core, i) for core, i in zip(cores, idx))


def _check(*cores):
    for g in cores:
        if g.defect > MAX_DEFECT:
            raise CorruptionError(f"non-unitary core: defect {g.defect:.3e}")
