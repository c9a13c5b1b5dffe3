"""Double-double complex arithmetic (about 106 significand bits).

Values are carried as unevaluated sums ``hi + lo`` of two doubles with
``|lo| <= ulp(hi)/2``.  A complex double-double is four doubles
``(re_hi, re_lo, im_hi, im_lo)``; arrays of them are float64 arrays with a
trailing axis of length 4.  Products use Dekker splitting, so no fused
multiply-add is assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit

_SPLITTER = 134217729.0  # 2^27 + 1


@njit
def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit
def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@njit
def split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@njit
def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


@njit
def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e += ah * bl + al * bh
    return quick_two_sum(p, e)


@njit
def cdd_mul(x, y):
    """Complex double-double product of two length-4 records."""
    rr = dd_mul(x[0], x[1], y[0], y[1])
    ii = dd_mul(x[2], x[3], y[2], y[3])
    ri = dd_mul(x[0], x[1], y[2], y[3])
    ir = dd_mul(x[2], x[3], y[0], y[1])
    re = dd_add(rr[0], rr[1], -ii[0], -ii[1])
    im = dd_add(ri[0], ri[1], ir[0], ir[1])
    return re[0], re[1], im[0], im[1]


@njit
def k_poly_mul(p, q, out):
    """out <- p * q for ascending coefficient arrays of complex double-doubles."""
    out[:, :] = 0.0
    for i in range(p.shape[0]):
        for j in range(q.shape[0]):
            re_h, re_l, im_h, im_l = cdd_mul(p[i], q[j])
            k = i + j
            a = dd_add(out[k, 0], out[k, 1], re_h, re_l)
            b = dd_add(out[k, 2], out[k, 3], im_h, im_l)
            out[k, 0] = a[0]
            out[k, 1] = a[1]
            out[k, 2] = b[0]
            out[k, 3] = b[1]


@njit
def k_axpy(a, g, x, out):
    """out <- a - g * x with a, g working-precision complex, x double-double."""
    gr = np.empty(4)
    for k in range(x.shape[0]):
        gr[0] = g.real
        gr[1] = 0.0
        gr[2] = g.imag
        gr[3] = 0.0
        ph = cdd_mul(gr, x[k])
        re = dd_add(a[k].real, 0.0, -ph[0], -ph[1])
        im = dd_add(a[k].imag, 0.0, -ph[2], -ph[3])
        out[k, 0] = re[0]
        out[k, 1] = re[1]
        out[k, 2] = im[0]
        out[k, 3] = im[1]


@dataclass(frozen=True)
class ExtendedComplex:
    """A complex number carried as a double-double pair per component."""

    re_hi: float
    re_lo: float = 0.0
    im_hi: float = 0.0
    im_lo: float = 0.0

    @classmethod
    def from_complex(cls, z) -> "ExtendedComplex":
        z = complex(z)
        return cls(z.real, 0.0, z.imag, 0.0)

    def to_complex(self) -> complex:
        return complex(self.re_hi + self.re_lo, self.im_hi + self.im_lo)

    def __mul__(self, other: "ExtendedComplex") -> "ExtendedComplex":
        r = cdd_mul(np.array(self.astuple()), np.array(other.astuple()))
        return ExtendedComplex(*map(float, r))

    def __add__(self, other: "ExtendedComplex") -> "ExtendedComplex":
        re = dd_add(self.re_hi, self.re_lo, other.re_hi, other.re_lo)
        im = dd_add(self.im_hi, self.im_lo, other.im_hi, other.im_lo)
        return ExtendedComplex(float(re[0]), float(re[1]), float(im[0]), float(im[1]))

    def astuple(self):
        return (self.re_hi, self.re_lo, self.im_hi, self.im_lo)


def to_extended(z) -> np.ndarray:
    """Working-precision complex array -> (..., 4) double-double records."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.zeros(z.shape + (4,))
    out[..., 0] = z.real
    out[..., 2] = z.imag
    return out


def to_working(x: np.ndarray) -> np.ndarray:
    """Round double-double records to the nearest working-precision complex."""
    return (x[..., 0] + x[..., 1]) + 1j * (x[..., 2] + x[..., 3])


def poly_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.empty((p.shape[0] + q.shape[0] - 1, 4))
    k_poly_mul(p, q, out)
    return out


def product_tree(factors: list[np.ndarray]) -> np.ndarray:
    """Balanced pairwise product of extended-precision polynomials."""
    if not factors:
        raise ValueError("empty product")
    level = list(factors)
    while len(level) > 1:
        nxt = [poly_mul(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]
