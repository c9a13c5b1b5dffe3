"""Factored companion matrices and companion pencils.

Coefficients are always held in ascending order ``a[0] + a[1] z + ... + a[n] z^n``.
The companion matrix is stored as ``A = Q R`` with ``Q`` a descending sequence
of n-1 cores (initially all flips) and ``R`` a :class:`FactoredTriangular`.
The pencil ``V - lambda W`` stores ``V = Q R`` the same way, unnormalized,
plus a second factored triangular ``W = diag(1, ..., 1, a_n)``.

All indices are 0-based: core ``k`` of Q couples rows ``k`` and ``k+1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .triangular import FactoredTriangular
from .rotations import CoreTransformation, IndexedCore


class NoRootsError(ValueError):
    """The input polynomial is zero or constant."""


@dataclass
class Polynomial:
    """Coefficients ``a_0 .. a_n`` (ascending) with preprocessing metadata."""

    coeffs: np.ndarray
    zero_roots: int = 0
    applied_scale: complex = 1.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.ndim != 1 or self.coeffs.size < 1:
            raise ValueError("coefficient vector must be one-dimensional and nonempty")

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def preprocess(raw) -> tuple[Polynomial, int, bool]:
    """Strip exact zeros at both ends of the coefficient vector.

    Vanishing leading coefficients lower the degree (they are infinite
    eigenvalues of the pencil, flagged by the third return value); vanishing
    constant terms are roots at zero and are counted.  The remainder may have
    degree 0 when every root was at zero.
    """
    a = np.asarray(raw, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(a)):
        raise ValueError("coefficients must be finite")
    nz = np.flatnonzero(a)
    if nz.size == 0:
        raise NoRootsError("the zero polynomial has no well-defined roots")
    top = int(nz[-1])
    bottom = int(nz[0])
    if top == 0:
        raise NoRootsError("a constant polynomial has no roots")
    infinite = top < a.size - 1
    p = Polynomial(a[bottom:top + 1].copy(), zero_roots=bottom)
    return p, bottom, infinite


@dataclass
class CompanionQRState:
    """``A = Q R`` with active window ``lo .. hi`` (inclusive row indices)."""

    n: int
    qc: np.ndarray
    qs: np.ndarray
    R: FactoredTriangular
    lo: int = 0
    hi: int = 0
    u_accum: np.ndarray | None = None
    scale: complex = 1.0
    turnovers: int = 0
    sweeps: int = 0

    def q_cores(self) -> list[IndexedCore]:
        return [IndexedCore(CoreTransformation(complex(c), complex(s)), k)
                for k, (c, s) in enumerate(zip(self.qc, self.qs))]

    def enable_accumulation(self):
        self.u_accum = np.eye(self.n, dtype=np.complex128)

    def to_dense(self) -> np.ndarray:
        from .dense import dense_from_cores, dense_triangular
        return dense_from_cores(self.qc, self.qs, self.n) @ dense_triangular(self.R)


@dataclass
class PencilState:
    """``V - lambda W`` with ``V = Q R`` held in ``qr`` and ``W`` factored."""

    qr: CompanionQRState
    W: FactoredTriangular
    z_accum: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.qr.n

    def enable_accumulation(self):
        self.qr.enable_accumulation()
        self.z_accum = np.eye(self.n, dtype=np.complex128)

    def to_dense(self) -> tuple[np.ndarray, np.ndarray]:
        from .dense import dense_triangular
        return self.qr.to_dense(), dense_triangular(self.W)


def _qr_spike(a):
    """Spike t with ``Q_flip R(t)`` having last column ``-a[:n]``."""
    n = a.size - 1
    t = np.empty(n, np.complex128)
    t[:n - 1] = -a[1:n]
    # the flips carry e_{n-1} to (-1)^(n-1) e_0
    t[n - 1] = -a[0] if n % 2 == 1 else a[0]
    return t


def _flips(n):
    return np.zeros(n - 1, np.complex128), np.ones(n - 1, np.complex128)


def _check_degree(p: Polynomial):
    if p.degree < 1:
        raise NoRootsError("nothing to factor: polynomial has degree 0")
    if p.coeffs[-1] == 0 or p.coeffs[0] == 0:
        raise ValueError("polynomial is not preprocessed (a_0 or a_n is zero)")


def build_qr_state(p: Polynomial, monicize: bool = True) -> CompanionQRState:
    """Factored companion matrix of ``p / a_n``.

    With ``monicize=False`` the coefficients must already be monic.
    """
    _check_degree(p)
    a = p.coeffs
    scale = 1.0 + 0.0j
    if monicize:
        scale = complex(a[-1])
        a = a / a[-1]
    elif a[-1] != 1:
        raise ValueError("monicize=False requires a_n == 1")
    n = p.degree
    qc, qs = _flips(n)
    R = FactoredTriangular.from_spike(_qr_spike(a))
    return CompanionQRState(n, qc, qs, R, 0, n - 1, scale=scale)


def build_pencil_state(p: Polynomial, norm_scale: bool = True) -> PencilState:
    """Companion pencil ``V - lambda W`` with ``W = diag(1, ..., 1, a_n)``."""
    _check_degree(p)
    a = p.coeffs
    scale = 1.0 + 0.0j
    if norm_scale:
        scale = complex(np.linalg.norm(a))
        a = a / scale
    n = p.degree
    qc, qs = _flips(n)
    R = FactoredTriangular.from_spike(_qr_spike(a))
    tw = np.zeros(n, np.complex128)
    tw[-1] = a[-1]
    W = FactoredTriangular.from_spike(tw)
    return PencilState(CompanionQRState(n, qc, qs, R, 0, n - 1, scale=scale), W)
