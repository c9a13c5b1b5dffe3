"""Backward-error experiments on random polynomials.

For each sample the computed roots are expanded back into a monic polynomial
in double-double arithmetic and compared with the input coefficients, both
directly and after the least-squares optimal rescaling ``gamma``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .companion import Polynomial
from .ddarith import k_axpy, product_tree, to_working
from .dense import dense_companion, dense_francis
from .errors import NoConvergence
from .qr import solve_qr
from .qz import solve_qz

METHODS = ("companionQR", "companionQZ", "companionQZ_unscaled", "denseQR")
#: which coefficient error each method is judged by
PRIMARY_METRIC = {
    "companionQR": "delta_a",
    "denseQR": "delta_a",
    "companionQZ": "delta_a_scaled",
    "companionQZ_unscaled": "delta_a_scaled",
}
CSV_FIELDS = ("method", "degree", "rho", "seed", "norm_a", "delta_A", "delta_a",
              "delta_a_scaled", "sweeps", "status")


def random_poly(degree: int, rho: int, seed: int) -> Polynomial:
    """Random coefficients with modulus ``|2 mu - 1| 10^(rho (2 eta - 1))``.

    Argument ``2 pi nu``; ``nu, mu, eta`` uniform on [0, 1).  The stream is a
    Philox-4x64 generator keyed by ``SeedSequence([seed, degree, rho])``.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    if not 0 <= rho <= 12:
        raise ValueError("rho must lie in 0..12")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, degree, rho])))
    nu, mu, eta = rng.random((3, degree + 1))
    modulus = np.abs(2 * mu - 1) * 10.0 ** (rho * (2 * eta - 1))
    return Polynomial(modulus * np.exp(2j * np.pi * nu))


def expand_roots(roots) -> np.ndarray:
    """Monic ``prod (z - r_k)`` in double-double, as (n+1, 4) records."""
    roots = np.asarray(roots, dtype=np.complex128).ravel()
    if roots.size < 1:
        raise ValueError("need at least one root")
    if not np.all(np.isfinite(roots)):
        raise ValueError("roots must be finite")
    factors = []
    for r in roots:
        f = np.zeros((2, 4))
        f[0, 0] = -r.real
        f[0, 2] = -r.imag
        f[1, 0] = 1.0
        factors.append(f)
    out = product_tree(factors)
    if not np.all(np.isfinite(out)):
        raise OverflowError("coefficient expansion overflowed")
    return out


def coeffs_from_roots(roots) -> np.ndarray:
    """Monic coefficients (ascending) with the given roots, rounded once."""
    out = to_working(expand_roots(roots))
    out[-1] = 1.0
    return out


def _residual_norm(a, gamma, ext) -> float:
    r = np.empty_like(ext)
    k_axpy(np.asarray(a, np.complex128), complex(gamma), ext, r)
    return float(np.linalg.norm(to_working(r)))


def optimal_scaling(a, a_tilde) -> complex:
    """``gamma`` minimizing ``||a - gamma a_tilde||``."""
    a = np.asarray(a, np.complex128)
    a_tilde = np.asarray(a_tilde, np.complex128)
    return complex(np.vdot(a_tilde, a) / np.vdot(a_tilde, a_tilde))


def coefficient_backward_error(a, roots) -> tuple[float, float, complex]:
    """``(||a - a~||, ||a - gamma a~||, gamma)`` with ``a~`` monic through ``roots``.

    The differences are formed in extended precision before rounding, so
    the reconstruction itself adds no working-precision noise.
    """
    a = np.asarray(a, np.complex128)
    ext = expand_roots(roots)
    if ext.shape[0] != a.size:
        raise ValueError(f"{a.size - 1} coefficients but {ext.shape[0] - 1} roots")
    gamma = optimal_scaling(a, to_working(ext))
    return _residual_norm(a, 1.0, ext), _residual_norm(a, gamma, ext), gamma


@dataclass
class BackwardErrorReport:
    method: str
    degree: int
    rho: int
    seed: int
    norm_a: float
    delta_A: float | None
    delta_a: float
    delta_a_scaled: float
    sweeps: int
    status: str = "ok"


@dataclass
class ExperimentConfig:
    degrees: tuple = (50,)
    rhos: tuple = tuple(range(1, 13))
    samples: int = 100
    methods: tuple = ("companionQR",)
    seed: int = 0
    accumulate: bool = False


def _measure(method: str, p: Polynomial, accumulate: bool):
    """(reference coefficients, roots, delta_A, sweeps) for one solve."""
    a = p.coeffs
    if method == "companionQR":
        res = solve_qr(p, accumulate=accumulate)
        return a / a[-1], res.roots, res.diagnostics.delta_A, res.diagnostics.sweeps
    if method == "denseQR":
        monic = a / a[-1]
        return monic, dense_francis(dense_companion(monic)), None, 0
    if method in ("companionQZ", "companionQZ_unscaled"):
        scale = "norm" if method == "companionQZ" else "none"
        res = solve_qz(p, scale=scale, accumulate=accumulate)
        return a, res.roots, res.diagnostics.delta_A, res.diagnostics.sweeps
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def run_one(method: str, degree: int, rho: int, seed: int,
            accumulate: bool = False) -> BackwardErrorReport:
    p = random_poly(degree, rho, seed)
    try:
        ref, roots, delta_A, sweeps = _measure(method, p, accumulate)
    except NoConvergence as exc:
        nan = float("nan")
        return BackwardErrorReport(method, degree, rho, seed, nan, None, nan, nan,
                                   exc.sweeps, "noconv")
    da, das, _ = coefficient_backward_error(ref, roots)
    return BackwardErrorReport(method, degree, rho, seed, float(np.linalg.norm(ref)),
                               delta_A, da, das, int(sweeps))


def run_experiment(config: ExperimentConfig, out=None) -> list[BackwardErrorReport]:
    """Run the full grid; sample ``k`` of every cell uses seed ``config.seed + k``.

    Rows come out in grid order (method, degree, rho, sample).  When ``out``
    is given the CSV is written there.
    """
    for m in config.methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    if config.samples < 0:
        raise ValueError("samples must be nonnegative")
    reports = [run_one(m, d, r, config.seed + k, config.accumulate)
               for m in config.methods for d in config.degrees
               for r in config.rhos for k in range(config.samples)]
    if out is not None:
        write_csv(reports, out)
    return reports


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        w.writerow([_fmt(getattr(r, f)) for f in CSV_FIELDS])
    return buf.getvalue()


def write_csv(reports, path) -> None:
    path = Path(path)
    try:
        path.write_text(reports_to_csv(reports))
    except OSError as exc:
        raise OSError(f"cannot write experiment table to {path}: {exc.strerror}") from exc


def read_csv(path) -> list[BackwardErrorReport]:
    def num(s, kind):
        return None if s == "" else kind(s)

    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [BackwardErrorReport(r["method"], int(r["degree"]), int(r["rho"]), int(r["seed"]),
                                float(r["norm_a"]), num(r["delta_A"], float),
                                float(r["delta_a"]), float(r["delta_a_scaled"]),
                                int(r["sweeps"]), r["status"]) for r in rows]


def loglog_slope(points, xlim=None) -> tuple[float, float]:
    """Slope and standard error of log y against log x over the per-decade maxima.

    ``xlim = (lo, hi)`` restricts the fit to ``lo <= x <= hi``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (x, y) pairs")
    if xlim is not None:
        pts = pts[(pts[:, 0] >= xlim[0]) & (pts[:, 0] <= xlim[1])]
    if pts.shape[0] < 10:
        raise ValueError("need at least 10 (x, y) points")
    if not np.all(pts > 0) or not np.all(np.isfinite(pts)):
        raise ValueError("x and y must be positive and finite")
    lx, ly = np.log10(pts[:, 0]), np.log10(pts[:, 1])
    decade = np.floor(lx)
    keep = []
    for d in np.unique(decade):
        idx = np.flatnonzero(decade == d)
        keep.append(idx[np.argmax(ly[idx])])
    if len(keep) < 3:
        raise ValueError("x spans fewer than three decades; slope is ill-determined")
    fit = stats.linregress(lx[keep], ly[keep])
    return float(fit.slope), float(fit.stderr)


#: norm range for envelope fits; above it the quadratic error of unstructured
#: methods saturates at ~||a|| and would flatten their slopes
FIGURE_WINDOW = (1.0, 1e12)


def slope_summary(reports, xlim=FIGURE_WINDOW) -> dict[str, tuple[float, float]]:
    """Envelope slope of each method's primary coefficient error against ||a||."""
    out = {}
    for m in dict.fromkeys(r.method for r in reports):
        metric = PRIMARY_METRIC[m]
        pts = [(r.norm_a, getattr(r, metric)) for r in reports
               if r.method == m and r.status == "ok" and getattr(r, metric) > 0]
        try:
            out[m] = loglog_slope(pts, xlim)
        except ValueError:
            out[m] = (float("nan"), float("nan"))
    return out
