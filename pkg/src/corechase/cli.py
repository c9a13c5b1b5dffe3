"""Command-line entry point: ``corechase roots | experiment | bench``.

Exit codes are 0 on success, 1 for usage or input errors and 2 when an
iteration fails to converge.
"""

from __future__ import annotations

import argparse
import gc
import json
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from .backerr import METHODS, ExperimentConfig, random_poly, run_experiment, slope_summary
from .companion import NoRootsError, preprocess
from .dense import DENSE_CAP, dense_companion, dense_francis
from .errors import InfiniteEigenvalue, NoConvergence
from .qr import MAX_ITER, solve_qr
from .qz import SCALINGS, solve_qz
from .rotations import CorruptionError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for numerical failure here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal, without a trailing ``.0``."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _token_at(text: str, pos: int) -> str:
    end = pos
    while end < len(text) and not text[end].isspace() and text[end] not in ",[]":
        end += 1
    return text[pos:max(end, pos + 1)] or "<end of input>"


def parse_json_coeffs(text: str) -> np.ndarray:
    """A JSON array of ``[re, im]`` pairs."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno} column {exc.colno}: "
                         f"unexpected token {_token_at(text, exc.pos)!r}") from None
    if not isinstance(data, list) or not data:
        raise InputError("expected a nonempty JSON array of [re, im] pairs")
    out = np.empty(len(data), np.complex128)
    for k, item in enumerate(data):
        ok = (isinstance(item, list) and len(item) == 2
              and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item))
        if not ok:
            raise InputError(f"entry {k} is {json.dumps(item)!r}, expected [re, im]")
        out[k] = complex(item[0], item[1])
    return out


def parse_inline(text: str) -> np.ndarray:
    """Comma-separated coefficients; each is a real or Python complex literal."""
    vals = []
    for tok in text.split(","):
        t = tok.strip().replace(" ", "")
        try:
            vals.append(complex(t))
        except ValueError:
            raise InputError(f"cannot parse coefficient {tok.strip()!r}") from None
    return np.array(vals, np.complex128)


def _read_coeffs(args) -> np.ndarray:
    if (args.inline is None) == (args.file is None):
        raise InputError("give exactly one of a coefficient file or --inline")
    if args.inline is not None:
        a = parse_inline(args.inline)
    else:
        try:
            a = parse_json_coeffs(Path(args.file).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
    return a[::-1].copy() if args.order == "descending" else a


def _dense_roots(p, max_iter):
    if p.degree == 0:
        roots = np.empty(0, np.complex128)
    else:
        if p.degree > DENSE_CAP:
            raise InputError(f"--method dense is limited to degree {DENSE_CAP}")
        roots = dense_francis(dense_companion(p.coeffs / p.coeffs[-1]), max_iter=max_iter)
    return np.concatenate([roots, np.zeros(p.zero_roots, np.complex128)])


def solve(a, method: str, scale: str, max_iter: int):
    """(roots, diagnostics or None) for raw ascending coefficients."""
    p = preprocess(a)[0]
    if method == "qr":
        res = solve_qr(p, max_iter=max_iter)
    elif method == "qz":
        res = solve_qz(p, scale=scale, max_iter=max_iter)
    else:
        return _dense_roots(p, max_iter), None
    return res.roots, res.diagnostics


def _print_roots(roots, args, diag):
    if args.format == "json":
        doc = [[float(z.real), float(z.imag)] for z in roots]
        if args.diagnostics:
            doc = {"roots": doc, "diagnostics": diag}
        print(json.dumps(doc))
        return
    for z in roots:
        print(f"{fmt_float(z.real)},{fmt_float(z.imag)}")
    if args.diagnostics:
        for k, v in diag.items():
            print(f"# {k}: {v}", file=sys.stderr)


def cmd_roots(args) -> int:
    try:
        a = _read_coeffs(args)
        roots, diag = solve(a, args.method, args.scale, args.max_iter)
    except (InputError, NoRootsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoConvergence, InfiniteEigenvalue, CorruptionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    info = {"method": args.method, "degree": int(roots.size)}
    if diag is not None:
        info.update(sweeps=diag.sweeps, turnovers=diag.turnovers,
                    exceptional_shifts=diag.exceptional_shifts,
                    sine_drift=diag.sine_drift, backend=diag.backend)
    _print_roots(roots, args, info)
    return EXIT_OK


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _rho_list(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            vals = tuple(range(int(lo), int(hi) + 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    else:
        vals = _int_list(text)
    if not vals or min(vals) < 0 or max(vals) > 12:
        raise argparse.ArgumentTypeError("rho values must lie in 0..12")
    return vals


def _method_list(text: str) -> tuple[str, ...]:
    vals = tuple(t.strip() for t in text.split(",") if t.strip())
    for m in vals:
        if m not in METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    return vals


def cmd_experiment(args) -> int:
    config = ExperimentConfig(degrees=args.degrees, rhos=args.rhos, samples=args.samples,
                              methods=args.methods, seed=args.seed, accumulate=args.accumulate)
    try:
        reports = run_experiment(config, out=args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failed = sum(r.status != "ok" for r in reports)
    print(f"{len(reports)} runs written to {args.out}" + (f", {failed} did not converge" if failed else ""))
    for method, (slope, err) in slope_summary(reports).items():
        print(f"{method}: envelope slope {slope:.3f} +/- {err:.3f}")
    return EXIT_OK


BENCH_SOLVERS = {
    "companionQR": lambda p: solve_qr(p),
    "companionQZ": lambda p: solve_qz(p),
    "denseQR": lambda p: dense_francis(dense_companion(p.coeffs / p.coeffs[-1])),
}


def _timed(fn, p) -> float:
    t0 = time.perf_counter()
    fn(p)
    return time.perf_counter() - t0


def bench_table(degrees, repeats: int, seed: int = 0, dense: bool = True) -> list[tuple[str, int, float]]:
    """Median wall time per (method, degree) over ``repeats`` timed runs.

    Every case runs once untimed first.  The timed runs go round-robin over
    all cases, so a slow stretch of the machine is shared by every degree
    rather than skewing one of them.  The garbage collector is paused while
    timing, as ``timeit`` does.
    """
    cases = []
    for d in degrees:
        p = random_poly(d, 1, seed)
        for method, fn in BENCH_SOLVERS.items():
            if method == "denseQR" and (not dense or d > DENSE_CAP):
                continue
            fn(p)
            cases.append((method, d, fn, p))
    times = [[] for _ in cases]
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            for k, (_, _, fn, p) in enumerate(cases):
                times[k].append(_timed(fn, p))
    finally:
        if enabled:
            gc.enable()
    return [(m, d, statistics.median(ts)) for (m, d, _, _), ts in zip(cases, times)]


def bench_ratios(rows) -> list[str]:
    """Doubling ratios t(2n)/t(n) per method and QZ/QR ratios per degree."""
    t = {(m, d): s for m, d, s in rows}
    lines = []
    for (m, d), s in t.items():
        if (m, 2 * d) in t:
            lines.append(f"{m} t({2 * d})/t({d}) = {t[m, 2 * d] / s:.2f}")
    for (m, d), s in t.items():
        if m == "companionQR" and ("companionQZ", d) in t:
            lines.append(f"QZ/QR at n={d}: {t['companionQZ', d] / s:.2f}")
    return lines


def cmd_bench(args) -> int:
    if args.repeats < 1:
        print("error: --repeats must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    if min(args.degrees) < 1:
        print("error: degrees must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = bench_table(args.degrees, args.repeats, args.seed, dense=not args.no_dense)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    csv_text = "method,degree,seconds\n" + "".join(f"{m},{d},{fmt_float(s)}\n" for m, d, s in rows)
    summary = sys.stdout
    if args.out:
        Path(args.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
        summary = sys.stderr
    for line in bench_ratios(rows):
        print(line, file=summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="corechase", description="Polynomial roots by core chasing.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("roots", help="roots of one polynomial")
    r.add_argument("file", nargs="?", help="JSON array of [re, im] coefficient pairs")
    r.add_argument("--inline", help='comma-separated coefficients, e.g. "-1,0,1"')
    r.add_argument("--method", choices=("qr", "qz", "dense"), default="qr")
    r.add_argument("--scale", choices=SCALINGS, default="norm",
                   help="pencil scaling for --method qz (qr is always monic)")
    r.add_argument("--order", choices=("ascending", "descending"), default="ascending")
    r.add_argument("--max-iter", type=int, default=MAX_ITER,
                   help="sweep budget per eigenvalue (default %(default)s)")
    fmt = r.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    r.add_argument("--diagnostics", action="store_true")
    r.set_defaults(format="csv", func=cmd_roots)

    e = sub.add_parser("experiment", help="backward-error experiment grid")
    e.add_argument("--degrees", type=_int_list, default=(50,))
    e.add_argument("--rhos", type=_rho_list, default=tuple(range(1, 13)), help="list or range lo..hi")
    e.add_argument("--samples", type=int, default=100)
    e.add_argument("--methods", type=_method_list, default=("companionQR",))
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--accumulate", action="store_true", help="also measure the matrix backward error")
    e.add_argument("--out", default="backward_error.csv")
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bench", help="timing of the structured and dense solvers")
    b.add_argument("--degrees", type=_int_list, default=(256, 512, 1024, 2048))
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--no-dense", action="store_true", help="skip the dense comparator")
    b.add_argument("--out", help="write the CSV here instead of stdout")
    b.set_defaults(func=cmd_bench)
    return parser


def _glue_inline(argv):
    # "--inline -1,0,1" would otherwise read the value as an option
    out = list(argv)
    for k in range(len(out) - 1):
        if out[k] == "--inline" and out[k + 1].startswith("-"):
            out[k:k + 2] = [f"--inline={out[k + 1]}"]
            break
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(_glue_inline(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "max_iter", 1) < 1:
        print("error: --max-iter must be positive", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
