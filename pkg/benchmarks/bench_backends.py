"""Compare the numba kernels with the pure-Python fallback.

Each backend runs in its own interpreter because the choice is made at
import time from CORECHASE_DISABLE_NUMBA.  The roots agree to rounding
(numba's complex division and modulus differ in the last bits), and the
speedup is printed per degree.

    python benchmarks/bench_backends.py --degrees 16,32,64
"""
import argparse
import json
import os
import subprocess
import sys

import numpy as np

WORKER = r"""
import json, sys, time
import numpy as np
from corechase import backend, random_poly, solve_qr, solve_qz

out = {"backend": backend(), "rows": []}
for d in json.loads(sys.argv[1]):
    p = random_poly(d, 1, 0)
    for name, fn in (("companionQR", solve_qr), ("companionQZ", solve_qz)):
        fn(p)  # discarded: compilation or cache load
        t0 = time.perf_counter()
        roots = fn(p).roots
        dt = time.perf_counter() - t0
        out["rows"].append([name, d, dt, [[z.real, z.imag] for z in np.sort_complex(roots)]])
print(json.dumps(out))
"""


def run(degrees, disable):
    env = dict(os.environ)
    env.pop("CORECHASE_DISABLE_NUMBA", None)
    if disable:
        env["CORECHASE_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER, json.dumps(degrees)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degrees", default="16,32,64")
    args = ap.parse_args()
    degrees = [int(t) for t in args.degrees.split(",")]

    fast = run(degrees, disable=False)
    slow = run(degrees, disable=True)
    print(f"{'method':<12} {'n':>5} {fast['backend']:>10} {slow['backend']:>10} {'speedup':>8} {'max |diff|':>11}")
    for (m, d, tf, rf), (_, _, ts, rs) in zip(fast["rows"], slow["rows"]):
        diff = np.abs(np.array(rf) - np.array(rs)).max()
        print(f"{m:<12} {d:>5} {tf:>10.4f} {ts:>10.4f} {ts / tf:>7.1f}x {diff:>11.1e}")


if __name__ == "__main__":
    main()
