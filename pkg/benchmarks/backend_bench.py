#!/usr/bin/env python3
"""Compare the GMP-backed rational backend against the pure-Python fallback.

The certification hot loop is arbitrary-precision rational arithmetic
(eigenvalue tables, Sturm sequences), so backend choice is the single
biggest performance lever.  This script runs identical workloads in a
subprocess per backend (backend selection happens at import time via
SHARPCERT_PURE_PYTHON) and prints a small table.

Usage: python3 benchmarks/backend_bench.py [--dims 10,14,18]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from sharpcert.backend import BACKEND
from sharpcert.scheme import EigenTable, compute_a_star
from sharpcert.polys import ExactPoly, DOMAIN_U, nonneg_on
from sharpcert.backend import rat

dims = json.loads(sys.argv[1])
out = {"backend": BACKEND, "timings": {}}

t0 = time.monotonic()
for d in dims:
    tab = EigenTable(d)
    for m in range(9):
        for k in range(0, 2 * m + 5, 2):
            tab.mag(2 * m, k)
            tab.nonmag(2 * m, k)
out["timings"]["eigen_tables"] = time.monotonic() - t0

t0 = time.monotonic()
for d in dims:
    compute_a_star(d)
out["timings"]["certify"] = time.monotonic() - t0

t0 = time.monotonic()
for seed in range(40):
    coeffs = [rat((seed * 37 + i * 101) % 201 - 100, i + 1) for i in range(13)]
    nonneg_on(ExactPoly(coeffs, domain=DOMAIN_U), 0, 16)
out["timings"]["sturm"] = time.monotonic() - t0

print(json.dumps(out))
"""


def run_backend(pure: bool, dims) -> dict:
    env = dict(os.environ, SHARPCERT_PURE_PYTHON="1" if pure else "0")
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(dims)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="10,14,18",
                    help="comma-separated dimensions to certify")
    args = ap.parse_args()
    dims = [int(d) for d in args.dims.split(",")]

    results = [run_backend(False, dims), run_backend(True, dims)]
    if results[0]["backend"] == results[1]["backend"]:
        print("gmpy2 not installed; both runs used the fallback", file=sys.stderr)

    names = sorted(results[0]["timings"])
    width = max(len(n) for n in names)
    header = f"{'workload':<{width}}  " + "  ".join(f"{r['backend']:>10}" for r in results)
    print(header)
    print("-" * len(header))
    for n in names:
        cells = "  ".join(f"{r['timings'][n]:>9.2f}s" for r in results)
        print(f"{n:<{width}}  {cells}")
    base, other = results[0]["timings"], results[1]["timings"]
    total0, total1 = sum(base.values()), sum(other.values())
    print("-" * len(header))
    print(f"{'total':<{width}}  {total0:>9.2f}s  {total1:>9.2f}s   "
          f"(x{total1 / total0:.1f} slower)" if total0 else "")
    return 0


if __name__ == "__main__":
    sys.exit(main())
