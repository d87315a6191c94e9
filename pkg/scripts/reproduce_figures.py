#!/usr/bin/env python3
"""Write plot-ready data for every figure preset into OUT/fig{2,3,4,5,6}/.

    python3 scripts/reproduce_figures.py [OUT] [--workers N]
"""
import argparse
import sys
import time

from invariant_stirap.cli import main


def run():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("out", nargs="?", default="out")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    status = 0
    for fig in (2, 3, 4, 5, 6):
        t0 = time.perf_counter()
        code = main(["reproduce-figure", str(fig), "--out", args.out, "--workers", str(args.workers)])
        print(f"figure {fig}: exit {code} ({time.perf_counter() - t0:.1f} s)")
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(run())
