"""Continue the period vector around every catalog loop and compare with the reference matrices.

    python3 scripts/run_catalog.py [--degree 60] [--digits 60] [--loops Tx Tp2]
"""
import argparse
import time

from reyemirror import golden
from reyemirror.continuation import LOOP_NAMES, ContinuationConfig, connection_matrices, monodromy


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--degree", type=int, default=60)
    ap.add_argument("--digits", type=int, default=60)
    ap.add_argument("--loops", nargs="*", default=list(LOOP_NAMES))
    ap.add_argument("--connections", action="store_true")
    a = ap.parse_args()
    cfg = ContinuationConfig(degree=a.degree, digits=a.digits)
    for name in a.loops:
        t0 = time.perf_counter()
        m = monodromy(name, cfg)
        print(f"{name:6s} match={m.entries == golden.MONODROMIES[name]!s:5s} "
              f"residual={m.residual:.1e}  {time.perf_counter() - t0:6.1f}s", flush=True)
    if a.connections:
        C = connection_matrices(cfg)
        neg = tuple(tuple(-v for v in r) for r in golden.C10)
        print("C10 = reference:", C["C10"].entries == golden.C10, " C10 = -reference:", C["C10"].entries == neg)
        print("C20 = reference:", C["C20"].entries == golden.C20)


if __name__ == "__main__":
    main()
