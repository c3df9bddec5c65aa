"""Count points mod p and narrow down h21 from the Weil bound.

    python3 scripts/count_primes.py 73 89 97 --threads 4 --cache counts.csv
"""
import argparse
import time

from reyemirror.fp_count import CountCache, assemble_count, certify_h21


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("primes", type=int, nargs="+")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--cache")
    a = ap.parse_args()
    cache = CountCache(a.cache) if a.cache else CountCache()
    for p in a.primes:
        t0 = time.perf_counter()
        r = assemble_count(p, a.threads, cache)
        print(f"p={p:4d} n_X={r.n_X:9d} t3={r.t3:6d} feasible={list(r.feasible_h21)} "
              f"({time.perf_counter() - t0:.1f}s)")
    print("h21 in", sorted(certify_h21(a.primes, a.threads, cache)))


if __name__ == "__main__":
    main()
