"""Track where the deformed real line meets dis0 as delta grows, and flag collisions."""
import argparse

import numpy as np

from reyemirror.continuation import DeformedLine, homotopy_is_trivial

ap = argparse.ArgumentParser()
ap.add_argument("--eps", type=float, default=0.5)
ap.add_argument("--max-delta", type=float, default=0.25)
ap.add_argument("--steps", type=int, default=11)
a = ap.parse_args()

for d in np.linspace(a.max_delta / a.steps, a.max_delta, a.steps):
    line = DeformedLine(delta=float(d), eps=a.eps)
    zs = sorted(line.crossings(), key=lambda z: z.real)
    ok = homotopy_is_trivial(a.eps, [float(d)])
    print(f"delta={d:.3f} clean={ok!s:5s} " + " ".join(f"{z.real:+.4f}{z.imag:+.4f}i" for z in zs))
