"""Time the compiled and pure-Python flux-differencing kernels.

    python benchmarks/bench_kernels.py [--repeat 20] [--degree 5] [--elements 4]

Each backend evaluates the 2D Euler right-hand side on the density-wave
state for every volume/surface flux pair; the table lists the best time per
call and the speedup of the compiled kernel.
"""

import argparse
import timeit

import numpy as np

from splitstab import dg_euler2d as dge
from splitstab.sbp import build_lgl_operators

PAIRS = [
    ("euler-central", "euler-central"),
    ("euler-central", "euler-rusanov"),
    ("euler-ec-chandrashekar", "euler-ec-chandrashekar"),
    ("euler-ec-chandrashekar", "euler-rusanov"),
    ("euler-kg", "euler-rusanov"),
]


def best_time(fn, repeat: int) -> float:
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--degree", type=int, default=5)
    parser.add_argument("--elements", type=int, default=4)
    args = parser.parse_args(argv)

    ops = build_lgl_operators(args.degree)
    mesh = dge.Mesh2D(args.elements, args.elements)
    u = dge.initialize_density_wave(mesh, ops, 0.98).values
    out = np.empty_like(u)
    backends = dge.available_backends()
    print(f"{args.elements}x{args.elements} elements, N={args.degree}, backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled extension not built; only the fallback is timed")

    print(f"{'volume':24s} {'surface':24s}" + "".join(f"{b:>14s}" for b in backends) + "   speedup")
    for vol, surf in PAIRS:
        cfg = dge.EulerSchemeConfig(vol, surf)
        times = {
            b: best_time(lambda b=b: dge.rhs_fluxdiff_2d(u, cfg, ops, mesh, out=out, backend=b), args.repeat)
            for b in backends
        }
        row = f"{vol:24s} {surf:24s}" + "".join(f"{times[b] * 1e6:11.1f} us" for b in backends)
        if "compiled" in times:
            row += f"   {times['python'] / times['compiled']:6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
