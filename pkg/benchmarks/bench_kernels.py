"""Compiled vs pure-Python coreduction kernel on the built-in scenes.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--res solid-torus=12 ...]

Both backends must return identical pair lists; the script exits 1 otherwise.
"""
import argparse
import sys
import timeit

import numpy as np

from topocut import _kernels_py
from topocut.homology.reduction import _global_csr
from topocut.mesh_ingest import build_skeleton
from topocut.scenes import SCENES, generate_scene

try:
    from topocut import _kernels
except ImportError:
    _kernels = None


def bench(cx, repeat):
    offsets, fptr, fidx, cptr, cidx = _global_csr(cx)
    n = int(offsets[-1])
    start = np.ones(n, dtype=np.uint8)
    start[0] = 0

    def run(mod):
        alive = start.copy()
        return mod.coreduce_pairs(fptr, fidx, cptr, cidx, alive, False)

    row = {"cells": n, "python": min(timeit.repeat(lambda: run(_kernels_py), number=1, repeat=repeat))}
    if _kernels is not None:
        row["cython"] = min(timeit.repeat(lambda: run(_kernels), number=1, repeat=repeat))
        row["same"] = np.array_equal(run(_kernels_py), run(_kernels))
    return row


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--res", action="append", default=[], metavar="SCENE=N")
    args = ap.parse_args(argv)
    res = {k: int(v) for k, v in (r.split("=") for r in args.res)}
    if _kernels is None:
        print("compiled kernels not built; timing the Python loop only")
    print(f"{'scene':<16}{'cells':>8}{'python s':>11}{'cython s':>11}{'speedup':>9}")
    ok = True
    for name in SCENES:
        cx, _ = build_skeleton(generate_scene(name, res.get(name)))
        r = bench(cx, args.repeat)
        if "cython" in r:
            ok &= r["same"]
            print(f"{name:<16}{r['cells']:>8}{r['python']:>11.4f}{r['cython']:>11.4f}"
                  f"{r['python'] / r['cython']:>8.1f}x")
        else:
            print(f"{name:<16}{r['cells']:>8}{r['python']:>11.4f}")
    if not ok:
        print("backends disagree", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
