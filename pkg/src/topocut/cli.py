"""Command line: gen, betti, cuts, verify, solve.

Exit codes: 0 success, 2 usage or bad input, 3 internal inconsistency,
4 verification failure, 5 solver failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .cell_complex import restrict
from .cut_extractor import compute_cuts, cutset_from_dict, cutset_to_dict, verify_cutset
from .errors import InconsistencyError, MeshError, NotAcyclicError, RankDeficiencyError, SolverError
from .homology import betti_numbers, betti_oracle
from .mesh_ingest import CONDUCTOR, build_skeleton, dump_mesh, parse_mesh
from .scenes import SCENES, generate_scene
from .t_omega import MU0, RHO_COPPER, MaterialParams, Source, assemble, build_constitutive, check_laws, solve
from .t_omega import solution_to_dict

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL, EXIT_VERIFY, EXIT_SOLVER = 0, 2, 3, 4, 5
LAW_TOL = 1e-9


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def threads() -> int:
    raw = os.environ.get("TOPOCUT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise _Fail(EXIT_USAGE, f"TOPOCUT_THREADS must be a positive integer, got {raw!r}")
    return n


def _emit(doc, out):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_mesh(args):
    if args.scene:
        return generate_scene(args.scene, args.res)
    try:
        with open(args.mesh, "rb") as fh:
            return parse_mesh(fh.read())
    except OSError as exc:
        raise _Fail(EXIT_USAGE, f"cannot read mesh: {exc}") from exc


def _digest(mesh) -> str:
    return hashlib.sha256(dump_mesh(mesh)).hexdigest()


def cmd_gen(args):
    mesh = generate_scene(args.scene, args.res)
    data = dump_mesh(mesh)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    n_cond = sum(1 for r in mesh.regions if r == CONDUCTOR)
    print(f"{args.scene} res={mesh.meta['resolution']}: {mesh.n_volumes} voxels, {n_cond} conductor",
          file=sys.stderr)
    return EXIT_OK


def _betti_block(cx, modulus, oracle):
    betti, torsion = betti_numbers(cx, modulus)
    block = {"betti": betti[:3], "torsion": torsion[:3], "counts": list(cx.counts)}
    if oracle:
        ob, ot = betti_oracle(cx, modulus)
        block["oracle"] = {"betti": ob[:3], "torsion": ot[:3]}
        if ob != betti or ot != torsion:
            raise _Fail(EXIT_INTERNAL, f"oracle mismatch: reduced {betti}/{torsion}, oracle {ob}/{ot}")
    return block


def cmd_betti(args):
    m = args.modulus
    if m is not None and (m < 2 or any(m % k == 0 for k in range(2, int(m ** 0.5) + 1))):
        raise _Fail(EXIT_USAGE, f"--modulus must be a prime, got {m}")
    cx, lab = build_skeleton(_load_mesh(args))
    doc = {"modulus": args.modulus}
    for name, view in (("K", None), ("K_c", lab.conductor), ("K_a", lab.insulator)):
        sub = cx if view is None else restrict(cx, view)
        doc[name] = _betti_block(sub, args.modulus, args.oracle)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_cuts(args):
    mesh = _load_mesh(args)
    cx, lab = build_skeleton(mesh)
    t0 = time.perf_counter()
    cs = compute_cuts(cx, lab, shave=not args.no_shave)
    doc = cutset_to_dict(cs)
    doc["mesh_sha256"] = _digest(mesh)
    doc["seconds"] = round(time.perf_counter() - t0, 4)
    _emit(doc, args.out)
    return EXIT_OK


def _read_cuts(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return doc, cutset_from_dict(doc)
    except (OSError, ValueError) as exc:
        raise _Fail(EXIT_USAGE, f"cannot read cuts: {exc}") from exc


def cmd_verify(args):
    mesh = _load_mesh(args)
    doc, cs = _read_cuts(args.cuts)
    cx, lab = build_skeleton(mesh)
    report = verify_cutset(cs, cx, lab, trials=args.trials, seed=args.seed)
    failures = list(report["failures"])
    if doc.get("mesh_sha256") not in (None, _digest(mesh)):
        failures.append("mesh digest: cut file was computed on a different mesh")
    expected = betti_oracle(restrict(cx, lab.insulator))[0][1]
    if cs.n != expected or len(cs.cuts) != expected:
        failures.append(f"cut count: {len(cs.cuts)} cuts but first Betti number of the insulator is {expected}")
    report["failures"] = failures
    report["ok"] = not failures
    _emit(report, args.out)
    if failures:
        for f in failures:
            print(f"verification failed: {f}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _source(args):
    if (args.current is None) == (args.emf is None):
        raise _Fail(EXIT_USAGE, "give exactly one of --current or --emf")
    if args.current is not None:
        return Source("current", args.cut_index, complex(args.current))
    return Source("emf", args.cut_index, complex(args.emf))


def cmd_solve(args):
    src = _source(args)
    cx, lab = build_skeleton(_load_mesh(args))
    if args.cuts:
        cs = _read_cuts(args.cuts)[1]
    else:
        cs = compute_cuts(cx, lab)
    omega = 2 * np.pi * args.freq
    params = MaterialParams(mu=args.mu_r * MU0, rho=args.rho, omega=omega)
    t0 = time.perf_counter()
    try:
        mats = build_constitutive(cx, lab, params)
        system = assemble(cx, lab, cs, mats, omega, src)
    except ValueError as exc:
        raise _Fail(EXIT_USAGE, str(exc)) from exc
    sol = solve(system)
    report = check_laws(sol, cx, lab, cs, omega)
    doc = solution_to_dict(sol, report)
    doc["symmetric"] = system.asymmetry() == 0.0
    doc["seconds"] = round(time.perf_counter() - t0, 4)
    _emit(doc, args.out)
    bad = [k for k in ("current_continuity", "ampere_insulator", "ampere_conductor") if report[k] != 0.0]
    bad += [k for k in ("gauss", "faraday_local", "faraday_nonlocal", "ampere_nonlocal") if report[k] > LAW_TOL]
    if not doc["symmetric"]:
        bad.append("symmetry")
    if bad:
        print(f"law check failed: {', '.join(bad)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _mesh_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--scene", help=f"built-in scene: {', '.join(SCENES)}")
    g.add_argument("--mesh", help="cwmesh-1 JSON file")
    p.add_argument("--res", type=int, default=None, help="scene resolution (default: scene minimum)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="topocut", description="Integer cuts and T-Omega eddy-current solves")
    ap.add_argument("--version", action="version", version=f"topocut {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a built-in scene mesh")
    p.add_argument("--scene", required=True, help=f"one of: {', '.join(SCENES)}")
    p.add_argument("--res", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("betti", help="Betti numbers and torsion of the mesh, conductor and insulator")
    _mesh_args(p)
    p.add_argument("--oracle", action="store_true", help="cross-check against the unreduced Smith form")
    p.add_argument("--modulus", type=int, default=None, help="prime coefficient field instead of Z")
    p.add_argument("--out")
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("cuts", help="normalized integer cuts of the insulator")
    _mesh_args(p)
    p.add_argument("--no-shave", action="store_true", help="skip acyclic shaving")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cuts)

    p = sub.add_parser("verify", help="check a cut file against its mesh")
    _mesh_args(p)
    p.add_argument("--cuts", required=True)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="frequency-domain T-Omega solve with law checks")
    _mesh_args(p)
    p.add_argument("--cuts", help="cut file (computed when omitted)")
    p.add_argument("--current", type=float, help="prescribed current (A) on the source cut")
    p.add_argument("--emf", type=float, help="prescribed e.m.f. (V) on the source cut")
    p.add_argument("--cut-index", type=int, default=0)
    p.add_argument("--freq", type=float, default=50.0, help="frequency in Hz (0 for magnetostatics)")
    p.add_argument("--mu-r", type=float, default=1.0, help="relative permeability")
    p.add_argument("--rho", type=float, default=RHO_COPPER, help="conductor resistivity (ohm m)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads()
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (MeshError, NotAcyclicError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (RankDeficiencyError, SolverError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
