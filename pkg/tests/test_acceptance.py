"""Acceptance suite: one test per criterion, each printing a pass/fail line in the summary."""
import random
import time

import numpy as np

from conftest import RP2, TORUS, crossing_number, rect_params, scene, simplicial
from topocut.cell_complex import IntChain, boundary, coboundary, from_parent, inner_product, restrict, to_parent, \
    view_in
from topocut.cut_extractor import integer_inverse, linked_current, z2_counterexample_check
from topocut.homology import (betti_numbers, betti_oracle, cohomology, filling_trace, homology, oracle_generators,
                              relative_homology)
from topocut.homology.snf import matmul
from topocut.mesh_ingest import build_skeleton
from topocut.scenes import SCENES, generate_scene, path_current, probe_edges, tetrahedralize
from topocut.t_omega import MU0, RHO_COPPER, MaterialParams, Source, assemble, build_constitutive, check_laws, solve

EXPECTED_B1 = {"solid-torus": 1, "double-torus": 2, "two-turn-coil": 1, "trefoil": 1}


def finish(record, n, failures, detail):
    record(n, not failures, detail if not failures else "; ".join(failures[:3]))
    assert not failures, failures


def test_criterion_1_betti(record):
    failures, worst = [], 0.0
    for name in SCENES:
        t0 = time.perf_counter()
        cx, lab = build_skeleton(generate_scene(name))
        ka = restrict(cx, lab.insulator)
        got = betti_numbers(ka)
        oracle = betti_oracle(ka)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        if got != oracle:
            failures.append(f"{name}: reduced {got} vs oracle {oracle}")
        if got[0][1] != EXPECTED_B1[name]:
            failures.append(f"{name}: b1 = {got[0][1]}, expected {EXPECTED_B1[name]}")
        if dt > 60:
            failures.append(f"{name}: {dt:.1f} s")
    finish(record, 1, failures, f"b1(K_a) matches oracle on {len(SCENES)} scenes, slowest {worst:.2f} s")


def test_criterion_2_cuts(record):
    failures = []
    for name in SCENES:
        _, cx, lab, cs = scene(name)
        for i, c in enumerate(cs.cuts):
            if any(lab.insulator.member[2][f] for f in coboundary(c, cx).coeffs):
                failures.append(f"{name}: cut {i} not a cocycle on K_a")
            if any(not lab.insulator.member[1][e] for e in c.coeffs):
                failures.append(f"{name}: cut {i} leaves K_a")
        for s, lp in zip(cs.sigmas, cs.loops):
            if boundary(s, cx) != lp:
                failures.append(f"{name}: loop is not the boundary of its cross-section")
        pairing = [[inner_product(c, lp) for lp in cs.loops] for c in cs.cuts]
        if pairing != [[int(i == j) for j in range(cs.n)] for i in range(cs.n)] or cs.n != EXPECTED_B1[name]:
            failures.append(f"{name}: pairing {pairing}")
    finish(record, 2, failures, "cocycle on K_a and identity pairing on every scene")


def _synthetic_field(rng, cx, lab, cs):
    """Integer F = sum i_j c^j + grad(Omega) + T with T on conductor-only edges."""
    cur = [rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(cs.n)]
    F = IntChain(1, {})
    for i, c in zip(cur, cs.cuts):
        F = F + c * i
    nodes = rng.sample(range(cx.counts[0]), 8)
    F = F + coboundary(IntChain(0, {v: rng.randint(-4, 4) for v in nodes}), cx)
    inner = np.flatnonzero(lab.conductor.member[1] & ~lab.insulator.member[1]).tolist()
    if inner:
        F = F + IntChain(1, {e: rng.randint(-4, 4) for e in rng.sample(inner, min(6, len(inner)))})
    return cur, F


def test_criterion_3_linked_current(record):
    rng = random.Random(31)
    failures, trials, distinct, perturbs = [], 0, 0, 0
    for name in SCENES:
        mesh, cx, lab, cs = scene(name)
        trace = filling_trace(cx)
        cond_vols = np.flatnonzero(lab.conductor_volumes).tolist()
        ins_faces = np.flatnonzero(lab.insulator.member[2]).tolist()
        probes = [IntChain(1, probe_edges(cx, c)) for c in mesh.meta["probes"].values()]
        base_cycles = list(cs.loops) + probes
        for t in range(20):
            trials += 1
            cur, F = _synthetic_field(rng, cx, lab, cs)
            I = coboundary(F, cx)
            if any(lab.insulator.member[2][f] for f in I.coeffs):
                failures.append(f"{name}: synthetic current leaks into K_a")
                break
            z = IntChain(1, {})
            for cyc in base_cycles:
                z = z + cyc * rng.randint(-2, 2)
            if z.is_zero():
                z = base_cycles[t % len(base_cycles)]
            expected = sum(i * inner_product(c, z) for i, c in zip(cur, cs.cuts))
            va, sa = linked_current(z, I, cx, lab, trace=trace)
            # second spanning chain: push the first one through random conductor volumes
            W = IntChain(3, {v: rng.choice([-2, -1, 1, 2]) for v in rng.sample(cond_vols, min(4, len(cond_vols)))})
            sb = sa + boundary(W, cx)
            vb = inner_product(sb, I)
            if boundary(sa, cx) != z or boundary(sb, cx) != z:
                failures.append(f"{name}: spanning chain has the wrong boundary")
            distinct += any(I[f] for f in boundary(W, cx).coeffs)
            if not va == vb == expected:
                failures.append(f"{name}: spanning chains give {va}, {vb}; cuts give {expected}")
            for _ in range(3):
                w = IntChain(2, {f: rng.randint(-3, 3) for f in rng.sample(ins_faces, 5)})
                zp = z + boundary(w, cx)
                perturbs += 1
                if linked_current(zp, I, cx, lab, trace=trace)[0] != va:
                    failures.append(f"{name}: homologous perturbation changed the linked current")
        if name in ("two-turn-coil", "trefoil"):
            Ip = path_current(cx, mesh)
            path = [tuple(p) for p in mesh.meta["path"]]
            for corners in mesh.meta["probes"].values():
                loop = IntChain(1, probe_edges(cx, corners))
                oracle = crossing_number(path, *rect_params(corners))
                got = linked_current(loop, Ip, cx, lab, trace=trace)[0]
                if got != oracle:
                    failures.append(f"{name}: path current {got} vs crossing count {oracle}")
    if distinct == 0:
        failures.append("the second spanning chain never crossed a different current-carrying face")
    finish(record, 3, failures,
           f"{trials} trials, {distinct} second chains crossing other current faces, {perturbs} homologous perturbations")


def test_criterion_4_z2_counterexample(record):
    mesh, cx, lab, cs = scene("two-turn-coil")
    corners = mesh.meta["probes"]["enclosing"]
    loop = IntChain(1, probe_edges(cx, corners))
    oracle = crossing_number([tuple(p) for p in mesh.meta["path"]], *rect_params(corners))
    rep = z2_counterexample_check(cx, lab, loop, path_current(cx, mesh), cs)
    failures = []
    if abs(oracle) != 2 or rep["linked_current"] != oracle:
        failures.append(f"linked current {rep['linked_current']} vs crossing count {oracle}")
    if [abs(v) for v in rep["z_evaluation"]] != [2] or not rep["z_ampere_holds"]:
        failures.append(f"Z cut evaluates to {rep['z_evaluation']}")
    if rep["z2_evaluation"] != [0] or rep["z2_ampere_holds"]:
        failures.append(f"Z2 generator evaluates to {rep['z2_evaluation']}")
    finish(record, 4, failures,
           f"Z cut gives {rep['z_evaluation'][0]}, crossing count {oracle}, Z2 generator gives "
           f"{rep['z2_evaluation'][0]}")


def test_criterion_5_torsion_free(record):
    failures, checked = [], 0
    complexes = []
    for name in SCENES:
        _, cx, lab, _ = scene(name)
        complexes += [(name, cx), (name + "/K_c", restrict(cx, lab.conductor)),
                      (name + "/K_a", restrict(cx, lab.insulator))]
    tcx, tlab = build_skeleton(tetrahedralize(generate_scene("solid-torus")))
    complexes += [("solid-torus/tets", tcx), ("solid-torus/tets/K_a", restrict(tcx, tlab.insulator))]
    for label, cx in complexes:
        for path in (betti_numbers(cx), betti_oracle(cx)):
            checked += 1
            if path[1][1] or path[1][2]:
                failures.append(f"{label}: torsion {path[1][1:3]}")
    finish(record, 5, failures, f"{len(complexes)} complexes, H1 and H2 torsion empty on both paths")


def test_criterion_6_identities(record):
    rng = random.Random(6)
    failures, trials = [], 0
    complexes = [simplicial(TORUS), simplicial(RP2), simplicial([(0, 1, 2, 3)])]
    for name in SCENES:
        _, cx, lab, _ = scene(name)
        complexes += [cx, restrict(cx, lab.insulator)]
    tcx, _ = build_skeleton(tetrahedralize(generate_scene("solid-torus")))
    complexes.append(tcx)
    for cx in complexes:
        for d in range(2, cx.dim + 1):
            if (cx.boundary_matrix(d - 1) @ cx.boundary_matrix(d)).count_nonzero():
                failures.append("boundary of boundary is nonzero")
            if (cx.coboundary_matrix(d - 1) @ cx.coboundary_matrix(d - 2)).count_nonzero():
                failures.append("coboundary of coboundary is nonzero")
        per = 1000 // len(complexes) + 1
        for _ in range(per):
            d = rng.randint(1, cx.dim)
            a = IntChain(d - 1, {i: rng.randint(-5, 5) for i in rng.sample(range(cx.counts[d - 1]),
                                                                          min(6, cx.counts[d - 1]))})
            b = IntChain(d, {i: rng.randint(-5, 5) for i in rng.sample(range(cx.counts[d]), min(6, cx.counts[d]))})
            # random cells rarely touch; add the faces of b to a so most trials are non-trivial
            a = a + IntChain(d - 1, {k: rng.randint(-2, 2) for k in boundary(b, cx).coeffs})
            trials += 1
            if inner_product(coboundary(a, cx), b) != inner_product(a, boundary(b, cx)):
                failures.append("adjointness fails")
    if trials < 1000:
        failures.append(f"only {trials} adjointness trials")
    finish(record, 6, failures, f"{len(complexes)} complexes, {trials} adjointness trials")


def test_criterion_7_t_omega(record):
    t0 = time.perf_counter()
    _, cx, lab, cs = scene("solid-torus")
    omega = 2 * np.pi * 50
    mats = build_constitutive(cx, lab, MaterialParams(mu=MU0, rho=RHO_COPPER, omega=omega))
    system = assemble(cx, lab, cs, mats, omega, Source("current", 0, 1.0))
    sol = solve(system)
    rep = check_laws(sol, cx, lab, cs, omega)
    dt = time.perf_counter() - t0
    failures = []
    if system.asymmetry() != 0.0:
        failures.append(f"asymmetry {system.asymmetry()}")
    for k in ("current_continuity", "ampere_insulator", "ampere_conductor"):
        if rep[k] != 0.0:
            failures.append(f"{k} = {rep[k]}")
    for k in ("gauss", "faraday_local", "faraday_nonlocal", "ampere_nonlocal"):
        if rep[k] > 1e-9:
            failures.append(f"{k} = {rep[k]:.2e}")
    mmf = sum(a * sol.F.values[e] for e, a in cs.loops[0].coeffs.items())
    if abs(mmf - 1.0) > 1e-9:
        failures.append(f"<F, loop> = {mmf}")
    if dt > 30:
        failures.append(f"{dt:.1f} s")
    worst = max(rep[k] for k in ("gauss", "faraday_local", "faraday_nonlocal", "ampere_nonlocal"))
    finish(record, 7, failures,
           f"{system.size} unknowns, symmetric, exact families zero, worst relative residual {worst:.1e}, "
           f"{dt:.2f} s")


def _normalize(gens, loops):
    P = [[inner_product(c, lp) for lp in loops] for c in gens]
    Q = integer_inverse(P)
    out = []
    for row in Q:
        acc = IntChain(1, {})
        for k, g in zip(row, gens):
            acc = acc + g * k
        out.append(acc)
    return out


def test_criterion_8_reduction_soundness(record):
    failures = []
    for name in SCENES:
        _, cx, lab, cs = scene(name)
        ka = restrict(cx, lab.insulator)
        kc = restrict(cx, lab.conductor)
        loops = [from_parent(ka, lp) for lp in cs.loops]
        ofree, _ = oracle_generators(ka, 1, cohomology=True)
        hfree, _ = oracle_generators(ka, 1)
        oracle_cuts = _normalize(ofree, loops)
        want = [[inner_product(c, h) for h in hfree] for c in oracle_cuts]
        for shave in (True, False):
            red = cohomology(ka, 1, shave=shave).generators
            for g in red:
                if not coboundary(g, ka).is_zero():
                    failures.append(f"{name}: reduced generator is not a cocycle of K_a")
                if any(lab.insulator.member[2][f] for f in coboundary(to_parent(ka, g), cx).coeffs):
                    failures.append(f"{name}: reduced generator is not a cocycle on K_a faces of K")
            got = [[inner_product(c, h) for h in hfree] for c in _normalize(red, loops)]
            if got != want:
                failures.append(f"{name}: shave={shave} pairs {got}, oracle path {want}")
        hred = homology(ka, 1).generators
        for h in hred:
            if not boundary(h, ka).is_zero():
                failures.append(f"{name}: reduced cycle is not closed in K_a")
        M = [[inner_product(c, h) for h in hred] for c in oracle_cuts]
        if not _unimodular(M):
            failures.append(f"{name}: reduced cycles are not a basis, pairing {M}")
        rel = relative_homology(kc, view_in(kc, lab.interface), 2)
        for s in rel.generators:
            if any(not lab.interface.member[1][e] for e in boundary(to_parent(kc, s), cx).coeffs):
                failures.append(f"{name}: relative generator boundary leaves the interface")
    finish(record, 8, failures, "reduced generators are (co)cycles of the original complexes and pair like the oracle")


def _unimodular(M):
    try:
        Q = integer_inverse(M)
    except Exception:
        return False
    n = len(M)
    return matmul(Q, M) == [[int(i == j) for j in range(n)] for i in range(n)]
