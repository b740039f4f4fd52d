import json

import numpy as np
import pytest

from conftest import scene
from topocut.cell_complex import CxCochain, IntChain, boundary, coboundary, inner_product
from topocut.cut_extractor import (CutSet, compute_cuts, cutset_from_dict, cutset_to_dict, integer_inverse,
                                   linked_current, verify_cutset, z2_counterexample_check)
from topocut.errors import InconsistencyError
from topocut.homology.snf import matmul
from topocut.mesh_ingest import build_skeleton, parse_mesh
from topocut.scenes import SCENES, path_current, probe_edges


@pytest.mark.parametrize("name", SCENES)
def test_cut_invariants(name):
    _, cx, lab, cs = scene(name)
    n = {"solid-torus": 1, "double-torus": 2, "two-turn-coil": 1, "trefoil": 1}[name]
    assert cs.n == n
    assert cs.pairing == [[int(i == j) for j in range(n)] for i in range(n)]
    for c in cs.cuts:
        assert all(lab.insulator.member[1][e] for e in c.coeffs)
        assert not any(lab.insulator.member[2][f] for f in coboundary(c, cx).coeffs)
    for s, lp in zip(cs.sigmas, cs.loops):
        assert boundary(s, cx) == lp
        assert boundary(lp, cx).is_zero()
        assert all(lab.interface.member[1][e] for e in lp.coeffs)
        assert all(lab.conductor.member[2][f] and not lab.interface.member[2][f] for f in s.coeffs)
    assert verify_cutset(cs, cx, lab)["ok"]


def test_double_torus_pairing_is_identity():
    _, cx, _, cs = scene("double-torus")
    c1, c2 = cs.cuts
    l1, l2 = cs.loops
    assert inner_product(c1, l1) == 1 and inner_product(c1, l2) == 0
    assert inner_product(c2, l1) == 0 and inner_product(c2, l2) == 1


def test_contractible_insulator_has_no_cuts():
    vox = [(i, j, k) for i in range(3) for j in range(3) for k in range(3)]
    doc = {"format": "cwmesh-1", "volumes": {"voxels": vox},
           "regions": ["conductor" if v == (1, 1, 1) else "insulator" for v in vox]}
    cx, lab = build_skeleton(parse_mesh(doc))
    cs = compute_cuts(cx, lab)
    assert cs.n == 0 and cs.cuts == [] and cs.pairing == []
    assert verify_cutset(cs, cx, lab)["ok"]


def test_integer_inverse():
    P = [[2, 1], [1, 1]]
    Q = integer_inverse(P)
    assert matmul(Q, P) == [[1, 0], [0, 1]]
    assert integer_inverse([[-1]]) == [[-1]]
    assert integer_inverse([]) == []
    with pytest.raises(InconsistencyError):
        integer_inverse([[2, 0], [0, 1]])


def test_zeroed_cut_fails_pairing():
    _, cx, lab, cs = scene("double-torus")
    bad = CutSet(cs.n, [IntChain(1, {}), cs.cuts[1]], cs.sigmas, cs.loops, cs.pairing)
    rep = verify_cutset(bad, cx, lab)
    assert not rep["ok"]
    assert any("pairing" in f for f in rep["failures"])


def test_coboundary_shift_passes():
    _, cx, lab, cs = scene("double-torus")
    pure = np.flatnonzero(lab.insulator.member[0] & ~lab.conductor.member[0])
    g = IntChain(0, {int(v): (-1) ** i * (i + 1) for i, v in enumerate(pure[:12])})
    shifted = CutSet(cs.n, [c + coboundary(g, cx) for c in cs.cuts], cs.sigmas, cs.loops, cs.pairing)
    assert verify_cutset(shifted, cx, lab, trials=5)["ok"]


def test_non_cocycle_detected():
    _, cx, lab, cs = scene("solid-torus")
    e = next(iter(cs.cuts[0].coeffs))
    bad = CutSet(1, [cs.cuts[0] + IntChain(1, {e: 1})], cs.sigmas, cs.loops, cs.pairing)
    rep = verify_cutset(bad, cx, lab)
    assert any("cocycle" in f for f in rep["failures"])


def test_json_roundtrip():
    _, cx, lab, cs = scene("double-torus")
    doc = json.loads(json.dumps(cutset_to_dict(cs)))
    assert doc["betti1"] == 2
    assert all(d["grade"] == 2 for d in doc["dual_supports"])
    back = cutset_from_dict(doc)
    assert back.cuts == cs.cuts and back.loops == cs.loops and back.sigmas == cs.sigmas
    assert verify_cutset(back, cx, lab)["ok"]
    with pytest.raises(ValueError):
        cutset_from_dict({"cuts": 3})


def test_linked_current_of_boundary_is_zero():
    mesh, cx, lab, cs = scene("two-turn-coil")
    I = path_current(cx, mesh)
    faces = np.flatnonzero(lab.insulator.member[2])
    b = boundary(IntChain(2, {int(faces[0]): 1, int(faces[7]): -2}), cx)
    assert linked_current(b, I, cx, lab)[0] == 0


def test_linked_current_rejects_bad_input():
    mesh, cx, lab, _ = scene("two-turn-coil")
    I = path_current(cx, mesh)
    with pytest.raises(ValueError):
        linked_current(IntChain(1, {0: 1}), I, cx, lab)
    with pytest.raises(ValueError):
        linked_current(IntChain(2, {0: 1}), I, cx, lab)
    inner = np.flatnonzero(lab.conductor.member[1] & ~lab.insulator.member[1])
    if inner.size:
        e = int(inner[0])
        f = int(cx.coface_list(1, e)[0])
        with pytest.raises(ValueError, match="insulating"):
            linked_current(boundary(IntChain(2, {f: 1}), cx), I, cx, lab)


def test_solid_torus_linked_current_is_one():
    mesh, cx, lab, cs = scene("solid-torus")
    # unit current: the coboundary of the cut extended by zero, restricted to conductor faces
    F = cs.cuts[0]
    I = coboundary(F, cx)
    assert not any(lab.insulator.member[2][f] for f in I.coeffs)
    loop = IntChain(1, probe_edges(cx, mesh.meta["probes"]["meridian"]))
    val, s = linked_current(loop, I, cx, lab)
    assert boundary(s, cx) == loop
    assert val == inner_product(F, loop) and abs(val) == 1


def test_z2_counterexample_on_coil():
    mesh, cx, lab, cs = scene("two-turn-coil")
    loop = IntChain(1, probe_edges(cx, mesh.meta["probes"]["enclosing"]))
    rep = z2_counterexample_check(cx, lab, loop, path_current(cx, mesh), cs)
    assert abs(rep["linked_current"]) == 2
    assert [abs(v) for v in rep["z_evaluation"]] == [2]
    assert rep["z_ampere_holds"]
    assert rep["z2_evaluation"] == [0]
    assert not rep["z2_ampere_holds"]
    assert rep["z2_agrees_with_z_mod2"]


def test_z2_single_turn_control():
    mesh, cx, lab, cs = scene("solid-torus")
    loop = IntChain(1, probe_edges(cx, mesh.meta["probes"]["meridian"]))
    I = coboundary(cs.cuts[0], cx)
    I = CxCochain(2, I.to_dense(cx.counts[2], dtype=complex))
    rep = z2_counterexample_check(cx, lab, loop, I, cs)
    assert rep["z2_evaluation"] == [1]
    assert rep["z_ampere_holds"] and rep["z2_ampere_holds"]


def test_unshaved_cuts_are_cohomologous():
    _, cx, lab, cs = scene("double-torus")
    other = compute_cuts(cx, lab, shave=False)
    for a, b in zip(cs.cuts, other.cuts):
        assert [inner_product(a, lp) for lp in cs.loops] == [inner_product(b, lp) for lp in cs.loops]
