"""Cuts: integer 1-cocycles of the insulator dual to conductor cross-sections.

The pipeline:

1. generators of H^1 of the insulator complex (raw cuts);
2. generators ``sigma_j`` of H_2(conductor, interface), whose boundaries
   ``loop_j`` are 1-cycles on the interface;
3. pairing matrix ``P[i][j] = <c^i, loop_j>``, which must be unimodular;
4. cuts rebased by the exact integer inverse of ``P`` so the pairing
   becomes the identity, then extended by zero to the whole mesh.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .cell_complex import (ChainComplex, CxCochain, IntChain, boundary, coboundary, inner_product,
                           restrict, to_parent, view_in)
from .errors import InconsistencyError
from .homology import cohomology, filling_trace, relative_homology
from .homology.snf import matmul, smith_normal_form
from .mesh_ingest import RegionLabeling

__all__ = ["CutSet", "compute_cuts", "linked_current", "verify_cutset", "z2_counterexample_check",
           "independent_currents", "integer_inverse", "cutset_to_dict", "cutset_from_dict"]


@dataclass
class CutSet:
    n: int
    cuts: list
    sigmas: list
    loops: list
    pairing: list
    raw_pairing: list = field(default_factory=list)

    def evaluate(self, cycle: IntChain) -> list:
        return [inner_product(c, cycle) for c in self.cuts]


def integer_inverse(P) -> list:
    """Exact inverse of a unimodular integer matrix; raises if ``|det| != 1``."""
    n = len(P)
    if n == 0:
        return []
    s = smith_normal_form(np.array(P, dtype=object).reshape(n, n))
    if s.rank != n or any(d != 1 for d in s.divisors):
        raise InconsistencyError(f"pairing matrix is not unimodular (divisors {s.divisors})")
    # D = U P V = I  =>  P^-1 = V U
    return matmul(s.V, s.U)


def _combine(chains, coeffs, dim):
    out = IntChain(dim, {})
    for c, a in zip(chains, coeffs):
        if a:
            out = out + c * a
    return out


def compute_cuts(cx: ChainComplex, labeling: RegionLabeling, shave: bool = True) -> CutSet:
    """Normalized cut basis of the insulating region."""
    ka = restrict(cx, labeling.insulator)
    kc = restrict(cx, labeling.conductor)
    raw = [to_parent(ka, g) for g in cohomology(ka, 1, shave=shave).generators]
    rel = relative_homology(kc, view_in(kc, labeling.interface), 2)
    sigmas = [to_parent(kc, s) for s in rel.generators]
    if len(raw) != len(sigmas):
        raise InconsistencyError(
            f"{len(raw)} cohomology generators of the insulator but {len(sigmas)} relative "
            "2-cycles of the conductor")
    loops = [boundary(s, cx) for s in sigmas]
    for lp in loops:
        if any(not labeling.interface.member[1][e] for e in lp.coeffs):
            raise InconsistencyError("cross-section boundary leaves the interface")
    P = [[inner_product(c, lp) for lp in loops] for c in raw]
    Q = integer_inverse(P)
    cuts = [_combine(raw, Q[i], 1) for i in range(len(raw))]
    pairing = [[inner_product(c, lp) for lp in loops] for c in cuts]
    n = len(cuts)
    if pairing != [[int(i == j) for j in range(n)] for i in range(n)]:
        raise InconsistencyError("normalized pairing is not the identity")
    return CutSet(n, cuts, sigmas, loops, pairing, P)


def independent_currents(I: CxCochain, cutset: CutSet) -> list:
    """``i_j = <I, sigma_j>`` for every conductor cross-section."""
    return [inner_product(s, I) for s in cutset.sigmas]


def linked_current(c: IntChain, I: CxCochain, cx: ChainComplex, labeling: RegionLabeling | None = None,
                   trace=None, descending: bool = False):
    """Current through any 2-chain spanning the 1-cycle ``c``.

    Returns ``(value, s)`` where ``s`` is the spanning chain used.  Pass a
    prepared ``trace`` (see :func:`topocut.homology.filling_trace`) when
    evaluating many cycles on one mesh.
    """
    if c.dim != 1:
        raise ValueError("linked current needs a 1-cycle")
    if not boundary(c, cx).is_zero():
        raise ValueError("chain is not a cycle")
    if labeling is not None and any(not labeling.insulator.member[1][e] for e in c.coeffs):
        raise ValueError("cycle leaves the insulating region")
    tr = trace if trace is not None else filling_trace(cx, descending=descending)
    s = tr.fill(c)
    return inner_product(s, I), s


def _random_chain(rng, ids, dim, k, scale=3):
    pick = rng.sample(list(ids), min(k, len(ids)))
    return IntChain(dim, {int(f): rng.randint(-scale, scale) for f in pick})


def verify_cutset(cutset: CutSet, cx: ChainComplex, labeling: RegionLabeling, trials: int = 3,
                  seed: int = 0) -> dict:
    """Check cocycle conditions, pairing identity and invariance under homologous loops."""
    rng = random.Random(seed)
    failures = []
    ins = labeling.insulator
    for i, c in enumerate(cutset.cuts):
        if c.dim != 1:
            failures.append(f"cut {i}: not a 1-cochain")
            continue
        if any(not ins.member[1][e] for e in c.coeffs):
            failures.append(f"cut {i}: support outside the insulator")
        if any(ins.member[2][f] for f in coboundary(c, cx).coeffs):
            failures.append(f"cut {i}: cocycle condition fails on insulator faces")
    n = cutset.n
    if len(cutset.cuts) != n or len(cutset.loops) != n:
        failures.append("cut count does not match loop count")
    pairing = [[inner_product(c, lp) for lp in cutset.loops] for c in cutset.cuts]
    if pairing != [[int(i == j) for j in range(n)] for i in range(n)]:
        failures.append(f"pairing is not the identity: {pairing}")
    for j, lp in enumerate(cutset.loops):
        if not boundary(lp, cx).is_zero():
            failures.append(f"loop {j}: not a cycle")
        if any(not labeling.interface.member[1][e] for e in lp.coeffs):
            failures.append(f"loop {j}: leaves the interface")
        if j < len(cutset.sigmas) and boundary(cutset.sigmas[j], cx) != lp:
            failures.append(f"loop {j}: not the boundary of its cross-section")
    ins_faces = np.flatnonzero(ins.member[2])
    perturbed = 0
    for j, lp in enumerate(cutset.loops):
        base = [inner_product(c, lp) for c in cutset.cuts]
        for _ in range(trials):
            b = _random_chain(rng, ins_faces, 2, 5)
            moved = lp + boundary(b, cx)
            got = [inner_product(c, moved) for c in cutset.cuts]
            perturbed += 1
            if got != base:
                failures.append(f"loop {j}: evaluation changed under a homologous perturbation")
                break
    return {"ok": not failures, "failures": failures, "pairing": pairing, "perturbations": perturbed}


def z2_counterexample_check(cx: ChainComplex, labeling: RegionLabeling, cycle: IntChain,
                            current: CxCochain, cutset: CutSet | None = None) -> dict:
    """Compare integer and mod-2 cuts on one cycle of the insulator.

    The integer cuts reproduce the linked current; a generator of H^1 over
    Z/2 only sees the linked current modulo 2.
    """
    cutset = cutset or compute_cuts(cx, labeling)
    linked, _ = linked_current(cycle, current, cx, labeling)
    z_eval = [inner_product(c, cycle) for c in cutset.cuts]
    ka = restrict(cx, labeling.insulator)
    z2 = [to_parent(ka, g) for g in cohomology(ka, 1, modulus=2).generators]
    z2_eval = [inner_product(g, cycle) % 2 for g in z2]
    z_reduced = [v % 2 for v in z_eval]
    currents = independent_currents(current, cutset)
    predicted = complex(sum(a * b for a, b in zip(z_eval, currents)))
    # Z/2 carries no orientation, so only magnitudes can be compared
    z2_pred = complex(sum(a * b for a, b in zip(z2_eval, currents))) if len(z2) == len(currents) else None
    linked = complex(linked)
    return {
        "linked_current": linked,
        "z_evaluation": z_eval,
        "z_prediction": predicted,
        "z_ampere_holds": predicted == linked,
        "z2_evaluation": z2_eval,
        "z_reduced_mod2": z_reduced,
        "z2_prediction": z2_pred,
        "z2_ampere_holds": z2_pred is not None and abs(z2_pred) == abs(linked),
        "z2_agrees_with_z_mod2": z2_eval == z_reduced,
    }


def _pairs(chain):
    return [[int(k), int(v)] for k, v in sorted(chain.coeffs.items())]


def cutset_to_dict(cutset: CutSet) -> dict:
    """JSON-ready form; dual supports list primal edge ids read as dual faces."""
    return {
        "format": "topocut-cuts-1",
        "betti1": cutset.n,
        "cuts": [{"index": i, "edges": _pairs(c)} for i, c in enumerate(cutset.cuts)],
        "loops": [{"index": i, "edges": _pairs(c)} for i, c in enumerate(cutset.loops)],
        "sigmas": [{"index": i, "faces": _pairs(c)} for i, c in enumerate(cutset.sigmas)],
        "dual_supports": [{"index": i, "grade": 2, "faces": _pairs(c)} for i, c in enumerate(cutset.cuts)],
        "pairing": cutset.pairing,
        "raw_pairing": cutset.raw_pairing,
    }


def cutset_from_dict(doc: dict) -> CutSet:
    try:
        cuts = [IntChain.from_pairs(1, c["edges"]) for c in sorted(doc["cuts"], key=lambda c: c["index"])]
        loops = [IntChain.from_pairs(1, c["edges"]) for c in sorted(doc["loops"], key=lambda c: c["index"])]
        sigmas = [IntChain.from_pairs(2, c["faces"]) for c in sorted(doc["sigmas"], key=lambda c: c["index"])]
        n = int(doc["betti1"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed cut document: {exc}") from exc
    return CutSet(n, cuts, sigmas, loops, doc.get("pairing", []), doc.get("raw_pairing", []))
