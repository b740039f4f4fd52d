"""Homology and cohomology over Z (or Z/p) with generators on the input complex.

Absolute homology: one starter vertex per component, coreduction, Smith
form of the small remainder, lift of the cycles through the trace.

Cohomology: acyclic shaving, coreduction of the quotient, Smith form,
cocycle lift through both traces.

Relative homology: coreduction of the quotient complex directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..cell_complex import ChainComplex, IntChain, SubcomplexView, boundary, coboundary, relative_complex
from ..errors import DimensionError, InconsistencyError, NotAcyclicError
from .oracle import betti_oracle
from .reduction import components, coreduce, shave_acyclic
from .snf import matmul, smith_normal_form

__all__ = ["HomologyResult", "homology", "cohomology", "relative_homology", "betti_numbers",
           "is_boundary", "betti_oracle", "fill", "filling_trace"]


@dataclass
class HomologyResult:
    dim: int
    betti: int
    torsion: list
    generators: list
    torsion_generators: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    cohomology: bool = False
    modulus: int | None = None
    reduced_counts: tuple = ()


def _dense(mat, m, n):
    return np.asarray(mat.toarray(), dtype=object).reshape(m, n)


def _quotient_generators(out, inn, modulus=None):
    """Generators of ``ker(out) / im(in)`` from two Smith forms.

    Returns ``(free, torsion)`` as dense coefficient lists over the columns of
    ``out``; torsion entries are ``(vector, order)``.
    """
    n = out.shape[1]
    s1 = smith_normal_form(out, modulus)
    r1 = s1.rank
    K = [row[r1:] for row in s1.V]  # n x (n - r1)
    k = n - r1
    if inn.shape[1] and k:
        Vi = [row for row in s1.V_inv[r1:]]
        M = matmul(Vi, [list(r) for r in inn])
    else:
        M = [[0] * inn.shape[1] for _ in range(k)]
    s2 = smith_normal_form(np.array(M, dtype=object).reshape(k, inn.shape[1]), modulus)
    Ui = s2.U_inv
    free, tors = [], []
    for j in range(k):
        if j < s2.rank and s2.divisors[j] == 1:
            continue  # a boundary
        nz = [(i, Ui[i][j]) for i in range(k) if Ui[i][j]]
        vec = [sum(K[r][i] * c for i, c in nz) for r in range(n)]
        if modulus:
            vec = [x % modulus for x in vec]
        if j >= s2.rank:
            free.append(vec)
        else:
            tors.append((vec, s2.divisors[j]))
    return free, tors


def _is_genuine(cx: ChainComplex) -> bool:
    # every edge with two distinct endpoints, so components are meaningful
    if cx.dim < 1 or cx.counts[1] == 0:
        return True
    return bool(np.all(np.diff(cx.boundary_matrix(1).indptr) == 2))


def _check_dim(cx, d):
    if not 0 <= d <= cx.dim:
        raise DimensionError(f"degree {d} outside 0..{cx.dim}")


def homology(cx: ChainComplex, d: int, modulus: int | None = None,
             descending: bool = False) -> HomologyResult:
    """H_d with generators that are cycles of ``cx`` itself."""
    _check_dim(cx, d)
    starters = []
    if _is_genuine(cx):
        comp = components(cx)
        starters = sorted({c for c in comp})
    if d == 0 and starters:
        gens = [IntChain(0, {v: 1}) for v in starters]
        return HomologyResult(0, len(gens), [], gens, modulus=modulus)
    red, tr = coreduce(cx, starters=starters, descending=descending)
    out = _dense(red.boundary_matrix(d), red.counts[d - 1] if d else 0, red.counts[d])
    nxt = red.counts[d + 1] if d < red.dim else 0
    inn = _dense(red.boundary_matrix(d + 1), red.counts[d], nxt)
    free, tors = _quotient_generators(out, inn, modulus)
    gens = [tr.lift_cycle(IntChain.from_dense(d, v), modulus) for v in free]
    tgens = [(tr.lift_cycle(IntChain.from_dense(d, v)), o) for v, o in tors]
    for g in gens:
        if d and not _zero(boundary(g, cx), modulus):
            raise InconsistencyError("lifted generator is not a cycle")
    return HomologyResult(d, len(gens), [o for _, o in tors], gens, tgens, [tr], False, modulus,
                          red.counts)


def _zero(chain: IntChain, modulus):
    return chain.mod(modulus).is_zero() if modulus else chain.is_zero()


def relative_homology(cx: ChainComplex, sub: SubcomplexView, d: int,
                      modulus: int | None = None) -> HomologyResult:
    """H_d(cx, sub); generators are chains of ``cx`` whose boundary lies in ``sub``."""
    _check_dim(cx, d)
    if sub.is_empty():
        return homology(cx, d, modulus)
    q = relative_complex(cx, sub)
    red, tr = coreduce(q)
    out = _dense(red.boundary_matrix(d), red.counts[d - 1] if d else 0, red.counts[d])
    nxt = red.counts[d + 1] if d < red.dim else 0
    inn = _dense(red.boundary_matrix(d + 1), red.counts[d], nxt)
    free, tors = _quotient_generators(out, inn, modulus)
    ids = q.parent_ids[d]

    def up(v, mod=modulus):
        c = tr.lift_cycle(IntChain.from_dense(d, v), mod)
        return IntChain(d, {int(ids[k]): x for k, x in c.coeffs.items()})

    gens = [up(v) for v in free]
    for g in gens:
        if d and any(not sub.member[d - 1][k] for k in (boundary(g, cx).mod(modulus) if modulus
                                                          else boundary(g, cx)).coeffs):
            raise InconsistencyError("lifted generator is not a relative cycle")
    tgens = [(up(v, None), o) for v, o in tors]
    return HomologyResult(d, len(gens), [o for _, o in tors], gens, tgens, [tr], False, modulus,
                          red.counts)


def cohomology(cx: ChainComplex, d: int, modulus: int | None = None,
               shave: bool = True, descending: bool = False) -> HomologyResult:
    """H^d with generators that are cocycles of ``cx``.

    Torsion in H^d would mean torsion in H_{d-1}; for complexes embedded in
    3-space that cannot happen, so it is reported as an inconsistency.
    """
    _check_dim(cx, d)
    if d == 0:
        comp = components(cx) if _is_genuine(cx) else None
        if comp is not None:
            labels = sorted(set(comp))
            gens = [IntChain(0, {v: 1 for v, c in enumerate(comp) if c == lab}) for lab in labels]
            return HomologyResult(0, len(gens), [], gens, cohomology=True, modulus=modulus)
    traces = []
    base = cx
    if shave and d >= 1 and _is_genuine(cx):
        base, st = shave_acyclic(cx)
        traces.append(st)
    red, tr = coreduce(base, descending=descending)
    traces.append(tr)
    out = _dense(red.boundary_matrix(d + 1).T, red.counts[d + 1] if d < red.dim else 0, red.counts[d])
    inn = _dense(red.boundary_matrix(d).T, red.counts[d], red.counts[d - 1] if d else 0)
    free, tors = _quotient_generators(out, inn, modulus)
    if tors and not modulus:
        raise InconsistencyError(f"torsion {[o for _, o in tors]} in degree {d} cohomology")
    gens = []
    for v in free:
        g = tr.lift_cocycle(IntChain.from_dense(d, v), modulus)
        for st in traces[:-1][::-1]:
            g = st.lift_cocycle(g, modulus)
        if d < cx.dim and not _zero(coboundary(g, cx), modulus):
            raise InconsistencyError("lifted generator is not a cocycle")
        gens.append(g)
    return HomologyResult(d, len(gens), [], gens, [], traces, True, modulus, red.counts)


def betti_numbers(cx: ChainComplex, modulus: int | None = None):
    """``(betti, torsion)`` through the reduction path, for every degree."""
    betti, torsion = [], []
    for d in range(cx.dim + 1):
        h = homology(cx, d, modulus)
        betti.append(h.betti)
        torsion.append(h.torsion)
    return betti, torsion


def filling_trace(cx: ChainComplex, sub: SubcomplexView | None = None, descending: bool = False):
    """Coreduction trace usable for repeated :meth:`CoreductionTrace.fill` calls."""
    if sub is None or sub.is_empty():
        starters = sorted(set(components(cx))) if _is_genuine(cx) else []
        return coreduce(cx, starters=starters, descending=descending)[1]
    return coreduce(relative_complex(cx, sub), descending=descending)[1]


def fill(z: IntChain, cx: ChainComplex, descending: bool = False) -> IntChain:
    """Integer chain ``s`` with ``boundary(s) = z``; raises ``NotAcyclicError`` if none exists."""
    return filling_trace(cx, descending=descending).fill(z)


def is_boundary(z: IntChain, cx: ChainComplex, sub: SubcomplexView | None = None) -> bool:
    """True when the cycle ``z`` (relative to ``sub`` if given) bounds over the integers."""
    d = z.dim
    if d >= cx.dim:
        return z.is_zero()
    if sub is not None and not sub.is_empty():
        q = relative_complex(cx, sub)
        table = {int(p): i for i, p in enumerate(q.parent_ids[d])}
        z = IntChain(d, {table[k]: v for k, v in z.coeffs.items() if k in table})
        cx, sub = q, None
    if d == 0:
        if _is_genuine(cx):
            comp = components(cx)
            tot = {}
            for v, a in z.coeffs.items():
                tot[comp[v]] = tot.get(comp[v], 0) + a
            return not any(tot.values())
        A = _dense(cx.boundary_matrix(1), cx.counts[0], cx.counts[1] if cx.dim else 0)
        s = smith_normal_form(A)
        rhs = z.to_dense(cx.counts[0]).tolist()
        w = [sum(u * r for u, r in zip(row, rhs) if u) for row in s.U]
        return all((wi % s.divisors[i] == 0) if i < s.rank else wi == 0 for i, wi in enumerate(w))
    try:
        filling_trace(cx).fill(z)
    except NotAcyclicError:
        return False
    return True
