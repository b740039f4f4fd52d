"""Complex reductions that preserve (co)homology and keep generators liftable.

Two procedures, used in this order for cohomology:

* :func:`shave_acyclic` grows an acyclic subcomplex ``A`` and replaces the
  complex by the quotient ``K/A``.  In degrees >= 1 the cohomology is
  unchanged and a relative cocycle lifts by extension with zeros.
* :func:`coreduce` removes elementary pairs ``(a, b)`` with
  ``kappa(a, b) = +-1`` that cause no fill-in: either ``b`` has a single
  remaining face or ``a`` has a single remaining coface.  The reduced
  boundary is then the plain restriction of the original one.

Every removal is recorded, so cycles, cocycles and fillings computed on the
small complex can be carried back to the input.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..cell_complex import ChainComplex, IntChain, SubcomplexView, _extract, boundary, relative_complex
from ..errors import InconsistencyError, NotAcyclicError
from .snf import matmul, smith_normal_form

__all__ = ["CoreductionTrace", "ShaveTrace", "coreduce", "shave_acyclic", "components"]


def _global_csr(cx: ChainComplex):
    """Face and coface adjacency of all cells in one global numbering."""
    offsets = np.concatenate([[0], np.cumsum(cx.counts)]).astype(np.int64)
    n = int(offsets[-1])
    fcount = np.zeros(n, dtype=np.int64)
    ccount = np.zeros(n, dtype=np.int64)
    for d in range(1, cx.dim + 1):
        m = cx.boundary_matrix(d)
        fcount[offsets[d]:offsets[d + 1]] = np.diff(m.indptr)
        ccount[offsets[d - 1]:offsets[d]] = np.bincount(m.indices, minlength=cx.counts[d - 1])
    fptr = np.concatenate([[0], np.cumsum(fcount)]).astype(np.int64)
    cptr = np.concatenate([[0], np.cumsum(ccount)]).astype(np.int64)
    fidx = np.empty(fptr[-1], dtype=np.int64)
    cidx = np.empty(cptr[-1], dtype=np.int64)
    for d in range(1, cx.dim + 1):
        m = cx.boundary_matrix(d)
        lo, hi = fptr[offsets[d]], fptr[offsets[d + 1]]
        fidx[lo:hi] = m.indices + offsets[d - 1]
        t = cx.coboundary_matrix(d - 1)
        lo, hi = cptr[offsets[d - 1]], cptr[offsets[d]]
        cidx[lo:hi] = t.indices + offsets[d]
    return offsets, fptr, fidx, cptr, cidx


def components(cx: ChainComplex) -> list[int]:
    """Component label of every vertex (labels are the smallest vertex id)."""
    n = cx.counts[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if cx.dim >= 1:
        m = cx.boundary_matrix(1)
        for j in range(cx.counts[1]):
            vs = m.indices[m.indptr[j]:m.indptr[j + 1]]
            for v in vs[1:]:
                a, b = find(int(vs[0])), find(int(v))
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return [find(v) for v in range(n)]


@dataclass
class CoreductionTrace:
    """Removal record of :func:`coreduce`.

    ``pairs`` holds ``(dim_a, a, b, phi)`` in removal order, ids local to
    ``parent``.  ``starters`` are vertices dropped without a partner.
    """

    parent: ChainComplex
    reduced: ChainComplex
    pairs: list
    starters: list = field(default_factory=list)
    _removed_at: list | None = None

    def removed_at(self):
        # step at which each cell disappears; len(pairs) for survivors
        if self._removed_at is None:
            m = len(self.pairs)
            out = [np.full(c, m, dtype=np.int64) for c in self.parent.counts]
            for k, (da, a, b, _) in enumerate(self.pairs):
                out[da][a] = k
                out[da + 1][b] = k
            self._removed_at = [o.tolist() for o in out]
        return self._removed_at

    def _to_parent(self, chain: IntChain) -> dict:
        ids = self.reduced.parent_ids[chain.dim]
        return {int(ids[k]): v for k, v in chain.coeffs.items()}

    def lift_cocycle(self, xi: IntChain, modulus: int | None = None) -> IntChain:
        """Carry a cocycle of the reduced complex to a cocycle of ``parent``."""
        d = xi.dim
        val = self._to_parent(xi)
        cx = self.parent
        for da, a, b, phi in reversed(self.pairs):
            if da != d:
                continue
            s = 0
            for c, k in cx.face_list(d + 1, b):
                if c != a:
                    s += k * val.get(c, 0)
            if s:
                val[a] = -s * phi
        out = IntChain(d, val)
        return out.mod(modulus) if modulus else out

    def lift_cycle(self, y: IntChain, modulus: int | None = None) -> IntChain:
        """Carry a cycle of the reduced complex to a cycle of ``parent``."""
        d = y.dim
        val = self._to_parent(y)
        cx = self.parent
        for da, a, b, phi in reversed(self.pairs):
            if da + 1 != d:
                continue
            s = 0
            for x, k in cx.coface_list(da, a):
                s += k * val.get(x, 0)
            if s:
                val[b] = val.get(b, 0) - s * phi
        out = IntChain(d, val)
        return out.mod(modulus) if modulus else out

    def fill(self, z: IntChain) -> IntChain:
        """Integer chain ``S`` with ``boundary(S) = z`` for a cycle ``z`` of ``parent``.

        Needs the reduced complex to have trivial homology in degree ``z.dim``;
        raises :class:`NotAcyclicError` otherwise.
        """
        d = z.dim
        cx = self.parent
        if d < 1 or d >= cx.dim:
            raise ValueError(f"cannot fill a {d}-cycle in a {cx.dim}-complex")
        rem = self.removed_at()
        zz = dict(z.coeffs)
        t = {}
        for k, (da, a, b, phi) in enumerate(self.pairs):
            if da == d:
                za = zz.get(a, 0)
                if za:
                    coef = za * phi
                    t[k] = coef
                    for c, kap in cx.face_list(d + 1, b):
                        if rem[d][c] >= k:
                            v = zz.get(c, 0) - coef * kap
                            if v:
                                zz[c] = v
                            else:
                                zz.pop(c, None)
            elif da + 1 == d:
                zz.pop(b, None)
        red = self.reduced
        back = {int(p): i for i, p in enumerate(red.parent_ids[d])}
        rows = red.counts[d]
        cols = red.counts[d + 1]
        rhs = [0] * rows
        for c, v in zz.items():
            if c not in back:
                raise InconsistencyError("cycle left support outside the reduced complex")
            rhs[back[c]] = v
        S = {}
        if any(rhs):
            A = red.boundary_matrix(d + 1).toarray().astype(object).reshape(rows, cols)
            snf = smith_normal_form(A)
            w = [sum(u * r for u, r in zip(row, rhs) if u) for row in snf.U]
            sol = [0] * cols
            for i, wi in enumerate(w):
                if i < snf.rank:
                    if wi % snf.divisors[i]:
                        raise NotAcyclicError(f"{d}-cycle is not a boundary over the integers")
                    sol[i] = wi // snf.divisors[i]
                elif wi:
                    raise NotAcyclicError(f"{d}-cycle is not a boundary over the integers")
            y = [v[0] for v in matmul(snf.V, [[s] for s in sol])] if cols else []
            ids = red.parent_ids[d + 1]
            S = {int(ids[i]): v for i, v in enumerate(y) if v}
        for k in range(len(self.pairs) - 1, -1, -1):
            da, a, b, phi = self.pairs[k]
            if da != d:
                continue
            s = 0
            for x, kap in cx.coface_list(d, a):
                s += kap * S.get(x, 0)
            v = t.get(k, 0) - s * phi
            if v:
                S[b] = v
        out = IntChain(d + 1, S)
        if boundary(out, cx) != IntChain(d, z.coeffs):
            raise InconsistencyError("filling does not reproduce the cycle")
        return out


def coreduce(cx: ChainComplex, starters=None, descending: bool = False):
    """Eliminate no-fill pairs; returns ``(reduced complex, trace)``.

    ``starters`` is a list of vertex ids removed first without a partner
    (one per connected component turns absolute homology into reduced
    homology in degree 0 and leaves higher degrees alone).
    """
    offsets, fptr, fidx, cptr, cidx = _global_csr(cx)
    alive = np.ones(int(offsets[-1]), dtype=np.uint8)
    starters = sorted(int(v) for v in (starters or []))
    for v in starters:
        alive[v] = 0
    gp = kernels.coreduce_pairs(fptr, fidx, cptr, cidx, alive, descending)
    dims = np.searchsorted(offsets, gp[:, 0], side="right") - 1 if len(gp) else np.zeros(0, dtype=np.int64)
    pairs = []
    for (ga, gb), da in zip(gp.tolist(), dims.tolist()):
        a, b = ga - int(offsets[da]), gb - int(offsets[da + 1])
        pairs.append((da, a, b, cx.kappa(da + 1, a, b)))
    keep = [alive[offsets[d]:offsets[d + 1]].astype(bool) for d in range(cx.dim + 1)]
    reduced = _extract(cx, keep)
    return reduced, CoreductionTrace(cx, reduced, pairs, starters)


@dataclass
class ShaveTrace:
    """Acyclic subcomplex removed by :func:`shave_acyclic`."""

    parent: ChainComplex
    acyclic: SubcomplexView
    reduced: ChainComplex

    def lift_cocycle(self, xi: IntChain, modulus: int | None = None) -> IntChain:
        ids = self.reduced.parent_ids[xi.dim]
        out = IntChain(xi.dim, {int(ids[k]): v for k, v in xi.coeffs.items()})
        return out.mod(modulus) if modulus else out


class _Closures:
    def __init__(self, cx):
        self.cx = cx
        self.cache = {}

    def boundary_cells(self, d, i):
        key = (d, i)
        got = self.cache.get(key)
        if got is None:
            cells = []
            layer = {i}
            for k in range(d, 0, -1):
                nxt = set()
                for c in layer:
                    for f, _ in self.cx.face_list(k, c):
                        nxt.add(f)
                cells.append((k - 1, sorted(nxt)))
                layer = nxt
            got = self.cache[key] = cells
        return got


def shave_acyclic(cx: ChainComplex, sub: SubcomplexView | None = None):
    """Grow an acyclic subcomplex breadth-first and quotient it out.

    One seed vertex per connected component (smallest id outside ``sub``).
    Candidates of the top dimension are taken from a min-id heap, then the
    lower dimensions.  A cell ``c`` joins ``A`` when ``closure(c) & A`` is a
    connected proper part of the boundary sphere of ``c`` with Euler
    characteristic 1, which makes ``A + closure(c)`` acyclic again.  Cells
    whose closure meets ``sub`` are never added.

    Returns ``(K/A, trace)``; cohomology in degrees >= 1 is unchanged.
    """
    member = [np.zeros(c, dtype=bool) for c in cx.counts]
    banned = [np.zeros(c, dtype=bool) for c in cx.counts]
    if sub is not None:
        banned = [m.copy() for m in sub.member]
        # anything whose closure touches sub is off limits as well
        for d in range(1, cx.dim + 1):
            if banned[d - 1].any():
                bm = abs(cx.boundary_matrix(d))
                banned[d] |= np.asarray(bm[banned[d - 1], :].sum(axis=0)).ravel() > 0
    comp = components(cx)
    seen = set()
    for v in range(cx.counts[0]):
        if comp[v] in seen or banned[0][v]:
            continue
        seen.add(comp[v])
        member[0][v] = True
    clo = _Closures(cx)
    mem = [m.tolist() for m in member]
    ban = [b.tolist() for b in banned]

    def star(d, i, k):
        layer = {i}
        for j in range(d, k):
            nxt = set()
            for c in layer:
                for x, _ in cx.coface_list(j, c):
                    nxt.add(x)
            layer = nxt
        return layer

    for k in range(cx.dim, 0, -1):
        heap = []
        queued = set()

        def push_star(d, i):
            for c in star(d, i, k):
                if not mem[k][c] and not ban[k][c] and c not in queued:
                    queued.add(c)
                    heapq.heappush(heap, c)

        for d in range(k):
            for i, flag in enumerate(mem[d]):
                if flag:
                    push_star(d, i)
        while heap:
            c = heapq.heappop(heap)
            queued.discard(c)
            if mem[k][c]:
                continue
            bcells = clo.boundary_cells(k, c)
            chi = 0
            verts = []
            edges = []
            for dd, ids in bcells:
                for i in ids:
                    if mem[dd][i]:
                        chi += -1 if dd % 2 else 1
                        if dd == 0:
                            verts.append(i)
                        elif dd == 1:
                            edges.append(i)
            if chi != 1 or not _connected(cx, verts, edges):
                continue
            added = [(k, c)]
            mem[k][c] = True
            for dd, ids in bcells:
                for i in ids:
                    if not mem[dd][i]:
                        mem[dd][i] = True
                        added.append((dd, i))
            for dd, i in added:
                push_star(dd, i)
    view = SubcomplexView(cx, [np.asarray(m, dtype=bool) for m in mem])
    reduced = relative_complex(cx, view)
    return reduced, ShaveTrace(cx, view, reduced)


def _connected(cx, verts, edges) -> bool:
    if not verts:
        return False
    if len(verts) == 1:
        return True
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    groups = len(verts)
    for e in edges:
        fs = [f for f, _ in cx.face_list(1, e)]
        if len(fs) == 2:
            a, b = find(fs[0]), find(fs[1])
            if a != b:
                parent[a] = b
                groups -= 1
    return groups == 1
