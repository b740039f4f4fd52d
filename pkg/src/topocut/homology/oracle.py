"""No-reduction reference path.

Betti numbers and torsion come straight from the invariant factors of the
full boundary matrices.  Generators come from a sparse Smith elimination of
the full matrices that tracks only the column transform of the first matrix:
unit pivots are taken in Markowitz order, and because every elementary
operation only rewrites the row (or column) of the current pivot, the
inverse transforms stay trivial on all non-pivot indices.  Whatever resists
unit pivoting is finished by the dense algorithm with full transforms.
"""
from __future__ import annotations

import heapq

import numpy as np
import scipy.sparse as sp

from ..cell_complex import ChainComplex, IntChain
from .snf import smith_invariants, smith_normal_form

__all__ = ["betti_oracle", "oracle_generators"]


def betti_oracle(cx: ChainComplex, modulus: int | None = None):
    """``(betti, torsion)`` per dimension from invariant factors only."""
    ranks = [0] * (cx.dim + 2)
    divs = [[] for _ in range(cx.dim + 2)]
    for d in range(1, cx.dim + 1):
        ranks[d], divs[d] = smith_invariants(cx.boundary_matrix(d), modulus)
    betti = [cx.counts[d] - ranks[d] - ranks[d + 1] for d in range(cx.dim + 1)]
    torsion = [[x for x in divs[d + 1] if x > 1] for d in range(cx.dim + 1)]
    return betti, torsion


class _Elim:
    """Unit-pivot sparse elimination of one integer matrix."""

    def __init__(self, rows: list, n: int, track_cols: bool):
        m = len(rows)
        rows = [dict(r) for r in rows]
        cols = [set() for _ in range(n)]
        for i in range(m):
            for j in [j for j, v in rows[i].items() if not v]:
                del rows[i][j]
            for j in rows[i]:
                cols[j].add(i)
        V = [None] * n if track_cols else None
        heap = []
        for i in range(m):
            for j, v in rows[i].items():
                if v in (1, -1):
                    heap.append(((len(rows[i]) - 1) * (len(cols[j]) - 1), i, j))
        heapq.heapify(heap)
        pivot_rows, pivot_cols = set(), set()
        while heap:
            cost, r, c = heapq.heappop(heap)
            if r in pivot_rows:
                continue
            prow = rows[r]
            u = prow.get(c)
            if u not in (1, -1):
                continue
            cur = (len(prow) - 1) * (len(cols[c]) - 1)
            if cur != cost:
                heapq.heappush(heap, (cur, r, c))
                continue
            items = list(prow.items())
            for r2 in list(cols[c]):
                if r2 == r:
                    continue
                row2 = rows[r2]
                f = row2[c] * u
                for c2, v in items:
                    nv = row2.get(c2, 0) - f * v
                    if nv:
                        if c2 not in row2:
                            cols[c2].add(r2)
                        row2[c2] = nv
                        if nv in (1, -1):
                            heapq.heappush(heap, ((len(row2) - 1) * (len(cols[c2]) - 1), r2, c2))
                    elif c2 in row2:
                        del row2[c2]
                        cols[c2].discard(r2)
            if V is not None:
                vc = V[c] if V[c] is not None else {c: 1}
                for c2, v in items:
                    if c2 == c:
                        continue
                    g = v * u
                    col = V[c2] if V[c2] is not None else {c2: 1}
                    for k, x in vc.items():
                        nv = col.get(k, 0) - g * x
                        if nv:
                            col[k] = nv
                        else:
                            col.pop(k, None)
                    V[c2] = col
            for c2 in prow:
                cols[c2].discard(r)
            rows[r] = {}
            pivot_rows.add(r)
            pivot_cols.add(c)
        self.V = V
        self.rank1 = len(pivot_rows)
        self.pivot_rows, self.pivot_cols = pivot_rows, pivot_cols
        self.left_rows = [i for i in range(m) if rows[i]]
        self.left_cols = sorted({j for i in self.left_rows for j in rows[i]})
        cidx = {j: k for k, j in enumerate(self.left_cols)}
        dense = [[0] * len(self.left_cols) for _ in self.left_rows]
        for a, i in enumerate(self.left_rows):
            for j, v in rows[i].items():
                dense[a][cidx[j]] = v
        self.rest = smith_normal_form(_shaped(dense, len(self.left_rows), len(self.left_cols)))

    def vcol(self, j):
        col = self.V[j]
        return dict(col) if col is not None else {j: 1}


def _shaped(rows, m, n):
    return np.array(rows, dtype=object).reshape(m, n)


def _row_dicts(A) -> list:
    A = sp.csr_matrix(A)
    ind, dat, ptr = A.indices.tolist(), A.data.tolist(), A.indptr.tolist()
    return [{j: int(v) for j, v in zip(ind[ptr[i]:ptr[i + 1]], dat[ptr[i]:ptr[i + 1]]) if v}
            for i in range(A.shape[0])]


def _combine(vecs, coeffs):
    out = {}
    for vec, a in zip(vecs, coeffs):
        if not a:
            continue
        for k, x in vec.items():
            nv = out.get(k, 0) + a * x
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


def _quotient_generators(out_mat, in_mat):
    """Free and torsion generators of ``ker(out) / im(in)``, as sparse dicts."""
    n = out_mat.shape[1]
    e1 = _Elim(_row_dicts(out_mat), n, track_cols=True)
    r_rest = e1.rest.rank
    left = e1.left_cols
    left_set = set(left)
    # kernel basis: plain non-pivot columns, then kernel part of the dense rest
    plain = [j for j in range(n) if j not in e1.pivot_cols and j not in left_set]
    kernel = [e1.vcol(j) for j in plain]
    left_vecs = [e1.vcol(j) for j in left]
    for t in range(r_rest, len(left)):
        kernel.append(_combine(left_vecs, [e1.rest.V[i][t] for i in range(len(left))]))
    # coordinates of im(in) in that basis
    in_rows = _row_dicts(in_mat)
    M = [in_rows[j] for j in plain]
    for t in range(r_rest, len(left)):
        M.append(_combine([in_rows[j] for j in left], [e1.rest.V_inv[t][i] for i in range(len(left))]))
    e2 = _Elim(M, in_mat.shape[1], track_cols=False)
    free, tors = [], []
    rest_rows = set(e2.left_rows)
    for j in range(len(kernel)):
        if j not in e2.pivot_rows and j not in rest_rows:
            free.append(kernel[j])
    if e2.left_rows:
        lr = [kernel[j] for j in e2.left_rows]
        Ui = e2.rest.U_inv
        for t in range(len(e2.left_rows)):
            g = _combine(lr, [Ui[i][t] for i in range(len(lr))])
            if t >= e2.rest.rank:
                free.append(g)
            elif e2.rest.divisors[t] > 1:
                tors.append((g, e2.rest.divisors[t]))
    return free, tors


def oracle_generators(cx: ChainComplex, d: int, cohomology: bool = False):
    """``(free, torsion)`` generators of H_d (or H^d) without any reduction."""
    if cohomology:
        out_mat = cx.boundary_matrix(d + 1).T
        in_mat = cx.boundary_matrix(d).T
    else:
        out_mat = cx.boundary_matrix(d)
        in_mat = cx.boundary_matrix(d + 1)
    free, tors = _quotient_generators(out_mat, in_mat)
    return [IntChain(d, g) for g in free], [(IntChain(d, g), o) for g, o in tors]
