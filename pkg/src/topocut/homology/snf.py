"""Smith normal form over the integers (and over Z/p).

Two entry points:

* :func:`smith_normal_form` works on a dense copy and tracks the unimodular
  transforms and their inverses.  Meant for the small matrices left after
  complex reductions.
* :func:`smith_invariants` only returns rank and invariant factors.  It runs a
  sparse elimination with unit pivots first and finishes densely, which is
  what makes the no-reduction Betti oracle affordable.

All arithmetic uses Python integers, so intermediate growth cannot overflow.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd

import numpy as np
import scipy.sparse as sp

__all__ = ["SNFResult", "smith_normal_form", "smith_invariants", "to_rows", "matmul", "identity"]


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a, b) -> list[list[int]]:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        acc[j] += x * bk[j]
        out.append(acc)
    return out


def to_rows(A) -> list[list[int]]:
    """Dense list-of-lists copy of a sparse matrix, array or nested list."""
    if sp.issparse(A):
        A = A.toarray()
    arr = np.asarray(A, dtype=object)
    if arr.ndim != 2:
        if arr.size == 0:
            return []
        raise ValueError("expected a 2-d matrix")
    return [[int(x) for x in row] for row in arr]


@dataclass
class SNFResult:
    """``D = U @ A @ V`` with ``U``, ``V`` unimodular (invertible mod p for p != None)."""

    U: list
    V: list
    D: list
    U_inv: list
    V_inv: list
    rank: int
    divisors: list
    shape: tuple
    modulus: int | None = None

    def as_arrays(self):
        return tuple(np.array(m, dtype=object).reshape(s) for m, s in (
            (self.U, (self.shape[0],) * 2), (self.D, self.shape), (self.V, (self.shape[1],) * 2)))


class _Work:
    """Dense working matrix plus optional transform bookkeeping."""

    def __init__(self, rows, m, n, transforms, p):
        self.D = rows
        self.m, self.n = m, n
        self.p = p
        self.tr = transforms
        if transforms:
            self.U, self.Ui = identity(m), identity(m)
            self.V, self.Vi = identity(n), identity(n)

    def _red(self, x):
        return x % self.p if self.p else x

    def row_add(self, i, t, c):
        """row_i += c * row_t"""
        D, red = self.D, self._red
        Dt, Di = D[t], D[i]
        for j in range(self.n):
            if Dt[j]:
                Di[j] = red(Di[j] + c * Dt[j])
        if self.tr:
            Ut, Ui_ = self.U[t], self.U[i]
            for j in range(self.m):
                if Ut[j]:
                    Ui_[j] = red(Ui_[j] + c * Ut[j])
            for row in self.Ui:
                if row[i]:
                    row[t] = red(row[t] - c * row[i])

    def col_add(self, j, t, c):
        """col_j += c * col_t"""
        red = self._red
        for row in self.D:
            if row[t]:
                row[j] = red(row[j] + c * row[t])
        if self.tr:
            for row in self.V:
                if row[t]:
                    row[j] = red(row[j] + c * row[t])
            Vt, Vj = self.Vi[t], self.Vi[j]
            for k in range(self.n):
                if Vj[k]:
                    Vt[k] = red(Vt[k] - c * Vj[k])

    def row_swap(self, i, t):
        if i == t:
            return
        D = self.D
        D[i], D[t] = D[t], D[i]
        if self.tr:
            self.U[i], self.U[t] = self.U[t], self.U[i]
            for row in self.Ui:
                row[i], row[t] = row[t], row[i]

    def col_swap(self, j, t):
        if j == t:
            return
        for row in self.D:
            row[j], row[t] = row[t], row[j]
        if self.tr:
            for row in self.V:
                row[j], row[t] = row[t], row[j]
            self.Vi[j], self.Vi[t] = self.Vi[t], self.Vi[j]

    def row_scale(self, t, s, s_inv):
        red = self._red
        self.D[t] = [red(s * x) for x in self.D[t]]
        if self.tr:
            self.U[t] = [red(s * x) for x in self.U[t]]
            for row in self.Ui:
                row[t] = red(row[t] * s_inv)


def _key(v, p):
    return v if p else abs(v)


def _pivot(D, t, m, n, p):
    best = None
    for i in range(t, m):
        row = D[i]
        for j in range(t, n):
            v = row[j]
            if v:
                k = _key(v, p)
                if best is None or k < best[0]:
                    best = (k, i, j)
                    if k == 1:
                        return best
    return best


def _reduce(w: _Work) -> int:
    D, m, n, p = w.D, w.m, w.n, w.p
    t = 0
    while t < min(m, n):
        piv = _pivot(D, t, m, n, p)
        if piv is None:
            break
        w.row_swap(piv[1], t)
        w.col_swap(piv[2], t)
        if p:
            inv = pow(D[t][t], -1, p)
            w.row_scale(t, inv, D[t][t])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] * pow(D[t][t], -1, p) % p if p else D[i][t] // D[t][t]
                    w.row_add(i, t, -q)
                    if D[i][t]:
                        dirty = True
            if dirty:
                i = min((i for i in range(t, m) if D[i][t]), key=lambda i: (abs(D[i][t]), i))
                w.row_swap(i, t)
                continue
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] * pow(D[t][t], -1, p) % p if p else D[t][j] // D[t][t]
                    w.col_add(j, t, -q)
                    if D[t][j]:
                        dirty = True
            if dirty:
                j = min((j for j in range(t, n) if D[t][j]), key=lambda j: (abs(D[t][j]), j))
                w.col_swap(j, t)
                continue
            if p:
                break
            piv_v = D[t][t]
            bad = None
            if abs(piv_v) != 1:
                for i in range(t + 1, m):
                    row = D[i]
                    for j in range(t + 1, n):
                        if row[j] % piv_v:
                            bad = i
                            break
                    if bad is not None:
                        break
            if bad is None:
                break
            w.row_add(t, bad, 1)
        if not p and D[t][t] < 0:
            w.row_scale(t, -1, -1)
        t += 1
    return t


def _check_modulus(p):
    if p is None:
        return
    if p < 2 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"modulus must be prime, got {p}")


def smith_normal_form(A, modulus: int | None = None) -> SNFResult:
    """Diagonalize ``A`` by unimodular row and column operations.

    Pivot rule: nonzero entry of minimal absolute value, ties broken by lowest
    row then lowest column.  Over Z/p (``modulus`` prime) the pivots are
    normalized to 1.
    """
    _check_modulus(modulus)
    rows = to_rows(A)
    if sp.issparse(A) or hasattr(A, "shape"):
        m, n = A.shape
    else:
        m, n = len(rows), (len(rows[0]) if rows else 0)
    if modulus:
        rows = [[x % modulus for x in r] for r in rows]
    w = _Work(rows, m, n, True, modulus)
    r = _reduce(w)
    divisors = [w.D[i][i] for i in range(r)]
    return SNFResult(w.U, w.V, w.D, w.Ui, w.Vi, r, divisors, (m, n), modulus)


def _dense_invariants(rows, m, n, p):
    w = _Work(rows, m, n, False, p)
    r = _reduce(w)
    return [w.D[i][i] for i in range(r)]


def smith_invariants(A, modulus: int | None = None) -> tuple[int, list[int]]:
    """Rank and invariant factors of a sparse integer matrix, without transforms.

    Unit pivots are eliminated sparsely in Markowitz order; whatever remains
    (entries with no unit left) is finished by the dense algorithm.
    """
    _check_modulus(modulus)
    A = sp.coo_matrix(A)
    m, n = A.shape
    p = modulus
    rows: list = [dict() for _ in range(m)]
    for i, j, v in zip(A.row.tolist(), A.col.tolist(), A.data.tolist()):
        v = int(v)
        rows[i][j] = rows[i].get(j, 0) + v
    cols: list = [set() for _ in range(n)]
    for i in range(m):
        r = rows[i]
        for j in list(r):
            if p:
                r[j] %= p
            if r[j]:
                cols[j].add(i)
            else:
                del r[j]

    def unit(v):
        return bool(v) if p else v in (1, -1)

    heap = []
    for i in range(m):
        ri = len(rows[i]) - 1
        for j, v in rows[i].items():
            if unit(v):
                heap.append(((ri) * (len(cols[j]) - 1), i, j))
    heapq.heapify(heap)
    rank = 0
    alive_r = [True] * m
    while heap:
        cost, r, c = heapq.heappop(heap)
        if not alive_r[r]:
            continue
        prow = rows[r]
        u = prow.get(c)
        if u is None or not unit(u):
            continue
        cur = (len(prow) - 1) * (len(cols[c]) - 1)
        if cur != cost:
            heapq.heappush(heap, (cur, r, c))
            continue
        rank += 1
        u_inv = pow(u, -1, p) if p else u
        items = list(prow.items())
        for r2 in list(cols[c]):
            if r2 == r:
                continue
            row2 = rows[r2]
            f = row2[c] * u_inv
            for c2, v in items:
                nv = row2.get(c2, 0) - f * v
                if p:
                    nv %= p
                if nv:
                    if c2 not in row2:
                        cols[c2].add(r2)
                    row2[c2] = nv
                    if unit(nv):
                        heapq.heappush(heap, ((len(row2) - 1) * (len(cols[c2]) - 1), r2, c2))
                elif c2 in row2:
                    del row2[c2]
                    cols[c2].discard(r2)
        for c2 in prow:
            cols[c2].discard(r)
        rows[r] = {}
        alive_r[r] = False

    left_rows = [i for i in range(m) if rows[i]]
    left_cols = sorted({j for i in left_rows for j in rows[i]})
    if not left_rows:
        return rank, [1] * rank
    cidx = {j: k for k, j in enumerate(left_cols)}
    dense = [[0] * len(left_cols) for _ in left_rows]
    for a, i in enumerate(left_rows):
        for j, v in rows[i].items():
            dense[a][cidx[j]] = v
    rest = _dense_invariants(dense, len(left_rows), len(left_cols), p)
    divisors = [1] * rank + rest
    if not p:
        divisors.sort()
    return rank + len(rest), divisors


def determinantal_divisors_2x2(A) -> tuple[int, int]:
    """Invariant factors of a 2x2 integer matrix from gcds of minors (test oracle)."""
    (a, b), (c, d) = A
    g1 = gcd(gcd(a, b), gcd(c, d))
    det = abs(a * d - b * c)
    if g1 == 0:
        return 0, 0
    return g1, det // g1
