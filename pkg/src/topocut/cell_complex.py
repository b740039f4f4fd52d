"""Graded cell storage with integer incidence.

A :class:`ChainComplex` holds one sparse incidence matrix per dimension
(rows are the (d-1)-cells, columns the d-cells).  Coboundaries are never
stored separately: they are transposes of the same matrices.

Integer chains and cochains share one representation (:class:`IntChain`),
a sparse map from cell id to Python ``int``, because the cell basis is
treated as orthonormal and a cochain is identified with the chain carrying
the same coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, InconsistencyError, InvalidCellError, NotFaceClosedError

__all__ = [
    "ChainComplex",
    "IntChain",
    "CxCochain",
    "SubcomplexView",
    "boundary",
    "coboundary",
    "inner_product",
    "restrict",
    "relative_complex",
]


def _as_incidence(mat, shape) -> sp.csc_matrix:
    m = sp.csc_matrix(mat, shape=shape, dtype=np.int64)
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    return m


class ChainComplex:
    """Finite regular cell complex described by its incidence numbers.

    Parameters
    ----------
    counts:
        Number of cells in each dimension ``0..dim``.
    incidence:
        ``incidence[d]`` for ``d = 1..dim`` is a sparse integer matrix of
        shape ``(counts[d-1], counts[d])``.  ``incidence[0]`` is ignored.
    parent_ids:
        Optional per-dimension arrays mapping local ids to the ids of the
        complex this one was extracted from.
    check:
        Verify that every entry is in {-1, 0, 1} and that the boundary of a
        boundary vanishes.  Construction fails with
        :class:`InconsistencyError` otherwise.
    """

    def __init__(self, counts: Sequence[int], incidence: Sequence | Mapping,
                 parent_ids: Sequence[np.ndarray] | None = None,
                 parent: "ChainComplex | None" = None, check: bool = True):
        counts = tuple(int(c) for c in counts)
        if not 1 <= len(counts) <= 4:
            raise DimensionError("complex dimension must be between 0 and 3")
        self.counts = counts
        self._bd: list[sp.csc_matrix | None] = [None]
        for d in range(1, len(counts)):
            self._bd.append(_as_incidence(incidence[d], (counts[d - 1], counts[d])))
        self.parent = parent
        self.parent_ids = None
        if parent_ids is not None:
            self.parent_ids = [np.asarray(p, dtype=np.int64) for p in parent_ids]
        if check:
            self.check()

    @property
    def dim(self) -> int:
        return len(self.counts) - 1

    def __repr__(self):
        return f"ChainComplex(counts={self.counts})"

    def __len__(self):
        return sum(self.counts)

    def check(self) -> None:
        for d in range(1, self.dim + 1):
            m = self._bd[d]
            if m.nnz and np.abs(m.data).max() > 1:
                raise InconsistencyError(f"incidence[{d}] has entries outside {{-1,0,1}}")
        for d in range(2, self.dim + 1):
            prod = (self._bd[d - 1] @ self._bd[d]).tocoo()
            prod.eliminate_zeros()
            if prod.nnz:
                raise InconsistencyError(f"boundary of boundary is nonzero in dimension {d}")

    # -- matrices -------------------------------------------------------
    def boundary_matrix(self, d: int) -> sp.csc_matrix:
        """Matrix of the boundary map from d-chains to (d-1)-chains."""
        if d == 0:
            return sp.csc_matrix((0, self.counts[0]), dtype=np.int64)
        if d == self.dim + 1:
            return sp.csc_matrix((self.counts[self.dim], 0), dtype=np.int64)
        if not 1 <= d <= self.dim:
            raise DimensionError(f"no boundary map in dimension {d}")
        return self._bd[d]

    @cached_property
    def _cobd(self) -> list:
        return [None] + [m.T.tocsc() for m in self._bd[1:]]

    def coboundary_matrix(self, d: int) -> sp.csc_matrix:
        """Matrix of the coboundary from d-cochains to (d+1)-cochains."""
        if not 0 <= d < self.dim:
            raise DimensionError(f"no coboundary map from dimension {d}")
        return self._cobd[d + 1]

    def faces(self, d: int, i: int) -> tuple[np.ndarray, np.ndarray]:
        m = self._bd[d]
        lo, hi = m.indptr[i], m.indptr[i + 1]
        return m.indices[lo:hi], m.data[lo:hi]

    def cofaces(self, d: int, i: int) -> tuple[np.ndarray, np.ndarray]:
        m = self._cobd[d + 1]
        lo, hi = m.indptr[i], m.indptr[i + 1]
        return m.indices[lo:hi], m.data[lo:hi]

    def kappa(self, d: int, face: int, cell: int) -> int:
        return int(self._bd[d][face, cell])

    @cached_property
    def _face_lists(self) -> list:
        # python-level adjacency for the pure-python loops in reductions
        out = [None]
        for d in range(1, self.dim + 1):
            m = self._bd[d]
            ind, dat, ptr = m.indices.tolist(), m.data.tolist(), m.indptr.tolist()
            out.append([list(zip(ind[ptr[j]:ptr[j + 1]], dat[ptr[j]:ptr[j + 1]]))
                        for j in range(self.counts[d])])
        return out

    @cached_property
    def _coface_lists(self) -> list:
        out = []
        for d in range(self.dim):
            m = self._cobd[d + 1]
            ind, dat, ptr = m.indices.tolist(), m.data.tolist(), m.indptr.tolist()
            out.append([list(zip(ind[ptr[j]:ptr[j + 1]], dat[ptr[j]:ptr[j + 1]]))
                        for j in range(self.counts[d])])
        return out

    def face_list(self, d: int, i: int) -> list:
        return self._face_lists[d][i]

    def coface_list(self, d: int, i: int) -> list:
        if d >= self.dim:
            return []
        return self._coface_lists[d][i]

    # -- helpers --------------------------------------------------------
    def full_view(self) -> "SubcomplexView":
        return SubcomplexView(self, [np.ones(c, dtype=bool) for c in self.counts])

    def empty_view(self) -> "SubcomplexView":
        return SubcomplexView(self, [np.zeros(c, dtype=bool) for c in self.counts])

    def closure(self, d: int, ids) -> "SubcomplexView":
        """Smallest subcomplex containing the given d-cells."""
        member = [np.zeros(c, dtype=bool) for c in self.counts]
        member[d][np.asarray(list(ids), dtype=np.int64)] = True
        for k in range(d, 0, -1):
            cols = np.flatnonzero(member[k])
            if cols.size:
                rows = self._bd[k][:, cols].indices
                member[k - 1][rows] = True
        return SubcomplexView(self, member)

    def validate_chain(self, chain: "IntChain | CxCochain") -> None:
        if not 0 <= chain.dim <= self.dim:
            raise DimensionError(f"chain dimension {chain.dim} outside 0..{self.dim}")
        n = self.counts[chain.dim]
        if isinstance(chain, IntChain):
            for k in chain.coeffs:
                if not 0 <= k < n:
                    raise InvalidCellError(f"cell id {k} out of range for dimension {chain.dim}")
        elif chain.values.shape != (n,):
            raise InvalidCellError(f"cochain has {chain.values.shape[0]} values, expected {n}")


@dataclass
class IntChain:
    """Sparse integer chain (or cochain, under the orthonormal-basis identification)."""

    dim: int
    coeffs: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {int(k): int(v) for k, v in self.coeffs.items() if v}

    @classmethod
    def from_pairs(cls, dim, pairs):
        out: dict[int, int] = {}
        for k, v in pairs:
            out[int(k)] = out.get(int(k), 0) + int(v)
        return cls(dim, out)

    @classmethod
    def from_dense(cls, dim, values):
        return cls(dim, {i: int(v) for i, v in enumerate(values) if v})

    def to_dense(self, n: int, dtype=object) -> np.ndarray:
        out = np.zeros(n, dtype=dtype)
        for k, v in self.coeffs.items():
            out[k] = v
        return out

    @property
    def support(self) -> set[int]:
        return set(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k):
        return self.coeffs.get(k, 0)

    def _combine(self, other, sign):
        if other.dim != self.dim:
            raise DimensionError("cannot add chains of different dimension")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k, 0) + sign * v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return IntChain(self.dim, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return IntChain(self.dim, {k: -v for k, v in self.coeffs.items()})

    def __mul__(self, s: int):
        return IntChain(self.dim, {k: s * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def mod(self, p: int) -> "IntChain":
        return IntChain(self.dim, {k: v % p for k, v in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, IntChain) and self.dim == other.dim and self.coeffs == other.coeffs


@dataclass
class CxCochain:
    """Dense complex-valued cochain indexed by cell id."""

    dim: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("cochain values must be finite")

    @classmethod
    def zeros(cls, dim, n):
        return cls(dim, np.zeros(n, dtype=complex))


@dataclass
class SubcomplexView:
    """Per-dimension membership masks over a parent complex."""

    parent: ChainComplex
    member: list

    def __post_init__(self):
        self.member = [np.asarray(m, dtype=bool) for m in self.member]
        if len(self.member) != len(self.parent.counts):
            raise DimensionError("view must have one mask per dimension")
        for d, m in enumerate(self.member):
            if m.shape != (self.parent.counts[d],):
                raise DimensionError(f"mask for dimension {d} has wrong length")

    def is_face_closed(self) -> bool:
        for d in range(1, self.parent.dim + 1):
            cols = np.flatnonzero(self.member[d])
            if cols.size:
                rows = self.parent.boundary_matrix(d)[:, cols].indices
                if not self.member[d - 1][rows].all():
                    return False
        return True

    def counts(self) -> tuple[int, ...]:
        return tuple(int(m.sum()) for m in self.member)

    def ids(self, d: int) -> np.ndarray:
        return np.flatnonzero(self.member[d])

    def is_empty(self) -> bool:
        return not any(m.any() for m in self.member)

    def __contains__(self, cell):
        d, i = cell
        return bool(self.member[d][i])

    def __and__(self, other: "SubcomplexView") -> "SubcomplexView":
        return SubcomplexView(self.parent, [a & b for a, b in zip(self.member, other.member)])

    def __or__(self, other: "SubcomplexView") -> "SubcomplexView":
        return SubcomplexView(self.parent, [a | b for a, b in zip(self.member, other.member)])

    def complement(self) -> list:
        return [~m for m in self.member]


# -- operations -----------------------------------------------------------

def boundary(chain: IntChain, cx: ChainComplex) -> IntChain:
    """Apply the incidence matrix of ``chain.dim`` to an integer chain."""
    if chain.dim < 1 or chain.dim > cx.dim:
        raise DimensionError(f"boundary undefined for {chain.dim}-chains of a {cx.dim}-complex")
    cx.validate_chain(chain)
    out: dict[int, int] = {}
    for cell, a in chain.coeffs.items():
        for f, k in cx.face_list(chain.dim, cell):
            out[f] = out.get(f, 0) + k * a
    return IntChain(chain.dim - 1, out)


def coboundary(cochain, cx: ChainComplex):
    """Apply the transpose incidence; keeps the cochain kind (integer or complex)."""
    if cochain.dim < 0 or cochain.dim > cx.dim - 1:
        raise DimensionError(f"coboundary undefined for {cochain.dim}-cochains of a {cx.dim}-complex")
    cx.validate_chain(cochain)
    if isinstance(cochain, CxCochain):
        return CxCochain(cochain.dim + 1, cx.coboundary_matrix(cochain.dim) @ cochain.values)
    out: dict[int, int] = {}
    for cell, a in cochain.coeffs.items():
        for c, k in cx.coface_list(cochain.dim, cell):
            out[c] = out.get(c, 0) + k * a
    return IntChain(cochain.dim + 1, out)


def inner_product(a, b):
    """Scalar product over the shared support (cell basis is orthonormal)."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if isinstance(a, IntChain) and isinstance(b, IntChain):
        small, big = (a, b) if len(a.coeffs) <= len(b.coeffs) else (b, a)
        return sum(v * big.coeffs.get(k, 0) for k, v in small.coeffs.items())
    if isinstance(a, CxCochain) and isinstance(b, CxCochain):
        return complex(np.dot(a.values, b.values))
    x, c = (a, b) if isinstance(a, IntChain) else (b, a)
    return sum(v * c.values[k] for k, v in x.coeffs.items())


def _extract(cx: ChainComplex, keep: list) -> ChainComplex:
    parent_ids = [np.flatnonzero(k) for k in keep]
    inc = [None]
    for d in range(1, cx.dim + 1):
        inc.append(cx.boundary_matrix(d)[parent_ids[d - 1], :][:, parent_ids[d]])
    return ChainComplex([len(p) for p in parent_ids], inc, parent_ids=parent_ids, parent=cx)


def restrict(cx: ChainComplex, view: SubcomplexView) -> ChainComplex:
    """Extract a face-closed subcomplex with dense local numbering.

    The result carries ``parent_ids[d]`` (local id -> parent id); use
    :func:`local_ids` for the reverse direction.
    """
    if view.parent is not cx:
        raise ValueError("view belongs to a different complex")
    if not view.is_face_closed():
        raise NotFaceClosedError("view is not closed under taking faces")
    return _extract(cx, view.member)


def relative_complex(cx: ChainComplex, sub: SubcomplexView) -> ChainComplex:
    """Quotient complex C(K)/C(S): cells of ``sub`` and their incidences dropped."""
    if sub.parent is not cx:
        raise ValueError("view belongs to a different complex")
    if not sub.is_face_closed():
        raise NotFaceClosedError("subcomplex is not closed under taking faces")
    return _extract(cx, sub.complement())


def local_ids(cx: ChainComplex, d: int) -> np.ndarray:
    """Reverse id table: parent id -> local id, or -1 when absent."""
    if cx.parent_ids is None or cx.parent is None:
        raise ValueError("complex was not extracted from a parent")
    table = np.full(cx.parent.counts[d], -1, dtype=np.int64)
    table[cx.parent_ids[d]] = np.arange(cx.counts[d])
    return table


def to_parent(cx: ChainComplex, chain: IntChain) -> IntChain:
    ids = cx.parent_ids[chain.dim]
    return IntChain(chain.dim, {int(ids[k]): v for k, v in chain.coeffs.items()})


def from_parent(cx: ChainComplex, chain: IntChain, strict: bool = True) -> IntChain:
    table = local_ids(cx, chain.dim)
    out = {}
    for k, v in chain.coeffs.items():
        j = table[k]
        if j < 0:
            if strict:
                raise InvalidCellError(f"cell {k} of dimension {chain.dim} is not in the subcomplex")
            continue
        out[int(j)] = v
    return IntChain(chain.dim, out)


def view_in(cx: ChainComplex, view: SubcomplexView) -> SubcomplexView:
    """Transport a view on ``cx.parent`` to a view on the extracted ``cx``."""
    return SubcomplexView(cx, [view.member[d][cx.parent_ids[d]] for d in range(cx.dim + 1)])
