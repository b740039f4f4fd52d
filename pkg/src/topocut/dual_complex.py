"""Dual complex through incidence only.

Dual ``d``-cells are the primal ``(3-d)``-cells with the same ids, and the
dual boundary in grade ``d`` is the transpose of the primal boundary in
grade ``4-d``.  No dual coordinates are built.
"""
from __future__ import annotations

from dataclasses import dataclass

import scipy.sparse as sp

from .cell_complex import ChainComplex, IntChain, SubcomplexView, coboundary
from .errors import DimensionError, InconsistencyError

__all__ = ["DualMap", "dual_boundary_matrix", "dual_boundary", "dual_support", "is_relative_dual_cycle"]


@dataclass(frozen=True)
class DualMap:
    parent: ChainComplex

    def __post_init__(self):
        if self.parent.dim != 3:
            raise DimensionError("dual complexes are only built for 3-dimensional meshes")

    def primal_dim(self, dual_dim: int) -> int:
        if not 0 <= dual_dim <= 3:
            raise DimensionError(f"dual dimension {dual_dim} outside 0..3")
        return 3 - dual_dim

    def count(self, dual_dim: int) -> int:
        return self.parent.counts[self.primal_dim(dual_dim)]

    def to_dual(self, chain: IntChain) -> IntChain:
        """Same coefficients, read as a chain of dual cells of complementary grade."""
        return IntChain(3 - chain.dim, chain.coeffs)


def dual_boundary_matrix(cx: ChainComplex, d: int) -> sp.csc_matrix:
    """Boundary from dual ``d``-chains to dual ``(d-1)``-chains (rows: primal ``(4-d)``-cells)."""
    if not 1 <= d <= 3 or cx.dim != 3:
        raise DimensionError(f"dual boundary defined for 1 <= d <= 3 on 3-complexes, got d={d}")
    return cx.boundary_matrix(4 - d).T.tocsc()


def dual_boundary(chain: IntChain, dm: DualMap) -> IntChain:
    """Dual boundary of a dual chain (``chain.dim`` is its dual grade)."""
    m = dual_boundary_matrix(dm.parent, chain.dim)
    out: dict = {}
    for j, a in chain.coeffs.items():
        lo, hi = m.indptr[j], m.indptr[j + 1]
        for i, k in zip(m.indices[lo:hi].tolist(), m.data[lo:hi].tolist()):
            out[i] = out.get(i, 0) + k * a
    return IntChain(chain.dim - 1, out)


def dual_support(cut: IntChain, dm: DualMap, insulator: SubcomplexView | None = None) -> IntChain:
    """Dual 2-chain carrying the cut coefficients, one dual face per primal edge.

    With ``insulator`` given, the cut must be supported there and be a cocycle
    on its faces.
    """
    if cut.dim != 1:
        raise DimensionError("cuts are 1-cochains")
    if insulator is not None:
        cx = dm.parent
        if any(not insulator.member[1][e] for e in cut.coeffs):
            raise InconsistencyError("cut has support outside the insulating region")
        dc = coboundary(cut, cx)
        if any(insulator.member[2][f] for f in dc.coeffs):
            raise InconsistencyError("cut is not a cocycle on the insulating region")
    return dm.to_dual(cut)


def is_relative_dual_cycle(sigma: IntChain, dm: DualMap, insulator: SubcomplexView,
                           interface: SubcomplexView) -> bool:
    """Dual boundary avoids insulator faces and only meets faces touching the interface."""
    bd = dual_boundary(sigma, dm)
    cx = dm.parent
    for f in bd.coeffs:
        if insulator.member[2][f]:
            return False
        if not any(interface.member[1][e] for e, _ in cx.face_list(2, f)):
            return False
    return True
