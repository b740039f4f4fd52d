"""Frequency-domain T-Omega eddy-current system on a cell complex.

The magnetomotive force on edges is expanded as

    F = G Omega + T + sum_j i_j c^j

with ``G`` the node-to-edge coboundary, ``T`` supported on conductor edges
that do not touch the insulator, and ``c^j`` the cuts.  With the edge
operator ``R = i omega mu + C^T rho C`` (``C`` the edge-to-face coboundary)
every equation of the system is a row of ``B^T R B`` where ``B`` maps the
unknowns to ``F``:

* node rows ``G^T R F = i omega G^T mu F`` (magnetic Gauss law times i omega),
* conductor edge rows ``(R F)_e = 0`` (local Faraday law),
* cut rows ``c^jT R F = 0`` (Faraday law around the dual loop of cut j).

Gauge: Omega is kept only on insulator nodes, with one node pinned per
insulator component; inside the conductor its gradient is absorbed by T.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .cell_complex import ChainComplex, CxCochain, restrict
from .cut_extractor import CutSet
from .errors import RankDeficiencyError, SolverError
from .homology.reduction import components
from .mesh_ingest import RegionLabeling

__all__ = ["MaterialParams", "Source", "TOmegaSystem", "FieldSolution", "build_constitutive", "assemble",
           "solve", "check_laws", "solution_to_dict", "MU0", "RHO_COPPER", "DENSE_LIMIT"]

MU0 = 4e-7 * np.pi
RHO_COPPER = 1.68e-8
DENSE_LIMIT = 5000


@dataclass
class MaterialParams:
    """Permeability (H/m) per volume, resistivity (ohm m) per volume, angular frequency (rad/s)."""

    mu: float | np.ndarray = MU0
    rho: float | np.ndarray = RHO_COPPER
    omega: float = 2 * np.pi * 50

    def per_volume(self, n):
        mu = np.broadcast_to(np.asarray(self.mu, dtype=float), (n,)).copy()
        rho = np.broadcast_to(np.asarray(self.rho, dtype=float), (n,)).copy()
        return mu, rho


@dataclass
class Source:
    """Prescribed current ``value`` (A) or e.m.f. ``value`` (V) on cut ``index``."""

    kind: str
    index: int
    value: complex = 1.0

    def __post_init__(self):
        if self.kind not in ("current", "emf"):
            raise ValueError("source kind must be 'current' or 'emf'")


def _adjacency(cx, d):
    """Boolean (d-cells x volumes) adjacency."""
    m = abs(cx.boundary_matrix(3)).astype(np.int64)
    for k in range(2, d, -1):
        m = abs(cx.boundary_matrix(k)) @ m
    if d == 3:
        m = sp.identity(cx.counts[3], format="csr", dtype=np.int64)
    return (sp.csr_matrix(m) > 0).astype(np.int64).tocsr()


def build_constitutive(cx: ChainComplex, labeling: RegionLabeling, params: MaterialParams):
    """Lumped diagonal permeance (per edge) and resistance (per face) entries.

    Voxels use the orthogonal dual: each adjacent voxel contributes a quarter
    of the dual face of an edge and half of the dual edge of a face.  Tets use
    barycentric dual pieces projected on the primal edge or face normal.
    Resistance entries are zero on insulator faces, including the interface.
    """
    geo = cx.geometry
    nvol = cx.counts[3]
    mu_v, rho_v = params.per_volume(nvol)
    if np.any(mu_v <= 0):
        raise ValueError("permeability must be positive")
    cond = labeling.conductor_volumes
    if np.any(rho_v[cond] <= 0):
        raise ValueError("resistivity must be positive on conductors")
    rho_v = np.where(cond, rho_v, 0.0)
    interior_faces = labeling.conductor.member[2] & ~labeling.insulator.member[2]
    if geo.kind == "voxels":
        h = geo.pitch
        ev = _adjacency(cx, 1)
        mu_e = ev @ (mu_v * h / 4.0)
        fv = _adjacency(cx, 2)
        rho_f = fv @ (rho_v * (h / 2.0) / h ** 2)
    else:
        mu_e, rho_f = _tet_metric(cx, mu_v, rho_v)
    if np.any(mu_e <= 0):
        raise ValueError("nonpositive permeance entry (degenerate cell)")
    rho_f = np.where(interior_faces, rho_f, 0.0)
    if np.any(rho_f[interior_faces] <= 0):
        raise ValueError("nonpositive resistance entry (degenerate cell)")
    return np.asarray(mu_e, dtype=float), np.asarray(rho_f, dtype=float)


def _tet_metric(cx, mu_v, rho_v):
    geo = cx.geometry
    X = geo.coords
    edges, faces, tets = geo.cell_vertices[1], geo.cell_vertices[2], geo.cell_vertices[3]
    eidx = {tuple(e): i for i, e in enumerate(edges)}
    fidx = {tuple(f): i for i, f in enumerate(faces)}
    mu_e = np.zeros(len(edges))
    rho_f = np.zeros(len(faces))
    for t, tet in enumerate(tets):
        ct = X[list(tet)].mean(axis=0)
        for a in range(4):
            for b in range(a + 1, 4):
                e = (tet[a], tet[b])
                tvec = X[e[1]] - X[e[0]]
                length = np.linalg.norm(tvec)
                if length <= 0:
                    raise ValueError("degenerate edge")
                m = 0.5 * (X[e[0]] + X[e[1]])
                others = [tet[k] for k in range(4) if k not in (a, b)]
                cf = [X[[e[0], e[1], o]].mean(axis=0) for o in others]
                area = 0.5 * (np.cross(cf[0] - m, ct - m) + np.cross(ct - m, cf[1] - m))
                mu_e[eidx[e]] += mu_v[t] * abs(area @ tvec) / length ** 2
        if rho_v[t] > 0:
            for k in range(4):
                f = tuple(v for j, v in enumerate(tet) if j != k)
                p = X[list(f)]
                nvec = np.cross(p[1] - p[0], p[2] - p[0])
                farea = 0.5 * np.linalg.norm(nvec)
                if farea <= 0:
                    raise ValueError("degenerate face")
                dual_len = abs((ct - p.mean(axis=0)) @ nvec) / np.linalg.norm(nvec)
                rho_f[fidx[f]] += rho_v[t] * dual_len / farea
    return mu_e, rho_f


@dataclass
class TOmegaSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    omega_nodes: np.ndarray
    t_edges: np.ndarray
    cut_unknowns: list
    pinned: list
    source: Source
    omega: float
    B: sp.csr_matrix
    cut_matrix: sp.csc_matrix
    mu: np.ndarray
    rho: np.ndarray
    cx: ChainComplex = field(repr=False, default=None)
    labeling: RegionLabeling = field(repr=False, default=None)
    cutset: CutSet = field(repr=False, default=None)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def asymmetry(self) -> float:
        d = (self.matrix - self.matrix.T).tocoo()
        return float(np.abs(d.data).max()) if d.nnz else 0.0


def _cut_matrix(cx, cutset):
    n1 = cx.counts[1]
    r, c, v = [], [], []
    for j, cut in enumerate(cutset.cuts):
        for e, a in cut.coeffs.items():
            r.append(e)
            c.append(j)
            v.append(a)
    return sp.csc_matrix((np.asarray(v, dtype=float), (r, c)), shape=(n1, cutset.n))


def _gauge(cx, labeling):
    ka = restrict(cx, labeling.insulator)
    comp = components(ka)
    ids = ka.parent_ids[0]
    pinned = sorted({int(ids[c]) for c in comp})
    keep = np.array(sorted(set(ids.tolist()) - set(pinned)), dtype=np.int64)
    return keep, pinned


def assemble(cx: ChainComplex, labeling: RegionLabeling, cutset: CutSet, matrices, omega: float,
             source: Source | None) -> TOmegaSystem:
    """Symmetric complex system for (Omega, T, currents) with the source moved to the right."""
    if source is None:
        raise ValueError("no source given: a prescribed current or e.m.f. on one cut is required")
    if cutset.n == 0:
        raise ValueError("no source possible: the insulating region has no cuts")
    if not 0 <= source.index < cutset.n:
        raise ValueError(f"source index {source.index} out of range 0..{cutset.n - 1}")
    if omega < 0:
        raise ValueError("angular frequency must be nonnegative")
    mu, rho = matrices
    G = cx.coboundary_matrix(0).astype(float)
    C = cx.coboundary_matrix(1).astype(float)
    nodes, pinned = _gauge(cx, labeling)
    t_edges = np.flatnonzero(labeling.conductor.member[1] & ~labeling.insulator.member[1])
    n1 = cx.counts[1]
    PT = sp.csc_matrix((np.ones(len(t_edges)), (t_edges, np.arange(len(t_edges)))), shape=(n1, len(t_edges)))
    CM = _cut_matrix(cx, cutset)
    s = source.index
    free_cuts = [j for j in range(cutset.n) if j != s or source.kind == "emf"]
    B = sp.hstack([G[:, nodes], PT, CM[:, free_cuts]]).tocsc()
    Kmat = C.T @ sp.diags(rho) @ C
    if omega > 0:
        R = 1j * omega * sp.diags(mu) + Kmat
        A = (B.T @ R @ B).tocsr()
        upper = sp.triu(A)
        A = (upper + sp.triu(A, 1).T).tocsr()
    else:
        interior_nodes = labeling.conductor.member[0] & ~labeling.insulator.member[0]
        if interior_nodes.any():
            raise RankDeficiencyError(
                "electric vector potential gauge",
                f"{int(interior_nodes.sum())} conductor nodes off the interface leave T undetermined "
                "at zero frequency")
        R = Kmat.astype(complex)
        nodal = (G[:, nodes].T @ sp.diags(mu) @ B)
        rest = (sp.hstack([PT, CM[:, free_cuts]]).T @ R @ B)
        A = sp.vstack([nodal, rest]).tocsr().astype(complex)
    rhs = np.zeros(A.shape[0], dtype=complex)
    if source.kind == "current":
        col = CM[:, [s]]
        if omega > 0:
            rhs -= np.asarray((B.T @ R @ col).todense()).ravel() * source.value
        else:
            nod = np.asarray((G[:, nodes].T @ sp.diags(mu) @ col).todense()).ravel()
            rst = np.asarray((sp.hstack([PT, CM[:, free_cuts]]).T @ R @ col).todense()).ravel()
            rhs -= np.concatenate([nod, rst]) * source.value
    else:
        row = len(nodes) + len(t_edges) + free_cuts.index(s)
        rhs[row] = source.value
    return TOmegaSystem(A, rhs, nodes, t_edges, free_cuts, pinned, source, omega, B.tocsr(), CM, mu, rho,
                        cx, labeling, cutset)


@dataclass
class FieldSolution:
    Omega: CxCochain
    T: CxCochain
    currents: list
    F: CxCochain
    I: CxCochain
    Phi: CxCochain
    U: CxCochain
    x: np.ndarray
    residual: float
    emf: complex
    system: TOmegaSystem = field(repr=False, default=None)
    seconds: float = 0.0


def solve(system: TOmegaSystem, tol: float = 1e-10) -> FieldSolution:
    """Direct solve (dense below ``DENSE_LIMIT`` unknowns, sparse LU above) and field recovery."""
    t0 = time.perf_counter()
    A, b = system.matrix, system.rhs
    n = A.shape[0]
    try:
        if n < DENSE_LIMIT:
            x = sla.solve(A.toarray(), b, assume_a="sym") if n else np.zeros(0, dtype=complex)
        else:
            x = spla.splu(A.tocsc()).solve(b)
    except (np.linalg.LinAlgError, sla.LinAlgError, RuntimeError) as exc:
        raise RankDeficiencyError("system", f"matrix is singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise RankDeficiencyError("system", "solution is not finite")
    bn = np.linalg.norm(b)
    res = np.linalg.norm(A @ x - b) / (bn if bn > 0 else 1.0)
    if res > tol:
        raise SolverError(f"relative residual {res:.3e} exceeds {tol:.0e}")
    cx = system.cx
    nn, nt = len(system.omega_nodes), len(system.t_edges)
    Om = np.zeros(cx.counts[0], dtype=complex)
    Om[system.omega_nodes] = x[:nn]
    T = np.zeros(cx.counts[1], dtype=complex)
    T[system.t_edges] = x[nn:nn + nt]
    cur = np.zeros(system.cutset.n, dtype=complex)
    cur[system.cut_unknowns] = x[nn + nt:]
    if system.source.kind == "current":
        cur[system.source.index] = system.source.value
    G = cx.coboundary_matrix(0).astype(float)
    C = cx.coboundary_matrix(1).astype(float)
    F = G @ Om + T + system.cut_matrix @ cur
    interior = system.labeling.conductor.member[2] & ~system.labeling.insulator.member[2]
    I = np.where(interior, C @ F, 0.0)
    R_F = _apply_R(system, F)
    col = system.cut_matrix[:, system.source.index].toarray().ravel()
    emf = complex(col @ R_F) if system.omega > 0 else complex(col @ (C.T @ (system.rho * (C @ F))))
    sol = FieldSolution(CxCochain(0, Om), CxCochain(1, T), [complex(c) for c in cur], CxCochain(1, F),
                        CxCochain(2, I), CxCochain(1, system.mu * F), CxCochain(2, system.rho * I), x,
                        float(res), emf, system, time.perf_counter() - t0)
    return sol


def _apply_R(system, F):
    C = system.cx.coboundary_matrix(1).astype(float)
    return 1j * system.omega * system.mu * F + C.T @ (system.rho * (C @ F))


def _exact_zero(op: sp.spmatrix, x) -> float:
    op = sp.csr_matrix(op)
    op.eliminate_zeros()
    v = op @ x if op.nnz else np.zeros(op.shape[0])
    return float(np.abs(v).max()) if v.size else 0.0


def _rel(r, scale):
    r = np.abs(np.asarray(r))
    s = float(np.max(scale)) if np.size(scale) else 0.0
    if r.size == 0:
        return 0.0
    return float(r.max() / s) if s > 0 else float(r.max())


def check_laws(solution: FieldSolution, cx: ChainComplex, labeling: RegionLabeling, cutset: CutSet,
               omega: float) -> dict:
    """Residuals of every discrete law on the recovered fields.

    Continuity of I and Ampere on insulator faces are evaluated through
    integer compositions of the incidence operators with the unknown layout,
    which vanish identically, so those entries are exactly zero.  The other
    families are relative to the magnitude of the terms that enter them.
    """
    sysm = solution.system
    G = cx.coboundary_matrix(0)
    C = cx.coboundary_matrix(1)
    D = cx.coboundary_matrix(2)
    ins_f = sp.diags(labeling.insulator.member[2].astype(np.int64))
    cond_f = sp.diags((labeling.conductor.member[2] & ~labeling.insulator.member[2]).astype(np.int64))
    n1 = cx.counts[1]
    t_edges = sysm.t_edges
    PT = sp.csc_matrix((np.ones(len(t_edges), dtype=np.int64), (t_edges, np.arange(len(t_edges)))),
                       shape=(n1, len(t_edges)))
    CM = sp.csc_matrix(sysm.cut_matrix.astype(np.int64))
    Om, T, cur = solution.Omega.values, solution.T.values[t_edges], np.asarray(solution.currents)
    pieces = ((G, Om), (PT, T), (CM, cur))
    continuity = max(_exact_zero(D @ cond_f @ C @ op, v) for op, v in pieces)
    ampere_ins = max(_exact_zero(ins_f @ C @ op, v) for op, v in pieces)
    F, I = solution.F.values, solution.I.values
    dF = C.astype(float) @ F
    ampere_cond = float(np.abs(np.where(labeling.conductor.member[2] & ~labeling.insulator.member[2],
                                        dF - I, 0)).max(initial=0.0))
    mu = sysm.mu
    Phi = mu * F
    gauss = _rel(G.T.astype(float) @ Phi, abs(G.T).astype(float) @ np.abs(Phi))
    rho = sysm.rho
    Rf_mu = 1j * omega * Phi
    Rf_rho = C.T.astype(float) @ (rho * dF)
    RF = Rf_mu + Rf_rho
    scale_R = np.abs(Rf_mu) + abs(C.T).astype(float) @ np.abs(rho * dF)
    faraday_local = _rel(RF[t_edges], scale_R[t_edges]) if len(t_edges) else 0.0
    nonlocal_f = []
    for j in range(cutset.n):
        if j == sysm.source.index:
            continue
        col = sysm.cut_matrix[:, j].toarray().ravel()
        nonlocal_f.append(_rel([col @ RF], [np.abs(col) @ scale_R]))
    ampere_nl = []
    for j, lp in enumerate(cutset.loops):
        val = sum(a * F[e] for e, a in lp.coeffs.items())
        ampere_nl.append(float(abs(val - cur[j]) / max(np.abs(cur).max(), 1e-300)))
    return {
        "current_continuity": continuity,
        "ampere_insulator": ampere_ins,
        "ampere_conductor": ampere_cond,
        "gauss": gauss,
        "faraday_local": faraday_local,
        "faraday_nonlocal": max(nonlocal_f, default=0.0),
        "faraday_nonlocal_each": nonlocal_f,
        "ampere_nonlocal": max(ampere_nl, default=0.0),
        "ampere_nonlocal_each": ampere_nl,
        "linear_residual": solution.residual,
        "source_emf": [solution.emf.real, solution.emf.imag],
    }


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def solution_to_dict(solution: FieldSolution, report: dict) -> dict:
    """JSON-ready solution: currents and potentials as [re, im] pairs."""
    sysm = solution.system
    src = sysm.source
    return {
        "format": "topocut-solution-1",
        "omega_rad_s": sysm.omega,
        "source": {"kind": src.kind, "index": src.index, "value": _pair(src.value)},
        "currents": [_pair(c) for c in solution.currents],
        "source_emf": _pair(solution.emf),
        "residuals": {k: v for k, v in report.items() if k != "source_emf"},
        "dof": {
            "Omega": [[int(v), *_pair(solution.Omega.values[v])] for v in sysm.omega_nodes],
            "T": [[int(e), *_pair(solution.T.values[e])] for e in sysm.t_edges],
        },
        "unknowns": sysm.size,
        "pinned_nodes": [int(v) for v in sysm.pinned],
    }
