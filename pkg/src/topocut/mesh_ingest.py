"""Labeled 3D meshes: parsing, cell skeleton, region subcomplexes.

Two element kinds are accepted, tetrahedra and axis-aligned unit voxels.
Edges and faces are deduplicated by their sorted vertex keys and numbered in
key order; volumes keep document order.

Orientation conventions:

* simplices are oriented by ascending vertex id, faces get the alternating
  sign of the dropped vertex;
* a voxel edge along axis ``a`` at lattice point ``p`` runs from ``p`` to
  ``p + e_a``;
* a voxel face spanned by axes ``a < b`` at ``p`` has boundary
  ``E_a(p) + E_b(p+e_a) - E_a(p+e_b) - E_b(p)``;
* a voxel is oriented by (x, y, z), its boundary being
  ``F_12(p+e_0) - F_12(p) - F_02(p+e_1) + F_02(p) + F_01(p+e_2) - F_01(p)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .cell_complex import ChainComplex, SubcomplexView
from .errors import MeshError, NotAcyclicError

__all__ = ["Mesh", "RegionLabeling", "CellGeometry", "parse_mesh", "dump_mesh", "build_complex", "build_skeleton",
           "CONDUCTOR", "INSULATOR"]

CONDUCTOR = "conductor"
INSULATOR = "insulator"
FORMAT = "cwmesh-1"


@dataclass
class Mesh:
    """Volumes with region labels.  ``kind`` is ``"tets"`` or ``"voxels"``."""

    vertices: np.ndarray
    kind: str
    volumes: np.ndarray
    regions: list
    pitch: float = 1.0
    meta: dict = field(default_factory=dict)

    @property
    def n_volumes(self) -> int:
        return len(self.volumes)


@dataclass
class RegionLabeling:
    conductor: SubcomplexView
    insulator: SubcomplexView
    interface: SubcomplexView
    conductor_volumes: np.ndarray


@dataclass
class CellGeometry:
    """Vertex coordinates and the vertex list of every cell, kept for metrics."""

    kind: str
    coords: np.ndarray
    cell_vertices: list
    pitch: float = 1.0


def _voxel_corners(voxels: np.ndarray) -> np.ndarray:
    offs = np.array([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)], dtype=np.int64)
    pts = (voxels[:, None, :] + offs[None, :, :]).reshape(-1, 3)
    return np.unique(pts, axis=0)


def parse_mesh(data) -> Mesh:
    """Parse a ``cwmesh-1`` JSON document (bytes, str or already-decoded dict)."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MeshError(f"malformed JSON: {exc}") from exc
    else:
        doc = data
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise MeshError(f"expected a {FORMAT} document")
    if doc.get("dimension", 3) != 3:
        raise MeshError("only dimension 3 is supported")
    vols = doc.get("volumes")
    if not isinstance(vols, dict) or len(vols) != 1 or not set(vols) <= {"tets", "voxels"}:
        raise MeshError("volumes must hold exactly one of 'tets' or 'voxels'")
    kind = next(iter(vols))
    try:
        cells = np.asarray(vols[kind], dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise MeshError(f"bad volume list: {exc}") from exc
    width = 4 if kind == "tets" else 3
    if cells.size == 0:
        cells = cells.reshape(0, width)
    if cells.ndim != 2 or cells.shape[1] != width:
        raise MeshError(f"each entry of '{kind}' must have {width} integers")
    regions = doc.get("regions")
    if not isinstance(regions, list) or len(regions) != len(cells):
        raise MeshError("need exactly one region label per volume")
    for r in regions:
        if r not in (CONDUCTOR, INSULATOR):
            raise MeshError(f"unknown region label {r!r}")
    pitch = float(doc.get("pitch", 1.0))
    if not pitch > 0:
        raise MeshError("pitch must be positive")
    if kind == "tets":
        try:
            verts = np.asarray(doc.get("vertices", []), dtype=float)
        except (TypeError, ValueError) as exc:
            raise MeshError(f"bad vertex list: {exc}") from exc
        if verts.size == 0:
            verts = verts.reshape(0, 3)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise MeshError("vertices must be [x, y, z] triples")
        if cells.size and (cells.min() < 0 or cells.max() >= len(verts)):
            raise MeshError("vertex index out of range")
        if any(len(set(t)) != 4 for t in cells.tolist()):
            raise MeshError("tetrahedron with repeated vertex")
        keys = [tuple(sorted(t)) for t in cells.tolist()]
    else:
        verts = _voxel_corners(cells).astype(float) * pitch if len(cells) else np.zeros((0, 3))
        keys = [tuple(v) for v in cells.tolist()]
    if len(set(keys)) != len(keys):
        raise MeshError("duplicate volume")
    return Mesh(verts, kind, cells, list(regions), pitch, dict(doc.get("meta", {})))


def dump_mesh(mesh: Mesh) -> bytes:
    """Deterministic ``cwmesh-1`` serialization."""
    doc = {
        "format": FORMAT,
        "dimension": 3,
        "vertices": [[float(x) for x in v] for v in mesh.vertices],
        "volumes": {mesh.kind: mesh.volumes.tolist()},
        "regions": list(mesh.regions),
    }
    if mesh.pitch != 1.0:
        doc["pitch"] = mesh.pitch
    if mesh.meta:
        doc["meta"] = mesh.meta
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def _tet_complex(mesh: Mesh):
    tets = [tuple(sorted(t)) for t in mesh.volumes.tolist()]
    edges = sorted({e for t in tets for e in combinations(t, 2)})
    faces = sorted({f for t in tets for f in combinations(t, 3)})
    eid = {e: i for i, e in enumerate(edges)}
    fid = {f: i for i, f in enumerate(faces)}

    def simplex_boundary(cells, index, dim):
        r, c, v = [], [], []
        for j, s in enumerate(cells):
            for k in range(dim + 1):
                r.append(index(s[:k] + s[k + 1:]))
                c.append(j)
                v.append(-1 if k % 2 else 1)
        return r, c, v

    n0 = len(mesh.vertices)
    inc = [None]
    for dim, cells, index, rows in ((1, edges, lambda s: s[0], n0), (2, faces, eid.__getitem__, len(edges)),
                                    (3, tets, fid.__getitem__, len(faces))):
        r, c, v = simplex_boundary(cells, index, dim)
        inc.append(sp.csc_matrix((v, (r, c)), shape=(rows, len(cells))))
    counts = (n0, len(edges), len(faces), len(tets))
    verts = [[(v,) for v in range(n0)], edges, faces, tets]
    return counts, inc, verts


_UNIT = np.eye(3, dtype=np.int64)


def _voxel_complex(mesh: Mesh):
    vox = [tuple(v) for v in mesh.volumes.tolist()]
    corners = _voxel_corners(mesh.volumes) if vox else np.zeros((0, 3), dtype=np.int64)
    vid = {tuple(p): i for i, p in enumerate(corners.tolist())}

    def add(p, q):
        return (p[0] + q[0], p[1] + q[1], p[2] + q[2])

    e_ = [tuple(u) for u in _UNIT.tolist()]
    edge_set, face_set = set(), set()
    for p in vox:
        for a in range(3):
            for off in _square(a):
                edge_set.add((add(p, off), a))
        for a, b in ((0, 1), (0, 2), (1, 2)):
            c = 3 - a - b
            face_set.add((p, (a, b)))
            face_set.add((add(p, e_[c]), (a, b)))

    def edge_key(e):
        p, a = e
        return (vid[p], vid[add(p, e_[a])])

    def face_verts(f):
        p, (a, b) = f
        return [vid[p], vid[add(p, e_[a])], vid[add(add(p, e_[a]), e_[b])], vid[add(p, e_[b])]]

    edges = sorted(edge_set, key=edge_key)
    faces = sorted(face_set, key=lambda f: sorted(face_verts(f)))
    eid = {e: i for i, e in enumerate(edges)}
    fid = {f: i for i, f in enumerate(faces)}

    r, c, v = [], [], []
    for j, (p, a) in enumerate(edges):
        r += [vid[p], vid[add(p, e_[a])]]
        c += [j, j]
        v += [-1, 1]
    b1 = sp.csc_matrix((v, (r, c)), shape=(len(vid), len(edges)))
    r, c, v = [], [], []
    for j, (p, (a, b)) in enumerate(faces):
        for q, ax, s in ((p, a, 1), (add(p, e_[a]), b, 1), (add(p, e_[b]), a, -1), (p, b, -1)):
            r.append(eid[(q, ax)])
            c.append(j)
            v.append(s)
    b2 = sp.csc_matrix((v, (r, c)), shape=(len(edges), len(faces)))
    r, c, v = [], [], []
    for j, p in enumerate(vox):
        for (a, b), ax, in (((1, 2), 0), ((0, 2), 1), ((0, 1), 2)):
            s = -1 if ax == 1 else 1
            r += [fid[(add(p, e_[ax]), (a, b))], fid[(p, (a, b))]]
            c += [j, j]
            v += [s, -s]
    b3 = sp.csc_matrix((v, (r, c)), shape=(len(faces), len(vox)))
    counts = (len(vid), len(edges), len(faces), len(vox))
    verts = [[(i,) for i in range(len(vid))], [edge_key(e) for e in edges], [face_verts(f) for f in faces],
             [[vid[add(p, off)] for off in _cube()] for p in vox]]
    return counts, [None, b1, b2, b3], verts


def _square(a):
    # lattice offsets of the four edges along axis ``a`` of a unit cube
    b, c = [x for x in range(3) if x != a]
    out = []
    for i in (0, 1):
        for j in (0, 1):
            o = [0, 0, 0]
            o[b], o[c] = i, j
            out.append(tuple(o))
    return out


def _cube():
    return [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]


def build_complex(mesh: Mesh) -> ChainComplex:
    """Cell complex of the mesh alone, with ``geometry`` attached; labels are ignored."""
    if mesh.n_volumes == 0:
        raise MeshError("mesh has no volumes")
    if mesh.kind == "tets":
        counts, inc, verts = _tet_complex(mesh)
        coords = np.asarray(mesh.vertices, dtype=float)
    else:
        counts, inc, verts = _voxel_complex(mesh)
        coords = _voxel_corners(mesh.volumes).astype(float) * mesh.pitch
    cx = ChainComplex(counts, inc)
    cx.geometry = CellGeometry(mesh.kind, coords, verts, mesh.pitch)
    return cx


def build_skeleton(mesh: Mesh, require_trivial: bool = True):
    """Full cell complex of the mesh plus conductor/insulator subcomplexes.

    The whole complex must have the homology of a point; otherwise linked
    currents are ill defined and :class:`NotAcyclicError` is raised.
    """
    cx = build_complex(mesh)
    cond = np.array([r == CONDUCTOR for r in mesh.regions], dtype=bool)
    if not cond.any():
        raise MeshError("conductor region is empty")
    if cond.all():
        raise MeshError("insulator region is empty")
    kc = cx.closure(3, np.flatnonzero(cond))
    ka = cx.closure(3, np.flatnonzero(~cond))
    labeling = RegionLabeling(kc, ka, kc & ka, cond)
    if require_trivial:
        from .homology.oracle import betti_oracle
        betti, torsion = betti_oracle(cx)
        if betti != [1, 0, 0, 0] or any(torsion):
            raise NotAcyclicError(
                f"mesh complex is not homologically trivial (betti={betti}); linked currents "
                "need every 1-cycle to bound")
    return cx, labeling
