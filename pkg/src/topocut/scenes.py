"""Built-in voxel test geometries.

Every scene is a conductor inside an insulating box with a one-voxel margin.
Knotted and coiled scenes are a closed lattice path of voxels; the path is
validated so that voxels three or more steps apart along the loop never
touch, not even diagonally.  Probe loops (closed vertex polygons in the
insulator) are stored in ``Mesh.meta`` for tests and the CLI.
"""
from __future__ import annotations

import numpy as np

from .errors import MeshError
from .mesh_ingest import CONDUCTOR, INSULATOR, Mesh, _voxel_corners

__all__ = ["SCENES", "MIN_RESOLUTION", "generate_scene", "probe_edges", "path_current", "tetrahedralize"]

MIN_RESOLUTION = {"solid-torus": 5, "double-torus": 5, "two-turn-coil": 2, "trefoil": 2}
SCENES = tuple(MIN_RESOLUTION)

_COIL = [(0, 0, 0), (4, 0, 0), (4, 4, 0), (0, 4, 0), (0, 1, 0), (1, 1, 0), (3, 1, 0), (3, 3, 0),
         (1, 3, 0), (1, 2, 0), (1, 2, 1), (0, 2, 1), (-1, 2, 1), (-1, 2, 0), (-1, 0, 0)]


def _gadget_over(k):
    return [(k, 0, 0), (k + 1, 0, 0), (k + 1, 0, 1), (k + 1, 1, 1), (k + 1, 2, 1), (k + 2, 2, 1),
            (k + 2, 2, 0), (k + 3, 2, 0)]


def _gadget_under(k):
    return [(k, 2, 0), (k, 1, 0), (k + 1, 1, 0), (k + 2, 1, 0), (k + 2, 0, 0), (k + 3, 0, 0)]


def _closure(y):
    return [(9, y, 0), (10, y, 0), (10, y, 2), (-1, y, 2), (-1, y, 0), (0, y, 0)]


def _trefoil_corners():
    # closure of the two-strand braid with three equal crossings
    pts = []
    for seg in (_gadget_over(0), _gadget_under(3), _gadget_over(6), _closure(2),
                _gadget_under(0), _gadget_over(3), _gadget_under(6), _closure(0)):
        for p in seg:
            if not pts or pts[-1] != p:
                pts.append(p)
    if pts[-1] == pts[0]:
        pts.pop()
    return pts


def _scaled_path(corners, s):
    """Voxel loop through ``s * corner`` with straight axis-aligned runs."""
    out = []
    n = len(corners)
    for i in range(n):
        p = np.array(corners[i]) * s
        q = np.array(corners[(i + 1) % n]) * s
        step = q - p
        if np.count_nonzero(step) != 1:
            raise MeshError("path corners must differ along exactly one axis")
        length = int(np.abs(step).sum())
        unit = step // length
        for t in range(length):
            out.append(tuple(int(x) for x in p + t * unit))
    return out


def _validate_path(path):
    n = len(path)
    arr = np.array(path)
    if len(set(path)) != n:
        raise MeshError("path visits a voxel twice")
    for i in range(n):
        d = np.abs(arr - arr[i]).max(axis=1)
        gap = np.abs(np.arange(n) - i)
        gap = np.minimum(gap, n - gap)
        if np.any((gap >= 3) & (d < 2)):
            raise MeshError("path comes too close to itself; increase the resolution")


def _box_mesh(shape, cond: set, meta) -> Mesh:
    X, Y, Z = shape
    vox = [(i, j, k) for i in range(X) for j in range(Y) for k in range(Z)]
    regions = [CONDUCTOR if v in cond else INSULATOR for v in vox]
    arr = np.array(vox, dtype=np.int64)
    return Mesh(_voxel_corners(arr).astype(float), "voxels", arr, regions, 1.0, meta)


def _rect(axis, c, lo, hi):
    """Corners of an axis-normal rectangle at ``axis = c`` spanning ``lo..hi`` in the other two."""
    a, b = [x for x in range(3) if x != axis]
    corners = []
    for u, v in ((lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])):
        p = [0, 0, 0]
        p[axis], p[a], p[b] = c, u, v
        corners.append(p)
    return corners


def _solid_torus(n):
    t = 1 if n < 8 else n // 4
    cond = set()
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            inner = 1 + t <= i <= n - 2 - t and 1 + t <= j <= n - 2 - t
            if not inner:
                for k in range(1, t + 1):
                    cond.add((i, j, k))
    meta = {"probes": {"meridian": _rect(0, n // 2, (0, 0), (t + 1, t + 1))}}
    return _box_mesh((n, n, t + 2), cond, meta)


def _double_torus(n):
    h = n - 4
    cond = set()
    for lo_x in (1, h + 2):
        for i in range(lo_x, lo_x + h + 2):
            for j in range(1, h + 3):
                if not (lo_x < i < lo_x + h + 1 and 1 < j < h + 2):
                    cond.add((i, j, 1))
    meta = {"probes": {"meridian1": _rect(0, 2, (0, 0), (2, 2)),
                       "meridian2": _rect(0, 2 * h + 3, (0, 0), (2, 2))}}
    return _box_mesh((2 * h + 5, n, 3), cond, meta)


def _path_scene(corners, s, probes):
    path = _scaled_path(corners, s)
    _validate_path(path)
    arr = np.array(path)
    shift = 1 - arr.min(axis=0)
    path = [tuple(int(x) for x in p + shift) for p in arr]
    shape = tuple(int(x) for x in np.array(path).max(axis=0) + 2)
    moved = {}
    for name, (axis, c, lo, hi) in probes.items():
        a, b = [x for x in range(3) if x != axis]
        moved[name] = _rect(axis, c + int(shift[axis]), (lo[0] + int(shift[a]), lo[1] + int(shift[b])),
                            (hi[0] + int(shift[a]), hi[1] + int(shift[b])))
    meta = {"path": [list(p) for p in path], "probes": moved}
    return _box_mesh(shape, set(path), meta)


def _two_turn_coil(s):
    probes = {"enclosing": (0, 2 * s, (0, 0), (s + 1, 1)),
              "single": (0, 2 * s, (0, 0), (1, 1))}
    return _path_scene(_COIL, s, probes)


def _trefoil(s):
    probes = {"meridian": (0, 4 * s, (0, 2 * s), (1, 2 * s + 1))}
    return _path_scene(_trefoil_corners(), s, probes)


_BUILDERS = {"solid-torus": _solid_torus, "double-torus": _double_torus,
             "two-turn-coil": _two_turn_coil, "trefoil": _trefoil}


def generate_scene(name: str, resolution: int | None = None) -> Mesh:
    """Voxel mesh of a named scene; ``resolution`` defaults to the scene minimum."""
    if name not in _BUILDERS:
        raise MeshError(f"unknown scene {name!r}; choose from {', '.join(SCENES)}")
    low = MIN_RESOLUTION[name]
    res = low if resolution is None else int(resolution)
    if res < low:
        raise MeshError(f"{name} needs resolution >= {low} (got {res})")
    mesh = _BUILDERS[name](res)
    mesh.meta["scene"] = name
    mesh.meta["resolution"] = res
    return mesh


# Kuhn split of the unit cube: one tet per axis permutation, all sharing the main diagonal
_KUHN = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def tetrahedralize(mesh: Mesh) -> Mesh:
    """Conforming tet mesh of a voxel mesh (six tets per voxel), same vertices and labels."""
    if mesh.kind != "voxels":
        raise MeshError("only voxel meshes can be split")
    corners = _voxel_corners(mesh.volumes)
    vid = {tuple(p): i for i, p in enumerate(corners.tolist())}
    tets, regions = [], []
    for v, r in zip(mesh.volumes.tolist(), mesh.regions):
        for perm in _KUHN:
            p = list(v)
            t = [vid[tuple(p)]]
            for a in perm:
                p[a] += 1
                t.append(vid[tuple(p)])
            tets.append(t)
            regions.append(r)
    return Mesh(corners.astype(float) * mesh.pitch, "tets", np.array(tets, dtype=np.int64), regions,
                mesh.pitch, dict(mesh.meta))


def probe_edges(cx, corners) -> dict:
    """Edge chain of a closed lattice polygon, oriented along the corner order."""
    coords = cx.geometry.coords / cx.geometry.pitch
    vid = {tuple(int(round(x)) for x in p): i for i, p in enumerate(coords)}
    b1 = cx.boundary_matrix(1)
    edge_of = {}
    for e in range(cx.counts[1]):
        lo, hi = b1.indptr[e], b1.indptr[e + 1]
        vs, sg = b1.indices[lo:hi], b1.data[lo:hi]
        tail, head = (vs[0], vs[1]) if sg[0] < 0 else (vs[1], vs[0])
        edge_of[(int(tail), int(head))] = (e, 1)
        edge_of[(int(head), int(tail))] = (e, -1)
    out: dict = {}
    n = len(corners)
    for i in range(n):
        p, q = np.array(corners[i]), np.array(corners[(i + 1) % n])
        step = q - p
        length = int(np.abs(step).sum())
        unit = step // max(length, 1)
        for t in range(length):
            u = tuple(int(x) for x in p + t * unit)
            w = tuple(int(x) for x in p + (t + 1) * unit)
            if u not in vid or w not in vid or (vid[u], vid[w]) not in edge_of:
                raise MeshError(f"probe polygon leaves the mesh at {u}->{w}")
            e, sgn = edge_of[(vid[u], vid[w])]
            out[e] = out.get(e, 0) + sgn
    return {k: v for k, v in out.items() if v}


def path_current(cx, mesh: Mesh):
    """Unit current along the voxel loop of a path scene, as a face cochain.

    Each face shared by consecutive path voxels carries the incidence of that
    face on the voxel the current leaves, so the net outflow of every voxel
    is zero.
    """
    from .cell_complex import CxCochain
    path = mesh.meta.get("path")
    if not path:
        raise MeshError("scene has no conductor path")
    vol = {tuple(v): i for i, v in enumerate(mesh.volumes.tolist())}
    vals = np.zeros(cx.counts[2], dtype=complex)
    n = len(path)
    for i in range(n):
        p, q = vol[tuple(path[i])], vol[tuple(path[(i + 1) % n])]
        fp = dict(cx.face_list(3, p))
        shared = [f for f, _ in cx.face_list(3, q) if f in fp]
        if len(shared) != 1:
            raise MeshError("consecutive path voxels do not share a face")
        vals[shared[0]] += fp[shared[0]]
    return CxCochain(2, vals)
