import functools
import random
from itertools import combinations

import numpy as np
import pytest
import scipy.sparse as sp

from topocut.cell_complex import ChainComplex, IntChain
from topocut.cut_extractor import compute_cuts
from topocut.mesh_ingest import build_skeleton
from topocut.scenes import SCENES, generate_scene


def simplicial(top):
    """Chain complex of the closure of the given simplices (vertex tuples)."""
    top = [tuple(sorted(s)) for s in top]
    dim = len(top[0]) - 1
    levels = [set() for _ in range(dim + 1)]
    for s in top:
        for k in range(1, len(s) + 1):
            levels[k - 1].update(combinations(s, k))
    cells = [sorted(l) for l in levels]
    index = [{c: i for i, c in enumerate(l)} for l in cells]
    inc = [None]
    for d in range(1, dim + 1):
        r, c, v = [], [], []
        for j, s in enumerate(cells[d]):
            for k in range(d + 1):
                r.append(index[d - 1][s[:k] + s[k + 1:]])
                c.append(j)
                v.append((-1) ** k)
        inc.append(sp.csc_matrix((v, (r, c)), shape=(len(cells[d - 1]), len(cells[d]))))
    return ChainComplex([len(l) for l in cells], inc)


TET_SURFACE = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
# six-vertex projective plane
RP2 = [(0, 1, 3), (0, 1, 4), (0, 2, 3), (0, 2, 5), (0, 4, 5), (1, 2, 4), (1, 2, 5), (1, 3, 5),
       (2, 3, 4), (3, 4, 5)]
# seven-vertex torus
TORUS = [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)] + [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)]
CIRCLE = [(0, 1), (1, 2), (0, 2)]
DISK = [(0, 1, 2), (0, 2, 3)]


@pytest.fixture(scope="session")
def small_complexes():
    return {
        "circle": simplicial(CIRCLE),
        "disk": simplicial(DISK),
        "sphere": simplicial(TET_SURFACE),
        "ball": simplicial([(0, 1, 2, 3)]),
        "torus": simplicial(TORUS),
        "rp2": simplicial(RP2),
    }


@functools.lru_cache(maxsize=None)
def scene(name, res=None):
    mesh = generate_scene(name, res)
    cx, lab = build_skeleton(mesh)
    return mesh, cx, lab, compute_cuts(cx, lab)


@pytest.fixture(scope="session", params=SCENES)
def any_scene(request):
    return (request.param, *scene(request.param))


def random_chain(rng, cx, d, k=6, scale=5):
    n = cx.counts[d]
    ids = rng.sample(range(n), min(k, n))
    return IntChain(d, {i: rng.randint(-scale, scale) for i in ids})


@pytest.fixture
def rng():
    return random.Random(1234)


def dense(m):
    return np.asarray(m.toarray(), dtype=np.int64)


def crossing_number(path, axis, c, lo, hi):
    """Signed count of path steps through the open probe rectangle.

    The rectangle's corner order makes its right-hand normal +axis for x and z
    and -axis for y.
    """
    a, b = [x for x in range(3) if x != axis]
    normal = -1 if axis == 1 else 1
    total = 0
    n = len(path)
    for i in range(n):
        p, q = path[i], path[(i + 1) % n]
        step = [q[k] - p[k] for k in range(3)]
        if step[axis] == 0 or {p[axis], q[axis]} != {c - 1, c}:
            continue
        if lo[0] <= p[a] and p[a] + 1 <= hi[0] and lo[1] <= p[b] and p[b] + 1 <= hi[1]:
            total += normal * step[axis]
    return total


def rect_params(corners):
    arr = np.array(corners)
    axis = int(np.flatnonzero(np.ptp(arr, axis=0) == 0)[0])
    a, b = [x for x in range(3) if x != axis]
    return axis, int(arr[0, axis]), (int(arr[:, a].min()), int(arr[:, b].min())), \
        (int(arr[:, a].max()), int(arr[:, b].max()))


ACCEPTANCE = []


@pytest.fixture
def record():
    def add(n, ok, detail=""):
        ACCEPTANCE.append((n, ok, detail))
    return add


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
