"""Pure-Python coreduction kernel; must stay step-for-step identical to ``_kernels.pyx``."""
from collections import deque

import numpy as np


def coreduce_pairs(fptr, fidx, cptr, cidx, alive, descending=False):
    """Greedy elimination of pairs that create no fill-in.

    Cells use one global numbering across dimensions.  ``fptr/fidx`` list the
    faces of every cell, ``cptr/cidx`` the cofaces.  ``alive`` is modified in
    place.  A popped cell with exactly one alive face ``a`` gives the pair
    ``(a, cell)``; otherwise, if it has exactly one alive coface ``b``, the
    pair ``(cell, b)``.  Returns an ``(m, 2)`` int64 array in removal order.
    """
    fptr = fptr.tolist()
    fidx = fidx.tolist()
    cptr = cptr.tolist()
    cidx = cidx.tolist()
    live = alive.astype(bool).tolist()
    n = len(live)
    order = range(n - 1, -1, -1) if descending else range(n)
    queue = deque(i for i in order if live[i])
    inq = [False] * n
    for i in queue:
        inq[i] = True
    pairs = []
    while queue:
        x = queue.popleft()
        inq[x] = False
        if not live[x]:
            continue
        a = b = -1
        cnt = 0
        for k in range(fptr[x], fptr[x + 1]):
            if live[fidx[k]]:
                cnt += 1
                a = fidx[k]
                if cnt > 1:
                    break
        if cnt == 1:
            b = x
        else:
            cnt = 0
            for k in range(cptr[x], cptr[x + 1]):
                if live[cidx[k]]:
                    cnt += 1
                    b = cidx[k]
                    if cnt > 1:
                        break
            if cnt != 1:
                continue
            a = x
        live[a] = live[b] = False
        pairs.append((a, b))
        for y in (a, b):
            for k in range(cptr[y], cptr[y + 1]):
                z = cidx[k]
                if live[z] and not inq[z]:
                    inq[z] = True
                    queue.append(z)
            for k in range(fptr[y], fptr[y + 1]):
                z = fidx[k]
                if live[z] and not inq[z]:
                    inq[z] = True
                    queue.append(z)
    alive[:] = np.asarray(live, dtype=alive.dtype)
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
