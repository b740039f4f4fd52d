# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled coreduction kernel.  Mirrors ``_kernels_py.coreduce_pairs`` exactly."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def coreduce_pairs(const cnp.int64_t[:] fptr, const cnp.int64_t[:] fidx,
                   const cnp.int64_t[:] cptr, const cnp.int64_t[:] cidx,
                   cnp.uint8_t[:] alive, bint descending=False):
    cdef Py_ssize_t n = alive.shape[0]
    cdef Py_ssize_t cap = n + 1
    cdef cnp.int64_t[:] queue = np.empty(cap, dtype=np.int64)
    cdef cnp.uint8_t[:] inq = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[:, :] pairs = np.empty((n // 2 + 1, 2), dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 0, npairs = 0, i, k, x, a, b, z, cnt, side, y
    for k in range(n):
        i = n - 1 - k if descending else k
        if alive[i]:
            queue[tail] = i
            tail += 1
            inq[i] = 1
    while head != tail:
        x = queue[head]
        head += 1
        if head == cap:
            head = 0
        inq[x] = 0
        if not alive[x]:
            continue
        a = -1
        b = -1
        cnt = 0
        for k in range(fptr[x], fptr[x + 1]):
            if alive[fidx[k]]:
                cnt += 1
                a = fidx[k]
                if cnt > 1:
                    break
        if cnt == 1:
            b = x
        else:
            cnt = 0
            for k in range(cptr[x], cptr[x + 1]):
                if alive[cidx[k]]:
                    cnt += 1
                    b = cidx[k]
                    if cnt > 1:
                        break
            if cnt != 1:
                continue
            a = x
        alive[a] = 0
        alive[b] = 0
        pairs[npairs, 0] = a
        pairs[npairs, 1] = b
        npairs += 1
        for side in range(2):
            y = a if side == 0 else b
            for k in range(cptr[y], cptr[y + 1]):
                z = cidx[k]
                if alive[z] and not inq[z]:
                    inq[z] = 1
                    queue[tail] = z
                    tail += 1
                    if tail == cap:
                        tail = 0
            for k in range(fptr[y], fptr[y + 1]):
                z = fidx[k]
                if alive[z] and not inq[z]:
                    inq[z] = 1
                    queue[tail] = z
                    tail += 1
                    if tail == cap:
                        tail = 0
    return np.asarray(pairs[:npairs]).copy()
