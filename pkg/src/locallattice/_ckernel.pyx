# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cover extension kernel.  Mirrors ``_pykernel.extend_window`` step for step."""

from libc.stdint cimport int64_t

import numpy as np

cdef enum:
    OK = 0
    OPPOSITE = 1
    INJECTIVITY = 2
    AMBIGUOUS = 3
    CONFLICT = 4


cdef inline int common_nbrs(const int[::1] ip, const int[::1] ix, int x, int y, int* out) noexcept nogil:
    # sorted merge; stores at most 4 common neighbours
    cdef int i = ip[x], ie = ip[x + 1], j = ip[y], je = ip[y + 1], cnt = 0, a, b
    while i < ie and j < je:
        a = ix[i]
        b = ix[j]
        if a == b:
            if cnt < 4:
                out[cnt] = a
            cnt += 1
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return cnt


cdef inline bint adjacent(const int[::1] ip, const int[::1] ix, int x, int y) noexcept nogil:
    cdef int lo = ip[x], hi = ip[x + 1] - 1, mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if ix[mid] == y:
            return True
        if ix[mid] < y:
            lo = mid + 1
        else:
            hi = mid - 1
    return False


cdef inline void heap_push(int64_t[::1] hp, int64_t[::1] hi, Py_ssize_t* size,
                           int64_t p, int64_t idx) noexcept nogil:
    cdef Py_ssize_t i = size[0], parent
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if hp[parent] <= p:
            break
        hp[i] = hp[parent]
        hi[i] = hi[parent]
        i = parent
    hp[i] = p
    hi[i] = idx


cdef inline int64_t heap_pop(int64_t[::1] hp, int64_t[::1] hi, Py_ssize_t* size) noexcept nogil:
    cdef int64_t top = hi[0], p, idx
    cdef Py_ssize_t n, i = 0, c
    size[0] -= 1
    n = size[0]
    if n == 0:
        return top
    p = hp[n]
    idx = hi[n]
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and hp[c + 1] < hp[c]:
            c += 1
        if hp[c] >= p:
            break
        hp[i] = hp[c]
        hi[i] = hi[c]
        i = c
    hp[i] = p
    hi[i] = idx
    return top


def extend_window(const int[::1] indptr, const int[::1] indices, int d, int R,
                  const int[::1] seed, const int64_t[::1] priority,
                  const unsigned char[::1] inbox):
    cdef Py_ssize_t S = 2 * R + 3
    cdef Py_ssize_t size = 1
    cdef int i, k, k2, axis, two_d = 2 * d, cnt, nmiss, missing, nvals, t, t2
    cdef Py_ssize_t origin = 0, u, v, w, s
    cdef int pu, pv, a, c, x, y
    cdef int buf[4]
    cdef int vals[64]
    cdef int64_t off[64]
    cdef Py_ssize_t hsize = 0
    cdef int status = OK
    cdef int64_t inf0 = -1, inf1 = -1, inf2 = -1, inf3 = -1, inf4 = -1

    if two_d > 64:
        raise ValueError("dimension too large for the compiled kernel")
    s = 1
    for i in range(d):
        off[2 * i] = s
        off[2 * i + 1] = -s
        origin += (R + 1) * s
        s *= S
    size = s

    mapping_np = np.full(size, -1, dtype=np.int32)
    cdef int[::1] m = mapping_np
    cdef unsigned char[::1] center = np.zeros(size, dtype=np.uint8)
    cdef unsigned char[::1] queued = np.zeros(size, dtype=np.uint8)
    cdef int64_t[::1] hp = np.empty(size, dtype=np.int64)
    cdef int64_t[::1] hi = np.empty(size, dtype=np.int64)

    with nogil:
        m[origin] = seed[0]
        for k in range(two_d):
            m[origin + off[k]] = seed[1 + k]
        center[origin] = 1
        for k in range(two_d):
            w = origin + off[k]
            if inbox[w]:
                queued[w] = 1
                heap_push(hp, hi, &hsize, priority[w], w)

        while hsize > 0:
            u = heap_pop(hp, hi, &hsize)
            pu = m[u]
            if indptr[pu + 1] - indptr[pu] != two_d:
                status = INJECTIVITY
                inf0 = u; inf2 = pu
                break
            for k in range(two_d):
                v = u - off[k]
                if not center[v]:
                    continue
                pv = m[v]
                axis = k >> 1
                for k2 in range(two_d):
                    if (k2 >> 1) == axis:
                        continue
                    a = m[v + off[k2]]
                    w = u + off[k2]
                    cnt = common_nbrs(indptr, indices, pu, a, buf)
                    if cnt != 2 or (buf[0] != pv and buf[1] != pv):
                        status = AMBIGUOUS
                        inf0 = u; inf1 = w; inf2 = pu; inf3 = a; inf4 = cnt
                        break
                    c = buf[1] if buf[0] == pv else buf[0]
                    if m[w] < 0:
                        m[w] = c
                    elif m[w] != c:
                        status = CONFLICT
                        inf0 = u; inf1 = w; inf2 = m[w]; inf3 = c; inf4 = v
                        break
                if status != OK:
                    break
            if status != OK:
                break

            nvals = 0
            nmiss = 0
            missing = -1
            for k in range(two_d):
                x = m[u + off[k]]
                if x < 0:
                    nmiss += 1
                    missing = k
                else:
                    if not adjacent(indptr, indices, pu, x):
                        status = INJECTIVITY
                        inf0 = u; inf1 = k; inf2 = pu; inf3 = x
                        break
                    vals[nvals] = x
                    nvals += 1
            if status != OK:
                break
            for t in range(nvals):
                for t2 in range(t + 1, nvals):
                    if vals[t] == vals[t2]:
                        status = INJECTIVITY
                        inf0 = u; inf2 = pu
                if status != OK:
                    break
            if status != OK:
                break
            if nmiss > 1:
                status = AMBIGUOUS
                inf0 = u; inf2 = pu; inf4 = nmiss
                break
            if nmiss == 1:
                for t in range(indptr[pu], indptr[pu + 1]):
                    x = indices[t]
                    for t2 in range(nvals):
                        if vals[t2] == x:
                            break
                    else:
                        m[u + off[missing]] = x
                        break

            for i in range(d):
                x = m[u + off[2 * i]]
                y = m[u + off[2 * i + 1]]
                cnt = common_nbrs(indptr, indices, x, y, buf)
                if cnt != 1:
                    status = OPPOSITE
                    inf0 = u; inf1 = i; inf2 = x; inf3 = y
                    # least common neighbour other than the centre
                    inf4 = -1
                    for t in range(cnt if cnt < 4 else 4):
                        if buf[t] != pu:
                            inf4 = buf[t]
                            break
                    break
            if status != OK:
                break

            center[u] = 1
            for k in range(two_d):
                w = u + off[k]
                if inbox[w] and not center[w] and not queued[w]:
                    queued[w] = 1
                    heap_push(hp, hi, &hsize, priority[w], w)

    return mapping_np, status, (int(inf0), int(inf1), int(inf2), int(inf3), int(inf4))
