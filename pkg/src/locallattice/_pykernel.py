"""Pure-Python cover extension kernel, used when the compiled one is unavailable.

Slower than ``_ckernel`` but follows the same steps in the same order, so the
two produce identical maps and identical obstructions.
"""
from __future__ import annotations

import heapq

OK = 0
OPPOSITE = 1
INJECTIVITY = 2
AMBIGUOUS = 3
CONFLICT = 4


def extend_window(indptr, indices, d, R, seed, priority, inbox):
    """Grow a lattice-to-graph map over the window ``[-R-1, R+1]^d``.

    Window points are flat indices ``sum (x_i + R + 1) * S^i`` with ``S = 2R+3``.
    Returns ``(map, status, info)`` where ``info`` is
    ``(point, aux, x, y, z)`` describing the first failure.
    """
    d = int(d)
    S = 2 * R + 3
    size = S**d
    strides = [S**i for i in range(d)]
    off = []
    for s in strides:
        off.append(s)
        off.append(-s)
    n = len(indptr) - 1
    ip = [int(x) for x in indptr]
    ix = [int(x) for x in indices]
    nsets = [frozenset(ix[ip[v] : ip[v + 1]]) for v in range(n)]
    degs = [ip[v + 1] - ip[v] for v in range(n)]
    pri = priority.tolist() if hasattr(priority, "tolist") else list(priority)
    box = bytes(inbox)
    m = [-1] * size
    center = bytearray(size)
    queued = bytearray(size)
    two_d = 2 * d
    origin = sum((R + 1) * s for s in strides)
    m[origin] = int(seed[0])
    for k in range(two_d):
        m[origin + off[k]] = int(seed[1 + k])
    center[origin] = 1
    heap = []
    for k in range(two_d):
        w = origin + off[k]
        if box[w]:
            queued[w] = 1
            heap.append((pri[w], w))
    heapq.heapify(heap)

    def fail(tag, u, aux=-1, x=-1, y=-1, z=-1):
        return m, tag, (u, aux, x, y, z)

    while heap:
        _, u = heapq.heappop(heap)
        pu = m[u]
        npu = nsets[pu]
        if degs[pu] != two_d:
            return fail(INJECTIVITY, u, -1, pu)
        for k in range(two_d):
            v = u - off[k]
            if not center[v]:
                continue
            pv = m[v]
            axis = k >> 1
            for k2 in range(two_d):
                if k2 >> 1 == axis:
                    continue
                a = m[v + off[k2]]
                w = u + off[k2]
                common = npu & nsets[a]
                if len(common) != 2 or pv not in common:
                    return fail(AMBIGUOUS, u, w, pu, a, len(common))
                c = min(common) if max(common) == pv else max(common)
                if m[w] < 0:
                    m[w] = c
                elif m[w] != c:
                    return fail(CONFLICT, u, w, m[w], c, v)
        vals = []
        missing = -1
        nmiss = 0
        for k in range(two_d):
            x = m[u + off[k]]
            if x < 0:
                nmiss += 1
                missing = k
            else:
                if x not in npu:
                    return fail(INJECTIVITY, u, k, pu, x)
                vals.append(x)
        if len(set(vals)) != len(vals):
            return fail(INJECTIVITY, u, -1, pu)
        if nmiss > 1:
            return fail(AMBIGUOUS, u, -1, pu, -1, nmiss)
        if nmiss == 1:
            rest = npu.difference(vals)
            m[u + off[missing]] = min(rest)
        for i in range(d):
            x = m[u + off[2 * i]]
            y = m[u + off[2 * i + 1]]
            common = nsets[x] & nsets[y]
            if len(common) != 1:
                extra = min(c for c in common if c != pu) if len(common) > 1 else -1
                return fail(OPPOSITE, u, i, x, y, extra)
        center[u] = 1
        for k in range(two_d):
            w = u + off[k]
            if box[w] and not center[w] and not queued[w]:
                queued[w] = 1
                heapq.heappush(heap, (pri[w], w))
    return m, OK, (-1, -1, -1, -1, -1)
