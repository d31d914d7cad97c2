# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the per-source BFS family and label propagation.

Signature-compatible with depnet._kernels.pure; every routine releases the
GIL over its main loop so source ranges can fan out across threads.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport calloc, free, malloc, qsort
from libc.string cimport memset

cdef extern from *:
    """
    #define DEPNET_POPCOUNT(x) __builtin_popcountll(x)
    #define DEPNET_CTZ(x) __builtin_ctzll(x)
    """
    int DEPNET_POPCOUNT(unsigned long long x) nogil
    int DEPNET_CTZ(unsigned long long x) nogil

cnp.import_array()

IMPLEMENTATION = "cython"
SUPPORTS_THREADS = True


cdef int _cmp_int(const void* a, const void* b) noexcept nogil:
    return (<const int*> a)[0] - (<const int*> b)[0]


cdef inline int _bfs_fill(const int[:] ptr, const int[:] idx, int n, int source,
                          int* dist, int* queue) noexcept nogil:
    cdef int head = 0, tail = 0, v, w, e, i
    for i in range(n):
        dist[i] = -1
    dist[source] = 0
    queue[tail] = source
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(ptr[v], ptr[v + 1]):
            w = idx[e]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
    return tail


def bfs_distances(indptr, indices, int n, int source):
    cdef const int[:] ptr = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] idx = np.ascontiguousarray(indices, dtype=np.int32)
    out = np.empty(n, dtype=np.int32)
    cdef int[:] dist = out
    cdef int* queue = <int*> malloc(n * sizeof(int))
    if queue == NULL:
        raise MemoryError
    try:
        with nogil:
            _bfs_fill(ptr, idx, n, source, &dist[0], queue)
    finally:
        free(queue)
    return out


def distance_stats(indptr, indices, int n, int lo, int hi):
    """Per-source distance sums, reach counts, and inverse-distance sums
    for sources in [lo, hi).

    Runs 64 sources per pass with bit-parallel frontiers: each node holds
    a word whose bits mark the batch sources that have reached it, so one
    CSR sweep advances the whole batch one level. Accumulation order (by
    level, then node id) is independent of batching, so results never
    depend on thread chunking.
    """
    cdef const int[:] ptr = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] idx = np.ascontiguousarray(indices, dtype=np.int32)
    cdef int count = hi - lo
    sums = np.zeros(count, dtype=np.float64)
    cnts = np.zeros(count, dtype=np.int64)
    invs = np.zeros(count, dtype=np.float64)
    cdef double[:] sv = sums
    cdef long long[:] cv = cnts
    cdef double[:] iv = invs
    cdef unsigned long long* cur = <unsigned long long*> malloc(n * sizeof(unsigned long long))
    cdef unsigned long long* nxt = <unsigned long long*> malloc(n * sizeof(unsigned long long))
    cdef unsigned long long* seen = <unsigned long long*> malloc(n * sizeof(unsigned long long))
    if cur == NULL or nxt == NULL or seen == NULL:
        free(cur); free(nxt); free(seen)
        raise MemoryError
    cdef unsigned long long* tmp
    cdef unsigned long long mask, fresh
    cdef int start, bs, b, s, v, e, level, base, alive
    cdef double inv_level
    try:
        with nogil:
            start = lo
            while start < hi:
                bs = 64 if hi - start > 64 else hi - start
                memset(cur, 0, n * sizeof(unsigned long long))
                memset(seen, 0, n * sizeof(unsigned long long))
                for b in range(bs):
                    s = start + b
                    cur[s] |= (<unsigned long long> 1) << b
                    seen[s] |= (<unsigned long long> 1) << b
                base = start - lo
                level = 0
                alive = 1
                while alive:
                    level += 1
                    inv_level = 1.0 / level
                    memset(nxt, 0, n * sizeof(unsigned long long))
                    for v in range(n):
                        mask = cur[v]
                        if mask:
                            for e in range(ptr[v], ptr[v + 1]):
                                nxt[idx[e]] |= mask
                    alive = 0
                    for v in range(n):
                        fresh = nxt[v] & ~seen[v]
                        nxt[v] = fresh
                        if fresh:
                            alive = 1
                            seen[v] |= fresh
                            while fresh:
                                b = DEPNET_CTZ(fresh)
                                fresh &= fresh - 1
                                sv[base + b] += level
                                cv[base + b] += 1
                                iv[base + b] += inv_level
                    tmp = cur
                    cur = nxt
                    nxt = tmp
                start += bs
    finally:
        free(cur)
        free(nxt)
        free(seen)
    return sums, cnts, invs


def betweenness_partial(indptr, indices, int n, int lo, int hi):
    cdef const int[:] ptr = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] idx = np.ascontiguousarray(indices, dtype=np.int32)
    bc = np.zeros(n, dtype=np.float64)
    cdef double[:] bcv = bc
    cdef int* dist = <int*> malloc(n * sizeof(int))
    cdef int* queue = <int*> malloc(n * sizeof(int))
    cdef double* sigma = <double*> malloc(n * sizeof(double))
    cdef double* delta = <double*> malloc(n * sizeof(double))
    if dist == NULL or queue == NULL or sigma == NULL or delta == NULL:
        free(dist); free(queue); free(sigma); free(delta)
        raise MemoryError
    cdef int s, i, v, w, e, head, tail, visited
    try:
        with nogil:
            for s in range(lo, hi):
                # forward pass: BFS with shortest-path counting
                for i in range(n):
                    dist[i] = -1
                    sigma[i] = 0.0
                dist[s] = 0
                sigma[s] = 1.0
                head = 0
                tail = 1
                queue[0] = s
                while head < tail:
                    v = queue[head]
                    head += 1
                    for e in range(ptr[v], ptr[v + 1]):
                        w = idx[e]
                        if dist[w] < 0:
                            dist[w] = dist[v] + 1
                            queue[tail] = w
                            tail += 1
                        if dist[w] == dist[v] + 1:
                            sigma[w] += sigma[v]
                visited = tail
                # backward pass over reverse BFS order; out-edges on the
                # shortest-path DAG replace predecessor lists
                for i in range(visited):
                    delta[queue[i]] = 0.0
                for i in range(visited - 1, 0, -1):
                    v = queue[i]
                    for e in range(ptr[v], ptr[v + 1]):
                        w = idx[e]
                        if dist[w] == dist[v] + 1:
                            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
                    bcv[v] += delta[v]
    finally:
        free(dist)
        free(queue)
        free(sigma)
        free(delta)
    return bc


def triangle_counts(indptr, indices, int n):
    cdef const int[:] ptr = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] idx = np.ascontiguousarray(indices, dtype=np.int32)
    tri = np.zeros(n, dtype=np.int64)
    cdef long long[:] tv = tri
    cdef signed char* flag = <signed char*> calloc(n, 1)
    if flag == NULL:
        raise MemoryError
    cdef int i, v, e, e2
    cdef long long cnt
    try:
        with nogil:
            for i in range(n):
                if ptr[i + 1] - ptr[i] < 2:
                    continue
                for e in range(ptr[i], ptr[i + 1]):
                    flag[idx[e]] = 1
                cnt = 0
                for e in range(ptr[i], ptr[i + 1]):
                    v = idx[e]
                    for e2 in range(ptr[v], ptr[v + 1]):
                        if flag[idx[e2]]:
                            cnt += 1
                for e in range(ptr[i], ptr[i + 1]):
                    flag[idx[e]] = 0
                tv[i] = cnt // 2
    finally:
        free(flag)
    return tri


def neighbor_intersections(indptr, indices, int n, int node):
    cdef const int[:] ptr = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] idx = np.ascontiguousarray(indices, dtype=np.int32)
    cdef long long* cnt = <long long*> calloc(n, sizeof(long long))
    cdef int* touched = <int*> malloc(n * sizeof(int))
    if cnt == NULL or touched == NULL:
        free(cnt); free(touched)
        raise MemoryError
    cdef int t = 0, e, e2, v, u, q
    try:
        with nogil:
            for e in range(ptr[node], ptr[node + 1]):
                v = idx[e]
                for e2 in range(ptr[v], ptr[v + 1]):
                    u = idx[e2]
                    if u == node:
                        continue
                    if cnt[u] == 0:
                        touched[t] = u
                        t += 1
                    cnt[u] += 1
        hits = np.empty(t, dtype=np.int32)
        counts = np.empty(t, dtype=np.int64)
        order = sorted(touched[q] for q in range(t))
        for q in range(t):
            hits[q] = order[q]
            counts[q] = cnt[order[q]]
        return hits, counts
    finally:
        free(cnt)
        free(touched)


def propagation_sweep(indptr, indices, labels, sizes, alpha, order, tie_rand):
    cdef const int[:] ptr = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] idx = np.ascontiguousarray(indices, dtype=np.int32)
    cdef int[:] lab = labels
    cdef long long[:] size = sizes
    cdef const double[:] al = alpha
    cdef const int[:] orderv = np.ascontiguousarray(order, dtype=np.int32)
    cdef const double[:] tie = np.ascontiguousarray(tie_rand, dtype=np.float64)
    cdef int n = lab.shape[0]

    cdef long long* cnt = <long long*> calloc(n, sizeof(long long))
    cdef int* touch_nodes = <int*> malloc(n * sizeof(int))
    cdef double* jsum = <double*> calloc(n, sizeof(double))
    cdef double* ecnt = <double*> calloc(n, sizeof(double))
    cdef signed char* lab_seen = <signed char*> calloc(n, 1)
    cdef int* lab_list = <int*> malloc(n * sizeof(int))
    cdef int* tie_list = <int*> malloc(n * sizeof(int))
    if (cnt == NULL or touch_nodes == NULL or jsum == NULL or ecnt == NULL
            or lab_seen == NULL or lab_list == NULL or tie_list == NULL):
        free(cnt); free(touch_nodes); free(jsum); free(ecnt)
        free(lab_seen); free(lab_list); free(tie_list)
        raise MemoryError

    cdef int changed = 0
    cdef int pos, i, cur, t, lt, nt, e, e2, v, u, q, L, key, pick
    cdef long long c, denom
    cdef double a, jv, mean_j, score, best, deg_i
    try:
        with nogil:
            for pos in range(n):
                i = orderv[pos]
                cur = lab[i]
                deg_i = ptr[i + 1] - ptr[i]
                # common-neighbor counts over the 2-hop neighborhood
                t = 0
                for e in range(ptr[i], ptr[i + 1]):
                    v = idx[e]
                    for e2 in range(ptr[v], ptr[v + 1]):
                        u = idx[e2]
                        if u == i:
                            continue
                        if cnt[u] == 0:
                            touch_nodes[t] = u
                            t += 1
                        cnt[u] += 1
                # ascending node order keeps float accumulation bitwise
                # aligned with the pure backend
                qsort(touch_nodes, t, sizeof(int), _cmp_int)
                # per-label Jaccard sums and direct edge counts
                lt = 0
                for q in range(t):
                    u = touch_nodes[q]
                    c = cnt[u]
                    jv = c / (deg_i + (ptr[u + 1] - ptr[u]) - c)
                    L = lab[u]
                    if not lab_seen[L]:
                        lab_seen[L] = 1
                        lab_list[lt] = L
                        lt += 1
                        jsum[L] = 0.0
                        ecnt[L] = 0.0
                    jsum[L] += jv
                for e in range(ptr[i], ptr[i + 1]):
                    L = lab[idx[e]]
                    if not lab_seen[L]:
                        lab_seen[L] = 1
                        lab_list[lt] = L
                        lt += 1
                        jsum[L] = 0.0
                        ecnt[L] = 0.0
                    ecnt[L] += 1.0
                if not lab_seen[cur]:
                    lab_seen[cur] = 1
                    lab_list[lt] = cur
                    lt += 1
                    jsum[cur] = 0.0
                    ecnt[cur] = 0.0
                # ascending label order keeps tie sets aligned with the
                # pure backend
                for q in range(1, lt):
                    key = lab_list[q]
                    v = q - 1
                    while v >= 0 and lab_list[v] > key:
                        lab_list[v + 1] = lab_list[v]
                        v -= 1
                    lab_list[v + 1] = key
                a = al[i]
                best = -1.0
                nt = 0
                for q in range(lt):
                    L = lab_list[q]
                    denom = size[L] - (1 if L == cur else 0)
                    mean_j = jsum[L] / denom if denom > 0 else 0.0
                    score = a * ecnt[L] + (1.0 - a) * mean_j
                    if score > best + 1e-12:
                        best = score
                        tie_list[0] = L
                        nt = 1
                    elif score >= best - 1e-12:
                        tie_list[nt] = L
                        nt += 1
                q = <int> (tie[pos] * nt)
                if q >= nt:
                    q = nt - 1
                pick = tie_list[q] if nt > 0 else cur
                if pick != cur:
                    lab[i] = pick
                    size[cur] -= 1
                    size[pick] += 1
                    changed += 1
                for q in range(t):
                    cnt[touch_nodes[q]] = 0
                for q in range(lt):
                    lab_seen[lab_list[q]] = 0
    finally:
        free(cnt)
        free(touch_nodes)
        free(jsum)
        free(ecnt)
        free(lab_seen)
        free(lab_list)
        free(tie_list)
    return changed
