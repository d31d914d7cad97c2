"""Pure-NumPy fallback kernels.

Level-synchronous re-implementations of the per-source BFS family with the
same signatures as the compiled ``depnet._speedups`` module. Selected at
import time when the extension is unavailable or DEPNET_PURE is set.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "pure"
SUPPORTS_THREADS = False


def _gather(indptr, indices, frontier):
    """Flatten the out-slots of every frontier vertex.

    Returns (rep, neigh): rep[p] is the frontier vertex owning slot p,
    neigh[p] the vertex that slot points to.
    """
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, dtype=indices.dtype)
        return empty, empty
    cum = np.concatenate(([0], np.cumsum(counts)[:-1]))
    pos = np.arange(total, dtype=np.int64) - np.repeat(cum, counts) + np.repeat(starts, counts)
    return np.repeat(frontier, counts), indices[pos]


def bfs_distances(indptr, indices, n, source):
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int32)
    d = 0
    while frontier.size:
        _, neigh = _gather(indptr, indices, frontier)
        if neigh.size == 0:
            break
        new = neigh[dist[neigh] < 0]
        if new.size == 0:
            break
        new = np.unique(new)
        d += 1
        dist[new] = d
        frontier = new.astype(np.int32)
    return dist


def distance_stats(indptr, indices, n, lo, hi):
    """Per-source (sum of finite distances, reachable count, sum of 1/d).

    The source itself is excluded from all three accumulators.
    """
    count = hi - lo
    sums = np.zeros(count, dtype=np.float64)
    cnts = np.zeros(count, dtype=np.int64)
    invs = np.zeros(count, dtype=np.float64)
    for offset, s in enumerate(range(lo, hi)):
        dist = bfs_distances(indptr, indices, n, s)
        finite = dist > 0
        d = dist[finite].astype(np.float64)
        sums[offset] = d.sum()
        cnts[offset] = d.size
        invs[offset] = (1.0 / d).sum() if d.size else 0.0
    return sums, cnts, invs


def _bfs_levels(indptr, indices, n, source):
    """BFS recording per-level frontiers, distances and path counts."""
    dist = np.full(n, -1, dtype=np.int32)
    sigma = np.zeros(n, dtype=np.float64)
    dist[source] = 0
    sigma[source] = 1.0
    frontiers = [np.array([source], dtype=np.int32)]
    d = 0
    while True:
        rep, neigh = _gather(indptr, indices, frontiers[-1])
        if neigh.size == 0:
            break
        fresh = dist[neigh] < 0
        new = np.unique(neigh[fresh])
        if new.size:
            dist[new] = d + 1
        on_dag = dist[neigh] == d + 1
        if on_dag.any():
            np.add.at(sigma, neigh[on_dag], sigma[rep[on_dag]])
        if new.size == 0:
            break
        frontiers.append(new.astype(np.int32))
        d += 1
    return dist, sigma, frontiers


def betweenness_partial(indptr, indices, n, lo, hi):
    """Brandes accumulation for sources in [lo, hi); endpoints excluded."""
    bc = np.zeros(n, dtype=np.float64)
    for s in range(lo, hi):
        dist, sigma, frontiers = _bfs_levels(indptr, indices, n, s)
        delta = np.zeros(n, dtype=np.float64)
        for d in range(len(frontiers) - 2, -1, -1):
            rep, neigh = _gather(indptr, indices, frontiers[d])
            if neigh.size == 0:
                continue
            on_dag = dist[neigh] == d + 1
            if not on_dag.any():
                continue
            v = rep[on_dag]
            w = neigh[on_dag]
            np.add.at(delta, v, sigma[v] / sigma[w] * (1.0 + delta[w]))
        delta[s] = 0.0
        bc += delta
    return bc


def triangle_counts(indptr, indices, n):
    """Triangles through each node of an undirected simple CSR graph."""
    tri = np.zeros(n, dtype=np.int64)
    for i in range(n):
        neigh = indices[indptr[i]:indptr[i + 1]]
        if neigh.size < 2:
            continue
        _, two_hop = _gather(indptr, indices, neigh)
        cnt = np.bincount(two_hop, minlength=n)
        tri[i] = int(cnt[neigh].sum()) // 2
    return tri


def neighbor_intersections(indptr, indices, n, node):
    """Common-neighbor counts |Γ(node) ∩ Γ(u)| for every u ≠ node with a
    non-empty intersection. Returns (nodes, counts)."""
    neigh = indices[indptr[node]:indptr[node + 1]]
    if neigh.size == 0:
        return np.empty(0, dtype=np.int32), np.empty(0, dtype=np.int64)
    _, two_hop = _gather(indptr, indices, neigh)
    cnt = np.bincount(two_hop, minlength=n)
    cnt[node] = 0
    hits = np.flatnonzero(cnt)
    return hits.astype(np.int32), cnt[hits].astype(np.int64)


def propagation_sweep(indptr, indices, labels, sizes, alpha, order, tie_rand):
    """One asynchronous sweep of mixed edge/pattern label propagation.

    Each node (visited in ``order``) adopts the label maximizing
    alpha[i] * (#neighbors with label) + (1-alpha[i]) * (mean Jaccard
    similarity to the label's current members). Ties break uniformly via
    the pre-drawn tie_rand[i]. labels and sizes are updated in place;
    returns the number of label changes.
    """
    n = len(labels)
    degrees = np.diff(indptr)
    changed = 0
    for idx in range(n):
        i = int(order[idx])
        cur = int(labels[i])
        neigh = indices[indptr[i]:indptr[i + 1]]
        hits, counts = neighbor_intersections(indptr, indices, n, i)
        cand: dict[int, list[float]] = {}
        if hits.size:
            jac = counts / (degrees[i] + degrees[hits] - counts)
            for u, jv in zip(hits.tolist(), jac.tolist()):
                lab = int(labels[u])
                entry = cand.setdefault(lab, [0.0, 0.0])
                entry[1] += jv
        for v in neigh.tolist():
            lab = int(labels[v])
            entry = cand.setdefault(lab, [0.0, 0.0])
            entry[0] += 1.0
        cand.setdefault(cur, [0.0, 0.0])
        a = float(alpha[i])
        best_score = -1.0
        best_labels: list[int] = []
        for lab in sorted(cand):
            edge_cnt, jsum = cand[lab]
            denom = sizes[lab] - (1 if lab == cur else 0)
            mean_j = jsum / denom if denom > 0 else 0.0
            score = a * edge_cnt + (1.0 - a) * mean_j
            if score > best_score + 1e-12:
                best_score = score
                best_labels = [lab]
            elif score >= best_score - 1e-12:
                best_labels.append(lab)
        pick = best_labels[min(int(tie_rand[idx] * len(best_labels)), len(best_labels) - 1)]
        if pick != cur:
            labels[i] = pick
            sizes[cur] -= 1
            sizes[pick] += 1
            changed += 1
    return changed
