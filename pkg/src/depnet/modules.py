"""Mesoscopic structure: module detection, comparison, and hierarchies.

Three detectors are provided: agglomerative greedy modularity (CNM style),
asynchronous label propagation, and a mixed propagation that scores labels
by direct links and by neighborhood-pattern similarity, so disconnected
groups with common linkage patterns can share a module. Partitions are
compared with normalized mutual information.
"""

from __future__ import annotations

import heapq
import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import backend
from .metrics import clustering_ws
from .network import DependencyNetwork, NetworkInvariantError, Partition

MAX_SWEEPS = 100


@dataclass(frozen=True)
class ModuleHierarchy:
    """Nested partitions, coarsest first; each level refines the previous."""

    levels: tuple[Partition, ...]

    def __post_init__(self):
        if not self.levels:
            raise NetworkInvariantError("hierarchy needs at least one level")
        for coarse, fine in zip(self.levels, self.levels[1:]):
            if not fine.refines(coarse):
                raise NetworkInvariantError("hierarchy levels must refine")

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def bottom(self) -> Partition:
        return self.levels[-1]


def modularity(net: DependencyNetwork, partition: Partition) -> float:
    """Newman modularity of a partition on the undirected simplification."""
    if partition.n != net.n:
        raise ValueError("partition does not cover the network")
    m = net.und_m
    if m == 0:
        return 0.0
    indptr, indices = net.und_csr
    deg = net.und_degrees()
    intra = [0] * partition.module_count
    gdeg = [0] * partition.module_count
    assign = partition.assignment
    for i in range(net.n):
        gdeg[assign[i]] += int(deg[i])
        for j in indices[indptr[i]:indptr[i + 1]]:
            if j > i and assign[i] == assign[j]:
                intra[assign[i]] += 1
    return sum(
        intra[g] / m - (gdeg[g] / (2.0 * m)) ** 2
        for g in range(partition.module_count)
    )


def detect_greedy_modularity(net: DependencyNetwork) -> Partition:
    """Agglomerative modularity maximization: repeatedly merge the pair of
    modules with the largest gain until no merge helps.

    Deterministic: gain ties break toward the smallest (a, b) module-id
    pair, and merged modules keep the smaller id.
    """
    indptr, indices = net.und_csr
    n = net.n
    m = net.und_m
    deg = [int(d) for d in net.und_degrees()]
    links: list[dict[int, int]] = [dict() for _ in range(n)]
    for i in range(n):
        for j in indices[indptr[i]:indptr[i + 1]]:
            links[i][int(j)] = 1

    inv_m = 1.0 / m if m else 0.0
    inv_2m2 = 1.0 / (2.0 * m * m) if m else 0.0
    heappush = heapq.heappush
    heappop = heapq.heappop

    # entries are (-gain, a*n+b) with a < b; non-positive gains are never
    # pushed (they cannot win, and a merge that raises them re-pushes), so
    # the loop simply drains the heap
    heap = []
    for a in range(n):
        la = links[a]
        da = deg[a]
        for b in la:
            if a < b:
                dq = la[b] * inv_m - da * deg[b] * inv_2m2
                if dq > 0:
                    heap.append((-dq, a * n + b))
    heapq.heapify(heap)

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    alive = [True] * n
    while heap:
        neg_dq, packed = heappop(heap)
        a, b = divmod(packed, n)
        if not (alive[a] and alive[b]):
            continue
        la = links[a]
        if b not in la:
            continue
        dq = la[b] * inv_m - deg[a] * deg[b] * inv_2m2
        if -neg_dq != dq:
            continue  # stale entry; the refreshed one is elsewhere in the heap
        # merge b into a (a < b by construction of pushed pairs)
        alive[b] = False
        parent[b] = a
        la.pop(b)
        lb = links[b]
        lb.pop(a)
        for c, w in lb.items():
            lc = links[c]
            lc.pop(b)
            merged = la.get(c, 0) + w
            la[c] = merged
            lc[a] = merged
        lb.clear()
        deg[a] += deg[b]
        da = deg[a]
        for c, w in la.items():
            dq = w * inv_m - da * deg[c] * inv_2m2
            if dq > 0:
                heappush(heap, (-dq, (a * n + c) if a < c else (c * n + a)))

    return Partition.from_labels([find(i) for i in range(n)])


def detect_label_propagation(net: DependencyNetwork, seed: int = 0) -> Partition:
    """Asynchronous label propagation on the undirected simplification:
    random visit order, majority neighbor label, random tie-break; runs to
    stability or MAX_SWEEPS.

    A node already holding one of the maximal labels keeps it (the
    algorithm's stability criterion could never be met otherwise).
    """
    indptr, indices = net.und_csr
    n = net.n
    rng = random.Random(seed)
    labels = list(range(n))
    order = list(range(n))
    for _ in range(MAX_SWEEPS):
        rng.shuffle(order)
        changed = 0
        for i in order:
            neigh = indices[indptr[i]:indptr[i + 1]]
            if neigh.size == 0:
                continue
            counts = Counter(labels[j] for j in neigh.tolist())
            top = max(counts.values())
            ties = sorted(lab for lab, c in counts.items() if c == top)
            if labels[i] in ties:
                continue
            pick = ties[0] if len(ties) == 1 else rng.choice(ties)
            labels[i] = pick
            changed += 1
        if changed == 0:
            break
    return Partition.from_labels(labels)


def _structural_labels(
    indptr: np.ndarray,
    indices: np.ndarray,
    n: int,
    alpha: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    labels = np.arange(n, dtype=np.int32)
    sizes = np.ones(n, dtype=np.int64)
    for _ in range(MAX_SWEEPS):
        order = rng.permutation(n).astype(np.int32)
        tie = rng.random(n)
        changed = backend.propagation_sweep(indptr, indices, labels, sizes, alpha, order, tie)
        if changed == 0:
            break
    return labels


def detect_structural_modules(net: DependencyNetwork, seed: int = 0) -> Partition:
    """Mixed-score propagation: a node adopts the label maximizing
    alpha_i * (links to the label) + (1 - alpha_i) * (mean Jaccard
    similarity to the label's members), with alpha_i the node's own
    transitivity clustering. Clustered regions therefore behave like
    communities while zero-clustering nodes group by linkage pattern."""
    indptr, indices = net.und_csr
    _, alpha = clustering_ws(net)
    rng = np.random.default_rng(seed)
    labels = _structural_labels(indptr, indices, net.n, alpha, rng)
    return Partition.from_labels(labels.tolist())


def nmi(a: Partition, b: Partition) -> float:
    """Normalized mutual information 2*I(A;B)/(H(A)+H(B)) in [0, 1].

    Both-constant partitions (zero entropy on each side) compare equal and
    score 1; a constant against anything else scores 0.
    """
    if a.n != b.n:
        raise ValueError(f"partitions cover {a.n} vs {b.n} nodes")
    if Partition.from_labels(a.assignment) == Partition.from_labels(b.assignment):
        return 1.0  # identical up to relabeling; avoids last-ulp drift
    n = a.n
    pa = Counter(a.assignment)
    pb = Counter(b.assignment)
    joint = Counter(zip(a.assignment, b.assignment))
    h_a = -sum(c / n * math.log(c / n) for c in pa.values())
    h_b = -sum(c / n * math.log(c / n) for c in pb.values())
    if h_a == 0.0 and h_b == 0.0:
        return 1.0
    if h_a == 0.0 or h_b == 0.0:
        return 0.0
    info = sum(
        c / n * math.log(n * c / (pa[la] * pb[lb]))
        for (la, lb), c in joint.items()
    )
    return min(1.0, max(0.0, 2.0 * info / (h_a + h_b)))


def _induced_csr(indptr, indices, members: list[int]):
    remap = {old: new for new, old in enumerate(members)}
    srcs = []
    dsts = []
    for old in members:
        for j in indices[indptr[old]:indptr[old + 1]]:
            j = int(j)
            if j in remap:
                srcs.append(remap[old])
                dsts.append(remap[j])
    # members ascend and parent CSR rows are sorted, so (srcs, dsts) is
    # already in CSR order
    k = len(members)
    counts = np.bincount(np.array(srcs, dtype=np.int64), minlength=k) if srcs else np.zeros(k, np.int64)
    sub_ptr = np.zeros(k + 1, dtype=np.int32)
    np.cumsum(counts, out=sub_ptr[1:])
    sub_idx = np.array(dsts, dtype=np.int32)
    return sub_ptr, sub_idx


def _clustering_from_csr(indptr, indices, n: int) -> np.ndarray:
    deg = np.diff(indptr).astype(np.float64)
    tri = backend.triangle_counts(indptr, indices, n).astype(np.float64)
    possible = deg * (deg - 1.0) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(possible > 0, tri / possible, 0.0)


def build_hierarchy(net: DependencyNetwork, min_module: int = 5, seed: int = 0) -> ModuleHierarchy:
    """Recursive structural-module hierarchy, coarsest level first.

    Each module with at least min_module nodes is re-detected on its
    induced subgraph; a level is appended only when some module actually
    splits, so levels strictly refine.
    """
    indptr, indices = net.und_csr
    levels = [detect_structural_modules(net, seed=seed)]
    depth = 0
    while True:
        current = levels[-1]
        new_labels = [-1] * net.n
        next_id = 0
        split_any = False
        for mid in range(current.module_count):
            members = list(current.members(mid))
            if len(members) < min_module:
                for v in members:
                    new_labels[v] = next_id
                next_id += 1
                continue
            sub_ptr, sub_idx = _induced_csr(indptr, indices, members)
            alpha = _clustering_from_csr(sub_ptr, sub_idx, len(members))
            rng = np.random.default_rng([seed, depth, mid])
            sub = _structural_labels(sub_ptr, sub_idx, len(members), alpha, rng)
            sub_ids = {}
            for local, lab in enumerate(sub.tolist()):
                if lab not in sub_ids:
                    sub_ids[lab] = next_id
                    next_id += 1
                new_labels[members[local]] = sub_ids[lab]
            if len(sub_ids) > 1:
                split_any = True
        if not split_any:
            break
        levels.append(Partition.from_labels(new_labels))
        depth += 1
    return ModuleHierarchy(tuple(levels))


def package_partition(net: DependencyNetwork, level: Optional[int] = None) -> Partition:
    """Ground-truth partition by package path; level=i truncates paths to
    their first i segments (the bottom-most package when omitted)."""
    if net.packages is None:
        raise ValueError("network carries no package annotations")
    missing = [net.names[i] for i, p in enumerate(net.packages) if p is None]
    if missing:
        raise ValueError(f"package annotations missing for {missing[:5]}")
    if level is not None and level < 1:
        raise ValueError("level must be >= 1")
    keys = [p if level is None else p[:level] for p in net.packages]
    ids: dict[tuple[str, ...], int] = {}
    labels = []
    for key in keys:
        if key not in ids:
            ids[key] = len(ids)
        labels.append(ids[key])
    return Partition(tuple(labels))
