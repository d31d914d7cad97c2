"""Directed dependency-network core: node/link storage, components, BFS.

The network is immutable after construction; every analysis module reads
the CSR adjacency arrays built here. Structural invariants (no self-loops,
no duplicate ordered pairs, no isolated nodes) are enforced up front so
downstream metrics never have to re-check them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import backend

UNREACHABLE = -1


class NetworkInvariantError(ValueError):
    """A network violated one of its structural invariants."""


class DependencyKind(str, enum.Enum):
    INHERITANCE = "Inheritance"
    PARAMETER = "Parameter"
    RETURN = "Return"
    FIELD = "Field"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Build (indptr, indices) for edges already sorted by (src, dst)."""
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int32, copy=True)


class DependencyNetwork:
    """Directed simple graph of classes with typed dependency links.

    Nodes are dense integer ids into ``names``; a directed link (i, j)
    means node i depends on node j. Each link optionally carries the set
    of :class:`DependencyKind` values that produced it.
    """

    def __init__(
        self,
        names: Sequence[str],
        edges: Iterable[tuple[int, int]],
        kinds: Optional[Sequence[Iterable[DependencyKind]]] = None,
        packages: Optional[Sequence[Optional[tuple[str, ...]]]] = None,
    ):
        self._names = tuple(names)
        n = len(self._names)
        if len(set(self._names)) != n:
            raise NetworkInvariantError("node names must be unique")

        pairs = [(int(i), int(j)) for i, j in edges]
        kind_sets: Optional[list[frozenset[DependencyKind]]] = None
        if kinds is not None:
            kind_sets = [frozenset(DependencyKind(k) for k in ks) for ks in kinds]
            if len(kind_sets) != len(pairs):
                raise NetworkInvariantError("kinds must align with edges")
        order = sorted(range(len(pairs)), key=lambda idx: pairs[idx])
        pairs = [pairs[idx] for idx in order]
        if kind_sets is not None:
            kind_sets = [kind_sets[idx] for idx in order]

        for i, j in pairs:
            if i == j:
                raise NetworkInvariantError(f"self-loop on node {i} ({self._names[i]})")
            if not (0 <= i < n and 0 <= j < n):
                raise NetworkInvariantError(f"edge ({i}, {j}) out of range for n={n}")
        for a, b in zip(pairs, pairs[1:]):
            if a == b:
                raise NetworkInvariantError(f"duplicate link {a}")
        if kind_sets is not None:
            for pair, ks in zip(pairs, kind_sets):
                if not ks:
                    raise NetworkInvariantError(f"empty kind set on link {pair}")

        src = np.fromiter((p[0] for p in pairs), dtype=np.int32, count=len(pairs))
        dst = np.fromiter((p[1] for p in pairs), dtype=np.int32, count=len(pairs))
        touched = np.zeros(n, dtype=bool)
        touched[src] = True
        touched[dst] = True
        if not touched.all():
            isolated = [self._names[i] for i in np.flatnonzero(~touched)[:5]]
            raise NetworkInvariantError(f"isolated nodes present: {isolated}")

        self._src = src
        self._dst = dst
        self._kinds = tuple(kind_sets) if kind_sets is not None else None
        if packages is not None:
            if len(packages) != n:
                raise NetworkInvariantError("packages must align with names")
            self._packages = tuple(
                tuple(p) if p is not None else None for p in packages
            )
        else:
            self._packages = None

        self._name_to_id = {name: i for i, name in enumerate(self._names)}
        self._out = _csr(n, src, dst)
        rorder = np.lexsort((src, dst))
        self._in = _csr(n, dst[rorder], src[rorder])
        # undirected simplification: union of both directions, deduplicated
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        und = np.unique(np.stack([lo, hi], axis=1), axis=0) if len(pairs) else np.empty((0, 2), np.int32)
        both = np.concatenate([und, und[:, ::-1]]) if und.size else und
        if both.size:
            uorder = np.lexsort((both[:, 1], both[:, 0]))
            both = both[uorder]
            self._und = _csr(n, both[:, 0].astype(np.int32), both[:, 1].astype(np.int32))
        else:
            self._und = _csr(n, np.empty(0, np.int32), np.empty(0, np.int32))
        self._und_m = len(und)

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._names)

    @property
    def m(self) -> int:
        return len(self._src)

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def packages(self) -> Optional[tuple[Optional[tuple[str, ...]], ...]]:
        return self._packages

    @property
    def edge_kinds(self) -> Optional[tuple[frozenset[DependencyKind], ...]]:
        return self._kinds

    @property
    def average_degree(self) -> float:
        """k = 2m/n, the average number of incident links."""
        return 2.0 * self.m / self.n if self.n else 0.0

    def id_of(self, name: str) -> int:
        return self._name_to_id[name]

    def edge_pairs(self) -> list[tuple[int, int]]:
        return list(zip(self._src.tolist(), self._dst.tolist()))

    # -- adjacency -------------------------------------------------------

    @property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return self._out

    @property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return self._in

    @property
    def und_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of the undirected simplification (each pair stored both ways)."""
        return self._und

    @property
    def und_m(self) -> int:
        """Number of undirected edges after simplification."""
        return self._und_m

    def out_neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self._out
        return indices[indptr[i]:indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self._in
        return indices[indptr[i]:indptr[i + 1]]

    def neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self._und
        return indices[indptr[i]:indptr[i + 1]]

    def out_degrees(self) -> np.ndarray:
        indptr, _ = self._out
        return np.diff(indptr)

    def in_degrees(self) -> np.ndarray:
        indptr, _ = self._in
        return np.diff(indptr)

    def degrees(self) -> np.ndarray:
        """Total incident links per node: k_i = k_i_in + k_i_out."""
        return self.in_degrees() + self.out_degrees()

    def und_degrees(self) -> np.ndarray:
        indptr, _ = self._und
        return np.diff(indptr)

    def __repr__(self) -> str:
        return f"DependencyNetwork(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class DistanceField:
    """Hop counts from one source; UNREACHABLE (-1) marks unreachable nodes."""

    source: int
    dist: np.ndarray

    def reachable(self) -> np.ndarray:
        return self.dist >= 0


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to exactly one module.

    Module ids are dense 0..module_count-1 with no empty modules.
    """

    assignment: tuple[int, ...]

    def __post_init__(self):
        if not self.assignment:
            raise NetworkInvariantError("empty partition")
        seen = sorted(set(self.assignment))
        if seen != list(range(len(seen))):
            raise NetworkInvariantError("module ids must be dense 0..k-1")

    @classmethod
    def from_labels(cls, labels: Iterable[int]) -> "Partition":
        """Canonicalize arbitrary labels to dense ids by first appearance."""
        remap: dict[int, int] = {}
        out = []
        for lab in labels:
            lab = int(lab)
            if lab not in remap:
                remap[lab] = len(remap)
            out.append(remap[lab])
        return cls(tuple(out))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def module_count(self) -> int:
        return max(self.assignment) + 1

    def sizes(self) -> list[int]:
        counts = [0] * self.module_count
        for mid in self.assignment:
            counts[mid] += 1
        return counts

    def members(self, mid: int) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.assignment) if m == mid)

    def refines(self, coarser: "Partition") -> bool:
        """True when every module of self lies inside one module of coarser."""
        if self.n != coarser.n:
            return False
        image: dict[int, int] = {}
        for node, mid in enumerate(self.assignment):
            target = coarser.assignment[node]
            if image.setdefault(mid, target) != target:
                return False
        return True


def weakly_connected_components(net: DependencyNetwork) -> tuple[Partition, float]:
    """Partition nodes into weak components; also return the LCC fraction."""
    indptr, indices = net.und_csr
    n = net.n
    comp = np.full(n, -1, dtype=np.int64)
    cid = 0
    for seed in range(n):
        if comp[seed] >= 0:
            continue
        comp[seed] = cid
        stack = [seed]
        while stack:
            v = stack.pop()
            for w in indices[indptr[v]:indptr[v + 1]]:
                if comp[w] < 0:
                    comp[w] = cid
                    stack.append(int(w))
        cid += 1
    sizes = np.bincount(comp, minlength=cid)
    lcc_fraction = float(sizes.max()) / n
    return Partition.from_labels(comp.tolist()), lcc_fraction


def bfs_directed(net: DependencyNetwork, source: int) -> DistanceField:
    """Exact hop counts from source following out-links only."""
    if not 0 <= source < net.n:
        raise ValueError(f"source {source} out of range")
    indptr, indices = net.out_csr
    return DistanceField(source, backend.bfs_distances(indptr, indices, net.n, source))


def bfs_undirected(net: DependencyNetwork, source: int) -> DistanceField:
    """Exact hop counts from source following links in either direction."""
    if not 0 <= source < net.n:
        raise ValueError(f"source {source} out of range")
    indptr, indices = net.und_csr
    return DistanceField(source, backend.bfs_distances(indptr, indices, net.n, source))


def reduce_to_lcc(net: DependencyNetwork) -> DependencyNetwork:
    """Induced subgraph on the largest weak component, re-indexed.

    Ties between equal-size components break toward the component holding
    the smallest node id, so reduction is deterministic.
    """
    partition, _ = weakly_connected_components(net)
    sizes = partition.sizes()
    largest = max(range(len(sizes)), key=lambda c: (sizes[c], -c))
    keep = [i for i, c in enumerate(partition.assignment) if c == largest]
    return induced_subnetwork(net, keep)


def induced_subnetwork(net: DependencyNetwork, nodes: Sequence[int]) -> DependencyNetwork:
    """Subgraph on ``nodes`` (relative order preserved). May raise if the
    induced graph leaves some node isolated."""
    keep = list(nodes)
    old_to_new = {old: new for new, old in enumerate(keep)}
    names = [net.names[i] for i in keep]
    edges = []
    kinds = [] if net.edge_kinds is not None else None
    for idx, (i, j) in enumerate(net.edge_pairs()):
        if i in old_to_new and j in old_to_new:
            edges.append((old_to_new[i], old_to_new[j]))
            if kinds is not None:
                kinds.append(net.edge_kinds[idx])
    packages = None
    if net.packages is not None:
        packages = [net.packages[i] for i in keep]
    return DependencyNetwork(names, edges, kinds=kinds, packages=packages)
