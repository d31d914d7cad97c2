"""Node-level influence and vulnerability metrics.

Degree centrality, harmonic closeness over directed distances, Brandes
betweenness, and the hub/seed rankings derived from them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import betweenness_all, distance_stats_all
from .network import DependencyNetwork, Partition
from .metrics import clustering_sv, clustering_ws


@dataclass(frozen=True)
class NodeMetrics:
    node: int
    name: str
    k_in: int
    k_out: int
    dc: float
    cc: float
    bc: float
    c_ws: float
    c_sv: float
    module: Optional[int] = None


def degree_centrality(net: DependencyNetwork) -> np.ndarray:
    """dc_i = k_i / (n-1) with k_i the total number of incident links.

    On a 2-node network the value exceeds 1 (k counts both link
    directions); it is reported as-is with a warning since the formula is
    fixed.
    """
    if net.n < 2:
        raise ValueError("degree centrality needs n >= 2")
    dc = net.degrees() / (net.n - 1)
    if dc.max() > 1.0:
        warnings.warn(
            "degree centrality above 1 on a degenerate (tiny) network",
            stacklevel=2,
        )
    return dc


def harmonic_closeness(net: DependencyNetwork, jobs: int = 1) -> np.ndarray:
    """cc_i = (1/(n-1)) * sum over j != i of 1/d'(i,j), directed distances;
    unreachable targets contribute 0."""
    indptr, indices = net.out_csr
    _, _, invs = distance_stats_all(indptr, indices, net.n, jobs=jobs)
    return invs / (net.n - 1)


def betweenness(net: DependencyNetwork, undirected: bool = False, jobs: int = 1) -> np.ndarray:
    """Fraction of shortest paths through each node, endpoints excluded,
    split equally across equal-length paths; normalized by (n-1)(n-2)."""
    indptr, indices = net.und_csr if undirected else net.out_csr
    raw = betweenness_all(indptr, indices, net.n, jobs=jobs)
    norm = (net.n - 1) * (net.n - 2)
    return raw / norm if norm else raw


def _ranked(names, primary, top, extras):
    order = sorted(range(len(names)), key=lambda i: (-primary[i], names[i]))
    rows = []
    for i in order[: min(top, len(names))]:
        rows.append((names[i],) + tuple(col[i] for col in extras))
    return rows


def rank_hubs(net: DependencyNetwork, top: int = 10):
    """Top nodes by in-degree (most reused) and by out-degree (most
    complex); each row is (name, k_in, k_out). Ties break by name."""
    k_in = net.in_degrees().tolist()
    k_out = net.out_degrees().tolist()
    by_in = _ranked(net.names, k_in, top, (k_in, k_out))
    by_out = _ranked(net.names, k_out, top, (k_in, k_out))
    return by_in, by_out


def rank_seeds(net: DependencyNetwork, top: int = 10, jobs: int = 1):
    """Top nodes by harmonic closeness (fault-exposed) and by betweenness
    (fault-spreading); each row is (name, cc, bc)."""
    cc = harmonic_closeness(net, jobs=jobs).tolist()
    bc = betweenness(net, jobs=jobs).tolist()
    by_cc = _ranked(net.names, cc, top, (cc, bc))
    by_bc = _ranked(net.names, bc, top, (cc, bc))
    return by_cc, by_bc


def node_metrics(
    net: DependencyNetwork,
    partition: Optional[Partition] = None,
    jobs: int = 1,
) -> list[NodeMetrics]:
    """Per-node record of every centrality plus clustering coefficients."""
    k_in = net.in_degrees()
    k_out = net.out_degrees()
    dc = degree_centrality(net)
    cc = harmonic_closeness(net, jobs=jobs)
    bc = betweenness(net, jobs=jobs)
    _, c_ws = clustering_ws(net)
    _, c_sv = clustering_sv(net)
    rows = []
    for i, name in enumerate(net.names):
        rows.append(
            NodeMetrics(
                node=i,
                name=name,
                k_in=int(k_in[i]),
                k_out=int(k_out[i]),
                dc=float(dc[i]),
                cc=float(cc[i]),
                bc=float(bc[i]),
                c_ws=float(c_ws[i]),
                c_sv=float(c_sv[i]),
                module=partition.assignment[i] if partition else None,
            )
        )
    return rows
