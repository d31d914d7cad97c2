"""Macroscopic network statistics.

Degree distributions and averages, discrete power-law fitting (MLE with a
KS-minimizing lower cutoff), transitivity and degree-corrected clustering,
average undirected distance, directed flow efficiency, and Erdos-Renyi
baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special

from ._kernels import backend, distance_stats_all
from .network import DependencyNetwork, reduce_to_lcc


class DegenerateFitError(ValueError):
    """Samples cannot support a power-law fit (e.g. all values equal)."""


@dataclass(frozen=True)
class DegreeStats:
    k: float
    k_in_mean: float
    k_out_mean: float
    p_k: dict[int, int]
    p_k_in: dict[int, int]
    p_k_out: dict[int, int]


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    k_min: int
    ks_distance: float
    tail_fraction: float


@dataclass(frozen=True)
class ErBaselines:
    c_er: float
    l_er: float
    l_er_approx: float


@dataclass(frozen=True)
class NetworkStats:
    """Aggregate record mirroring one row of the survey tables."""

    n: int
    m: int
    k: float
    k_in_mean: float
    k_out_mean: float
    lcc_fraction: float
    gamma: Optional[float]
    gamma_k_min: Optional[int]
    gamma_ks: Optional[float]
    c: float
    d: float
    c_er: float
    l: float
    e: float
    l_er: float
    l_er_approx: float
    n_d_fraction: Optional[float] = None
    n_d_estimate: Optional[float] = None


def _histogram(values: np.ndarray) -> dict[int, int]:
    uniq, counts = np.unique(values, return_counts=True)
    return {int(u): int(c) for u, c in zip(uniq, counts)}


def degree_stats(net: DependencyNetwork) -> DegreeStats:
    k_in = net.in_degrees()
    k_out = net.out_degrees()
    return DegreeStats(
        k=float((k_in + k_out).mean()),
        k_in_mean=float(k_in.mean()),
        k_out_mean=float(k_out.mean()),
        p_k=_histogram(k_in + k_out),
        p_k_in=_histogram(k_in),
        p_k_out=_histogram(k_out),
    )


# -- discrete power-law fitting ------------------------------------------


def _mle_exponents(cands: np.ndarray, n_tail: np.ndarray, log_sums: np.ndarray,
                   lo: float = 1.000001, hi: float = 12.0) -> np.ndarray:
    """Vectorized ternary search for the per-candidate MLE exponent.

    Minimizes n_tail*ln(zeta(a, k_min)) + a*sum(ln x) over a, which is the
    negated discrete power-law log-likelihood (convex in a).
    """
    lo_v = np.full(len(cands), lo)
    hi_v = np.full(len(cands), hi)
    q = cands.astype(np.float64)
    for _ in range(70):
        m1 = lo_v + (hi_v - lo_v) / 3.0
        m2 = hi_v - (hi_v - lo_v) / 3.0
        f1 = n_tail * np.log(special.zeta(m1, q)) + m1 * log_sums
        f2 = n_tail * np.log(special.zeta(m2, q)) + m2 * log_sums
        take_left = f1 < f2
        hi_v = np.where(take_left, m2, hi_v)
        lo_v = np.where(take_left, lo_v, m1)
    return (lo_v + hi_v) / 2.0


def _ks_distance(tail: np.ndarray, k_min: int, gamma: float) -> float:
    """Max CDF gap between the empirical tail and the fitted model,
    evaluated at the observed values."""
    uniq, counts = np.unique(tail, return_counts=True)
    ecdf = np.cumsum(counts) / tail.size
    z_base = special.zeta(gamma, k_min)
    mcdf = 1.0 - special.zeta(gamma, uniq + 1.0) / z_base
    return float(np.abs(ecdf - mcdf).max())


def fit_power_law(samples: Sequence[int], k_min: Optional[int] = None) -> PowerLawFit:
    """Discrete maximum-likelihood power-law fit p_k ~ k^-gamma.

    When k_min is not given, it is chosen to minimize the KS distance
    between the empirical tail and the fitted model (smaller k_min wins
    ties). Zero samples are discarded first.
    """
    x = np.asarray(list(samples), dtype=np.int64)
    x = x[x > 0]
    if x.size < 10:
        raise ValueError(f"need at least 10 nonzero samples, got {x.size}")
    uniq = np.unique(x)
    if uniq.size < 2:
        raise DegenerateFitError("all samples equal; exponent undefined")

    if k_min is not None:
        cands = np.array([int(k_min)], dtype=np.int64)
        if (uniq >= k_min).sum() < 2:
            raise DegenerateFitError(f"fewer than two distinct values >= k_min={k_min}")
    else:
        cands = uniq[:-1]

    xs = np.sort(x)
    logs = np.log(xs.astype(np.float64))
    suffix = np.concatenate([np.cumsum(logs[::-1])[::-1], [0.0]])
    start = np.searchsorted(xs, cands, side="left")
    n_tail = (xs.size - start).astype(np.float64)
    log_sums = suffix[start]

    gammas = _mle_exponents(cands, n_tail, log_sums)
    best = None
    for c, g, s in zip(cands.tolist(), gammas.tolist(), start.tolist()):
        ks = _ks_distance(xs[s:], c, g)
        if best is None or ks < best[0] - 1e-12:
            best = (ks, c, g, xs.size - s)
    ks, kmin, gamma, ntail = best
    return PowerLawFit(
        gamma=float(gamma),
        k_min=int(kmin),
        ks_distance=float(ks),
        tail_fraction=ntail / x.size,
    )


def fit_power_law_loglog(samples: Sequence[int]) -> float:
    """Least-squares log-log fit (legacy comparability mode).

    Regresses the empirical CCDF, whose slope is 1 - gamma; the raw
    histogram is too noisy in the sparse tail to regress directly.
    """
    x = np.asarray(list(samples), dtype=np.int64)
    x = x[x > 0]
    if x.size < 10:
        raise ValueError(f"need at least 10 nonzero samples, got {x.size}")
    uniq, counts = np.unique(x, return_counts=True)
    if uniq.size < 2:
        raise DegenerateFitError("all samples equal; exponent undefined")
    ccdf = 1.0 - np.concatenate([[0.0], np.cumsum(counts)[:-1]]) / x.size
    slope, _ = np.polyfit(np.log(uniq), np.log(ccdf), 1)
    return float(1.0 - slope)


def sample_discrete_power_law(gamma: float, k_min: int, size: int, seed: int) -> np.ndarray:
    """Draw from the discrete power law p(x) ~ x^-gamma, x >= k_min, by
    inverse-CDF lookup on an explicit pmf table (exact up to float)."""
    if gamma <= 1.0:
        raise ValueError("gamma must exceed 1")
    rng = np.random.default_rng(seed)
    z = special.zeta(gamma, k_min)
    cutoff = max(1024, k_min * 2)
    while special.zeta(gamma, cutoff + 1) / z * size > 0.05:
        cutoff *= 2
    ks = np.arange(k_min, cutoff + 1, dtype=np.float64)
    cdf = np.cumsum(ks ** -gamma) / z
    u = rng.random(size)
    out = np.searchsorted(cdf, u) + k_min
    # draws beyond the table (probability < 0.05/size in total): walk the
    # exact CCDF for each
    over = np.flatnonzero(u > cdf[-1])
    for i in over:
        kk = cutoff + 1
        while special.zeta(gamma, kk + 1) / z >= 1.0 - u[i]:
            kk += 1
        out[i] = kk
    return out.astype(np.int64)


# -- clustering ------------------------------------------------------------


def clustering_ws(net: DependencyNetwork) -> tuple[float, np.ndarray]:
    """Transitivity clustering on the undirected simplification.

    c_i = triangles_i / C(deg_i, 2), defined 0 for deg_i < 2; returns
    (mean over all nodes, per-node array).
    """
    indptr, indices = net.und_csr
    deg = net.und_degrees().astype(np.float64)
    tri = backend.triangle_counts(indptr, indices, net.n).astype(np.float64)
    possible = deg * (deg - 1.0) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(possible > 0, tri / possible, 0.0)
    return float(c.mean()), c


def clustering_sv(net: DependencyNetwork) -> tuple[float, np.ndarray]:
    """Degree-corrected clustering: triangles divided by the maximum
    permitted by neighbor degrees, omega_i = floor((1/2) * sum over
    neighbors j of min(deg_j - 1, deg_i - 1))."""
    indptr, indices = net.und_csr
    n = net.n
    deg = net.und_degrees().astype(np.int64)
    tri = backend.triangle_counts(indptr, indices, n).astype(np.float64)
    rep = np.repeat(np.arange(n), np.diff(indptr))
    caps = np.minimum(deg[indices] - 1, deg[rep] - 1)
    acc = np.zeros(n, dtype=np.int64)
    np.add.at(acc, rep, caps)
    omega = acc // 2
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(omega > 0, tri / omega, 0.0)
    return float(d.mean()), d


# -- distances -------------------------------------------------------------


def avg_distance(net: DependencyNetwork, jobs: int = 1) -> float:
    """Mean undirected shortest-path length over ordered pairs of the LCC."""
    if net.n < 2:
        raise ValueError("average distance needs at least 2 nodes")
    lcc = reduce_to_lcc(net)
    indptr, indices = lcc.und_csr
    sums, cnts, _ = distance_stats_all(indptr, indices, lcc.n, jobs=jobs)
    pairs = lcc.n * (lcc.n - 1)
    assert int(cnts.sum()) == pairs, "LCC must be fully connected"
    return math.fsum(sums.tolist()) / pairs


def flow_efficiency(net: DependencyNetwork, jobs: int = 1) -> float:
    """Directed flow efficiency: mean of 1/d'(i,j) over all ordered pairs,
    counting unreachable pairs as 0."""
    indptr, indices = net.out_csr
    _, _, invs = distance_stats_all(indptr, indices, net.n, jobs=jobs)
    return math.fsum(invs.tolist()) / (net.n * (net.n - 1))


# -- Erdos-Renyi baselines --------------------------------------------------


def _avg_distance_csr(n: int, indptr: np.ndarray, indices: np.ndarray, jobs: int = 1) -> float:
    sums, cnts, _ = distance_stats_all(indptr, indices, n, jobs=jobs)
    total_pairs = int(cnts.sum())
    return math.fsum(sums.tolist()) / total_pairs if total_pairs else 0.0


def er_baselines(n: int, m: int, samples: int = 20, seed: int = 0, jobs: int = 1) -> ErBaselines:
    """Random-graph baselines for a network with n nodes and m links.

    C_er is the analytic link probability k/(n-1) with k = 2m/n; l_er is
    the sampled mean distance over `samples` undirected G(n, p) draws,
    each reduced to its largest component. The ln(n)/ln(k) approximation
    is reported alongside.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    k = 2.0 * m / n
    p = k / (n - 1)
    c_er = p
    l_er_approx = math.log(n) / math.log(k) if k > 1 else float("nan")

    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    values = []
    for _ in range(samples):
        mask = rng.random(iu.size) < p
        a = iu[mask]
        b = ju[mask]
        src = np.concatenate([a, b]).astype(np.int32)
        dst = np.concatenate([b, a]).astype(np.int32)
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int32)
        np.cumsum(counts, out=indptr[1:])
        # largest component via BFS from every unseen node
        comp = np.full(n, -1, dtype=np.int64)
        best_nodes: list[int] = []
        cid = 0
        for s in range(n):
            if comp[s] >= 0:
                continue
            comp[s] = cid
            stack = [s]
            nodes = [s]
            while stack:
                v = stack.pop()
                for w in dst[indptr[v]:indptr[v + 1]]:
                    if comp[w] < 0:
                        comp[w] = cid
                        stack.append(int(w))
                        nodes.append(int(w))
            if len(nodes) > len(best_nodes):
                best_nodes = nodes
            cid += 1
        if len(best_nodes) < 2:
            continue
        keep = np.array(sorted(best_nodes), dtype=np.int64)
        remap = np.full(n, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        emask = (remap[src] >= 0) & (remap[dst] >= 0)
        s2 = remap[src[emask]].astype(np.int32)
        d2 = remap[dst[emask]].astype(np.int32)
        order2 = np.lexsort((d2, s2))
        s2, d2 = s2[order2], d2[order2]
        counts2 = np.bincount(s2, minlength=keep.size)
        indptr2 = np.zeros(keep.size + 1, dtype=np.int32)
        np.cumsum(counts2, out=indptr2[1:])
        values.append(_avg_distance_csr(keep.size, indptr2, d2, jobs=jobs))
    l_er = float(np.mean(values)) if values else float("nan")
    return ErBaselines(c_er=c_er, l_er=l_er, l_er_approx=l_er_approx)


# -- aggregate record -------------------------------------------------------


def network_stats(
    net: DependencyNetwork,
    degree: str = "total",
    er_samples: int = 20,
    seed: int = 0,
    jobs: int = 1,
    with_control: bool = True,
) -> NetworkStats:
    """Assemble the per-network statistics row (everything the survey
    tables report). `degree` picks the sequence the exponent is fitted on:
    total (default), in, or out."""
    from . import control as control_mod
    from .network import weakly_connected_components

    deg = degree_stats(net)
    k_in = net.in_degrees()
    k_out = net.out_degrees()
    seq = {"total": k_in + k_out, "in": k_in, "out": k_out}
    if degree not in seq:
        raise ValueError(f"unknown degree selector: {degree!r}")
    try:
        fit = fit_power_law(seq[degree])
        gamma, gamma_k_min, gamma_ks = fit.gamma, fit.k_min, fit.ks_distance
    except (ValueError, DegenerateFitError):
        gamma = gamma_k_min = gamma_ks = None

    c, _ = clustering_ws(net)
    d, _ = clustering_sv(net)
    _, lcc_fraction = weakly_connected_components(net)
    baselines = er_baselines(net.n, net.m, samples=er_samples, seed=seed, jobs=jobs)

    n_d_fraction = None
    n_d_estimate = None
    if with_control:
        report = control_mod.driver_nodes(net, gamma=gamma)
        n_d_fraction = report.fraction
        n_d_estimate = report.estimate

    return NetworkStats(
        n=net.n,
        m=net.m,
        k=deg.k,
        k_in_mean=deg.k_in_mean,
        k_out_mean=deg.k_out_mean,
        lcc_fraction=lcc_fraction,
        gamma=gamma,
        gamma_k_min=gamma_k_min,
        gamma_ks=gamma_ks,
        c=c,
        d=d,
        c_er=baselines.c_er,
        l=avg_distance(net, jobs=jobs),
        e=flow_efficiency(net, jobs=jobs),
        l_er=baselines.l_er,
        l_er_approx=baselines.l_er_approx,
        n_d_fraction=n_d_fraction,
        n_d_estimate=n_d_estimate,
    )
