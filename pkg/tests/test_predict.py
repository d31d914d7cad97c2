import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from depnet import predict
from depnet.network import Partition

from conftest import net_from_edges
from oracles import jaccard_table, random_digraph


def clique_per_package(k=4, size=5):
    """k disjoint cliques, one package each; module partition == packages."""
    edges = []
    packages = []
    for c in range(k):
        base = c * size
        for i in range(base, base + size):
            packages.append((f"pkg{c}",))
            for j in range(i + 1, base + size):
                edges.append((i, j))
    n = k * size
    net = net_from_edges(n, edges, packages=packages)
    labels = [c for c in range(k) for _ in range(size)]
    return net, Partition.from_labels(labels)


class TestJaccard:
    def test_identical_neighborhoods(self):
        # 0 and 1 both point at 2,3,4 and nothing else
        edges = [(0, t) for t in (2, 3, 4)] + [(1, t) for t in (2, 3, 4)]
        net = net_from_edges(5, edges)
        assert predict.jaccard(net, 0, 1) == 1.0

    def test_partial_overlap(self):
        # Γ0 = {2, 3}, Γ1 = {3, 4} -> 1/3
        edges = [(0, 2), (0, 3), (1, 3), (1, 4)]
        net = net_from_edges(5, edges)
        assert predict.jaccard(net, 0, 1) == pytest.approx(1 / 3)

    def test_disjoint_neighborhoods(self):
        edges = [(0, 2), (1, 3)]
        net = net_from_edges(4, edges)
        assert predict.jaccard(net, 0, 1) == 0.0

    def test_matches_set_enumeration_oracle(self, rng):
        for _ in range(10):
            n, edges = random_digraph(rng, max_n=20)
            net = net_from_edges(n, edges)
            table = jaccard_table(n, edges)
            for i in range(n):
                for j in range(n):
                    if i != j:
                        assert predict.jaccard(net, i, j) == pytest.approx(table[i][j])


class TestPredictPackages:
    def test_unanimous_module_vote(self):
        # 5-node module, 4 share a package, all neighborhoods identical
        # (every node points at the two external anchors)
        edges = []
        for v in range(5):
            edges += [(v, 5), (v, 6)]
        edges += [(5, 6)]
        packages = [("x",)] * 4 + [("y",), ("z",), ("z",)]
        net = net_from_edges(7, edges, packages=packages)
        part = Partition.from_labels([0, 0, 0, 0, 0, 1, 1])
        preds, _ = predict.predict_packages(net, part)
        assert preds[4].predicted == ("x",)

    def test_perfect_recovery_on_clique_per_package(self):
        net, part = clique_per_package()
        preds, report = predict.predict_packages(net, part)
        assert report.ca_bottom == 1.0
        assert all(not p.fallback for p in preds)

    def test_singleton_module_falls_back_to_majority(self):
        edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
        packages = [("a",), ("a",), ("a",), ("b",)]
        net = net_from_edges(4, edges, packages=packages)
        part = Partition.from_labels([0, 0, 0, 1])
        preds, report = predict.predict_packages(net, part)
        assert preds[3].fallback
        assert preds[3].predicted == ("a",)
        assert report.fallback_count == 1

    def test_per_level_monotone_toward_root(self, rng):
        for _ in range(10):
            n, edges = random_digraph(rng, max_n=20)
            pkgs = []
            for v in range(n):
                depth = rng.randint(1, 4)
                pkgs.append(tuple(f"p{rng.randrange(2)}" for _ in range(depth)))
            net = net_from_edges(n, edges, packages=pkgs)
            part = Partition.from_labels([rng.randrange(3) for _ in range(n)])
            _, report = predict.predict_packages(net, part)
            levels = sorted(report.ca_per_level)
            for shallow, deep in zip(levels, levels[1:]):
                assert report.ca_per_level[shallow] >= report.ca_per_level[deep]
            assert report.l_max == max(len(p) for p in pkgs)
            assert report.l_mean == pytest.approx(sum(len(p) for p in pkgs) / n)

    def test_level_one_perfect_when_shared_root(self):
        packages = [("app", "a"), ("app", "b"), ("app", "c"), ("app", "a")]
        net = net_from_edges(4, [(0, 1), (1, 2), (2, 3)], packages=packages)
        part = Partition.from_labels([0, 0, 1, 1])
        _, report = predict.predict_packages(net, part)
        assert report.ca_per_level[1] == 1.0

    def test_requires_annotations(self):
        net = net_from_edges(2, [(0, 1)])
        with pytest.raises(ValueError):
            predict.predict_packages(net, Partition((0, 0)))


class TestArgmaxInvariance:
    @given(
        weights=st.lists(
            st.floats(min_value=0, max_value=1, allow_nan=False), min_size=2, max_size=6
        ),
        scale_pow=st.integers(min_value=-30, max_value=30),
    )
    def test_rescaling_never_changes_the_pick(self, weights, scale_pow):
        scale = 2.0 ** scale_pow  # exact under IEEE754: argmax provably stable
        scores = {(f"p{i}",): w for i, w in enumerate(weights)}
        scaled = {k: v * scale for k, v in scores.items()}
        freq = Counter({k: 1 for k in scores})
        assert predict._argmax_package(scores, freq) == predict._argmax_package(scaled, freq)
