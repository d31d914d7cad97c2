import math
import random

import pytest

from depnet import control

from conftest import net_from_edges
from oracles import max_matching_exhaustive, random_digraph


class TestDriverNodes:
    def test_directed_chain(self):
        net = net_from_edges(3, [(0, 1), (1, 2)])
        report = control.driver_nodes(net)
        assert report.matching_size == 2
        assert report.n_d == 1
        assert report.n_d == max(1, 3 - max_matching_exhaustive(3, [(0, 1), (1, 2)]))

    def test_directed_star(self):
        edges = [(0, j) for j in range(1, 4)]
        report = control.driver_nodes(net_from_edges(4, edges))
        assert report.matching_size == 1
        assert report.n_d == 3
        assert max(1, 4 - max_matching_exhaustive(4, edges)) == 3

    def test_fully_matched_needs_one_driver(self):
        net = net_from_edges(2, [(0, 1), (1, 0)])
        report = control.driver_nodes(net)
        assert report.matching_size == 2
        assert report.n_d == 1
        assert report.fraction == 0.5

    def test_matches_exhaustive_oracle(self, rng):
        for _ in range(60):
            n, edges = random_digraph(rng, max_n=8)
            report = control.driver_nodes(net_from_edges(n, edges))
            want = max_matching_exhaustive(n, edges)
            assert report.matching_size == want
            assert report.n_d == max(1, n - want)

    def test_drivers_are_unmatched_in_side(self, rng):
        for _ in range(20):
            n, edges = random_digraph(rng)
            report = control.driver_nodes(net_from_edges(n, edges))
            if n - report.matching_size >= 1:
                assert len(report.drivers) == report.n_d
            assert 0.0 < report.fraction <= 1.0

    def test_adding_link_never_increases_drivers(self, rng):
        for _ in range(25):
            n, edges = random_digraph(rng)
            before = control.driver_nodes(net_from_edges(n, edges)).n_d
            absent = [
                (i, j)
                for i in range(n)
                for j in range(n)
                if i != j and (i, j) not in set(edges)
            ]
            if not absent:
                continue
            extra = rng.choice(absent)
            after = control.driver_nodes(net_from_edges(n, edges + [extra])).n_d
            assert after <= before

    def test_drivers_avoid_hubs_statistically(self):
        from synthetic import scale_free_digraph

        net = scale_free_digraph(400, 1600, seed=5)
        report = control.driver_nodes(net)
        k_in = net.in_degrees()
        driver_mean = sum(int(k_in[v]) for v in report.drivers) / len(report.drivers)
        assert driver_mean <= k_in.mean()


class TestClosedFormEstimate:
    def test_java_scale_value(self):
        assert control.controllability_estimate(13.26, 2.4) == pytest.approx(0.150, abs=1e-3)

    def test_gamma3_k4(self):
        assert control.controllability_estimate(4.0, 3.0) == pytest.approx(math.exp(-1), abs=1e-12)

    def test_limit_gamma_to_two(self):
        assert control.controllability_estimate(9.0, 2.0000001) == pytest.approx(1.0, abs=1e-6)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            control.controllability_estimate(5.0, 2.0)
        with pytest.raises(ValueError):
            control.controllability_estimate(5.0, 1.5)
        with pytest.raises(ValueError):
            control.controllability_estimate(0.0, 2.5)

    def test_estimate_attached_to_report(self):
        net = net_from_edges(3, [(0, 1), (1, 2)])
        report = control.driver_nodes(net, gamma=2.5)
        assert report.estimate == pytest.approx(
            control.controllability_estimate(net.average_degree, 2.5)
        )
        assert control.driver_nodes(net, gamma=None).estimate is None
