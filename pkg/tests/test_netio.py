import logging
import xml.etree.ElementTree as ET

import pytest

from depnet import netio
from depnet.network import DependencyKind, Partition

from conftest import net_from_edges


def nets_equal(a, b):
    return (
        a.names == b.names
        and a.edge_pairs() == b.edge_pairs()
        and a.edge_kinds == b.edge_kinds
        and a.packages == b.packages
    )


class TestEdgeList:
    def test_three_line_cycle(self, tmp_path):
        f = tmp_path / "net.tsv"
        f.write_text("a\tb\nb\tc\nc\ta\n")
        net = netio.load_edgelist(f)
        assert net.n == 3
        assert net.m == 3
        assert net.edge_pairs() == [(0, 1), (1, 2), (2, 0)]

    def test_header_line_skipped(self, tmp_path):
        f = tmp_path / "net.tsv"
        f.write_text("source\ttarget\na\tb\nb\ta\n")
        assert netio.load_edgelist(f).m == 2

    def test_self_loop_dropped_with_warning(self, tmp_path, caplog):
        f = tmp_path / "net.tsv"
        f.write_text("a\ta\na\tb\nb\ta\n")
        with caplog.at_level(logging.WARNING):
            net = netio.load_edgelist(f)
        assert net.m == 2
        assert any("self-loop" in r.message for r in caplog.records)

    def test_duplicates_merge_silently(self, tmp_path):
        f = tmp_path / "net.tsv"
        f.write_text("a\tb\tField\na\tb\tReturn\nb\ta\tParameter\n")
        net = netio.load_edgelist(f)
        assert net.m == 2
        idx = net.edge_pairs().index((0, 1))
        assert net.edge_kinds[idx] == frozenset({DependencyKind.FIELD, DependencyKind.RETURN})

    def test_malformed_line_reports_number(self, tmp_path):
        f = tmp_path / "net.tsv"
        f.write_text("a\tb\nbroken-line\n")
        with pytest.raises(netio.EdgeListFormatError, match=":2:"):
            netio.load_edgelist(f)

    def test_unknown_kind_reports_number(self, tmp_path):
        f = tmp_path / "net.tsv"
        f.write_text("a\tb\tTelepathy\n")
        with pytest.raises(netio.EdgeListFormatError, match=":1:"):
            netio.load_edgelist(f)

    def test_mixed_kind_columns_rejected(self, tmp_path):
        f = tmp_path / "net.tsv"
        f.write_text("a\tb\tField\nb\tc\n")
        with pytest.raises(netio.EdgeListFormatError, match="all edge lines or none"):
            netio.load_edgelist(f)

    def test_package_annotations(self, tmp_path):
        f = tmp_path / "net.tsv"
        f.write_text("#node a package=x.y\n#node b\na\tb\n")
        net = netio.load_edgelist(f)
        assert net.packages[net.id_of("a")] == ("x", "y")
        assert net.packages[net.id_of("b")] == ()

    def test_round_trip_identity(self, tmp_path):
        net = net_from_edges(
            4,
            [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
            names=["a.A", "a.B", "b.C", "b.D"],
            packages=[("a",), ("a",), ("b",), ("b",)],
            kinds=[["Field"], ["Return", "Parameter"], ["Inheritance"], ["Field"], ["Field"]],
        )
        path = tmp_path / "out.tsv"
        netio.save_edgelist(net, path)
        assert nets_equal(netio.load_edgelist(path), net)

    def test_round_trip_without_kinds_or_packages(self, tmp_path):
        net = net_from_edges(3, [(0, 1), (1, 2), (2, 0)])
        path = tmp_path / "out.tsv"
        netio.save_edgelist(net, path)
        assert nets_equal(netio.load_edgelist(path), net)


class TestGraphml:
    def test_structure_and_namespace(self, tmp_path):
        net = net_from_edges(
            3, [(0, 1), (1, 2)], kinds=[["Field"], ["Return"]],
            packages=[("p",), ("p",), ("q",)],
        )
        path = tmp_path / "net.graphml"
        netio.save_graphml(net, path, Partition((0, 0, 1)))
        tree = ET.parse(path)
        root = tree.getroot()
        ns = {"g": netio.GRAPHML_NS}
        assert root.tag == f"{{{netio.GRAPHML_NS}}}graphml"
        keys = {k.get("attr.name") for k in root.findall("g:key", ns)}
        assert keys == {"package", "module", "kinds"}
        graph = root.find("g:graph", ns)
        assert graph.get("edgedefault") == "directed"
        assert len(graph.findall("g:node", ns)) == 3
        assert len(graph.findall("g:edge", ns)) == 2
        # every data key refers to a declared key id
        declared = {k.get("id") for k in root.findall("g:key", ns)}
        for data in graph.iter(f"{{{netio.GRAPHML_NS}}}data"):
            assert data.get("key") in declared


class TestDot:
    def test_partition_colors(self, tmp_path):
        edges = []
        for base in (0, 4):
            for i in range(base, base + 4):
                for j in range(i + 1, base + 4):
                    edges.append((i, j))
        edges.append((3, 4))
        net = net_from_edges(8, edges)
        part = Partition.from_labels([0, 0, 0, 0, 1, 1, 1, 1])
        path = tmp_path / "net.dot"
        netio.save_dot(net, path, part)
        text = path.read_text()
        colors = {line.split('fillcolor="')[1].split('"')[0]
                  for line in text.splitlines() if "fillcolor=" in line and "->" not in line
                  and "node [" not in line}
        assert len(colors) == 2
        assert text.count("->") == net.m

    def test_quoting(self, tmp_path):
        net = net_from_edges(2, [(0, 1)], names=['we"ird', "normal"])
        path = tmp_path / "net.dot"
        netio.save_dot(net, path)
        assert '\\"' in path.read_text()


class TestExportDispatch:
    def test_unknown_format(self, tmp_path):
        net = net_from_edges(2, [(0, 1)])
        with pytest.raises(ValueError):
            netio.export_network(net, "hologram", tmp_path / "x")

    def test_edgelist_route(self, tmp_path):
        net = net_from_edges(2, [(0, 1)])
        netio.export_network(net, "edgelist", tmp_path / "x.tsv")
        assert nets_equal(netio.load_edgelist(tmp_path / "x.tsv"), net)
