"""Network serialization: TSV edge lists, GraphML, and DOT.

The TSV dialect: optional `source<TAB>target[<TAB>kinds]` header, edge
lines with an optional comma-separated kinds column (all lines or none),
and `#node <fqname> [package=<a.b.c>]` annotation lines carrying package
paths. Edge-list export/load round-trips a network exactly.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Optional

from .network import DependencyKind, DependencyNetwork, Partition

logger = logging.getLogger(__name__)

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"
_XSI = "http://www.w3.org/2001/XMLSchema-instance"
_SCHEMA = "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd"

# qualitative palette for module coloring, cycled as needed
PALETTE = [
    "#a6cee3", "#1f78b4", "#b2df8a", "#33a02c", "#fb9a99", "#e31a1c",
    "#fdbf6f", "#ff7f00", "#cab2d6", "#6a3d9a", "#ffff99", "#b15928",
]


class EdgeListFormatError(ValueError):
    """Malformed edge-list input; message carries the line number."""


def load_edgelist(path: str | Path) -> DependencyNetwork:
    """Parse a TSV edge list into a finalized network.

    Self-loop lines drop with a warning; duplicate edges merge silently
    (kind sets union). Any malformed line is an error with its number.
    """
    path = Path(path)
    packages: dict[str, Optional[tuple[str, ...]]] = {}
    links: dict[tuple[str, str], set[DependencyKind]] = {}
    saw_kinds = False
    saw_plain = False
    first_data = True
    with path.open() as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#node"):
                parts = line.split()
                if len(parts) < 2:
                    raise EdgeListFormatError(f"{path}:{lineno}: bad #node line")
                name = parts[1]
                pkg: tuple[str, ...] = ()
                for attr in parts[2:]:
                    if attr.startswith("package="):
                        value = attr[len("package="):]
                        pkg = tuple(value.split(".")) if value else ()
                packages[name] = pkg
                continue
            if line.startswith("#"):
                continue
            fields = line.split("\t")
            if first_data and fields[0] == "source" and len(fields) in (2, 3):
                first_data = False
                continue
            first_data = False
            if len(fields) == 2:
                src, dst = fields
                kinds: Optional[set[DependencyKind]] = None
                saw_plain = True
            elif len(fields) == 3:
                src, dst, kind_text = fields
                try:
                    kinds = {DependencyKind(k.strip()) for k in kind_text.split(",") if k.strip()}
                except ValueError as exc:
                    raise EdgeListFormatError(f"{path}:{lineno}: {exc}") from None
                if not kinds:
                    raise EdgeListFormatError(f"{path}:{lineno}: empty kinds column")
                saw_kinds = True
            else:
                raise EdgeListFormatError(
                    f"{path}:{lineno}: expected 2 or 3 tab-separated fields, got {len(fields)}"
                )
            src = src.strip()
            dst = dst.strip()
            if not src or not dst:
                raise EdgeListFormatError(f"{path}:{lineno}: empty endpoint")
            if src == dst:
                logger.warning("%s:%d: dropping self-loop on %s", path, lineno, src)
                continue
            entry = links.setdefault((src, dst), set())
            if kinds:
                entry.update(kinds)
    if saw_kinds and saw_plain:
        raise EdgeListFormatError(f"{path}: kinds column must appear on all edge lines or none")

    names = sorted({a for a, _ in links} | {b for _, b in links})
    index = {name: i for i, name in enumerate(names)}
    edges = []
    kind_sets = [] if saw_kinds else None
    for (a, b), ks in sorted(links.items()):
        edges.append((index[a], index[b]))
        if kind_sets is not None:
            kind_sets.append(frozenset(ks))
    pkg_list = None
    if any(name in packages for name in names):
        pkg_list = [packages.get(name) for name in names]
    return DependencyNetwork(names, edges, kinds=kind_sets, packages=pkg_list)


def save_edgelist(net: DependencyNetwork, path: str | Path) -> None:
    path = Path(path)
    with path.open("w") as out:
        if net.packages is not None:
            for name, pkg in zip(net.names, net.packages):
                if pkg is None:
                    continue
                if pkg:
                    out.write(f"#node {name} package={'.'.join(pkg)}\n")
                else:
                    out.write(f"#node {name}\n")
        has_kinds = net.edge_kinds is not None
        out.write("source\ttarget\tkinds\n" if has_kinds else "source\ttarget\n")
        for idx, (i, j) in enumerate(net.edge_pairs()):
            if has_kinds:
                kinds = ",".join(sorted(k.value for k in net.edge_kinds[idx]))
                out.write(f"{net.names[i]}\t{net.names[j]}\t{kinds}\n")
            else:
                out.write(f"{net.names[i]}\t{net.names[j]}\n")


def save_graphml(net: DependencyNetwork, path: str | Path,
                 partition: Optional[Partition] = None) -> None:
    ET.register_namespace("", GRAPHML_NS)
    root = ET.Element(f"{{{GRAPHML_NS}}}graphml")
    root.set(f"{{{_XSI}}}schemaLocation", f"{GRAPHML_NS} {_SCHEMA}")

    def key(kid, for_, name, type_):
        el = ET.SubElement(root, f"{{{GRAPHML_NS}}}key")
        el.set("id", kid)
        el.set("for", for_)
        el.set("attr.name", name)
        el.set("attr.type", type_)

    key("d_package", "node", "package", "string")
    if partition is not None:
        key("d_module", "node", "module", "int")
    if net.edge_kinds is not None:
        key("d_kinds", "edge", "kinds", "string")

    graph = ET.SubElement(root, f"{{{GRAPHML_NS}}}graph")
    graph.set("id", "G")
    graph.set("edgedefault", "directed")
    for i, name in enumerate(net.names):
        node = ET.SubElement(graph, f"{{{GRAPHML_NS}}}node")
        node.set("id", name)
        pkg = net.packages[i] if net.packages is not None else None
        if pkg is not None:
            data = ET.SubElement(node, f"{{{GRAPHML_NS}}}data")
            data.set("key", "d_package")
            data.text = ".".join(pkg)
        if partition is not None:
            data = ET.SubElement(node, f"{{{GRAPHML_NS}}}data")
            data.set("key", "d_module")
            data.text = str(partition.assignment[i])
    for idx, (i, j) in enumerate(net.edge_pairs()):
        edge = ET.SubElement(graph, f"{{{GRAPHML_NS}}}edge")
        edge.set("source", net.names[i])
        edge.set("target", net.names[j])
        if net.edge_kinds is not None:
            data = ET.SubElement(edge, f"{{{GRAPHML_NS}}}data")
            data.set("key", "d_kinds")
            data.text = ",".join(sorted(k.value for k in net.edge_kinds[idx]))
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, xml_declaration=True, encoding="unicode")


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def save_dot(net: DependencyNetwork, path: str | Path,
             partition: Optional[Partition] = None) -> None:
    path = Path(path)
    with path.open("w") as out:
        out.write("digraph dependencies {\n")
        out.write("  node [shape=box, style=filled, fillcolor=white];\n")
        for i, name in enumerate(net.names):
            attrs = []
            if partition is not None:
                color = PALETTE[partition.assignment[i] % len(PALETTE)]
                attrs.append(f'fillcolor="{color}"')
            joined = (" [" + ", ".join(attrs) + "]") if attrs else ""
            out.write(f"  {_dot_quote(name)}{joined};\n")
        for i, j in net.edge_pairs():
            out.write(f"  {_dot_quote(net.names[i])} -> {_dot_quote(net.names[j])};\n")
        out.write("}\n")


def export_network(net: DependencyNetwork, fmt: str, path: str | Path,
                   partition: Optional[Partition] = None) -> None:
    """Write the network as `edgelist`, `graphml`, or `dot`."""
    if fmt == "edgelist":
        save_edgelist(net, path)
    elif fmt == "graphml":
        save_graphml(net, path, partition)
    elif fmt == "dot":
        save_dot(net, path, partition)
    else:
        raise ValueError(f"unknown export format: {fmt!r}")
