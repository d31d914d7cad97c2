"""Source-tree extraction: class entities and the dependency network.

scan_sources walks a source tree, runs the signature scanner on every
file, and emits one ClassEntity per type declaration. build_network
resolves each entity's raw type references against the corpus (package
context and imports; unresolvable references are external and dropped)
and finalizes the directed network.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from . import javasig
from .network import DependencyKind, DependencyNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtractOptions:
    ext: str = ".java"
    fold_nested: bool = False
    encoding: str = "utf-8"


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str


@dataclass
class ClassEntity:
    """A source type declaration and its signature-level references."""

    fqname: str
    package_path: tuple[str, ...]
    kind: str
    declared_refs: list[tuple[str, DependencyKind]]
    unit: str = ""  # compilation-unit id, for unit-scope name resolution
    host: Optional[str] = None  # enclosing type fqname for nested types
    imports_exact: dict[str, str] = field(default_factory=dict)
    imports_wildcard: tuple[str, ...] = ()
    aliases: tuple[str, ...] = ()  # fqnames folded into this entity


def scan_sources(
    root: str | Path,
    options: ExtractOptions = ExtractOptions(),
    diagnostics: Optional[list[Diagnostic]] = None,
) -> list[ClassEntity]:
    """One ClassEntity per type declaration under root (recursive).

    Unreadable files are skipped with a diagnostic; zero matches is an
    empty list, not an error.
    """
    root = Path(root)
    if not root.exists():
        raise FileNotFoundError(f"source root does not exist: {root}")
    entities: list[ClassEntity] = []
    for path in sorted(root.rglob(f"*{options.ext}")):
        if not path.is_file():
            continue
        try:
            text = path.read_text(encoding=options.encoding, errors="replace")
        except OSError as exc:
            logger.warning("skipping unreadable file %s: %s", path, exc)
            if diagnostics is not None:
                diagnostics.append(Diagnostic(str(path), f"unreadable: {exc}"))
            continue
        summary = javasig.scan_source(text)
        entities.extend(_entities_from_summary(summary, str(path)))
    if options.fold_nested:
        entities = fold_nested(entities)
    return entities


def _entities_from_summary(summary: javasig.FileSummary, unit: str) -> list[ClassEntity]:
    out = []
    prefix = ".".join(summary.package)
    for decl in summary.types:
        chain = decl.name_chain()
        fq = ".".join(([prefix] if prefix else []) + chain)
        host = None
        if decl.parent is not None:
            host = ".".join(([prefix] if prefix else []) + chain[:-1])
        out.append(
            ClassEntity(
                fqname=fq,
                package_path=summary.package,
                kind=decl.kind,
                declared_refs=list(decl.refs),
                unit=unit,
                host=host,
                imports_exact=dict(summary.imports_exact),
                imports_wildcard=summary.imports_wildcard,
            )
        )
    return out


def fold_nested(entities: list[ClassEntity]) -> list[ClassEntity]:
    """Merge nested types into their top-level hosts; the host absorbs
    their references and advertises their names as aliases."""
    by_name = {e.fqname: e for e in entities}

    def top_of(entity: ClassEntity) -> ClassEntity:
        while entity.host is not None and entity.host in by_name:
            entity = by_name[entity.host]
        return entity

    folded: dict[str, ClassEntity] = {}
    order: list[str] = []
    for entity in entities:
        top = top_of(entity)
        if top.fqname not in folded:
            folded[top.fqname] = ClassEntity(
                fqname=top.fqname,
                package_path=top.package_path,
                kind=top.kind,
                declared_refs=list(top.declared_refs),
                unit=top.unit,
                host=None,
                imports_exact=dict(top.imports_exact),
                imports_wildcard=top.imports_wildcard,
            )
            order.append(top.fqname)
        if entity.fqname != top.fqname:
            target = folded[top.fqname]
            target.declared_refs.extend(entity.declared_refs)
            target.aliases = target.aliases + (entity.fqname,)
    return [folded[name] for name in order]


class _Resolver:
    """Name resolution against the scanned corpus.

    Precedence for simple names: enclosing/unit scope, explicit import,
    same package, unique wildcard-import match; anything else is external
    (dropped) or ambiguous (dropped with a diagnostic).
    """

    def __init__(self, entities: list[ClassEntity]):
        self.by_name: dict[str, str] = {}
        self.unit_tops: dict[str, list[str]] = {}
        self.by_package: dict[tuple[str, ...], set[str]] = {}
        for e in entities:
            self.by_name[e.fqname] = e.fqname
            for alias in e.aliases:
                self.by_name.setdefault(alias, e.fqname)
            self.by_package.setdefault(e.package_path, set()).add(e.fqname)
            if e.host is None:
                self.unit_tops.setdefault(e.unit, []).append(e.fqname)

    def resolve(self, entity: ClassEntity, raw: str) -> tuple[Optional[str], Optional[str]]:
        """(target fqname or None, diagnostic message or None)."""
        if "." in raw:
            if raw in self.by_name:
                return self.by_name[raw], None
            head, rest = raw.split(".", 1)
            base, diag = self._resolve_simple(entity, head)
            if base is not None and f"{base}.{rest}" in self.by_name:
                return self.by_name[f"{base}.{rest}"], None
            prefixed = ".".join(entity.package_path + (raw,)) if entity.package_path else raw
            if prefixed in self.by_name:
                return self.by_name[prefixed], None
            return None, diag
        return self._resolve_simple(entity, raw)

    def _resolve_simple(self, entity: ClassEntity, simple: str) -> tuple[Optional[str], Optional[str]]:
        # innermost enclosing type scope outward: own members, the
        # enclosing type itself, then the host chain; never parent packages
        pkg = ".".join(entity.package_path)
        type_chain = entity.fqname[len(pkg) + 1:] if pkg else entity.fqname
        segments = type_chain.split(".")
        for depth in range(len(segments), 0, -1):
            scope = ".".join(([pkg] if pkg else []) + segments[:depth])
            candidate = f"{scope}.{simple}"
            if candidate in self.by_name:
                return self.by_name[candidate], None
            if segments[depth - 1] == simple and scope in self.by_name:
                return self.by_name[scope], None
        for top in self.unit_tops.get(entity.unit, ()):
            if top.rsplit(".", 1)[-1] == simple:
                return self.by_name[top], None
        exact = entity.imports_exact.get(simple)
        if exact is not None:
            return (self.by_name[exact], None) if exact in self.by_name else (None, None)
        pkg_candidate = ".".join(entity.package_path + (simple,)) if entity.package_path else simple
        if pkg_candidate in self.by_name:
            return self.by_name[pkg_candidate], None
        hits = sorted(
            {
                self.by_name[f"{pkg}.{simple}"]
                for pkg in entity.imports_wildcard
                if f"{pkg}.{simple}" in self.by_name
            }
        )
        if len(hits) == 1:
            return hits[0], None
        if len(hits) > 1:
            return None, f"ambiguous reference {simple!r} from {entity.fqname}: {hits}"
        return None, None  # external


def build_network(
    entities: list[ClassEntity],
    options: ExtractOptions = ExtractOptions(),
    diagnostics: Optional[list[Diagnostic]] = None,
) -> DependencyNetwork:
    """Resolve references and finalize the directed dependency network.

    Duplicate dependencies collapse into one link carrying the union of
    kinds; self-references and unresolvable (external) references drop;
    isolated nodes are removed. An all-external corpus yields an empty
    network (with a warning), never an exception.
    """
    if not entities:
        raise ValueError("no entities to build a network from")
    resolver = _Resolver(entities)
    links: dict[tuple[str, str], set[DependencyKind]] = {}
    for entity in sorted(entities, key=lambda e: e.fqname):
        for raw, kind in entity.declared_refs:
            target, diag = resolver.resolve(entity, raw)
            if diag and diagnostics is not None:
                diagnostics.append(Diagnostic(entity.unit, diag))
            if target is None or target == entity.fqname:
                continue
            links.setdefault((entity.fqname, target), set()).add(kind)

    touched = {a for a, _ in links} | {b for _, b in links}
    kept = sorted(e.fqname for e in entities if e.fqname in touched)
    if not kept:
        logger.warning("all references external or dropped; network is empty")
        return DependencyNetwork([], [], kinds=[], packages=[])
    index = {name: i for i, name in enumerate(kept)}
    by_name = {e.fqname: e for e in entities}
    edges = []
    kinds = []
    for (a, b), ks in sorted(links.items()):
        edges.append((index[a], index[b]))
        kinds.append(frozenset(ks))
    packages = [by_name[name].package_path for name in kept]
    return DependencyNetwork(kept, edges, kinds=kinds, packages=packages)
