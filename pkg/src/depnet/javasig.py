"""Tolerant signature-level scanner for Java-like source files.

Not a compiler: comments and literals are blanked, braces are tracked for
depth, and only declaration heads are parsed (type headers, field types,
method parameter and return types). Method bodies, local variables and
anonymous/local classes contribute nothing. Unparseable declarations are
skipped, never fatal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .network import DependencyKind

PRIMITIVES = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double",
    "void", "var",
}

MODIFIERS = {
    "public", "protected", "private", "abstract", "static", "final",
    "strictfp", "transient", "volatile", "synchronized", "native",
    "default", "sealed", "non-sealed",
}

_IDENT = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")
_DOTTED = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*(\.[A-Za-z_$][A-Za-z0-9_$]*)*$")
_TYPE_HEAD = re.compile(
    r"^(?:(?:public|protected|private|abstract|static|final|strictfp|sealed|non-sealed)\s+)*"
    r"(class|interface|enum|record|@\s*interface)\s+([A-Za-z_$][A-Za-z0-9_$]*)(.*)$",
    re.S,
)

_OPENERS = "<(["
_CLOSERS = ">)]"


@dataclass
class TypeDecl:
    """One type declaration with its signature-level references."""

    simple_name: str
    kind: str  # class | interface | enum | annotation
    parent: Optional["TypeDecl"]
    type_params: tuple[str, ...] = ()
    refs: list[tuple[str, DependencyKind]] = field(default_factory=list)

    def name_chain(self) -> list[str]:
        chain = []
        node: Optional[TypeDecl] = self
        while node is not None:
            chain.append(node.simple_name)
            node = node.parent
        return chain[::-1]

    def scope_type_params(self) -> set[str]:
        params: set[str] = set()
        node: Optional[TypeDecl] = self
        while node is not None:
            params.update(node.type_params)
            node = node.parent
        return params


@dataclass
class FileSummary:
    package: tuple[str, ...]
    imports_exact: dict[str, str]  # simple name -> fully qualified
    imports_wildcard: tuple[str, ...]
    types: list[TypeDecl]  # every declaration, nested included


def strip_comments_and_strings(src: str) -> str:
    """Blank out comments and string/char literals, preserving newlines."""
    out: list[str] = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c == "/" and i + 1 < n and src[i + 1] == "/":
            j = src.find("\n", i)
            if j < 0:
                break
            i = j
            continue
        if c == "/" and i + 1 < n and src[i + 1] == "*":
            j = src.find("*/", i + 2)
            seg = src[i:j + 2] if j >= 0 else src[i:]
            out.append("\n" * seg.count("\n"))
            i = i + len(seg)
            continue
        if c == '"':
            if src.startswith('"""', i):
                j = src.find('"""', i + 3)
                seg = src[i:j + 3] if j >= 0 else src[i:]
                out.append('""')
                out.append("\n" * seg.count("\n"))
                i = i + len(seg)
                continue
            j = i + 1
            while j < n:
                if src[j] == "\\":
                    j += 2
                    continue
                if src[j] == '"' or src[j] == "\n":
                    break
                j += 1
            out.append('""')
            i = min(j + 1, n)
            continue
        if c == "'":
            j = i + 1
            while j < n:
                if src[j] == "\\":
                    j += 2
                    continue
                if src[j] == "'" or src[j] == "\n":
                    break
                j += 1
            out.append("''")
            i = min(j + 1, n)
            continue
        out.append(c)
        i += 1
    return "".join(out)


def strip_annotations(s: str) -> str:
    """Drop @Annotation and @Annotation(...) uses; keep '@interface'."""
    out: list[str] = []
    i, n = 0, len(s)
    while i < n:
        if s[i] == "@":
            j = i + 1
            while j < n and s[j].isspace():
                j += 1
            if s.startswith("interface", j):
                out.append(s[i])
                i += 1
                continue
            while j < n and (s[j].isalnum() or s[j] in "._$"):
                j += 1
            k = j
            while k < n and s[k].isspace():
                k += 1
            if k < n and s[k] == "(":
                depth = 0
                while k < n:
                    if s[k] == "(":
                        depth += 1
                    elif s[k] == ")":
                        depth -= 1
                        if depth == 0:
                            k += 1
                            break
                    k += 1
                i = k
            else:
                i = j
            out.append(" ")
            continue
        out.append(s[i])
        i += 1
    return "".join(out)


def find_top_level(s: str, target: str) -> int:
    """Index of the first depth-0 occurrence of a character, or -1.

    The target test precedes depth bookkeeping so bracket characters can
    themselves be searched for.
    """
    depth = 0
    for i, ch in enumerate(s):
        if ch == target and depth == 0:
            return i
        if ch in _OPENERS:
            depth += 1
        elif ch in _CLOSERS:
            depth -= 1
    return -1


def split_top_level(s: str, sep: str = ",") -> list[str]:
    parts: list[str] = []
    depth = 0
    cur: list[str] = []
    for ch in s:
        if ch in _OPENERS:
            depth += 1
        elif ch in _CLOSERS:
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def tokens_top_level(s: str) -> list[str]:
    """Whitespace-split that keeps generic argument lists intact."""
    tokens: list[str] = []
    depth = 0
    cur: list[str] = []
    for ch in s:
        if ch in _OPENERS:
            depth += 1
        elif ch in _CLOSERS:
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                tokens.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        tokens.append("".join(cur))
    return tokens


def _balanced_span(s: str, start: int, open_ch: str, close_ch: str) -> int:
    """End index (exclusive) of the balanced group opening at start."""
    depth = 0
    for i in range(start, len(s)):
        if s[i] == open_ch:
            depth += 1
        elif s[i] == close_ch:
            depth -= 1
            if depth == 0:
                return i + 1
    return len(s)


def expand_type(raw: str) -> list[str]:
    """Base type names mentioned in a type string: generics expand
    recursively, arrays/varargs strip, wildcards keep only their bound."""
    out: list[str] = []
    _expand(raw, out)
    return out


def _expand(t: str, out: list[str]) -> None:
    t = t.strip()
    if not t:
        return
    if t.startswith("?"):
        rest = t[1:].strip()
        for kw in ("extends", "super"):
            if rest.startswith(kw):
                _expand(rest[len(kw):], out)
                return
        return
    changed = True
    while changed:
        t = t.strip()
        changed = False
        if t.endswith("..."):
            t = t[:-3]
            changed = True
        elif t.endswith("[]"):
            t = t[:-2]
            changed = True
    if "<" in t:
        lt = t.find("<")
        base = t[:lt].strip()
        gt = t.rfind(">")
        args = t[lt + 1:gt] if gt > lt else t[lt + 1:]
        if base and _DOTTED.match(base):
            out.append(base)
        for part in split_top_level(args):
            for piece in split_top_level(part, "&"):
                _expand(piece, out)
        return
    for piece in split_top_level(t, "&"):
        piece = piece.strip()
        if piece and _DOTTED.match(piece):
            out.append(piece)


def parse_type_params(spec: str) -> tuple[str, ...]:
    """Names declared by a <...> type-parameter list; bounds are ignored."""
    inner = spec.strip()
    if inner.startswith("<") and inner.endswith(">"):
        inner = inner[1:-1]
    names = []
    for part in split_top_level(inner):
        tok = part.split()
        if tok and _IDENT.match(tok[0]):
            names.append(tok[0])
    return tuple(names)


@dataclass
class TypeHeader:
    kind: str
    name: str
    type_params: tuple[str, ...]
    supertypes: list[str]  # raw extends + implements type strings
    record_components: Optional[str]  # raw parameter list for records


def parse_type_header(head: str) -> Optional[TypeHeader]:
    match = _TYPE_HEAD.match(head.strip())
    if not match:
        return None
    keyword, name, tail = match.groups()
    keyword = re.sub(r"\s+", "", keyword)
    kind = {
        "class": "class",
        "interface": "interface",
        "enum": "enum",
        "record": "class",
        "@interface": "annotation",
    }[keyword]
    tail = tail.strip()
    type_params: tuple[str, ...] = ()
    if tail.startswith("<"):
        end = _balanced_span(tail, 0, "<", ">")
        type_params = parse_type_params(tail[:end])
        tail = tail[end:].strip()
    record_components = None
    if keyword == "record" and tail.startswith("("):
        end = _balanced_span(tail, 0, "(", ")")
        record_components = tail[1:end - 1]
        tail = tail[end:].strip()
    supertypes: list[str] = []
    for clause, text in _split_clauses(tail).items():
        if clause in ("extends", "implements"):
            supertypes.extend(split_top_level(text))
    return TypeHeader(kind, name, type_params, supertypes, record_components)


_CLAUSE_WORDS = ("extends", "implements", "permits")


def _split_clauses(tail: str) -> dict[str, str]:
    hits: list[tuple[int, str]] = []
    depth = 0
    i = 0
    while i < len(tail):
        ch = tail[i]
        if ch in _OPENERS:
            depth += 1
        elif ch in _CLOSERS:
            depth -= 1
        elif depth == 0 and ch.isalpha():
            j = i
            while j < len(tail) and (tail[j].isalnum() or tail[j] in "_$"):
                j += 1
            word = tail[i:j]
            if word in _CLAUSE_WORDS:
                hits.append((i, word))
            i = j
            continue
        i += 1
    sections: dict[str, str] = {}
    for idx, (pos, word) in enumerate(hits):
        end = hits[idx + 1][0] if idx + 1 < len(hits) else len(tail)
        sections[word] = tail[pos + len(word):end].strip()
    return sections


@dataclass
class MethodSignature:
    name: str
    return_type: Optional[str]  # None for constructors
    param_types: list[str]


def parse_method(head: str, enclosing: str) -> Optional[MethodSignature]:
    lp = find_top_level(head, "(")
    if lp < 0:
        return None
    end = _balanced_span(head, lp, "(", ")")
    params_raw = head[lp + 1:end - 1]
    pre = head[:lp].strip()

    tokens = tokens_top_level(pre)
    while tokens and tokens[0] in MODIFIERS:
        tokens.pop(0)
    method_params: tuple[str, ...] = ()
    if tokens and tokens[0].startswith("<"):
        method_params = parse_type_params(tokens.pop(0))
    if not tokens:
        return None
    name = tokens[-1]
    if not _IDENT.match(name):
        return None
    ret = " ".join(tokens[:-1]).strip() or None
    if ret is None and name != enclosing:
        return None  # looks like a call, an enum constant, or garbage

    param_types: list[str] = []
    for part in split_top_level(params_raw):
        ptoks = tokens_top_level(part)
        ptoks = [t for t in ptoks if t not in MODIFIERS]
        if len(ptoks) < 2:
            continue  # a bare name or unparseable fragment
        param_types.append(" ".join(ptoks[:-1]))
    sig = MethodSignature(name=name, return_type=ret, param_types=param_types)
    sig.type_params = method_params  # type: ignore[attr-defined]
    return sig


def parse_field(head: str) -> Optional[tuple[str, list[str]]]:
    """(raw type, declared names) for a field declaration head (text
    before any '=' of the statement)."""
    tokens = tokens_top_level(head)
    while tokens and tokens[0] in MODIFIERS:
        tokens.pop(0)
    if len(tokens) < 2:
        return None
    raw_type = tokens[0]
    names = []
    for decl in split_top_level(" ".join(tokens[1:])):
        name = decl.strip()
        while name.endswith("[]"):
            name = name[:-2].strip()
        if not _IDENT.match(name):
            return None
        names.append(name)
    return raw_type, names


@dataclass
class _Ctx:
    kind: str  # 'type' | 'block'
    decl: Optional[TypeDecl] = None
    enum_constants: bool = False


def scan_source(text: str) -> FileSummary:
    """Scan one compilation unit; never raises on malformed input."""
    src = strip_comments_and_strings(text)
    package: tuple[str, ...] = ()
    imports_exact: dict[str, str] = {}
    imports_wildcard: list[str] = []
    types: list[TypeDecl] = []
    stack: list[_Ctx] = []
    buf: list[str] = []

    def in_type_body() -> bool:
        return bool(stack) and stack[-1].kind == "type"

    def current_decl() -> Optional[TypeDecl]:
        return stack[-1].decl if in_type_body() else None

    def add_refs(decl: TypeDecl, raw: str, kind: DependencyKind,
                 extra_vars: set[str] = frozenset()) -> None:
        scope_vars = decl.scope_type_params() | set(extra_vars)
        for name in expand_type(raw):
            if name in PRIMITIVES or name in scope_vars:
                continue
            decl.refs.append((name, kind))

    def handle_member(decl: TypeDecl, head: str) -> None:
        eq = find_top_level(head, "=")
        body = head[:eq].strip() if eq >= 0 else head.strip()
        if not body:
            return
        if find_top_level(body, "(") >= 0:
            sig = parse_method(body, decl.simple_name)
            if sig is None:
                return
            extra = set(getattr(sig, "type_params", ()))
            if sig.return_type is not None:
                add_refs(decl, sig.return_type, DependencyKind.RETURN, extra)
            for param in sig.param_types:
                add_refs(decl, param, DependencyKind.PARAMETER, extra)
        else:
            parsed = parse_field(body)
            if parsed is None:
                return
            raw_type, _ = parsed
            add_refs(decl, raw_type, DependencyKind.FIELD)

    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch == "{":
            head = strip_annotations("".join(buf)).strip()
            buf.clear()
            pushed = False
            if not stack or (in_type_body() and not stack[-1].enum_constants):
                header = parse_type_header(head)
                if header is not None:
                    decl = TypeDecl(
                        simple_name=header.name,
                        kind=header.kind,
                        parent=current_decl(),
                        type_params=header.type_params,
                    )
                    for sup in header.supertypes:
                        add_refs(decl, sup, DependencyKind.INHERITANCE)
                    if header.record_components:
                        for part in split_top_level(header.record_components):
                            ptoks = [t for t in tokens_top_level(part) if t not in MODIFIERS]
                            if len(ptoks) >= 2:
                                add_refs(decl, " ".join(ptoks[:-1]), DependencyKind.FIELD)
                    types.append(decl)
                    stack.append(_Ctx("type", decl, enum_constants=header.kind == "enum"))
                    pushed = True
            if not pushed:
                if in_type_body() and not stack[-1].enum_constants and head:
                    handle_member(stack[-1].decl, head)
                stack.append(_Ctx("block"))
            i += 1
            continue
        if ch == "}":
            buf.clear()
            if stack:
                stack.pop()
            i += 1
            continue
        if ch == ";":
            head = strip_annotations("".join(buf)).strip()
            buf.clear()
            if not stack:
                if head.startswith("package") and len(head) > 7 and head[7].isspace():
                    candidate = head[7:].strip()
                    if _DOTTED.match(candidate):
                        package = tuple(candidate.split("."))
                elif head.startswith("import") and len(head) > 6 and head[6].isspace():
                    spec = head[6:].strip()
                    if spec.startswith("static"):
                        pass  # member imports carry no type-level signal
                    elif spec.endswith(".*"):
                        if _DOTTED.match(spec[:-2]):
                            imports_wildcard.append(spec[:-2])
                    elif _DOTTED.match(spec) and "." in spec:
                        imports_exact[spec.rsplit(".", 1)[1]] = spec
            elif in_type_body():
                ctx = stack[-1]
                if ctx.enum_constants:
                    ctx.enum_constants = False
                elif head:
                    handle_member(ctx.decl, head)
            i += 1
            continue
        buf.append(ch)
        i += 1

    return FileSummary(
        package=package,
        imports_exact=imports_exact,
        imports_wildcard=tuple(imports_wildcard),
        types=types,
    )
