"""Line-based description format and builders for the domain objects.

A document is a sequence of blocks::

    begin <kind> <name>
    <keyword> <args...>
    end

``#`` starts a comment. Kinds and their keywords:

category
    ``object X``, ``morphism f X Y``, ``compose g f = h`` (``h = g after f``).
    Identities are named ``id_<object>`` and added when not declared.
exact
    ``ring z|zmod:p``, ``object V dim n`` (over ``zmod:p``) or
    ``object A mod m1 m2 ...`` (``0`` for a free summand),
    ``morphism f A B rows`` with rows like ``1,0;0,1`` (``-`` for no rows),
    ``seq L' L L'' f1 f2``, ``sigma full``, or ``product E1 E2``.
    Without ``seq`` lines the full exact structure is used.
waldhausen
    ``host E`` (an exact block).
complex
    ``ring``, ``simplex v0 ... vk`` (closed under faces on build),
    ``cochain name degree values...`` and ``compare K``.
field
    ``extents a b c d``, ``group cyclic:N|circle:N``,
    ``site x0 x1 x2 x3 value v`` and ``region R x0 x1 x2 x3``.
branes
    ``host K``, ``brane id stack n region K``, ``string a b``.
pndp
    ``pndp id b1 n b2 n fiber n rank n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .category import FinCategory, StructuralError
from .complexes import SimplicialComplex
from .exact import (
    ExactStructure,
    MatrixCategory,
    MatrixMorphism,
    Module,
    ShortExactSeq,
    product_structure,
    ring_modulus,
    vector_space,
)
from .gft import ChunkGrid, GroupSpec
from .branes import Brane, BraneConfig, StringConfig
from .pndp import PNDPSpec


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class Entry:
    key: str
    args: tuple
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Block:
    kind: str
    name: str
    entries: tuple
    line: int = field(default=0, compare=False)

    def get(self, key: str) -> list[Entry]:
        return [e for e in self.entries if e.key == key]

    def first(self, key: str) -> Optional[Entry]:
        found = self.get(key)
        return found[0] if found else None


@dataclass(frozen=True)
class Document:
    blocks: tuple = ()

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def of_kind(self, kind: str) -> list[Block]:
        return [b for b in self.blocks if b.kind == kind]

    def serialize(self) -> str:
        return serialize(self)


# keyword -> arity, or (min, max) with max None for "at least min"
_GRAMMAR = {
    "category": {"object": 1, "morphism": 3, "compose": 3},
    "exact": {"ring": 1, "object": (2, None), "morphism": 4, "seq": 5, "sigma": 1, "product": 2},
    "waldhausen": {"host": 1},
    "complex": {"ring": 1, "simplex": (1, None), "cochain": (2, None), "compare": 1},
    "field": {"extents": 4, "group": 1, "site": 5, "region": 5},
    "branes": {"host": 1, "brane": 3, "string": 2},
    "pndp": {"pndp": 5},
}

# surface tokens that are dropped on parse and restored on serialize
_TAGS = {
    ("category", "compose"): {2: "="},
    ("field", "site"): {4: "value"},
    ("branes", "brane"): {1: "stack", 2: "region"},
    ("pndp", "pndp"): {1: "b1", 2: "b2", 3: "fiber", 4: "rank"},
}


def _strip_tags(kind: str, key: str, toks: list[str], line: int) -> tuple:
    tags = _TAGS.get((kind, key))
    if not tags:
        return tuple(toks)
    expect = len(toks) - len(tags)
    args = []
    k = 0
    for pos in range(expect + 1):
        if pos in tags:
            if k >= len(toks) or toks[k] != tags[pos]:
                raise ParseError(f"{key}: expected '{tags[pos]}'", line)
            k += 1
        if pos < expect:
            if k >= len(toks):
                raise ParseError(f"{key}: too few arguments", line)
            args.append(toks[k])
            k += 1
    return tuple(args)


def _untagged(kind: str, e: Entry) -> str:
    tags = _TAGS.get((kind, e.key), {})
    toks = [e.key]
    for i, a in enumerate(e.args):
        if i in tags:
            toks.append(tags[i])
        toks.append(a)
    return " ".join(toks)


def serialize(doc: Document) -> str:
    out = []
    for b in doc.blocks:
        out.append(f"begin {b.kind} {b.name}")
        out.extend(_untagged(b.kind, e) for e in b.entries)
        out.append("end")
    return "\n".join(out) + ("\n" if out else "")


def _int(tok: str, line: int, what: str = "integer") -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected {what}, got {tok!r}", line) from None


def parse_document(text: str) -> Document:
    blocks = []
    current = None
    entries: list = []
    names: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        toks = content.split()
        head = toks[0]
        if head == "begin":
            if current is not None:
                raise ParseError(f"'begin' inside block {current[1]!r}; missing 'end'", lineno)
            if len(toks) != 3:
                raise ParseError("expected 'begin <kind> <name>'", lineno)
            kind, name = toks[1], toks[2]
            if kind not in _GRAMMAR:
                raise ParseError(f"unknown block kind {kind!r}", lineno)
            if name in names:
                raise ParseError(f"duplicate block name {name!r} (first at line {names[name]})", lineno)
            names[name] = lineno
            current = (kind, name, lineno)
            entries = []
            continue
        if head == "end":
            if current is None or len(toks) != 1:
                raise ParseError("unexpected 'end'", lineno)
            blocks.append(Block(current[0], current[1], tuple(entries), current[2]))
            current = None
            continue
        if current is None:
            raise ParseError(f"{head!r} outside any block", lineno)
        kind = current[0]
        grammar = _GRAMMAR[kind]
        if head not in grammar:
            raise ParseError(f"keyword {head!r} is not valid in a {kind} block", lineno)
        args = _strip_tags(kind, head, toks[1:], lineno)
        arity = grammar[head]
        lo, hi = (arity, arity) if isinstance(arity, int) else arity
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise ParseError(f"{head}: expected {lo if lo == hi else f'at least {lo}'} arguments, got {len(args)}",
                             lineno)
        entries.append(Entry(head, args, lineno))
    if current is not None:
        raise ParseError(f"block {current[1]!r} is not closed", current[2])
    doc = Document(tuple(blocks))
    _check_references(doc)
    return doc


def _check_references(doc: Document) -> None:
    kinds = {b.name: b.kind for b in doc.blocks}

    def need(name: str, kind: str, line: int) -> None:
        if kinds.get(name) != kind:
            raise ParseError(f"reference to undefined {kind} block {name!r}", line)

    for b in doc.blocks:
        if b.kind in ("category", "exact"):
            objs = {e.args[0] for e in b.get("object")}
            mors = {e.args[0] for e in b.get("morphism")} | {f"id_{o}" for o in objs}
            for e in b.get("object"):
                if b.kind == "exact":
                    if e.args[1] not in ("dim", "mod") or (e.args[1] == "dim" and len(e.args) != 3):
                        raise ParseError("object: expected 'object <id> dim <n>' or 'object <id> mod <m>...'", e.line)
                    for t in e.args[2:]:
                        _int(t, e.line)
            for e in b.get("morphism"):
                for o in e.args[1:3]:
                    if o not in objs:
                        raise ParseError(f"morphism {e.args[0]}: undefined object {o!r}", e.line)
            for e in b.get("compose"):
                for m in e.args:
                    if m not in mors:
                        raise ParseError(f"compose: undefined morphism {m!r}", e.line)
            for e in b.get("seq"):
                for o in e.args[:3]:
                    if o not in objs:
                        raise ParseError(f"seq: undefined object {o!r}", e.line)
                for m in e.args[3:]:
                    if m not in mors:
                        raise ParseError(f"seq: undefined morphism {m!r}", e.line)
            for e in b.get("product"):
                for ref in e.args:
                    need(ref, "exact", e.line)
            for e in b.get("sigma"):
                if e.args[0] != "full":
                    raise ParseError("sigma: only 'sigma full' is supported", e.line)
        elif b.kind == "waldhausen":
            for e in b.get("host"):
                need(e.args[0], "exact", e.line)
        elif b.kind == "complex":
            for e in b.get("compare"):
                need(e.args[0], "complex", e.line)
            for e in b.get("cochain"):
                for t in e.args[1:]:
                    _int(t, e.line)
        elif b.kind == "branes":
            ids = {e.args[0] for e in b.get("brane")}
            for e in b.get("host"):
                need(e.args[0], "complex", e.line)
            for e in b.get("brane"):
                _int(e.args[1], e.line, "stack size")
                need(e.args[2], "complex", e.line)
            for e in b.get("string"):
                for end in e.args:
                    if end not in ids:
                        raise ParseError(f"string endpoint {end!r} is not a declared brane", e.line)
        elif b.kind == "field":
            for e in b.entries:
                if e.key == "site":
                    _float(e.args[4], e.line)
                ints = {"extents": e.args, "site": e.args[:4], "region": e.args[1:]}.get(e.key, ())
                for t in ints:
                    _int(t, e.line)
        elif b.kind == "pndp":
            for e in b.entries:
                for t in e.args[1:]:
                    _int(t, e.line)


def _float(tok: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected a number, got {tok!r}", line) from None


# ---------------------------------------------------------------------------
# Builders


def build_category(b: Block) -> FinCategory:
    objects = [e.args[0] for e in b.get("object")]
    morphisms = {e.args[0]: (e.args[1], e.args[2]) for e in b.get("morphism")}
    identities = {}
    for o in objects:
        ident = f"id_{o}"
        if ident in morphisms and morphisms[ident] != (o, o):
            raise StructuralError(f"{ident} must be an endomorphism of {o}")
        morphisms.setdefault(ident, (o, o))
        identities[o] = ident
    table = {(e.args[0], e.args[1]): e.args[2] for e in b.get("compose")}
    return FinCategory(objects, morphisms, identities, table, name=b.name)


def _module(e: Entry, p: int) -> Module:
    if e.args[1] == "dim":
        if not p:
            raise StructuralError(f"object {e.args[0]}: 'dim' needs a zmod:p ring")
        return vector_space(p, int(e.args[2]))
    return Module(tuple(int(t) for t in e.args[2:]))


def _matrix(tok: str) -> list[list[int]]:
    if tok == "-":
        return []
    return [[int(x) for x in row.split(",") if x != ""] for row in tok.split(";")]


def build_exact(doc: Document, b: Block) -> ExactStructure:
    prod = b.first("product")
    if prod:
        e1 = build_exact(doc, doc.block(prod.args[0]))
        e2 = build_exact(doc, doc.block(prod.args[1]))
        out = product_structure(e1, e2)
        out.name = b.name
        return out
    ring_entry = b.first("ring")
    ring = ring_entry.args[0] if ring_entry else "z"
    p = ring_modulus(ring)
    objs = {e.args[0]: _module(e, p) for e in b.get("object")}
    host = MatrixCategory(list(objs.values()), ring="Z" if not p else f"zmod:{p}", name=b.name)
    mors = {f"id_{k}": host.identity(m) for k, m in objs.items()}
    for e in b.get("morphism"):
        mors[e.args[0]] = MatrixMorphism.make(objs[e.args[1]], objs[e.args[2]], _matrix(e.args[3]))
    seqs = b.get("seq")
    if not seqs:
        return ExactStructure.full(host, b.name)
    sigma = frozenset(
        ShortExactSeq(objs[e.args[0]], objs[e.args[1]], objs[e.args[2]], mors[e.args[3]], mors[e.args[4]])
        for e in seqs
    )
    return ExactStructure(host, sigma, b.name)


def block_ring(b: Block, override: Optional[str] = None) -> str:
    if override:
        return "Z" if override.lower() == "z" else override
    e = b.first("ring")
    return e.args[0] if e and e.args[0].lower() != "z" else "Z"


def _vertex(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def build_complex(b: Block) -> SimplicialComplex:
    facets = [tuple(_vertex(t) for t in e.args) for e in b.get("simplex")]
    verts = list(dict.fromkeys(v for f in facets for v in f))
    if all(isinstance(v, int) for v in verts):
        verts.sort()
    return SimplicialComplex.from_facets(facets, vertices=verts)


def block_cochains(b: Block) -> list[tuple[str, int, tuple]]:
    return [(e.args[0], int(e.args[1]), tuple(int(t) for t in e.args[2:])) for e in b.get("cochain")]


def build_field(b: Block) -> tuple[ChunkGrid, np.ndarray, Optional[GroupSpec]]:
    ext = b.first("extents")
    if ext is None:
        raise StructuralError(f"field {b.name} has no extents line")
    extents = tuple(int(t) for t in ext.args)
    values = np.zeros(extents)
    for e in b.get("site"):
        site = tuple(int(t) for t in e.args[:4])
        if any(not 0 <= x < n for x, n in zip(site, extents)):
            raise StructuralError(f"line {e.line}: site {site} outside extents {extents}")
        values[site] = float(e.args[4])
    labels = {s: "I0" for s in np.ndindex(*extents)}
    for e in b.get("region"):
        site = tuple(int(t) for t in e.args[1:])
        if site not in labels:
            raise StructuralError(f"line {e.line}: site {site} outside extents {extents}")
        labels[site] = e.args[0]
    grid = ChunkGrid.from_labels(labels)
    if grid.extents != extents:
        grid = ChunkGrid(extents, grid.regions)
    g = b.first("group")
    return grid, values, GroupSpec.parse(g.args[0]) if g else None


def build_branes(doc: Document, b: Block) -> tuple[BraneConfig, list[StringConfig]]:
    h = b.first("host")
    if h is None:
        raise StructuralError(f"branes block {b.name} has no host")
    host = build_complex(doc.block(h.args[0]))
    branes = tuple(Brane(e.args[0], int(e.args[1]), build_complex(doc.block(e.args[2]))) for e in b.get("brane"))
    strings = [StringConfig(*e.args) for e in b.get("string")]
    return BraneConfig(host, branes), strings


def build_pndp(b: Block) -> list[PNDPSpec]:
    return [PNDPSpec(*(int(t) for t in e.args[1:]), name=e.args[0]) for e in b.get("pndp")]
