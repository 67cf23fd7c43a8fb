"""Finite categories, functors, diagrams and pushouts.

A category here is anything exposing ``objects``, ``hom``, ``source``,
``target``, ``identity`` and ``compose``. :class:`FinCategory` stores an
explicit composition table; the matrix categories in :mod:`kwald.exact`
compute composites instead. Composition is written in diagrammatic order:
``compose(f, g)`` is ``g ∘ f`` (first ``f``, then ``g``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

Obj = Hashable
Mor = Hashable


class StructuralError(ValueError):
    """Input is malformed (unknown ids, table entries for non-composable pairs, ...)."""


class CompositionError(ValueError):
    pass


class PushoutMissingError(LookupError):
    pass


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple
    detail: str = ""

    def __str__(self) -> str:
        w = ", ".join(map(str, self.witness))
        return f"{self.law}: ({w}) {self.detail}".rstrip()


@dataclass
class ValidationReport:
    """Outcome of an axiom checker: which checks ran and what failed."""

    subject: str
    checks: list[str] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def check(self, name: str) -> None:
        if name not in self.checks:
            self.checks.append(name)

    def fail(self, law: str, *witness: Any, detail: str = "") -> None:
        self.check(law)
        self.violations.append(Violation(law, tuple(witness), detail))

    def failed(self, law: str) -> bool:
        return any(v.law == law for v in self.violations)

    def records(self) -> list[tuple[str, str, str]]:
        """One ``(check, status, witness)`` triple per check, in check order."""
        out = []
        for name in self.checks:
            bad = [v for v in self.violations if v.law == name]
            if bad:
                out.append((name, "FAIL", str(bad[0])))
            else:
                out.append((name, "PASS", ""))
        return out

    def merge(self, other: "ValidationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.check(prefix + c)
        for v in other.violations:
            self.violations.append(Violation(prefix + v.law, v.witness, v.detail))
        self.notes.extend(other.notes)


class Category:
    """Base interface; subclasses provide hom-sets and composition."""

    objects: tuple

    def hom(self, a: Obj, b: Obj) -> tuple:
        raise NotImplementedError

    def source(self, f: Mor) -> Obj:
        raise NotImplementedError

    def target(self, f: Mor) -> Obj:
        raise NotImplementedError

    def identity(self, a: Obj) -> Mor:
        raise NotImplementedError

    def compose(self, f: Mor, g: Mor) -> Mor:
        """``g ∘ f``."""
        raise NotImplementedError

    def morphisms(self) -> Iterator[Mor]:
        for a in self.objects:
            for b in self.objects:
                yield from self.hom(a, b)

    def compose_path(self, path: Sequence[Mor], start: Optional[Obj] = None) -> Mor:
        if not path:
            if start is None:
                raise CompositionError("empty path needs a start object")
            return self.identity(start)
        out = path[0]
        for g in path[1:]:
            out = self.compose(out, g)
        return out

    def inverse(self, f: Mor) -> Optional[Mor]:
        a, b = self.source(f), self.target(f)
        ida, idb = self.identity(a), self.identity(b)
        for g in self.hom(b, a):
            if self.compose(f, g) == ida and self.compose(g, f) == idb:
                return g
        return None

    def is_isomorphism(self, f: Mor) -> bool:
        return self.inverse(f) is not None

    def isomorphisms(self) -> list[Mor]:
        return [f for f in self.morphisms() if self.is_isomorphism(f)]

    def is_zero_object(self, z: Obj) -> bool:
        return all(len(self.hom(z, a)) == 1 and len(self.hom(a, z)) == 1 for a in self.objects)

    def pushout(self, f: Mor, g: Mor) -> "Cocone":
        return search_pushout(self, f, g)

    def factor_through(self, cocone: "Cocone", u: Mor, v: Mor) -> Mor:
        """The unique map out of a pushout apex restricting to ``u`` and ``v``."""
        i, j = cocone.legs
        for h in self.hom(cocone.apex, self.target(u)):
            if self.compose(i, h) == u and self.compose(j, h) == v:
                return h
        raise PushoutMissingError("cocone does not factor through the pushout")


class FinCategory(Category):
    """A finite category given by an explicit composition table.

    ``table`` maps ``(g, f)`` to ``g ∘ f``. Composites with identities may be
    omitted; every other composable pair needs an entry.
    """

    def __init__(
        self,
        objects: Iterable[Obj],
        morphisms: Mapping[Mor, tuple[Obj, Obj]],
        identities: Mapping[Obj, Mor],
        table: Mapping[tuple[Mor, Mor], Mor],
        name: str = "C",
    ):
        self.name = name
        self.objects = tuple(objects)
        self._ends = dict(morphisms)
        self._identities = dict(identities)
        self._table = dict(table)
        objs = set(self.objects)
        for m, (s, t) in self._ends.items():
            if s not in objs or t not in objs:
                raise StructuralError(f"morphism {m!r} has unknown endpoint")
        for a in self.objects:
            i = self._identities.get(a)
            if i is None or self._ends.get(i) != (a, a):
                raise StructuralError(f"object {a!r} lacks an identity")
        for (g, f), h in self._table.items():
            for x in (g, f, h):
                if x not in self._ends:
                    raise StructuralError(f"composition entry uses unknown morphism {x!r}")
        self._order = {m: k for k, m in enumerate(self._ends)}
        homs: dict[tuple, list] = {}
        for m, ends in self._ends.items():
            homs.setdefault(ends, []).append(m)
        self._homs = {k: tuple(v) for k, v in homs.items()}
        self._id_set = set(self._identities.values())

    @property
    def table(self) -> dict:
        return dict(self._table)

    @property
    def identities(self) -> dict:
        return dict(self._identities)

    def ends(self) -> dict:
        return dict(self._ends)

    def morphisms(self) -> Iterator[Mor]:
        return iter(self._ends)

    def hom(self, a, b):
        return self._homs.get((a, b), ())

    def source(self, f):
        try:
            return self._ends[f][0]
        except KeyError:
            raise CompositionError(f"unknown morphism {f!r}") from None

    def target(self, f):
        try:
            return self._ends[f][1]
        except KeyError:
            raise CompositionError(f"unknown morphism {f!r}") from None

    def identity(self, a):
        return self._identities[a]

    def compose(self, f, g):
        if self.target(f) != self.source(g):
            raise CompositionError(f"{f!r}: {self.source(f)}->{self.target(f)} cannot be followed by "
                                   f"{g!r}: {self.source(g)}->{self.target(g)}")
        h = self._table.get((g, f))
        if h is not None:
            return h
        if f in self._id_set:
            return g
        if g in self._id_set:
            return f
        raise CompositionError(f"composite {g!r}∘{f!r} missing from table")

    def __repr__(self) -> str:
        return f"FinCategory({self.name!r}, {len(self.objects)} objects, {len(self._ends)} morphisms)"


def compose(C: Category, f: Mor, g: Mor) -> Mor:
    """``g ∘ f`` in ``C``; raises :class:`CompositionError` unless target(f) = source(g)."""
    return C.compose(f, g)


def check_category_axioms(C: Category, name: Optional[str] = None) -> ValidationReport:
    """Exhaustively verify identity laws, closure and associativity."""
    report = ValidationReport(name or getattr(C, "name", "category"))
    for law in ("identity", "closure", "associativity"):
        report.check(law)
    if isinstance(C, FinCategory):
        for (g, f) in C.table:
            if C.target(f) != C.source(g):
                raise StructuralError(f"table entry for non-composable pair ({g!r}, {f!r})")
            h = C.table[(g, f)]
            if (C.source(h), C.target(h)) != (C.source(f), C.target(g)):
                report.fail("closure", g, f, h, detail="composite has wrong endpoints")
    mors = list(C.morphisms())
    for f in mors:
        a, b = C.source(f), C.target(f)
        if C.compose(C.identity(a), f) != f:
            report.fail("identity", C.identity(a), f, detail="f∘id != f")
        if C.compose(f, C.identity(b)) != f:
            report.fail("identity", f, C.identity(b), detail="id∘f != f")
    by_source: dict = {}
    for f in mors:
        by_source.setdefault(C.source(f), []).append(f)
    composites = {}
    for f in mors:
        for g in by_source.get(C.target(f), ()):
            try:
                composites[(f, g)] = C.compose(f, g)
            except CompositionError:
                report.fail("closure", g, f, detail="composite undefined")
    for (f, g), gf in composites.items():
        for h in by_source.get(C.target(g), ()):
            hg = composites.get((g, h))
            left = composites.get((gf, h)) if gf is not None else None
            if hg is None or left is None:
                continue
            right = composites.get((f, hg))
            if right is None:
                continue
            if left != right:
                report.fail("associativity", h, g, f, detail=f"(h∘g)∘f={right!r} but h∘(g∘f)={left!r}")
    return report


# ---------------------------------------------------------------------------
# Functors


@dataclass
class Functor:
    source: Category
    target: Category
    on_objects: Callable[[Obj], Obj]
    on_morphisms: Callable[[Mor], Mor]
    name: str = "F"

    @classmethod
    def from_maps(cls, source, target, objects: Mapping, morphisms: Mapping, name: str = "F") -> "Functor":
        return cls(source, target, objects.__getitem__, morphisms.__getitem__, name)

    @classmethod
    def identity_functor(cls, C: Category) -> "Functor":
        return cls(C, C, lambda a: a, lambda f: f, "id")

    def __call__(self, x):
        return self.on_morphisms(x)


def check_functor(F: Functor) -> ValidationReport:
    C, D = F.source, F.target
    report = ValidationReport(F.name)
    for law in ("endpoints", "identities", "composition"):
        report.check(law)
    mors = list(C.morphisms())
    images = {}
    for f in mors:
        try:
            images[f] = F.on_morphisms(f)
        except (KeyError, LookupError):
            report.fail("endpoints", f, detail="morphism not mapped")
            continue
        if (D.source(images[f]), D.target(images[f])) != (F.on_objects(C.source(f)), F.on_objects(C.target(f))):
            report.fail("endpoints", f, detail="source/target not preserved")
    for a in C.objects:
        if F.on_morphisms(C.identity(a)) != D.identity(F.on_objects(a)):
            report.fail("identities", a)
    for f in mors:
        for g in (g for g in mors if C.source(g) == C.target(f)):
            if f in images and g in images:
                if images.get(C.compose(f, g)) != D.compose(images[f], images[g]):
                    report.fail("composition", g, f)
    return report


# ---------------------------------------------------------------------------
# Diagrams


@dataclass
class Diagram:
    """A finite directed graph labelled in a host category.

    ``nodes`` maps node ids to objects; ``edges`` are ``(u, v, morphism)``.
    """

    host: Category
    nodes: dict
    edges: list = field(default_factory=list)

    def add_node(self, n, obj) -> None:
        self.nodes[n] = obj

    def add_edge(self, u, v, mor) -> None:
        self.edges.append((u, v, mor))

    def validate(self) -> None:
        for u, v, m in self.edges:
            if m is None:
                raise StructuralError(f"edge {u!r}->{v!r} is unlabeled")
            if u not in self.nodes or v not in self.nodes:
                raise StructuralError(f"edge {u!r}->{v!r} has an unknown endpoint")
            if (self.host.source(m), self.host.target(m)) != (self.nodes[u], self.nodes[v]):
                raise StructuralError(f"edge {u!r}->{v!r}: morphism endpoints do not match node labels")

    def topological_order(self) -> list:
        indeg = {n: 0 for n in self.nodes}
        for _, v, _ in self.edges:
            indeg[v] += 1
        ready = [n for n in self.nodes if indeg[n] == 0]
        order = []
        while ready:
            n = ready.pop(0)
            order.append(n)
            for u, v, _ in self.edges:
                if u == n:
                    indeg[v] -= 1
                    if indeg[v] == 0:
                        ready.append(v)
        if len(order) != len(self.nodes):
            raise StructuralError("diagram has a directed cycle; path enumeration would not terminate")
        return order


@dataclass
class CommutativityReport:
    commutes: bool
    pairs_checked: int
    witness: Optional[tuple] = None  # (u, v, path1, composite1, path2, composite2)

    def __bool__(self) -> bool:
        return self.commutes


def check_commutes(D: Diagram) -> CommutativityReport:
    """Check that all directed paths between each ordered node pair agree.

    Propagates, per start node, the set of distinct composites reaching each
    node (with one representative path), so the cost is polynomial in the
    number of distinct composites rather than the number of paths.
    """
    D.validate()
    order = D.topological_order()
    pos = {n: k for k, n in enumerate(order)}
    out_edges: dict = {n: [] for n in D.nodes}
    for e in D.edges:
        out_edges[e[0]].append(e)
    C = D.host
    pairs = 0
    for s in order:
        reach: dict = {s: {C.identity(D.nodes[s]): ()}}
        for n in order[pos[s]:]:
            if n not in reach:
                continue
            for u, v, m in out_edges[n]:
                bucket = reach.setdefault(v, {})
                for comp, path in reach[n].items():
                    new = C.compose(comp, m)
                    if new not in bucket:
                        bucket[new] = path + ((u, v),)
        for t in order[pos[s] + 1:]:
            if t in reach:
                pairs += 1
                if len(reach[t]) > 1:
                    (c1, p1), (c2, p2) = list(reach[t].items())[:2]
                    return CommutativityReport(False, pairs, (s, t, p1, c1, p2, c2))
    return CommutativityReport(True, pairs)


# ---------------------------------------------------------------------------
# Pushouts


@dataclass(frozen=True)
class Cocone:
    apex: Obj
    legs: tuple  # (i: A -> apex, j: B -> apex)


def cocones(C: Category, f: Mor, g: Mor) -> Iterator[Cocone]:
    """All cocones under the span ``A <-f- X -g-> B``."""
    A, B = C.target(f), C.target(g)
    for d in C.objects:
        for u in C.hom(A, d):
            fu = C.compose(f, u)
            for v in C.hom(B, d):
                if fu == C.compose(g, v):
                    yield Cocone(d, (u, v))


def is_pushout(C: Category, f: Mor, g: Mor, cand: Cocone, all_cocones: Optional[list] = None) -> bool:
    """Universal property checked against every cocone of the span."""
    i, j = cand.legs
    if C.compose(f, i) != C.compose(g, j):
        return False
    if all_cocones is None:
        all_cocones = list(cocones(C, f, g))
    for other in all_cocones:
        u, v = other.legs
        hits = sum(1 for h in C.hom(cand.apex, other.apex) if C.compose(i, h) == u and C.compose(j, h) == v)
        if hits != 1:
            return False
    return True


def search_pushout(C: Category, f: Mor, g: Mor) -> Cocone:
    if C.source(f) != C.source(g):
        raise StructuralError("span legs must share their source")
    cands = list(cocones(C, f, g))
    if not cands:
        raise PushoutMissingError(f"no cocone exists over the span ({f!r}, {g!r})")
    for cand in cands:
        if is_pushout(C, f, g, cand, cands):
            return cand
    raise PushoutMissingError(f"no cocone over ({f!r}, {g!r}) is universal")


def pushout(C: Category, span: tuple[Mor, Mor]) -> Cocone:
    """Pushout of ``A <-f- X -g-> B``; raises :class:`PushoutMissingError`."""
    f, g = span
    if C.source(f) != C.source(g):
        raise StructuralError("span legs must share their source")
    return C.pushout(f, g)


def cocones_isomorphic(C: Category, p: Cocone, q: Cocone) -> bool:
    """Is there an isomorphism of apexes commuting with both legs?"""
    for h in C.hom(p.apex, q.apex):
        if C.compose(p.legs[0], h) == q.legs[0] and C.compose(p.legs[1], h) == q.legs[1] and C.is_isomorphism(h):
            return True
    return False


# ---------------------------------------------------------------------------
# Small builders


def terminal_category() -> FinCategory:
    return FinCategory(["*"], {"id_*": ("*", "*")}, {"*": "id_*"}, {}, name="terminal")


def poset_chain(n: int) -> FinCategory:
    """The poset ``0 -> 1 -> ... -> n-1`` with one arrow ``i->j`` for i <= j."""
    objs = list(range(n))
    ends = {}
    for i in range(n):
        for j in range(i, n):
            ends[f"{i}<{j}" if i != j else f"id_{i}"] = (i, j)
    name = lambda i, j: f"id_{i}" if i == j else f"{i}<{j}"
    table = {
        (name(j, k), name(i, j)): name(i, k)
        for i in range(n) for j in range(i, n) for k in range(j, n)
        if i != j and j != k
    }
    return FinCategory(objs, ends, {i: f"id_{i}" for i in objs}, table, name=f"chain{n}")


def group_category(elements: Sequence, mul: Callable, unit, name: str = "BG") -> FinCategory:
    """A group viewed as a one-object category; morphism ids are the elements."""
    ends = {g: ("*", "*") for g in elements}
    table = {(g, f): mul(g, f) for f in elements for g in elements if f != unit and g != unit}
    return FinCategory(["*"], ends, {"*": unit}, table, name=name)


def free_square() -> FinCategory:
    """``a -f-> b -g-> d`` and ``a -h-> c -k-> d`` with distinct composites."""
    ends = {
        "id_a": ("a", "a"), "id_b": ("b", "b"), "id_c": ("c", "c"), "id_d": ("d", "d"),
        "f": ("a", "b"), "g": ("b", "d"), "h": ("a", "c"), "k": ("c", "d"),
        "gf": ("a", "d"), "kh": ("a", "d"),
    }
    ids = {o: f"id_{o}" for o in "abcd"}
    return FinCategory("abcd", ends, ids, {("g", "f"): "gf", ("k", "h"): "kh"}, name="free_square")

