"""Exact and Waldhausen structures on matrix categories.

Objects of a :class:`MatrixCategory` are finitely generated abelian groups
with a diagonal presentation: ``Module((0, 2, 4))`` is ``Z + Z/2 + Z/4`` and
``Module((p,) * n)`` is the vector space ``F_p^n``. Morphisms are integer
matrices, reduced entrywise modulo the target's moduli. Kernels, images and
pushouts are computed with integer lattices and the Smith normal form, so the
same code covers ``Z`` and ``Z/p``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

from . import linalg as la
from .category import (
    Category,
    Cocone,
    CompositionError,
    PushoutMissingError,
    StructuralError,
    ValidationReport,
    check_category_axioms,
)


class InfiniteHomError(StructuralError):
    """Hom-set enumeration requested between modules with a free summand."""


class PushoutOutsideDeclared(PushoutMissingError):
    """The ambient pushout exists but is not isomorphic to any declared object."""


class ConversionRefused(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Module:
    moduli: tuple[int, ...] = ()

    def __post_init__(self):
        if any(d < 0 or d == 1 for d in self.moduli):
            raise StructuralError(f"moduli must be 0 (free) or >= 2, got {self.moduli}")

    @property
    def rank(self) -> int:
        """Number of generators."""
        return len(self.moduli)

    @property
    def order(self) -> Optional[int]:
        if 0 in self.moduli:
            return None
        out = 1
        for d in self.moduli:
            out *= d
        return out

    @property
    def is_finite(self) -> bool:
        return 0 not in self.moduli

    def relations(self) -> la.Matrix:
        n = self.rank
        return tuple(tuple(self.moduli[i] if i == j else 0 for j in range(n)) for i in range(n))

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % d if d else x for x, d in zip(v, self.moduli))

    def elements(self) -> Iterator[tuple[int, ...]]:
        if not self.is_finite:
            raise InfiniteHomError(f"{self} is infinite")
        return itertools.product(*(range(d) for d in self.moduli))

    def __add__(self, other: "Module") -> "Module":
        return Module(self.moduli + other.moduli)

    def __str__(self) -> str:
        if not self.moduli:
            return "0"
        parts = []
        for d, grp in itertools.groupby(self.moduli):
            k = len(list(grp))
            base = "Z" if d == 0 else f"Z/{d}"
            parts.append(base if k == 1 else f"{base}^{k}")
        return "+".join(parts)


def vector_space(p: int, dim: int) -> Module:
    return Module((p,) * dim)


@lru_cache(maxsize=None)
def normal_form(m: Module) -> tuple[int, ...]:
    """Invariant factors (>1) followed by one 0 per free summand; iso-class key."""
    snf = la.smith_normal_form(m.relations(), ncols=m.rank)
    facs = list(snf.factors) + [0] * (m.rank - snf.rank)
    return tuple(d for d in facs if d != 1)


@dataclass(frozen=True)
class MatrixMorphism:
    source: Module
    target: Module
    entries: la.Matrix

    def __post_init__(self):
        if len(self.entries) != self.target.rank or any(len(r) != self.source.rank for r in self.entries):
            raise StructuralError(f"matrix shape does not match {self.source} -> {self.target}")

    @classmethod
    def make(cls, source: Module, target: Module, rows: Sequence[Sequence[int]]) -> "MatrixMorphism":
        """Build a canonical (reduced) morphism, checking it is well defined."""
        rows = [list(r) for r in rows]
        if target.rank and not rows:
            rows = [[] for _ in range(target.rank)]
        ent = tuple(
            tuple(x % target.moduli[i] if target.moduli[i] else x for x in row)
            for i, row in enumerate(rows)
        )
        mor = cls(source, target, ent)
        if not mor.well_defined():
            raise StructuralError(f"matrix {ent} does not define a map {source} -> {target}")
        return mor

    def well_defined(self) -> bool:
        for j, d in enumerate(self.source.moduli):
            for i, e in enumerate(self.target.moduli):
                a = self.entries[i][j]
                if e == 0:
                    if d != 0 and a != 0:
                        return False
                elif (d * a) % e:
                    return False
        return True

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.target.reduce(la.matvec(self.entries, v))

    def __str__(self) -> str:
        rows = ";".join(",".join(map(str, r)) for r in self.entries)
        return f"[{rows}]:{self.source}->{self.target}"


def _raw(source: Module, target: Module, entries: la.Matrix) -> MatrixMorphism:
    # skips shape validation; callers guarantee it
    mor = object.__new__(MatrixMorphism)
    object.__setattr__(mor, "source", source)
    object.__setattr__(mor, "target", target)
    object.__setattr__(mor, "entries", entries)
    return mor


def _compose(f: MatrixMorphism, g: MatrixMorphism) -> MatrixMorphism:
    if f.target != g.source:
        raise CompositionError(f"cannot compose {f} then {g}")
    n = f.source.rank
    if f.entries:
        cols = tuple(zip(*f.entries))
        rows = [[sum(a * b for a, b in zip(grow, c)) for c in cols] for grow in g.entries]
    else:
        rows = [[0] * n for _ in g.entries]
    mods = g.target.moduli
    ent = tuple(tuple(x % m for x in row) if m else tuple(row) for row, m in zip(rows, mods))
    return _raw(f.source, g.target, ent)


def _identity(a: Module) -> MatrixMorphism:
    return MatrixMorphism(a, a, la.identity(a.rank))


def _zero(a: Module, b: Module) -> MatrixMorphism:
    return MatrixMorphism(a, b, la.zeros(b.rank, a.rank))


def _preimage_generators(f: MatrixMorphism) -> list[tuple[int, ...]]:
    """Generators of {x in Z^n : f(x) = 0 in the target}, a lattice in Z^n."""
    n, m = f.source.rank, f.target.rank
    if n == 0:
        return []
    big = la.hstack(f.entries, tuple(tuple(-x for x in r) for r in f.target.relations()), rows=m) if m else ()
    kern = la.int_kernel(big, ncols=n + m)
    return la.hermite_basis([k[:n] for k in kern], n)


def _lattice_le(gens: Iterable[Sequence[int]], module: Module) -> bool:
    """Is the lattice spanned by ``gens`` inside the relation lattice of ``module``?"""
    return all(
        (x == 0 if d == 0 else x % d == 0)
        for v in gens for x, d in zip(v, module.moduli)
    )


def is_injective(f: MatrixMorphism) -> bool:
    return _lattice_le(_preimage_generators(f), f.source)


def is_surjective(f: MatrixMorphism) -> bool:
    m = f.target.rank
    if m == 0:
        return True
    big = la.hstack(f.entries, f.target.relations(), rows=m)
    snf = la.smith_normal_form(big, ncols=f.source.rank + m)
    return snf.factors == (1,) * m


def _image_lattice(f: MatrixMorphism) -> list[tuple[int, ...]]:
    cols = list(la.transpose(f.entries, f.source.rank)) + list(la.transpose(f.target.relations(), f.target.rank))
    return la.hermite_basis(cols, f.target.rank)


def _kernel_lattice(f: MatrixMorphism) -> list[tuple[int, ...]]:
    rel = list(la.transpose(f.source.relations(), f.source.rank))
    return la.hermite_basis(list(_preimage_generators(f)) + rel, f.source.rank)


def matrix_inverse(f: MatrixMorphism) -> Optional[MatrixMorphism]:
    if not (is_injective(f) and is_surjective(f)):
        return None
    m, n = f.target.rank, f.source.rank
    big = la.hstack(f.entries, f.target.relations(), rows=m) if m else ()
    cols = []
    for k in range(m):
        e = tuple(int(i == k) for i in range(m))
        sol = la.int_solve(big, e, ncols=n + m)
        cols.append(sol[:n])
    rows = la.transpose(tuple(cols), n) if m else tuple(() for _ in range(n))
    return MatrixMorphism.make(f.target, f.source, rows)


# ---------------------------------------------------------------------------
# Short exact sequences


@dataclass(frozen=True)
class ShortExactSeq:
    """``0 -> left -mono-> middle -epi-> right -> 0`` (not necessarily exact)."""

    left: object
    middle: object
    right: object
    mono: object
    epi: object

    def __str__(self) -> str:
        return f"0->{self.left}->{self.middle}->{self.right}->0 [{self.mono} ; {self.epi}]"


def _exact_pair(f1, f2) -> bool:
    if isinstance(f1, tuple):
        return all(_exact_pair(a, b) for a, b in zip(f1, f2))
    if not (is_injective(f1) and is_surjective(f2)):
        return False
    return _image_lattice(f1) == _kernel_lattice(f2)


def _check_shapes(s: ShortExactSeq) -> None:
    def ends(f):
        if isinstance(f, tuple):
            return tuple(zip(*(ends(x) for x in f)))
        return (f.source, f.target)

    if ends(s.mono) != (s.left, s.middle) or ends(s.epi) != (s.middle, s.right):
        raise StructuralError(f"sequence shapes are incompatible: {s}")


def is_exact_sequence(s: ShortExactSeq) -> bool:
    """Injective mono, surjective epi, and image(mono) = kernel(epi)."""
    _check_shapes(s)
    return _exact_pair(s.mono, s.epi)


def split_seq(left, right, host: Optional[Category] = None) -> ShortExactSeq:
    """The split sequence ``0 -> L' -> L' + L'' -> L'' -> 0``."""
    if host is not None and not isinstance(host, AdditiveCategory):
        raise StructuralError(f"{host!r} is not additive; direct sums are unavailable")
    if isinstance(left, tuple):
        parts = [split_seq(a, b) for a, b in zip(left, right)]
        return ShortExactSeq(
            left, tuple(p.middle for p in parts), right,
            tuple(p.mono for p in parts), tuple(p.epi for p in parts),
        )
    if not isinstance(left, Module) or not isinstance(right, Module):
        raise StructuralError("split_seq needs module objects")
    mid = left + right
    a, b = left.rank, right.rank
    inc = tuple(tuple(int(i == j) for j in range(a)) for i in range(a + b))
    proj = tuple(tuple(int(j == a + i) for j in range(a + b)) for i in range(b))
    return ShortExactSeq(
        left, mid, right,
        MatrixMorphism.make(left, mid, inc),
        MatrixMorphism.make(mid, right, proj),
    )


# ---------------------------------------------------------------------------
# Additive categories


class AdditiveCategory(Category):
    """Categories with zero object, biproducts and computable exactness."""

    zero: object

    def exact_sequences(self) -> list[ShortExactSeq]:
        raise NotImplementedError

    def iso_key(self, a):
        raise NotImplementedError

    def zero_morphism(self, a, b):
        raise NotImplementedError

    def isos_from(self, a) -> list[tuple[object, object]]:
        """All ``(iso, inverse)`` pairs with source ``a`` into declared objects."""
        cache = self.__dict__.setdefault("_isos_from", {})
        if a not in cache:
            out = []
            for b in self.objects:
                if self.iso_key(b) != self.iso_key(a):
                    continue
                for f in self.hom(a, b):
                    inv = self.inverse(f)
                    if inv is not None:
                        out.append((f, inv))
            cache[a] = out
        return cache[a]


class MatrixCategory(AdditiveCategory):
    """Full subcategory of f.g. abelian groups (or ``F_p``-spaces) on declared objects."""

    def __init__(self, objects: Iterable[Module], ring: str = "Z", name: str = ""):
        self.objects = tuple(dict.fromkeys(objects))
        self.ring = ring
        self.name = name or f"Mat({ring})"
        self._objset = set(self.objects)
        p = ring_modulus(ring)
        for o in self.objects:
            if p and any(d != p for d in o.moduli):
                raise StructuralError(f"{o} is not an F_{p}-space")
        zeros = [o for o in self.objects if o.rank == 0]
        self.zero = zeros[0] if zeros else None
        self._hom_cache: dict = {}
        self._inv_cache: dict = {}
        self._compose_cache: dict = {}

    def __repr__(self) -> str:
        return f"MatrixCategory({self.name!r}, {[str(o) for o in self.objects]})"

    def hom(self, a: Module, b: Module) -> tuple:
        key = (a, b)
        if key not in self._hom_cache:
            self._hom_cache[key] = tuple(self._enumerate_hom(a, b))
        return self._hom_cache[key]

    def _enumerate_hom(self, a: Module, b: Module) -> Iterator[MatrixMorphism]:
        # column j must be an element x of b with moduli[j] * x = 0
        columns = []
        for d in a.moduli:
            choices = []
            axes = []
            for e in b.moduli:
                if e == 0:
                    if d == 0:
                        raise InfiniteHomError(f"Hom({a}, {b}) is infinite")
                    axes.append([0])
                else:
                    axes.append([x for x in range(e) if (d * x) % e == 0])
            choices = list(itertools.product(*axes))
            columns.append(choices)
        for cols in itertools.product(*columns):
            rows = tuple(tuple(c[i] for c in cols) for i in range(b.rank))
            yield MatrixMorphism(a, b, rows)

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def identity(self, a):
        return _identity(a)

    def compose(self, f, g):
        key = (f, g)
        out = self._compose_cache.get(key)
        if out is None:
            out = self._compose_cache[key] = _compose(f, g)
        return out

    def zero_morphism(self, a, b):
        return _zero(a, b)

    def inverse(self, f):
        if f not in self._inv_cache:
            self._inv_cache[f] = matrix_inverse(f)
        return self._inv_cache[f]

    def iso_key(self, a):
        return normal_form(a)

    def is_zero_object(self, z):
        return isinstance(z, Module) and z.rank == 0

    def declared_iso(self, m: Module) -> Optional[Module]:
        key = normal_form(m)
        return next((o for o in self.objects if normal_form(o) == key), None)

    def pushout(self, f: MatrixMorphism, g: MatrixMorphism) -> Cocone:
        """Algebraic pushout ``(A + B) / im(f, -g)`` transported onto a declared object."""
        if f.source != g.source:
            raise StructuralError("span legs must share their source")
        A, B, X = f.target, g.target, f.source
        nA, nB = A.rank, B.rank
        n = nA + nB
        rel_cols = list(la.transpose(A.relations(), nA))
        rel_cols = [c + (0,) * nB for c in rel_cols]
        rel_cols += [(0,) * nA + c for c in la.transpose(B.relations(), nB)]
        fcols = la.transpose(f.entries, X.rank)
        gcols = la.transpose(g.entries, X.rank)
        rel_cols += [tuple(fc) + tuple(-x for x in gc) for fc, gc in zip(fcols, gcols)]
        rel = la.transpose(tuple(rel_cols), n) if rel_cols else la.zeros(n, 0)
        snf = la.smith_normal_form(rel, ncols=len(rel_cols))
        facs = list(snf.factors) + [0] * (n - snf.rank)
        keep = [k for k in range(n) if facs[k] != 1]
        std = Module(tuple(facs[k] for k in keep))
        target = self.declared_iso(std)
        if target is None:
            raise PushoutOutsideDeclared(f"pushout {std} of ({f}, {g}) is not a declared object")
        # std -> target: embed into the target's Smith coordinates and undo them
        tsnf = la.smith_normal_form(target.relations(), ncols=target.rank)
        tfacs = list(tsnf.factors) + [0] * (target.rank - tsnf.rank)
        tkeep = [k for k in range(target.rank) if tfacs[k] != 1]
        linv = la.invert_unimodular(tsnf.left) if target.rank else ()
        to_target = tuple(
            tuple(sum(linv[r][tkeep[s]] * snf.left[keep[s]][c] for s in range(len(keep))) for c in range(n))
            for r in range(target.rank)
        )
        i_leg = MatrixMorphism.make(A, target, tuple(row[:nA] for row in to_target))
        j_leg = MatrixMorphism.make(B, target, tuple(row[nA:] for row in to_target))
        return Cocone(target, (i_leg, j_leg))

    def exact_sequences(self) -> list[ShortExactSeq]:
        """Every exact sequence whose three terms are declared objects."""
        out = []
        inj = {}
        surj = {}
        for a in self.objects:
            for b in self.objects:
                inj[(a, b)] = [f for f in self.hom(a, b) if is_injective(f)]
                surj[(a, b)] = [f for f in self.hom(a, b) if is_surjective(f)]
        for l1, l, l2 in itertools.product(self.objects, repeat=3):
            if l1.order * l2.order != l.order:
                continue
            for f1 in inj[(l1, l)]:
                for f2 in surj[(l, l2)]:
                    if _compose(f1, f2) != _zero(l1, l2):
                        continue
                    if _image_lattice(f1) == _kernel_lattice(f2):
                        out.append(ShortExactSeq(l1, l, l2, f1, f2))
        return out


class ProductCategory(AdditiveCategory):
    """Product of two additive categories; objects and morphisms are pairs."""

    def __init__(self, first: AdditiveCategory, second: AdditiveCategory, name: str = ""):
        self.first, self.second = first, second
        self.objects = tuple(itertools.product(first.objects, second.objects))
        self.zero = (first.zero, second.zero)
        self.name = name or f"{getattr(first, 'name', 'C')}x{getattr(second, 'name', 'D')}"
        self._inv_cache: dict = {}

    def hom(self, a, b):
        return tuple(itertools.product(self.first.hom(a[0], b[0]), self.second.hom(a[1], b[1])))

    def source(self, f):
        return (self.first.source(f[0]), self.second.source(f[1]))

    def target(self, f):
        return (self.first.target(f[0]), self.second.target(f[1]))

    def identity(self, a):
        return (self.first.identity(a[0]), self.second.identity(a[1]))

    def compose(self, f, g):
        return (self.first.compose(f[0], g[0]), self.second.compose(f[1], g[1]))

    def zero_morphism(self, a, b):
        return (self.first.zero_morphism(a[0], b[0]), self.second.zero_morphism(a[1], b[1]))

    def inverse(self, f):
        if f not in self._inv_cache:
            i1, i2 = self.first.inverse(f[0]), self.second.inverse(f[1])
            self._inv_cache[f] = None if i1 is None or i2 is None else (i1, i2)
        return self._inv_cache[f]

    def iso_key(self, a):
        return (self.first.iso_key(a[0]), self.second.iso_key(a[1]))

    def is_zero_object(self, z):
        return self.first.is_zero_object(z[0]) and self.second.is_zero_object(z[1])

    def pushout(self, f, g):
        p1 = self.first.pushout(f[0], g[0])
        p2 = self.second.pushout(f[1], g[1])
        return Cocone((p1.apex, p2.apex), ((p1.legs[0], p2.legs[0]), (p1.legs[1], p2.legs[1])))

    def exact_sequences(self):
        return [
            ShortExactSeq((s.left, t.left), (s.middle, t.middle), (s.right, t.right),
                          (s.mono, t.mono), (s.epi, t.epi))
            for s in self.first.exact_sequences() for t in self.second.exact_sequences()
        ]


def ring_modulus(ring: str) -> int:
    """0 for ``Z``, ``p`` for ``zmod:p`` / ``Z/p``."""
    r = ring.lower()
    if r in ("z", "zz"):
        return 0
    for prefix in ("zmod:", "z/", "f"):
        if r.startswith(prefix):
            return int(r[len(prefix):])
    raise StructuralError(f"unknown ring tag {ring!r}")


def vector_space_category(p: int, maxdim: int) -> MatrixCategory:
    return MatrixCategory([vector_space(p, d) for d in range(maxdim + 1)], ring=f"zmod:{p}",
                          name=f"F{p}-spaces(dim<={maxdim})")


def module_category(moduli_list: Iterable[Sequence[int]], name: str = "") -> MatrixCategory:
    return MatrixCategory([Module(tuple(m)) for m in moduli_list], ring="Z", name=name)


# ---------------------------------------------------------------------------
# Exact structures


@dataclass
class ExactStructure:
    host: AdditiveCategory
    sigma: frozenset
    name: str = "E"

    @classmethod
    def full(cls, host: AdditiveCategory, name: str = "") -> "ExactStructure":
        """Sigma = every exact sequence among the declared objects."""
        return cls(host, frozenset(host.exact_sequences()), name or getattr(host, "name", "E"))

    def ordered_sigma(self) -> list[ShortExactSeq]:
        return sorted(self.sigma, key=_seq_key)

    def admissible_monos(self) -> set:
        return {s.mono for s in self.sigma}

    def admissible_epis(self) -> set:
        return {s.epi for s in self.sigma}


def product_structure(e1: ExactStructure, e2: ExactStructure) -> ExactStructure:
    host = ProductCategory(e1.host, e2.host)
    sigma = frozenset(
        ShortExactSeq((s.left, t.left), (s.middle, t.middle), (s.right, t.right), (s.mono, t.mono), (s.epi, t.epi))
        for s in e1.sigma for t in e2.sigma
    )
    return ExactStructure(host, sigma, f"{e1.name}x{e2.name}")


def _seq_key(s: ShortExactSeq):
    return str(s)


def _transports(host: AdditiveCategory, s: ShortExactSeq) -> Iterator[ShortExactSeq]:
    """Sequences isomorphic to ``s`` via an isomorphism on a single term."""
    for a, a_inv in host.isos_from(s.left):
        yield ShortExactSeq(host.target(a), s.middle, s.right, host.compose(a_inv, s.mono), s.epi)
    for b, b_inv in host.isos_from(s.middle):
        yield ShortExactSeq(s.left, host.target(b), s.right, host.compose(s.mono, b), host.compose(b_inv, s.epi))
    for c, _ in host.isos_from(s.right):
        yield ShortExactSeq(s.left, s.middle, host.target(c), s.mono, host.compose(s.epi, c))


def check_exact_axioms(E: ExactStructure, check_host: bool = False) -> ValidationReport:
    """Exactness of members, split sequences, isomorphism and extension closure.

    Closure under extensions is checked on the declared objects only: every
    exact sequence whose three terms are declared must belong to Sigma.
    """
    host = E.host
    report = ValidationReport(E.name)
    if check_host:
        report.merge(check_category_axioms(host), prefix="host.")
    for law in ("members-exact", "split", "iso-closure", "extension-closure"):
        report.check(law)
    declared = set(host.objects)
    for s in E.ordered_sigma():
        if not {s.left, s.middle, s.right} <= declared:
            report.fail("members-exact", str(s), detail="uses an undeclared object")
        elif not is_exact_sequence(s):
            report.fail("members-exact", str(s))
    for a in host.objects:
        for b in host.objects:
            sp = split_seq(a, b)
            if sp.middle in declared and sp not in E.sigma:
                report.fail("split", str(a), str(b), detail="split sequence missing")
    for s in E.ordered_sigma():
        if report.failed("iso-closure"):
            break
        for t in _transports(host, s):
            if t not in E.sigma:
                report.fail("iso-closure", str(s), str(t), detail="isomorph missing")
                break
    for s in sorted(host.exact_sequences(), key=_seq_key):
        if s not in E.sigma:
            report.fail("extension-closure", str(s), detail="exact sequence among declared objects missing")
            break
    return report


# ---------------------------------------------------------------------------
# Waldhausen structures


@dataclass
class WaldhausenStructure:
    host: Category
    co: frozenset
    we: frozenset
    zero: object
    name: str = "W"


def exact_to_waldhausen(E: ExactStructure) -> WaldhausenStructure:
    """Cofibrations: admissible monos plus isomorphisms; weak equivalences: isomorphisms."""
    report = check_exact_axioms(E)
    if not report.ok:
        raise ConversionRefused(f"{E.name} is not an exact structure: {report.violations[0]}")
    host = E.host
    isos = frozenset(host.isomorphisms())
    co = frozenset(E.admissible_monos()) | isos
    return WaldhausenStructure(host, co, isos, host.zero, name=f"W({E.name})")


def check_waldhausen_axioms(W: WaldhausenStructure, check_host: bool = False) -> ValidationReport:
    C = W.host
    report = ValidationReport(W.name)
    if check_host:
        report.merge(check_category_axioms(C), prefix="host.")
    for law in ("zero-object", "zero-cofibrations", "isos-in-co", "isos-in-we",
                "co-composition", "we-composition", "pushout-compatibility"):
        report.check(law)
    if W.zero not in C.objects or not C.is_zero_object(W.zero):
        report.fail("zero-object", W.zero)
        return report
    for a in C.objects:
        (z,) = C.hom(W.zero, a)
        if z not in W.co:
            report.fail("zero-cofibrations", a, detail="0 -> A is not a cofibration")
    isos = C.isomorphisms()
    for f in isos:
        if f not in W.co:
            report.fail("isos-in-co", f)
            break
    for f in isos:
        if f not in W.we:
            report.fail("isos-in-we", f)
            break
    for law, cls in (("co-composition", W.co), ("we-composition", W.we)):
        by_source: dict = {}
        for g in cls:
            by_source.setdefault(C.source(g), []).append(g)
        for f in sorted(cls, key=str):
            for g in sorted(by_source.get(C.target(f), ()), key=str):
                if C.compose(f, g) not in cls:
                    report.fail(law, f, g, detail="composite leaves the class")
                    break
            if report.failed(law):
                break
    truncated = 0
    for i in sorted(W.co, key=str):
        if report.failed("pushout-compatibility"):
            break
        if C.is_isomorphism(i):
            # pushout along an iso is (C, g∘i⁻¹, id_C); id_C is an iso, hence in co
            continue
        a = C.source(i)
        for c in C.objects:
            for g in C.hom(a, c):
                try:
                    cone = C.pushout(i, g)
                except PushoutOutsideDeclared:
                    truncated += 1
                    continue
                except PushoutMissingError:
                    report.fail("pushout-compatibility", i, g, detail="pushout missing")
                    break
                if cone.legs[1] not in W.co:
                    report.fail("pushout-compatibility", i, g, detail="induced map is not a cofibration")
                    break
            if report.failed("pushout-compatibility"):
                break
    if truncated:
        report.notes.append(f"{truncated} span(s) have pushouts outside the declared objects (skipped)")
    return report
