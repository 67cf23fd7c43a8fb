"""Nerves, the S-construction and K0.

The K-theory space at level ``m`` is kept combinatorial: we build the nerve
of the weak-equivalence subcategory of the ``m``-th S-construction as a
truncated :class:`SimplicialSet` and stop there. The degree-0 invariant is
computed separately as a Grothendieck group presented by generators and
relations and reduced with the Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from . import linalg as la
from .category import (
    Category,
    Cocone,
    CompositionError,
    Diagram,
    PushoutMissingError,
    ValidationReport,
    check_commutes,
)
from .exact import ExactStructure, WaldhausenStructure, check_exact_axioms
from .linalg import SmithForm, smith_normal_form

__all__ = [
    "AbelianGroup",
    "SimplicialSet",
    "Staircase",
    "SConstructionLevel",
    "EnumerationIncomplete",
    "groups_isomorphic",
    "k0",
    "k_spectrum_level",
    "nerve",
    "s_construct",
    "smith_normal_form",
    "weak_equiv_subcat",
]


# ---------------------------------------------------------------------------
# Finitely presented abelian groups


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^generators / (column span of relations)``.

    ``relations`` has one row per generator and one column per relation.
    """

    generators: int
    relations: la.Matrix = ()
    labels: tuple = ()

    @classmethod
    def from_invariants(cls, free_rank: int = 0, torsion: Sequence[int] = ()) -> "AbelianGroup":
        n = free_rank + len(torsion)
        rel = tuple(
            tuple(torsion[j] if i == j else 0 for j in range(len(torsion))) for i in range(n)
        )
        return cls(n, rel)

    @property
    def nrelations(self) -> int:
        return len(self.relations[0]) if self.relations and self.relations[0] else 0

    @cached_property
    def smith(self) -> SmithForm:
        return smith_normal_form(self.relations, ncols=self.nrelations) if self.generators else smith_normal_form((), 0)

    @property
    def free_rank(self) -> int:
        return self.generators - self.smith.rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.smith.invariant_factors

    def normal_form(self) -> tuple[int, tuple[int, ...]]:
        return self.free_rank, self.torsion

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> Optional[int]:
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def describe(self) -> str:
        t = ", ".join(map(str, self.torsion)) if self.torsion else "none"
        return f"free rank {self.free_rank}, torsion {t}" if self.torsion else f"free rank {self.free_rank}, no torsion"

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def groups_isomorphic(g1: AbelianGroup, g2: AbelianGroup) -> bool:
    return g1.normal_form() == g2.normal_form()


def grothendieck_group(objects: Sequence, sequences: Sequence, iso_key: Callable) -> AbelianGroup:
    """Generators: iso classes of ``objects``; one relation per sequence."""
    index: dict = {}
    labels = []
    for a in objects:
        key = iso_key(a)
        if key not in index:
            index[key] = len(labels)
            labels.append(a)
    cols = []
    for s in sequences:
        col = [0] * len(labels)
        col[index[iso_key(s.middle)]] += 1
        col[index[iso_key(s.left)]] -= 1
        col[index[iso_key(s.right)]] -= 1
        cols.append(tuple(col))
    rel = la.transpose(tuple(cols), len(labels)) if cols else tuple(() for _ in labels)
    return AbelianGroup(len(labels), rel, tuple(labels))


def k0(E: ExactStructure, check: bool = True) -> AbelianGroup:
    """Grothendieck group: iso classes of objects modulo [L] = [L'] + [L'']."""
    if check:
        report = check_exact_axioms(E)
        if not report.ok:
            raise ValueError(f"{E.name} fails the exact axioms: {report.violations[0]}")
    return grothendieck_group(E.host.objects, E.ordered_sigma(), E.host.iso_key)


def k0_class(E: ExactStructure, group: AbelianGroup, obj) -> tuple[int, ...]:
    """Coordinates of ``[obj]`` in the Smith basis: torsion residues, then free part."""
    host = E.host
    keys = [host.iso_key(a) for a in group.labels]
    vec = [0] * group.generators
    vec[keys.index(host.iso_key(obj))] = 1
    return class_coordinates(group, vec)


def class_coordinates(group: AbelianGroup, vec: Sequence[int]) -> tuple[int, ...]:
    snf = group.smith
    y = la.matvec(snf.left, vec) if group.generators else ()
    out = []
    for k, yk in enumerate(y):
        d = snf.factors[k] if k < snf.rank else 0
        if d == 1:
            continue
        out.append(yk % d if d else yk)
    return tuple(out)


# ---------------------------------------------------------------------------
# Simplicial sets


@dataclass
class SimplicialSet:
    """A simplicial set truncated at level ``truncation``.

    ``faces[m][i]`` maps each m-simplex index to the index of its i-th face
    (m >= 1); ``degeneracies[m][i]`` maps m-simplices to (m+1)-simplices
    (m < truncation).
    """

    simplices: list
    faces: list
    degeneracies: list

    @property
    def truncation(self) -> int:
        return len(self.simplices) - 1

    def sizes(self) -> list[int]:
        return [len(level) for level in self.simplices]

    def face(self, m: int, i: int, k: int) -> int:
        return int(self.faces[m][i][k])

    def degeneracy(self, m: int, i: int, k: int) -> int:
        return int(self.degeneracies[m][i][k])

    def degenerate(self, m: int) -> np.ndarray:
        mask = np.zeros(len(self.simplices[m]), dtype=bool)
        if m >= 1:
            for s in self.degeneracies[m - 1]:
                mask[s] = True
        return mask

    def nondegenerate(self, m: int) -> list[int]:
        return [int(k) for k in np.flatnonzero(~self.degenerate(m))]

    def check_identities(self) -> ValidationReport:
        """Verify every simplicial identity on all stored levels."""
        report = ValidationReport("simplicial identities")
        for law in ("dd", "ds", "ss"):
            report.check(law)
        T = self.truncation
        d, s = self.faces, self.degeneracies

        def compare(law, lhs, rhs, m, desc):
            bad = np.flatnonzero(lhs != rhs)
            if bad.size:
                report.fail(law, m, int(bad[0]), detail=desc)

        # d_i d_j = d_{j-1} d_i  (i < j), on level m
        for m in range(2, T + 1):
            for j in range(m + 1):
                for i in range(j):
                    compare("dd", d[m - 1][i][d[m][j]], d[m - 1][j - 1][d[m][i]], m, f"d{i}d{j}")
        # face/degeneracy relations, applied to level m (s_j: m -> m+1, then d_i: m+1 -> m)
        for m in range(0, T):
            n = len(self.simplices[m])
            ident = np.arange(n)
            for j in range(m + 1):
                sj = s[m][j]
                for i in range(m + 2):
                    lhs = d[m + 1][i][sj]
                    if i == j or i == j + 1:
                        compare("ds", lhs, ident, m, f"d{i}s{j}")
                    elif i < j:
                        compare("ds", lhs, s[m - 1][j - 1][d[m][i]], m, f"d{i}s{j}")
                    else:
                        compare("ds", lhs, s[m - 1][j][d[m][i - 1]], m, f"d{i}s{j}")
        # s_i s_j = s_{j+1} s_i  (i <= j)
        for m in range(0, T - 1):
            for j in range(m + 1):
                for i in range(j + 1):
                    compare("ss", s[m + 1][i][s[m][j]], s[m + 1][j + 1][s[m][i]], m, f"s{i}s{j}")
        return report


def nerve(C: Category, T: int = 3) -> SimplicialSet:
    """Nerve truncated at ``T``: m-simplices are chains of m composable morphisms.

    Simplices are enumerated in a canonical order (morphism order of ``C``,
    extended lexicographically), so equal inputs give identical index tables.
    """
    if T < 0:
        raise ValueError("truncation level must be >= 0")
    objs = list(C.objects)
    oidx = {o: k for k, o in enumerate(objs)}
    mors = list(C.morphisms())
    midx = {m: k for k, m in enumerate(mors)}
    src = [oidx[C.source(m)] for m in mors]
    tgt = [oidx[C.target(m)] for m in mors]
    ident = [midx[C.identity(o)] for o in objs]
    out_of: list[list[int]] = [[] for _ in objs]
    for k in range(len(mors)):
        out_of[src[k]].append(k)
    comp: dict = {}

    def cmp(a: int, b: int) -> int:
        key = (a, b)
        if key not in comp:
            comp[key] = midx[C.compose(mors[a], mors[b])]
        return comp[key]

    levels: list[list] = [list(range(len(objs)))]
    if T >= 1:
        levels.append([(k,) for k in range(len(mors))])
    for m in range(2, T + 1):
        levels.append([c + (g,) for c in levels[-1] for g in out_of[tgt[c[-1]]]])
    index = [None] + [{c: k for k, c in enumerate(level)} for level in levels[1:]]

    faces: list = [None]
    if T >= 1:
        faces.append(np.array([[tgt[c[0]] for c in levels[1]], [src[c[0]] for c in levels[1]]], dtype=np.int64).reshape(2, -1))
    for m in range(2, T + 1):
        rows = []
        prev = index[m - 1]
        for i in range(m + 1):
            row = []
            for c in levels[m]:
                if i == 0:
                    f = c[1:]
                elif i == m:
                    f = c[:-1]
                else:
                    f = c[: i - 1] + (cmp(c[i - 1], c[i]),) + c[i + 1:]
                row.append(prev[f])
            rows.append(row)
        faces.append(np.array(rows, dtype=np.int64).reshape(m + 1, -1))

    degs: list = []
    for m in range(0, T):
        nxt = index[m + 1]
        rows = []
        for i in range(m + 1):
            row = []
            for c in levels[m]:
                if m == 0:
                    row.append(nxt[(ident[c],)])
                    continue
                obj = tgt[c[i - 1]] if i >= 1 else src[c[0]]
                row.append(nxt[c[:i] + (ident[obj],) + c[i:]])
            rows.append(row)
        degs.append(np.array(rows, dtype=np.int64).reshape(m + 1, -1))

    simplices = [objs] + [[tuple(mors[k] for k in c) for c in level] for level in levels[1:]]
    return SimplicialSet(simplices, faces, degs)


# ---------------------------------------------------------------------------
# S-construction


class EnumerationIncomplete(LookupError):
    pass


def _nodes(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n + 1) for j in range(i, n + 1)]


@dataclass(frozen=True)
class Staircase:
    """An object of ``S_n``: a cofibration chain with chosen quotients.

    ``objects`` lists ``A_ij`` for ``0 <= i <= j <= n`` in row-major order;
    ``horizontal`` holds ``A_ij -> A_i,j+1`` and ``vertical`` ``A_ij -> A_i+1,j``.
    """

    n: int
    objects: tuple
    horizontal: tuple
    vertical: tuple

    def obj(self, i: int, j: int):
        return dict(zip(_nodes(self.n), self.objects))[(i, j)]

    @property
    def chain(self) -> tuple:
        """The cofibrations ``A_1 -> A_2 -> ... -> A_n`` (top row after the zero)."""
        return tuple(m for (i, j), m in self.horizontal if i == 0 and j >= 1)

    def diagram(self, host: Category) -> Diagram:
        D = Diagram(host, dict(zip(_nodes(self.n), self.objects)))
        for (i, j), m in self.horizontal:
            D.add_edge((i, j), (i, j + 1), m)
        for (i, j), m in self.vertical:
            D.add_edge((i, j), (i + 1, j), m)
        return D

    def __str__(self) -> str:
        return " >-> ".join(str(self.obj(0, j)) for j in range(self.n + 1))


@dataclass(frozen=True)
class StairMap:
    source: Staircase
    target: Staircase
    components: tuple  # one per node, in _nodes order


class SConstructionLevel(Category):
    """``S_n W`` with levelwise commuting maps; optionally restricted by a component predicate."""

    def __init__(self, W: WaldhausenStructure, n: int, staircases: Sequence[Staircase],
                 cocones: dict, component_filter: Optional[Callable] = None, name: str = ""):
        self.W = W
        self.n = n
        self.objects = tuple(staircases)
        self._cocones = cocones  # staircase -> {(i, j): Cocone} for i >= 1
        self._filter = component_filter
        self._hom: dict = {}
        self.name = name or f"S{n}({W.name})"

    def restrict(self, predicate: Callable, name: str = "") -> "SConstructionLevel":
        return SConstructionLevel(self.W, self.n, self.objects, self._cocones, predicate, name)

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def identity(self, a):
        C = self.W.host
        return StairMap(a, a, tuple(C.identity(o) for o in a.objects))

    def compose(self, f, g):
        if f.target != g.source:
            raise CompositionError("staircase maps are not composable")
        C = self.W.host
        return StairMap(f.source, g.target, tuple(C.compose(a, b) for a, b in zip(f.components, g.components)))

    def hom(self, a: Staircase, b: Staircase) -> tuple:
        key = (a, b)
        if key not in self._hom:
            self._hom[key] = tuple(self._enumerate(a, b))
        return self._hom[key]

    def _enumerate(self, X: Staircase, Y: Staircase) -> Iterator[StairMap]:
        C = self.W.host
        n = self.n
        nodes = _nodes(n)
        pos = {node: k for k, node in enumerate(nodes)}
        keep = self._filter or (lambda f: True)
        xc, yc = X.chain, Y.chain
        choices = [[h for h in C.hom(X.obj(0, j), Y.obj(0, j)) if keep(h)] for j in range(1, n + 1)]

        def extend(j, acc):
            # acc holds h_1 .. h_{j-1}; h_j must commute with the chain maps
            if j > n:
                yield tuple(acc)
                return
            for h in choices[j - 1]:
                if j >= 2 and C.compose(xc[j - 2], h) != C.compose(acc[-1], yc[j - 2]):
                    continue
                yield from extend(j + 1, acc + [h])

        xh, xv = dict(X.horizontal), dict(X.vertical)
        yh, yv = dict(Y.horizontal), dict(Y.vertical)
        for top in extend(1, []):
            comps = [None] * len(nodes)
            comps[pos[(0, 0)]] = C.identity(X.obj(0, 0)) if X.obj(0, 0) == Y.obj(0, 0) else None
            for j in range(1, n + 1):
                comps[pos[(0, j)]] = top[j - 1]
            ok = True
            for i in range(1, n + 1):
                comps[pos[(i, i)]] = C.hom(X.obj(i, i), Y.obj(i, i))[0]
                for j in range(i + 1, n + 1):
                    cone = self._cocones[X][(i, j)]
                    u = C.compose(top[j - 1], self._cocones[Y][(i, j)].legs[0])
                    v = C.hom(C.source(cone.legs[1]), Y.obj(i, j))[0]
                    try:
                        comps[pos[(i, j)]] = C.factor_through(cone, u, v)
                    except PushoutMissingError:
                        ok = False
                        break
                if not ok:
                    break
            if not ok or comps[pos[(0, 0)]] is None:
                continue
            if not all(keep(c) for c in comps):
                continue
            squares = all(
                C.compose(xh[node], comps[pos[(node[0], node[1] + 1)]]) == C.compose(comps[pos[node]], yh[node])
                for node in xh
            ) and all(
                C.compose(xv[node], comps[pos[(node[0] + 1, node[1])]]) == C.compose(comps[pos[node]], yv[node])
                for node in xv
            )
            if squares:
                yield StairMap(X, Y, tuple(comps))


def _cofiber(W: WaldhausenStructure, mono) -> Cocone:
    """Pushout of ``0 <- A -> B`` along the cofibration ``mono: A -> B``."""
    C = W.host
    a = C.source(mono)
    (to_zero,) = C.hom(a, W.zero)
    try:
        return C.pushout(mono, to_zero)
    except PushoutMissingError as exc:
        raise EnumerationIncomplete(f"quotient of {mono} is missing from the declared objects: {exc}") from None


def _build_staircase(W: WaldhausenStructure, n: int, first, chain: Sequence) -> tuple[Staircase, dict]:
    """Chosen quotients ``A_ij = A_j / A_i`` and the induced staircase maps.

    ``first`` is ``A_1``; ``chain`` holds the cofibrations ``A_k -> A_k+1``.
    """
    C = W.host
    z = W.zero
    A = [z] + ([first] if n else []) + [C.target(c) for c in chain]
    steps = ([C.hom(z, first)[0]] if n else []) + list(chain)
    inc = {}  # (i, j) -> A_i -> A_j
    for i in range(n + 1):
        inc[(i, i)] = C.identity(A[i])
        for j in range(i + 1, n + 1):
            inc[(i, j)] = C.compose(inc[(i, j - 1)], steps[j - 1])
    obj = {}
    quot = {}  # (i, j) -> A_j -> A_ij
    cones = {}
    for j in range(n + 1):
        obj[(0, j)] = A[j]
        quot[(0, j)] = C.identity(A[j])
    for i in range(1, n + 1):
        obj[(i, i)] = z
        quot[(i, i)] = C.hom(A[i], z)[0]
        for j in range(i + 1, n + 1):
            cone = _cofiber(W, inc[(i, j)])
            cones[(i, j)] = cone
            obj[(i, j)] = cone.apex
            quot[(i, j)] = cone.legs[0]
    horizontal = []
    vertical = []
    for (i, j) in _nodes(n):
        if j < n:
            if i == j:
                m = C.hom(z, obj[(i, j + 1)])[0]
            elif i == 0:
                m = steps[j]
            else:
                u = C.compose(steps[j], quot[(i, j + 1)])
                v = C.hom(C.source(cones[(i, j)].legs[1]), obj[(i, j + 1)])[0]
                m = C.factor_through(cones[(i, j)], u, v)
            horizontal.append(((i, j), m))
        if i < j:
            if i + 1 == j:
                m = C.hom(obj[(i, j)], z)[0]
            elif i == 0:
                m = quot[(1, j)]
            else:
                u = quot[(i + 1, j)]
                v = C.hom(C.source(cones[(i, j)].legs[1]), obj[(i + 1, j)])[0]
                m = C.factor_through(cones[(i, j)], u, v)
            vertical.append(((i, j), m))
    st = Staircase(n, tuple(obj[node] for node in _nodes(n)), tuple(horizontal), tuple(vertical))
    return st, cones


def cofibration_chains(W: WaldhausenStructure, n: int) -> list[tuple]:
    """All ``(A_1, (A_1 >-> A_2, ..., A_n-1 >-> A_n))`` in canonical order."""
    C = W.host
    if n == 0:
        return []
    out = [(a, ()) for a in C.objects if C.hom(W.zero, a)[0] in W.co]
    for _ in range(1, n):
        nxt = []
        for first, ch in out:
            end = C.target(ch[-1]) if ch else first
            for b in C.objects:
                nxt.extend((first, ch + (c,)) for c in C.hom(end, b) if c in W.co)
        out = nxt
    return out


def s_construct(W: WaldhausenStructure, n: int, verify: bool = True) -> SConstructionLevel:
    """Enumerate every cofibration chain ``0 >-> A_1 >-> ... >-> A_n`` with chosen quotients.

    Quotients are cofibers computed by the host's pushout and must land on a
    declared object; otherwise :class:`EnumerationIncomplete` is raised.
    """
    if n < 0:
        raise ValueError("level must be >= 0")
    C = W.host
    stairs = []
    cocones = {}
    if n == 0:
        st = Staircase(0, (W.zero,), (), ())
        stairs.append(st)
        cocones[st] = {}
    for first, ch in cofibration_chains(W, n):
        st, cones = _build_staircase(W, n, first, ch)
        stairs.append(st)
        cocones[st] = cones
    if verify:
        for st in stairs:
            rep = check_commutes(st.diagram(C))
            if not rep.commutes:
                raise AssertionError(f"staircase {st} does not commute: {rep.witness}")
            for _, m in st.horizontal:
                if m not in W.co:
                    raise AssertionError(f"horizontal map {m} of {st} is not a cofibration")
    return SConstructionLevel(W, n, stairs, cocones)


def weak_equiv_subcat(W: WaldhausenStructure, S: SConstructionLevel) -> SConstructionLevel:
    """Same objects as ``S``; morphisms are the levelwise weak equivalences."""
    return S.restrict(lambda f: f in W.we, name=f"wS{S.n}({W.name})")


def k_spectrum_level(W: WaldhausenStructure, m: int, T: int = 3) -> SimplicialSet:
    """Nerve of the weak-equivalence subcategory of ``S_m``, truncated at ``T``."""
    return nerve(weak_equiv_subcat(W, s_construct(W, m)), T)
