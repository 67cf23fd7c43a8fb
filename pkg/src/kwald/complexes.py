"""Simplicial complexes, cochain complexes and discrete cohomology.

Cochains live on oriented simplices (orientation from the vertex order) with
coefficients in ``Z`` or ``Z/p``; the coboundary is the transpose of the
simplicial boundary. Refinement is barycentric subdivision, and the
preservation check compares cohomology plus a K0 class before and after.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Hashable, Iterable, Optional, Sequence

from . import linalg as la
from .category import Functor, StructuralError, ValidationReport, check_functor
from .exact import ExactStructure, ring_modulus, vector_space_category
from .kth import AbelianGroup, grothendieck_group, groups_isomorphic, k0, k0_class


class InvariantViolation(ValueError):
    pass


class NoPotentialDegree(ValueError):
    pass


# ---------------------------------------------------------------------------
# Simplicial complexes


@dataclass(frozen=True)
class SimplicialComplex:
    """Vertices in a fixed order and simplices as vertex tuples sorted by that order."""

    vertices: tuple
    simplices: tuple

    @classmethod
    def from_simplices(cls, simplices: Iterable[Sequence[Hashable]], vertices: Optional[Sequence] = None,
                       close: bool = False) -> "SimplicialComplex":
        simplices = [tuple(s) for s in simplices]
        if vertices is None:
            seen = dict.fromkeys(v for s in simplices for v in s)
            try:
                vertices = tuple(sorted(seen))
            except TypeError:
                vertices = tuple(seen)
        order = {v: k for k, v in enumerate(vertices)}
        if len(order) != len(vertices):
            raise StructuralError("duplicate vertex labels")
        normed = []
        for s in simplices:
            if any(v not in order for v in s):
                raise StructuralError(f"simplex {s} uses an undeclared vertex")
            if len(set(s)) != len(s):
                raise StructuralError(f"simplex {s} repeats a vertex")
            normed.append(tuple(sorted(s, key=order.__getitem__)))
        if close:
            closed = set()
            for s in normed:
                for k in range(1, len(s) + 1):
                    closed.update(_subsets(s, k))
            closed.update((v,) for v in vertices)
            normed = list(closed)
        elif len(set(normed)) != len(normed):
            raise StructuralError("duplicate simplices")
        normed.sort(key=lambda s: (len(s), [order[v] for v in s]))
        return cls(tuple(vertices), tuple(normed))

    @classmethod
    def from_facets(cls, facets: Iterable[Sequence[Hashable]], vertices: Optional[Sequence] = None) -> "SimplicialComplex":
        return cls.from_simplices(facets, vertices, close=True)

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def of_dim(self, n: int) -> list[tuple]:
        return [s for s in self.simplices if len(s) == n + 1]

    def f_vector(self) -> list[int]:
        return [len(self.of_dim(n)) for n in range(self.dimension + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * c for n, c in enumerate(self.f_vector()))

    def is_face_closed(self) -> bool:
        return self.missing_face() is None

    def missing_face(self) -> Optional[tuple]:
        have = set(self.simplices)
        for s in self.simplices:
            for k in range(len(s)):
                f = s[:k] + s[k + 1:]
                if f and f not in have:
                    return f
        for v in self.vertices:
            if (v,) not in have:
                return (v,)
        return None

    def validate(self) -> None:
        f = self.missing_face()
        if f is not None:
            raise StructuralError(f"complex is not closed under faces: {f} is missing")

    def contains(self, other: "SimplicialComplex") -> bool:
        return set(other.simplices) <= set(self.simplices)

    def intersects(self, other: "SimplicialComplex") -> bool:
        return bool(set(self.vertices) & set(other.vertices))

    def __len__(self) -> int:
        return len(self.simplices)


def _subsets(s: tuple, k: int) -> list[tuple]:
    return list(combinations(s, k))


def point() -> SimplicialComplex:
    return SimplicialComplex.from_facets([(0,)])


def solid_simplex(n: int) -> SimplicialComplex:
    return SimplicialComplex.from_facets([tuple(range(n + 1))])


def simplex_boundary(n: int) -> SimplicialComplex:
    """Boundary of the n-simplex (a sphere of dimension n-1)."""
    verts = tuple(range(n + 1))
    return SimplicialComplex.from_facets([verts[:k] + verts[k + 1:] for k in range(n + 1)])


def circle() -> SimplicialComplex:
    return simplex_boundary(2)


def minimal_torus() -> SimplicialComplex:
    """Seven-vertex triangulation of the torus."""
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex.from_facets(tris)


def cone(K: SimplicialComplex, apex: Hashable = "apex") -> SimplicialComplex:
    return SimplicialComplex.from_facets(
        [s + (apex,) for s in K.simplices] + [(apex,)], vertices=K.vertices + (apex,)
    )


def barycentric_refine(K: SimplicialComplex) -> SimplicialComplex:
    """Barycentric subdivision; new vertices are the simplices of ``K``."""
    chains: dict = {}
    for s in K.simplices:  # sorted by dimension, so faces come first
        out = [(s,)]
        for k in range(1, len(s)):
            for f in _subsets(s, k):
                out.extend(c + (s,) for c in chains[f])
        chains[s] = out
    simplices = [c for s in K.simplices for c in chains[s]]
    return SimplicialComplex.from_simplices(simplices, vertices=K.simplices)


# ---------------------------------------------------------------------------
# Cochain complexes


@dataclass(frozen=True)
class Cochain:
    degree: int
    values: tuple

    def __add__(self, other: "Cochain") -> "Cochain":
        if self.degree != other.degree:
            raise StructuralError("degree mismatch")
        return Cochain(self.degree, tuple(a + b for a, b in zip(self.values, other.values)))


@dataclass(frozen=True)
class CochainComplex:
    """Free modules of rank ``ranks[n]`` with ``differentials[n]: C^n -> C^n+1``."""

    ranks: tuple
    differentials: tuple
    ring: str = "Z"
    basis: tuple = ()

    @property
    def modulus(self) -> int:
        return ring_modulus(self.ring)

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, n: int) -> int:
        return self.ranks[n] if 0 <= n < len(self.ranks) else 0

    def d(self, n: int) -> la.Matrix:
        if 0 <= n < len(self.differentials):
            return self.differentials[n]
        return la.zeros(self.rank(n + 1), self.rank(n))

    def apply(self, n: int, values: Sequence[int]) -> tuple:
        if len(values) != self.rank(n):
            raise StructuralError(f"cochain of length {len(values)} in degree {n} (rank {self.rank(n)})")
        out = la.matvec(self.d(n), values)
        p = self.modulus
        return tuple(x % p for x in out) if p else out

    def reduce(self, values: Sequence[int]) -> tuple:
        p = self.modulus
        return tuple(x % p for x in values) if p else tuple(values)

    def matrix_rank(self, n: int) -> int:
        m = self.d(n)
        if not m or not self.rank(n):
            return 0
        p = self.modulus
        return la.rank_mod(m, p, self.rank(n)) if p else la.smith_normal_form(m, self.rank(n)).rank

    def d_squared_violations(self) -> list[int]:
        bad = []
        p = self.modulus
        for n in range(len(self.differentials) - 1):
            prod = la.matmul(self.d(n + 1), self.d(n), inner=self.rank(n + 1), ncols=self.rank(n))
            if any((x % p if p else x) for row in prod for x in row):
                bad.append(n)
        return bad

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * r for n, r in enumerate(self.ranks))


def _coboundary_matrix(K: SimplicialComplex, n: int, p: int) -> la.Matrix:
    lo = K.of_dim(n)
    hi = K.of_dim(n + 1)
    idx = {s: k for k, s in enumerate(lo)}
    rows = []
    for t in hi:
        row = [0] * len(lo)
        for i in range(len(t)):
            row[idx[t[:i] + t[i + 1:]]] += (-1) ** i
        rows.append(tuple(x % p for x in row) if p else tuple(row))
    return tuple(rows)


def cochain_from_simplicial(K: SimplicialComplex, ring: str = "Z") -> CochainComplex:
    K.validate()
    p = ring_modulus(ring)
    top = K.dimension
    ranks = tuple(len(K.of_dim(n)) for n in range(top + 1))
    diffs = tuple(_coboundary_matrix(K, n, p) for n in range(top))
    C = CochainComplex(ranks, diffs, ring, tuple(tuple(K.of_dim(n)) for n in range(top + 1)))
    bad = C.d_squared_violations()
    if bad:
        raise InvariantViolation(f"d^2 != 0 in degree {bad[0]}")
    return C


def quotient_cochains(K: SimplicialComplex, X: SimplicialComplex, ring: str = "Z") -> CochainComplex:
    """Cochains of the pushout ``K ∪_X {*}``: cochains of K constant on X0 and zero on higher X-simplices.

    This is the cochain-level quotient ``K / X``; for a subcomplex it has the
    cohomology of the topological quotient.
    """
    K.validate()
    X.validate()
    if not K.contains(X) or not X.simplices:
        raise StructuralError("X must be a nonempty subcomplex of K")
    p = ring_modulus(ring)
    inX = set(X.simplices)
    top = K.dimension
    basis = []
    for n in range(top + 1):
        cells = [s for s in K.of_dim(n) if s not in inX]
        basis.append((("*",),) + tuple(cells) if n == 0 else tuple(cells))
    ranks = tuple(len(b) for b in basis)
    diffs = []
    for n in range(top):
        lo = {s: k for k, s in enumerate(basis[n])}
        rows = []
        for t in basis[n + 1]:
            row = [0] * len(basis[n])
            for i in range(len(t)):
                f = t[:i] + t[i + 1:]
                if f in lo:
                    row[lo[f]] += (-1) ** i
                elif n == 0 and f in inX:
                    row[0] += (-1) ** i  # the basepoint cochain is 1 on every vertex of X
            rows.append(tuple(x % p for x in row) if p else tuple(row))
        diffs.append(tuple(rows))
    C = CochainComplex(ranks, tuple(diffs), ring, tuple(basis))
    if C.d_squared_violations():
        raise InvariantViolation("quotient complex has d^2 != 0")
    return C


def cohomology(C: CochainComplex) -> list[AbelianGroup]:
    """``H^n = ker d_n / im d_n-1`` for every degree, in invariant-factor form."""
    bad = C.d_squared_violations()
    if bad:
        raise InvariantViolation(f"d^2 != 0 in degree {bad[0]}")
    p = C.modulus
    out = []
    for n in range(len(C.ranks)):
        if p:
            dim = C.rank(n) - C.matrix_rank(n) - C.matrix_rank(n - 1)
            out.append(AbelianGroup.from_invariants(0, (p,) * dim))
        else:
            below = la.smith_normal_form(C.d(n - 1), C.rank(n - 1)) if C.rank(n) and C.rank(n - 1) else None
            rk_below = below.rank if below else 0
            free = C.rank(n) - C.matrix_rank(n) - rk_below
            torsion = below.invariant_factors if below else ()
            out.append(AbelianGroup.from_invariants(free, torsion))
    return out


def exactness_profile(C: CochainComplex) -> list[bool]:
    """Degree-by-degree exactness (trivial cohomology)."""
    return [g.is_trivial for g in cohomology(C)]


@dataclass(frozen=True)
class CohomologyClass:
    degree: int
    group: AbelianGroup
    torsion: tuple  # residues modulo each invariant factor
    free: tuple     # coordinates in the canonical basis of the free part

    @property
    def is_zero(self) -> bool:
        return not any(self.torsion) and not any(self.free)

    @property
    def coordinates(self) -> tuple:
        return self.torsion + self.free

    def __str__(self) -> str:
        return "0" if self.is_zero else "(" + ", ".join(map(str, self.coordinates)) + ")"


def cohomology_class(C: CochainComplex, n: int, values: Sequence[int]) -> CohomologyClass:
    """Class of a cocycle in ``H^n``; raises :class:`InvariantViolation` for non-cocycles."""
    values = C.reduce(values)
    if len(values) != C.rank(n):
        raise StructuralError(f"cochain length {len(values)} != rank {C.rank(n)}")
    if any(C.apply(n, values)):
        raise InvariantViolation(f"degree-{n} cochain is not a cocycle")
    group = cohomology(C)[n]
    p = C.modulus
    if p:
        return _class_mod_p(C, n, values, group)
    cn = C.rank(n)
    below = C.d(n - 1)
    if C.rank(n - 1) and cn:
        snf = la.smith_normal_form(below, C.rank(n - 1))
        left, r, facs = snf.left, snf.rank, snf.factors
    else:
        left, r, facs = la.identity(cn), 0, ()
    y = la.matvec(left, values)
    torsion = tuple(y[i] % facs[i] for i in range(r) if facs[i] > 1)
    free_part = y[r:]
    if not free_part:
        return CohomologyClass(n, group, torsion, ())
    linv = la.invert_unimodular(left)
    dn = la.matmul(C.d(n), linv, inner=cn, ncols=cn) if C.rank(n + 1) else la.zeros(0, cn)
    restricted = tuple(row[r:] for row in dn)
    kernel = la.int_kernel(restricted, ncols=cn - r) if restricted else la.hermite_basis(
        [tuple(int(i == j) for j in range(cn - r)) for i in range(cn - r)], cn - r)
    coords = la.int_solve(la.transpose(tuple(kernel), cn - r), free_part, ncols=len(kernel))
    if coords is None:
        raise InvariantViolation("cocycle does not lie in the cocycle lattice")
    return CohomologyClass(n, group, torsion, tuple(coords))


def _class_mod_p(C: CochainComplex, n: int, values, group) -> CohomologyClass:
    p = C.modulus
    cn = C.rank(n)
    below = C.d(n - 1)
    bvecs = [tuple(col) for col in la.transpose(below, C.rank(n - 1))] if C.rank(n - 1) else []
    rref, piv = la.rref_mod(tuple(bvecs), p, cn) if bvecs else ((), ())
    bbasis = [rref[i] for i in range(len(piv))]
    zbasis = la.nullspace_mod(C.d(n), p, cn) if C.rank(n + 1) else [
        tuple(int(i == j) for j in range(cn)) for i in range(cn)]
    hbasis = []
    span = list(bbasis)
    for z in zbasis:
        if la.rank_mod(tuple(span + [z]), p, cn) > len(span):
            span.append(z)
            hbasis.append(z)
    cols = la.transpose(tuple(bbasis + hbasis), cn) if (bbasis or hbasis) else la.zeros(cn, 0)
    sol = la.solve_mod(cols, values, p, ncols=len(bbasis) + len(hbasis))
    if sol is None:
        raise InvariantViolation("cocycle outside the cocycle space")
    return CohomologyClass(n, group, tuple(sol[len(bbasis):]), ())


# ---------------------------------------------------------------------------
# Potentials and gauge invariance


@dataclass
class PotentialReport:
    degree: int
    solvable: bool
    witness: Optional[tuple] = None
    gauge_checked: int = 0
    gauge_ok: bool = True
    closed: bool = True
    obstruction: Optional[CohomologyClass] = None
    notes: list = field(default_factory=list)


def potential_sequence(C: CochainComplex, phi: Cochain) -> PotentialReport:
    """Solve ``d psi = phi``; on success verify ``d(phi + d chi) = d phi`` on a basis of chi."""
    n = phi.degree
    if n < 1:
        raise NoPotentialDegree("a potential needs a field of degree >= 1")
    values = C.reduce(phi.values)
    if len(values) != C.rank(n):
        raise StructuralError(f"cochain length {len(values)} != rank {C.rank(n)}")
    p = C.modulus
    below = C.d(n - 1)
    if p:
        psi = la.solve_mod(below, values, p, ncols=C.rank(n - 1))
    else:
        psi = la.int_solve(below, values, ncols=C.rank(n - 1))
    dphi = C.apply(n, values)
    report = PotentialReport(n, psi is not None, closed=not any(dphi))
    report.notes.append("the sequence psi -> phi -> d phi is read as solvability plus gauge invariance")
    if psi is None:
        if report.closed:
            report.obstruction = cohomology_class(C, n, values)
        else:
            report.notes.append("phi is not closed, so no potential exists")
        return report
    report.witness = C.reduce(psi)
    for k in range(C.rank(n - 1)):
        chi = tuple(int(i == k) for i in range(C.rank(n - 1)))
        shifted = C.reduce(tuple(a + b for a, b in zip(values, C.apply(n - 1, chi))))
        report.gauge_checked += 1
        if C.apply(n, shifted) != dphi:
            report.gauge_ok = False
    return report


# ---------------------------------------------------------------------------
# Preservation under discretization


@dataclass
class PreservationReport:
    preserved: bool
    records: list  # (name, left, right, ok)

    def mismatches(self) -> list:
        return [r for r in self.records if not r[3]]


@lru_cache(maxsize=None)
def _reference_k0() -> tuple[ExactStructure, AbelianGroup]:
    E = ExactStructure.full(vector_space_category(2, 1))
    return E, k0(E)


def k0_euler_class(C: CochainComplex) -> tuple[AbelianGroup, tuple]:
    """K0 of finite-dimensional F2-spaces and the class sum (-1)^n [C^n] in it."""
    E, G = _reference_k0()
    gen = k0_class(E, G, E.host.objects[1])
    chi = C.euler_characteristic()
    return G, tuple(chi * x for x in gen)


def theorem_check(K: SimplicialComplex, K2: SimplicialComplex, ring: str = "Z") -> PreservationReport:
    """Compare cohomology in every degree and the K0 class of the cochain complexes."""
    C1, C2 = cochain_from_simplicial(K, ring), cochain_from_simplicial(K2, ring)
    h1, h2 = cohomology(C1), cohomology(C2)
    top = max(len(h1), len(h2))
    trivial = AbelianGroup(0)
    records = []
    for n in range(top):
        a = h1[n] if n < len(h1) else trivial
        b = h2[n] if n < len(h2) else trivial
        records.append((f"H^{n}", str(a), str(b), groups_isomorphic(a, b)))
    g1, c1 = k0_euler_class(C1)
    g2, c2 = k0_euler_class(C2)
    records.append(("K0", str(g1), str(g2), groups_isomorphic(g1, g2)))
    records.append(("K0 class", str(c1), str(c2), c1 == c2))
    return PreservationReport(all(r[3] for r in records), records)


# ---------------------------------------------------------------------------
# Structure-preserving functors between exact structures


class FunctorError(ValueError):
    pass


def functor_m_check(F: Functor, source: ExactStructure, target: ExactStructure) -> ValidationReport:
    """Sigma, weak equivalences (isomorphisms) and K0 must be carried across by ``F``."""
    fr = check_functor(F)
    if not fr.ok:
        raise FunctorError(f"{F.name} is not a functor: {fr.violations[0]}")
    report = ValidationReport(f"M-check {F.name}")
    for law in ("sigma-preserved", "we-preserved", "k0-preserved"):
        report.check(law)
    S, T = source.host, target.host
    images = []
    for s in source.ordered_sigma():
        t = type(s)(F.on_objects(s.left), F.on_objects(s.middle), F.on_objects(s.right),
                    F.on_morphisms(s.mono), F.on_morphisms(s.epi))
        images.append(t)
        if t not in target.sigma and not report.failed("sigma-preserved"):
            report.fail("sigma-preserved", str(s), detail="image sequence not in target Sigma")
    for f in S.isomorphisms():
        if not T.is_isomorphism(F.on_morphisms(f)):
            report.fail("we-preserved", f)
            break
    objs = list(dict.fromkeys(F.on_objects(a) for a in S.objects))
    g_src = k0(source, check=False)
    g_img = grothendieck_group(objs, images, T.iso_key)
    if not groups_isomorphic(g_src, g_img):
        report.fail("k0-preserved", str(g_src), str(g_img))
    return report
