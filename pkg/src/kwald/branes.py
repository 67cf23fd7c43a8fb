"""Brane stacks on a simplicial host: gauge groups, string loops and H^3 twists."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .category import Category, CommutativityReport, Diagram, StructuralError, ValidationReport, check_commutes
from .complexes import (
    CohomologyClass,
    InvariantViolation,
    SimplicialComplex,
    cochain_from_simplicial,
    cohomology_class,
)
from .kth import AbelianGroup


class AssemblyError(LookupError):
    pass


@dataclass(frozen=True)
class Brane:
    id: str
    stack: int
    region: SimplicialComplex


@dataclass(frozen=True)
class BraneConfig:
    host: SimplicialComplex
    branes: tuple

    def __post_init__(self):
        ids = [b.id for b in self.branes]
        if len(set(ids)) != len(ids):
            raise StructuralError("duplicate brane ids")
        for b in self.branes:
            if b.stack < 1:
                raise StructuralError(f"brane {b.id}: stack size must be >= 1")
            if not b.region.simplices or not self.host.contains(b.region):
                raise StructuralError(f"brane {b.id}: region is not a nonempty subcomplex of the host")

    def brane(self, bid: str) -> Brane:
        for b in self.branes:
            if b.id == bid:
                return b
        raise StructuralError(f"no brane named {bid!r}")

    def intersect(self, a: str, b: str) -> bool:
        # subcomplexes meet in a nonempty subcomplex iff they share a vertex
        return self.brane(a).region.intersects(self.brane(b).region)

    def components(self) -> list[list[str]]:
        parent = {b.id: b.id for b in self.branes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ids = [b.id for b in self.branes]
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                if self.intersect(a, b):
                    parent[find(a)] = find(b)
        groups: dict = {}
        for a in ids:
            groups.setdefault(find(a), []).append(a)
        return sorted(groups.values())

    @property
    def total_stack(self) -> int:
        return sum(b.stack for b in self.branes)


@dataclass(frozen=True)
class GaugeGroupExpr:
    factors: tuple  # descending ranks

    @classmethod
    def of(cls, ranks: Sequence[int]) -> "GaugeGroupExpr":
        if any(r < 1 for r in ranks):
            raise StructuralError("unitary factors need rank >= 1")
        return cls(tuple(sorted(ranks, reverse=True)))

    @property
    def rank(self) -> int:
        return sum(self.factors)

    def __str__(self) -> str:
        return " x ".join(f"U({n})" for n in self.factors) if self.factors else "1"


def gauge_group(cfg: BraneConfig) -> GaugeGroupExpr:
    """Each connected cluster of intersecting stacks gives U(total stack size)."""
    return GaugeGroupExpr.of([sum(cfg.brane(b).stack for b in comp) for comp in cfg.components()])


@dataclass(frozen=True)
class StringConfig:
    start: str
    end: str


def loop_nontrivial(s: StringConfig, cfg: BraneConfig) -> bool:
    ids = {b.id for b in cfg.branes}
    for end in (s.start, s.end):
        if end not in ids:
            raise StructuralError(f"string endpoint {end!r} is not on any brane")
    return s.start == s.end or cfg.intersect(s.start, s.end)


# ---------------------------------------------------------------------------
# Twists


@dataclass(frozen=True)
class TwistAssignment:
    """An integer 3-cochain on ``host``, one value per 3-simplex in sorted order."""

    host: SimplicialComplex
    values: tuple

    def __post_init__(self):
        n = len(self.host.of_dim(3))
        if len(self.values) != n:
            raise StructuralError(f"twist has {len(self.values)} values but the host has {n} 3-simplices")

    def cocycle_defect(self) -> tuple:
        C = cochain_from_simplicial(self.host)
        return C.apply(3, self.values) if C.rank(3) else ()


def _class3(K: SimplicialComplex, values: Sequence[int]) -> CohomologyClass:
    C = cochain_from_simplicial(K)
    if C.rank(3) == 0:
        return CohomologyClass(3, AbelianGroup(0), (), ())
    if any(C.apply(3, values)):
        raise InvariantViolation("twist cochain is not a cocycle")
    return cohomology_class(C, 3, values)


def twist_class(t: TwistAssignment) -> CohomologyClass:
    return _class3(t.host, t.values)


def restrict(t: TwistAssignment, Q: SimplicialComplex) -> tuple:
    if not t.host.contains(Q):
        raise StructuralError("region is not a subcomplex of the twist's host")
    value = dict(zip(t.host.of_dim(3), t.values))
    return tuple(value[s] for s in Q.of_dim(3))


def _perm_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def pullback(t: TwistAssignment, m: Mapping, Q: SimplicialComplex, Qp: SimplicialComplex) -> tuple:
    """Pull the twist on ``Qp`` (a subcomplex of ``t.host``) back along the vertex map ``m``."""
    target = set(Qp.simplices)
    order = {v: k for k, v in enumerate(Qp.vertices)}
    for s in Q.simplices:
        if any(v not in m for v in s):
            raise StructuralError(f"map is undefined on a vertex of {s}")
        img = tuple(sorted(set(m[v] for v in s), key=lambda v: order.get(v, -1)))
        if img not in target:
            raise StructuralError(f"map is not simplicial: {s} -> {img}")
    value = dict(zip(Qp.of_dim(3), restrict(t, Qp)))
    out = []
    for s in Q.of_dim(3):
        img = [m[v] for v in s]
        if len(set(img)) < len(img):
            out.append(0)
            continue
        key = tuple(sorted(img, key=order.__getitem__))
        out.append(_perm_sign([order[v] for v in img]) * value[key])
    return tuple(out)


def morphism_preserves_twist(m: Mapping, Q: SimplicialComplex, Qp: SimplicialComplex,
                             t: TwistAssignment, tp: TwistAssignment) -> bool:
    """True iff ``m^* (tp|Qp)`` and ``t|Q`` differ by a coboundary on ``Q``."""
    pulled = pullback(tp, m, Q, Qp)
    own = restrict(t, Q)
    return _class3(Q, [a - b for a, b in zip(pulled, own)]).is_zero


# ---------------------------------------------------------------------------
# Staircase and extension bookkeeping


def brane_staircase(host: Category, n: int, objects: Mapping, horizontal: Mapping,
                    vertical: Mapping) -> tuple[Diagram, CommutativityReport]:
    """Assemble the level-n staircase over ``Pi_ij`` (``0 <= i <= j <= n``) and check it commutes.

    ``horizontal[(i, j)]`` runs ``Pi_ij -> Pi_i,j+1`` and ``vertical[(i, j)]``
    runs ``Pi_ij -> Pi_i+1,j``.
    """
    D = Diagram(host, {})
    if n == 0:
        return D, CommutativityReport(True, 0)
    for i in range(n + 1):
        for j in range(i, n + 1):
            if (i, j) not in objects:
                raise AssemblyError(f"missing object Pi_{i}{j}")
            D.add_node((i, j), objects[(i, j)])
    for i in range(n + 1):
        for j in range(i, n + 1):
            if j < n:
                if (i, j) not in horizontal:
                    raise AssemblyError(f"missing horizontal generator at ({i},{j})")
                D.add_edge((i, j), (i, j + 1), horizontal[(i, j)])
            if i + 1 <= j:
                if (i, j) not in vertical:
                    raise AssemblyError(f"missing vertical generator at ({i},{j})")
                D.add_edge((i, j), (i + 1, j), vertical[(i, j)])
    D.validate()
    return D, check_commutes(D)


def extension_rank_check(N: int) -> ValidationReport:
    """Dimension bookkeeping for ``U(1) -> U(N) -> PU(N)``."""
    if N < 1:
        raise StructuralError("N must be >= 1")
    r = ValidationReport(f"extension U(1) -> U({N}) -> PU({N})")
    dims = {"U(1)": 1, f"U({N})": N * N, f"PU({N})": N * N - 1}
    for name, d in dims.items():
        r.check(f"dim {name} = {d}")
    r.check("additivity")
    if N * N != 1 + (N * N - 1) or dims[f"PU({N})"] < 0:
        r.fail("additivity", N)
    r.notes.append(f"{N * N} = 1 + {N * N - 1}")
    return r
