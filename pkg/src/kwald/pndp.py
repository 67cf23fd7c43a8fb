"""Virtual-dimension arithmetic and finite topological spaces."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .category import StructuralError


class NonPointlikeError(ValueError):
    pass


@dataclass(frozen=True)
class PNDPSpec:
    """Base ``B = B1 x B2`` with a fiber of base dimension ``fiber`` and obstruction rank ``rank``."""

    b1: int
    b2: int
    fiber: int
    rank: int
    name: str = "p"

    def __post_init__(self):
        if min(self.b1, self.b2, self.fiber, self.rank) < 0:
            raise StructuralError(f"{self.name}: dimensions and rank must be non-negative")

    @property
    def base_dim(self) -> int:
        return self.b1 + self.b2


def virtual_dimension(s: PNDPSpec) -> tuple[int, int]:
    """``(dim F, dim M)`` with ``dim F = fiber - rank`` and ``dim M = dim B + dim F``."""
    dim_f = s.fiber - s.rank
    return dim_f, s.base_dim + dim_f


@dataclass(frozen=True)
class FiniteTopSpace:
    points: tuple
    opens: frozenset  # of frozensets

    @classmethod
    def make(cls, points: Iterable[Hashable], opens: Iterable[Iterable[Hashable]]) -> "FiniteTopSpace":
        return cls(tuple(points), frozenset(frozenset(u) for u in opens))

    @classmethod
    def discrete(cls, points: Sequence[Hashable]) -> "FiniteTopSpace":
        pts = tuple(points)
        return cls(pts, frozenset(frozenset(c) for k in range(len(pts) + 1) for c in combinations(pts, k)))

    def axiom_violation(self) -> str | None:
        whole = frozenset(self.points)
        if frozenset() not in self.opens:
            return "empty set is not open"
        if whole not in self.opens:
            return "whole space is not open"
        for u in self.opens:
            if not u <= whole:
                return f"open set {sorted(u, key=repr)} has points outside the space"
        for u, v in combinations(self.opens, 2):
            if u | v not in self.opens:
                return "not closed under union"
            if u & v not in self.opens:
                return "not closed under intersection"
        return None

    def validate(self) -> None:
        bad = self.axiom_violation()
        if bad:
            raise StructuralError(f"not a topology: {bad}")


def is_discrete_space(T: FiniteTopSpace) -> bool:
    T.validate()
    return all(frozenset([p]) in T.opens for p in T.points)


@dataclass
class EquivalenceReport:
    locally_point: bool
    discrete: bool
    witnesses: list  # (point, open singleton or None)

    @property
    def agree(self) -> bool:
        return self.locally_point == self.discrete


def zero_manifold_equiv(T: FiniteTopSpace) -> EquivalenceReport:
    """Compare "every point has a neighbourhood homeomorphic to a point" with discreteness.

    A neighbourhood of p homeomorphic to R^0 is the set {p}, and it is a
    neighbourhood exactly when some open set containing p is contained in it.
    Discreteness is tested separately as "the topology is the full power set".
    """
    T.validate()
    witnesses = []
    for p in T.points:
        smallest = frozenset(T.points)
        for u in T.opens:
            if p in u and len(u) < len(smallest):
                smallest = u
        witnesses.append((p, smallest if len(smallest) == 1 else None))
    local = all(w is not None for _, w in witnesses)
    discrete = len(T.opens) == 2 ** len(set(T.points))
    return EquivalenceReport(local, discrete, witnesses)


def emerge_brane_points(specs: Sequence[PNDPSpec]) -> FiniteTopSpace:
    """Discrete space with one point per point-like spec (``dim M = 0``)."""
    for s in specs:
        dim_m = virtual_dimension(s)[1]
        if dim_m != 0:
            raise NonPointlikeError(f"spec {s.name} has dim M = {dim_m}, not 0")
    return FiniteTopSpace.discrete([s.name for s in specs])


def all_topologies(points: Sequence[Hashable]) -> list[FiniteTopSpace]:
    """Every topology on a small point set, by filtering all families of subsets."""
    pts = tuple(points)
    n = len(pts)
    subsets = [frozenset(p for i, p in enumerate(pts) if mask >> i & 1) for mask in range(2 ** n)]
    inner = subsets[1:-1] if n else []
    base = {subsets[0], subsets[-1]}
    out = []
    for choice in range(2 ** len(inner)):
        fam = frozenset(base | {inner[i] for i in range(len(inner)) if choice >> i & 1})
        T = FiniteTopSpace(pts, fam)
        if T.axiom_violation() is None:
            out.append(T)
    return out
