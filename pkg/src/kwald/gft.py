"""Group-field expansion of a field on a four-dimensional grid.

Each region's sites are put in bijection with character 4-tuples (base-N
digits of the site index), so the expansion is a finite Fourier transform on
``G^4`` and the round trip is exact up to floating-point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .category import StructuralError

ARITY = 4


class ResolutionError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    kind: str  # "cyclic" or "circle"
    order: int

    def __post_init__(self):
        if self.kind not in ("cyclic", "circle"):
            raise StructuralError(f"unknown group kind {self.kind!r}")
        if self.order < 1:
            raise StructuralError("group order/truncation must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        kind, _, n = text.partition(":")
        try:
            return cls(kind, int(n))
        except ValueError:
            raise StructuralError(f"bad group spec {text!r}; expected cyclic:N or circle:N") from None

    def __str__(self) -> str:
        return f"{self.kind}:{self.order}"

    @property
    def labels(self) -> np.ndarray:
        """Character labels: residues for cyclic groups, centred Fourier modes for the circle."""
        n = self.order
        return np.arange(n) if self.kind == "cyclic" else np.arange(n) - n // 2

    @property
    def points(self) -> np.ndarray:
        """Sample points: group elements, or equally spaced angles on the circle."""
        n = self.order
        return np.arange(n) if self.kind == "cyclic" else 2 * np.pi * np.arange(n) / n

    def characters(self) -> np.ndarray:
        """``X[k, g] = chi_k(g)``; rows are orthonormal under the normalized Haar pairing."""
        n = self.order
        phase = np.outer(self.labels, np.arange(n)) * (2 * np.pi / n)
        return np.exp(1j * phase)


def haar_integrate(G: GroupSpec, values: Sequence) -> complex:
    values = np.asarray(values)
    if values.shape != (G.order,):
        raise StructuralError(f"expected {G.order} samples, got shape {values.shape}")
    return values.mean()


def shift(G: GroupSpec, values: Sequence, h: int) -> np.ndarray:
    """``g -> f(h g)`` on the sample points (rotation by h steps on the circle)."""
    return np.roll(np.asarray(values), -h)


@dataclass(frozen=True)
class ChunkGrid:
    extents: tuple
    regions: tuple  # ((name, (site, ...)), ...) with sites in lexicographic order

    def __post_init__(self):
        if len(self.extents) != ARITY or any(e < 1 for e in self.extents):
            raise StructuralError("grid extents must be four positive integers")
        seen = set()
        for name, sites in self.regions:
            for s in sites:
                if len(s) != ARITY or any(not 0 <= x < e for x, e in zip(s, self.extents)):
                    raise StructuralError(f"site {s} of region {name} lies outside the grid")
                if s in seen:
                    raise StructuralError(f"site {s} belongs to two regions")
                seen.add(s)
        if len(seen) != int(np.prod(self.extents)):
            raise StructuralError("regions do not cover the grid")

    @classmethod
    def single(cls, extents: Sequence[int], name: str = "I0") -> "ChunkGrid":
        return cls(tuple(extents), ((name, tuple(np.ndindex(*extents))),))

    @classmethod
    def from_labels(cls, labels: Mapping) -> "ChunkGrid":
        """Build from ``site -> region name``; extents are inferred."""
        extents = tuple(max(s[a] for s in labels) + 1 for a in range(ARITY))
        groups: dict = {}
        for s in sorted(labels):
            groups.setdefault(labels[s], []).append(tuple(s))
        return cls(extents, tuple((k, tuple(groups[k])) for k in sorted(groups)))

    def region_names(self) -> tuple:
        return tuple(name for name, _ in self.regions)


@dataclass
class GFTField:
    group: GroupSpec
    coefficients: dict  # region name -> array over G^4
    arity: int = ARITY


@dataclass(frozen=True)
class ArityReport:
    count: int
    conforming: bool


def argument_count_check(f: GFTField) -> ArityReport:
    counts = {np.asarray(c).ndim for c in f.coefficients.values()}
    count = counts.pop() if len(counts) == 1 else (f.arity if not counts else -1)
    return ArityReport(count, count == ARITY)


def _site_modes(n_sites: int, N: int) -> np.ndarray:
    """Base-N digits of each site index: the character 4-tuple paired with that site."""
    idx = np.arange(n_sites)
    return np.stack([(idx // N ** a) % N for a in range(ARITY)], axis=1)


def gft_decompose(field, grid: ChunkGrid, G: GroupSpec) -> GFTField:
    """Coefficient tensors ``phi_I(g0..g3) = sum_x phi(x) prod_a chi_{k_a(x)}(g_a)``."""
    field = np.asarray(field)
    if field.shape != grid.extents:
        raise StructuralError(f"field shape {field.shape} != grid extents {grid.extents}")
    N = G.order
    X = G.characters()
    out = {}
    for name, sites in grid.regions:
        if len(sites) > N ** ARITY:
            raise ResolutionError(f"region {name} has {len(sites)} sites but {G} resolves only {N ** ARITY}")
        T = np.zeros((N,) * ARITY, dtype=complex)
        modes = _site_modes(len(sites), N)
        for s, k in zip(sites, modes):
            T[tuple(k)] = field[s]
        out[name] = np.einsum("abcd,ap,bq,cr,ds->pqrs", T, X, X, X, X, optimize=True)
    return GFTField(G, out)


def gft_reconstruct(f: GFTField, grid: ChunkGrid, G: GroupSpec) -> np.ndarray:
    """Evaluate ``sum_I int dg phi_I(g) lambda_I(x; g)`` at every site."""
    N = G.order
    Xc = G.characters().conj()
    values = np.zeros(grid.extents, dtype=complex)
    if set(f.coefficients) != set(grid.region_names()):
        raise StructuralError("coefficient regions do not match the grid")
    for name, sites in grid.regions:
        c = np.asarray(f.coefficients[name])
        if c.shape != (N,) * ARITY:
            raise StructuralError(f"region {name}: coefficient extents {c.shape} != {(N,) * ARITY}")
        # Haar average over G^4 of phi_I times conjugate characters
        T = np.einsum("pqrs,ap,bq,cr,ds->abcd", c, Xc, Xc, Xc, Xc, optimize=True) / N ** ARITY
        for s, k in zip(sites, _site_modes(len(sites), N)):
            values[s] = T[tuple(k)]
    return values


def roundtrip_error(field, grid: ChunkGrid, G: GroupSpec) -> float:
    field = np.asarray(field)
    back = gft_reconstruct(gft_decompose(field, grid, G), grid, G)
    return float(np.max(np.abs(back - field))) if field.size else 0.0
