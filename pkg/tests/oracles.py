"""Brute-force reference implementations used only by the tests.

Each oracle avoids the library's Smith normal form and lattice code so that
agreement is meaningful.
"""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np


# --- diagrams -----------------------------------------------------------------


def all_paths(D, u, v):
    """Every directed edge path from u to v (the diagram must be acyclic)."""
    if u == v:
        yield ()
    for a, b, m in D.edges:
        if a == u:
            for rest in all_paths(D, b, v):
                yield (m,) + rest


def commutes_bruteforce(D):
    """Enumerate every pair of parallel paths and compare composites."""
    C = D.host
    for u in D.nodes:
        for v in D.nodes:
            composites = set()
            for path in all_paths(D, u, v):
                composites.add(C.compose_path(path, start=D.nodes[u]))
            if len(composites) > 1:
                return False
    return True


# --- integer matrices -----------------------------------------------------------


def _det(m):
    m = [list(r) for r in m]
    n = len(m)
    if n == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = sign
        for i in range(n):
            prod *= m[i][perm[i]]
        total += prod
    return total


def determinantal_invariants(rows, ncols):
    """Invariant factors from gcds of k x k minors (d_k = D_k / D_{k-1})."""
    rows = [tuple(r) for r in dict.fromkeys(tuple(r) for r in rows) if any(r)]
    nrows = len(rows)
    divisors = [1]
    for k in range(1, min(nrows, ncols) + 1):
        g = 0
        for ri in itertools.combinations(range(nrows), k):
            for ci in itertools.combinations(range(ncols), k):
                g = gcd(g, _det([[rows[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        divisors.append(g)
    return tuple(divisors[k] // divisors[k - 1] for k in range(1, len(divisors)))


def group_from_relations(rows, ngens):
    """(free rank, torsion > 1) of Z^ngens modulo the row span."""
    inv = determinantal_invariants(rows, ngens)
    return ngens - len(inv), tuple(d for d in inv if d > 1)


# --- modules by element enumeration ---------------------------------------------


def elements(moduli):
    return list(itertools.product(*(range(d) for d in moduli)))


def apply(entries, moduli_out, x):
    return tuple(sum(a * b for a, b in zip(row, x)) % d for row, d in zip(entries, moduli_out))


def exact_by_enumeration(left, middle, right, f, g):
    """Injective f, surjective g, image f = kernel g, by listing every element."""
    L, M = elements(left), elements(middle)
    img_f = [apply(f, middle, x) for x in L]
    if len(set(img_f)) != len(L):
        return False
    if {apply(g, right, y) for y in M} != set(elements(right)):
        return False
    zero = tuple(0 for _ in right)
    return set(img_f) == {y for y in M if apply(g, right, y) == zero}


def iso_class(moduli):
    """Finite abelian groups are isomorphic iff they have the same number of elements of each order."""
    counts = {}
    for x in elements(moduli):
        order = 1
        for xi, d in zip(x, moduli):
            o = d // gcd(xi, d)
            order = order * o // gcd(order, o)
        counts[order] = counts.get(order, 0) + 1
    return tuple(sorted(counts.items()))


def grothendieck_bruteforce(objects, sequences, key=iso_class):
    """K0 from iso classes by element counting and relations via determinantal divisors.

    ``objects`` are moduli tuples (or anything ``key`` accepts); ``sequences``
    are (left, middle, right) triples of the same.
    """
    classes = list(dict.fromkeys(key(o) for o in objects))
    index = {c: k for k, c in enumerate(classes)}
    rows = []
    for left, mid, right in sequences:
        r = [0] * len(classes)
        r[index[key(mid)]] += 1
        r[index[key(left)]] -= 1
        r[index[key(right)]] -= 1
        rows.append(tuple(r))
    return group_from_relations(rows, len(classes))


# --- cohomology over Z/p by enumeration ------------------------------------------


def _all_vectors(dim, p, chunk=1 << 16):
    total = p ** dim
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        out = np.empty((len(idx), dim), dtype=np.int64)
        for a in range(dim):
            out[:, a] = idx % p
            idx = idx // p
        yield out


def count_kernel(matrix, dim, p):
    if dim == 0:
        return 1
    if not matrix:
        return p ** dim
    A = np.array(matrix, dtype=np.int64)
    return sum(int(np.sum(~np.any((X @ A.T) % p, axis=1))) for X in _all_vectors(dim, p))


def count_image(matrix, dim_in, p):
    if not matrix or dim_in == 0:
        return 1
    A = np.array(matrix, dtype=np.int64)
    seen = set()
    for X in _all_vectors(dim_in, p):
        Y = (X @ A.T) % p
        seen.update(map(bytes, Y.astype(np.uint8)))
    return len(seen)


def cohomology_dims_bruteforce(K, p):
    """dim H^n(K; Z/p) = log_p |ker d_n| - log_p |im d_n-1| by listing cochains."""
    from kwald.complexes import _coboundary_matrix

    top = K.dimension
    dims = []
    for n in range(top + 1):
        cn = len(K.of_dim(n))
        z = count_kernel(_coboundary_matrix(K, n, p) if n < top else (), cn, p)
        b = count_image(_coboundary_matrix(K, n - 1, p), len(K.of_dim(n - 1)), p) if n > 0 else 1
        ratio = z // b
        assert z % b == 0
        d = 0
        while ratio > 1:
            ratio //= p
            d += 1
        dims.append(d)
    return dims


def mod_p_dims_from_integral(groups, p):
    """Universal coefficients: dim H^n(Z/p) = rank H^n + #(p | torsion of H^n) + #(p | torsion of H^n+1)."""
    out = []
    for n, g in enumerate(groups):
        nxt = groups[n + 1].torsion if n + 1 < len(groups) else ()
        out.append(g.free_rank + sum(d % p == 0 for d in g.torsion) + sum(d % p == 0 for d in nxt))
    return out


# --- topology -------------------------------------------------------------------


def is_power_set(T):
    return len(T.opens) == 2 ** len(set(T.points))


# --- GFT by direct summation ---------------------------------------------------


def gft_direct(values, sites, N, labels):
    """Per-site reconstruction by the explicit quadruple sum over the group."""
    import cmath

    def chi(k, g):
        return cmath.exp(2j * cmath.pi * k * g / N)

    modes = [tuple((j // N ** a) % N for a in range(4)) for j in range(len(sites))]
    coeff = {}
    for g in itertools.product(range(N), repeat=4):
        coeff[g] = sum(values[s] * np.prod([chi(labels[k[a]], g[a]) for a in range(4)]) for s, k in zip(sites, modes))
    out = {}
    for s, k in zip(sites, modes):
        acc = 0
        for g, c in coeff.items():
            acc += c * np.prod([chi(labels[k[a]], g[a]).conjugate() for a in range(4)])
        out[s] = acc / N ** 4
    return out
