"""Exact integer and mod-p linear algebra on small matrices.

Matrices are tuples of row tuples of Python ints, so entries never overflow.
Everything here is deterministic: the same input always yields the same
transforms, which the report layer relies on for byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


def as_matrix(rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Matrix:
    m = tuple(tuple(int(x) for x in row) for row in rows)
    if ncols is not None and any(len(r) != ncols for r in m):
        raise ValueError("ragged matrix")
    if m and len({len(r) for r in m}) != 1:
        raise ValueError("ragged matrix")
    return m


def shape(m: Matrix, ncols: int = 0) -> tuple[int, int]:
    """Row/column counts; ``ncols`` disambiguates matrices with zero rows."""
    return (len(m), len(m[0]) if m else ncols)


def zeros(rows: int, cols: int) -> Matrix:
    return tuple((0,) * cols for _ in range(rows))


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m: Matrix, ncols: int = 0) -> Matrix:
    rows, cols = shape(m, ncols)
    return tuple(tuple(m[i][j] for i in range(rows)) for j in range(cols))


def matmul(a: Matrix, b: Matrix, inner: Optional[int] = None, ncols: int = 0) -> Matrix:
    """Product ``a @ b``. ``ncols`` is the column count of ``b`` when ``b`` has no rows."""
    if inner is None:
        inner = len(b)
    cols = len(b[0]) if b else ncols
    if a and len(a[0]) != inner:
        raise ValueError(f"shape mismatch: {len(a[0])} vs {inner}")
    bt = transpose(b, cols)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def hstack(*blocks: Matrix, rows: Optional[int] = None) -> Matrix:
    if rows is None:
        rows = len(blocks[0])
    out = [[] for _ in range(rows)]
    for blk in blocks:
        if len(blk) != rows:
            raise ValueError("hstack row mismatch")
        for i, r in enumerate(blk):
            out[i].extend(r)
    return tuple(tuple(r) for r in out)


def determinant(m: Matrix) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form over the integers


@dataclass(frozen=True)
class SmithForm:
    """Result of :func:`smith_normal_form`.

    ``left @ matrix @ right`` is diagonal with entries ``factors`` followed by
    zeros; both transforms are unimodular.
    """

    factors: tuple[int, ...]
    left: Matrix
    right: Matrix
    nrows: int
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def diagonal(self) -> Matrix:
        return tuple(
            tuple(self.factors[i] if i == j and i < self.rank else 0 for j in range(self.ncols))
            for i in range(self.nrows)
        )

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Nontrivial factors (those > 1)."""
        return tuple(d for d in self.factors if d != 1)


def smith_normal_form(matrix: Sequence[Sequence[int]], ncols: int = 0) -> SmithForm:
    a = [list(map(int, r)) for r in matrix]
    m = len(a)
    n = len(a[0]) if a else ncols
    left = [[int(i == j) for j in range(m)] for i in range(m)]
    right = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        if k:
            a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
            left[dst] = [x + k * y for x, y in zip(left[dst], left[src])]

    def add_col(dst, src, k):
        if k:
            for row in a:
                row[dst] += k * row[src]
            for row in right:
                row[dst] += k * row[src]

    factors = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        done = False
            if not done:
                best = None
                for i in range(t, m):
                    if a[i][t] and (best is None or abs(a[i][t]) < abs(a[best][t])):
                        best = i
                swap_rows(t, best)
                bestc = None
                for j in range(t, n):
                    if a[t][j] and (bestc is None or abs(a[t][j]) < abs(a[t][bestc])):
                        bestc = j
                swap_cols(t, bestc)
                continue
            # row and column clear; enforce divisibility of the remainder
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        factors.append(a[t][t])
    return SmithForm(
        factors=tuple(factors),
        left=as_matrix(left) if m else (),
        right=as_matrix(right) if n else (),
        nrows=m,
        ncols=n,
    )


def invert_unimodular(u: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix."""
    n = len(u)
    snf = smith_normal_form(u)
    if snf.factors != (1,) * n:
        raise ValueError("matrix is not unimodular")
    # left @ u @ right = I  =>  u^{-1} = right @ left
    return matmul(snf.right, snf.left)


def int_solve(matrix: Matrix, b: Sequence[int], ncols: int = 0) -> Optional[Vector]:
    """Some integer ``x`` with ``matrix @ x == b``, or None."""
    m, n = shape(matrix, ncols)
    if len(b) != m:
        raise ValueError("right-hand side has wrong length")
    snf = smith_normal_form(matrix, ncols=n)
    c = matvec(snf.left, b) if m else ()
    y = [0] * n
    for i, ci in enumerate(c):
        if i < snf.rank:
            if ci % snf.factors[i]:
                return None
            y[i] = ci // snf.factors[i]
        elif ci:
            return None
    return matvec(snf.right, y) if n else ()


def int_kernel(matrix: Matrix, ncols: int = 0) -> list[Vector]:
    """A basis of the integer kernel, in Hermite form (canonical)."""
    m, n = shape(matrix, ncols)
    snf = smith_normal_form(matrix, ncols=n)
    cols = transpose(snf.right, n) if n else ()
    return hermite_basis([cols[j] for j in range(snf.rank, n)], n)


def hermite_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[Vector]:
    """Row Hermite normal form of the lattice spanned by ``vectors``.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``; zero rows are dropped. Two generating sets span the same
    lattice iff their Hermite bases are equal.
    """
    rows = [list(v) for v in vectors if any(v)]
    out: list[list[int]] = []
    col = 0
    while rows and col < dim:
        nz = [r for r in rows if r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for k in range(dim):
                    r[k] -= q * piv[k]
            nz = [r for r in nz if r[col]]
        piv = nz[0]
        if piv[col] < 0:
            piv[:] = [-x for x in piv]
        for r in out:
            q = r[col] // piv[col]
            if q:
                for k in range(dim):
                    r[k] -= q * piv[k]
        out.append(piv)
        rows = [r for r in rows if r is not piv and any(r)]
        col += 1
    return [tuple(r) for r in out]


def lattice_contains(generators: Sequence[Sequence[int]], v: Sequence[int], dim: int) -> bool:
    if not any(v):
        return True
    if not generators:
        return False
    cols = transpose(as_matrix(generators), dim)
    return int_solve(cols, tuple(v), ncols=len(generators)) is not None


# ---------------------------------------------------------------------------
# Linear algebra over Z/p


def rref_mod(matrix: Matrix, p: int, ncols: int = 0) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form mod a prime ``p`` and its pivot columns."""
    a = [[x % p for x in row] for row in matrix]
    m, n = len(a), (len(a[0]) if a else ncols)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                k = a[i][c]
                a[i] = [(x - k * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return as_matrix(a) if m else (), tuple(pivots)


def rank_mod(matrix: Matrix, p: int, ncols: int = 0) -> int:
    return len(rref_mod(matrix, p, ncols)[1])


def nullspace_mod(matrix: Matrix, p: int, ncols: int = 0) -> list[Vector]:
    m, n = shape(matrix, ncols)
    r, pivots = rref_mod(matrix, p, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-r[i][f]) % p
        basis.append(tuple(v))
    return basis


def solve_mod(matrix: Matrix, b: Sequence[int], p: int, ncols: int = 0) -> Optional[Vector]:
    m, n = shape(matrix, ncols)
    aug = tuple(tuple(row) + (bi,) for row, bi in zip(matrix, b)) if m else ()
    r, pivots = rref_mod(aug, p, n + 1)
    if n in pivots:
        return None
    x = [0] * n
    for i, pc in enumerate(pivots):
        x[pc] = r[i][n]
    return tuple(x)
