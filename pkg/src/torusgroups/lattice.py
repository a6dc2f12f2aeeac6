"""Integer lattices in Z^N via Hermite and Smith normal forms.

Matrices are plain lists of integer rows.  A :class:`Lattice` stores the
canonical row-style Hermite normal form of its generators: rows in echelon
order, positive pivots, entries above each pivot reduced into
``[0, pivot)``.  Two generator sets span the same lattice exactly when their
HNF bases are identical, so ``==`` on lattices is lattice equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

Matrix = list[list[int]]

__all__ = [
    "Lattice",
    "NotSublatticeError",
    "hnf",
    "hnf_with_transform",
    "snf",
    "member",
    "saturation",
    "index",
    "integer_kernel",
    "lattice_sum",
    "lattice_intersection",
    "identity",
    "matmul",
    "transpose",
    "det",
    "diag",
]


class NotSublatticeError(ValueError):
    pass


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def diag(entries: Sequence[int], cols: int | None = None) -> Matrix:
    cols = len(entries) if cols is None else cols
    return [[entries[i] if i == j else 0 for j in range(cols)] for i in range(len(entries))]


def transpose(m: Matrix, cols: int | None = None) -> Matrix:
    if not m:
        return [[] for _ in range(cols or 0)]
    return [list(c) for c in zip(*m)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def det(m: Matrix) -> int:
    """Determinant of a square integer matrix (Bareiss, fraction-free)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _check_rect(m: Matrix, cols: int) -> None:
    for r in m:
        if len(r) != cols:
            raise ValueError(f"row {r!r} does not have {cols} columns")


def hnf_with_transform(m: Matrix, cols: int) -> tuple[Matrix, Matrix, int]:
    """Row-reduce ``m`` to canonical HNF.

    Returns ``(H, U, rank)`` with ``U`` unimodular and ``U @ m == H``; the
    first ``rank`` rows of ``H`` are the HNF basis and the rest are zero, so
    rows ``rank:`` of ``U`` form a basis of the left kernel of ``m``.
    """
    _check_rect(m, cols)
    a = [list(r) for r in m]
    n = len(a)
    u = identity(n)
    r = 0
    for c in range(cols):
        if r == n:
            break
        while True:
            nz = [i for i in range(r, n) if a[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            if p != r:
                a[r], a[p] = a[p], a[r]
                u[r], u[p] = u[p], u[r]
            piv = a[r][c]
            clean = True
            for i in range(r + 1, n):
                if a[i][c]:
                    q = a[i][c] // piv
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if a[i][c]:
                        clean = False
            if clean:
                break
        if not a[r][c]:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        piv = a[r][c]
        for i in range(r):
            q = a[i][c] // piv
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return a, u, r


@dataclass(frozen=True)
class Lattice:
    """A subgroup of Z^ambient, stored by its canonical HNF basis."""

    ambient: int
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.ambient < 1:
            raise ValueError("ambient dimension must be >= 1")

    @classmethod
    def from_generators(cls, ambient: int, generators: Sequence[Sequence[int]]) -> "Lattice":
        return hnf([list(g) for g in generators], ambient)

    @classmethod
    def full(cls, ambient: int) -> "Lattice":
        return cls(ambient, tuple(tuple(r) for r in identity(ambient)))

    @classmethod
    def zero(cls, ambient: int) -> "Lattice":
        return cls(ambient, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def rows(self) -> Matrix:
        return [list(r) for r in self.basis]

    @property
    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(r) if x) for r in self.basis]

    def is_full_rank(self) -> bool:
        return self.rank == self.ambient

    def __contains__(self, v) -> bool:
        return member(self, v)

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "basis": [list(r) for r in self.basis]}

    @classmethod
    def from_json(cls, data: dict) -> "Lattice":
        # dependent rows are silently reduced away by re-canonicalization
        return hnf([list(map(int, r)) for r in data["basis"]], int(data["ambient"]))


def hnf(generators: Matrix, cols: int | None = None) -> Lattice:
    """Canonical HNF basis of the row span of ``generators``."""
    if cols is None:
        if not generators:
            raise ValueError("column count needed for an empty generator list")
        cols = len(generators[0])
    h, _, r = hnf_with_transform(generators, cols)
    return Lattice(cols, tuple(tuple(row) for row in h[:r]))


def snf(m: Matrix, cols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``U @ m @ V == D``.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with nonnegative
    entries ``d1 | d2 | ...``.  Pivots are always a nonzero entry of least
    absolute value in the remaining block.
    """
    rows = len(m)
    if cols is None:
        cols = len(m[0]) if m else 0
    _check_rect(m, cols)
    a = [list(r) for r in m]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    for t in range(min(rows, cols)):
        cand = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not cand:
            break
        _, i, j = min(cand)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, a[i][t] // piv)
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, a[t][j] // piv)
            rest = [(abs(a[i][t]), i, t) for i in range(t + 1, rows) if a[i][t]]
            rest += [(abs(a[t][j]), t, j) for j in range(t + 1, cols) if a[t][j]]
            if rest:
                _, i, j = min(rest)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return u, a, v


def invariant_factors(m: Matrix, cols: int | None = None) -> list[int]:
    """Nonzero diagonal entries of the SNF of ``m``."""
    _, d, _ = snf(m, cols)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def member(lat: Lattice, v: Sequence[int]) -> bool:
    """Whether ``v`` is an integer combination of the basis rows."""
    if len(v) != lat.ambient:
        raise ValueError(f"vector length {len(v)} != ambient {lat.ambient}")
    w = list(v)
    for row, c in zip(lat.basis, lat.pivots):
        if w[c] % row[c]:
            return False
        q = w[c] // row[c]
        if q:
            w = [x - q * y for x, y in zip(w, row)]
    return not any(w)


def coordinates(lat: Lattice, v: Sequence[int]) -> list[int]:
    """Integer coefficients of ``v`` in the HNF basis (``v`` must be a member)."""
    w = list(v)
    coeffs = []
    for row, c in zip(lat.basis, lat.pivots):
        if w[c] % row[c]:
            raise NotSublatticeError(f"{list(v)} is not in the lattice")
        q = w[c] // row[c]
        coeffs.append(q)
        if q:
            w = [x - q * y for x, y in zip(w, row)]
    if any(w):
        raise NotSublatticeError(f"{list(v)} is not in the lattice")
    return coeffs


def integer_kernel(m: Matrix, cols: int | None = None) -> Lattice:
    """Left kernel ``{v in Z^rows : v @ m == 0}`` as a canonical lattice."""
    rows = len(m)
    if rows == 0:
        raise ValueError("integer kernel of a matrix with no rows has ambient 0")
    cols = len(m[0]) if cols is None else cols
    _, u, r = hnf_with_transform(m, cols)
    return hnf(u[r:], rows)


def _check_ambient(a: Lattice, b: Lattice) -> None:
    if a.ambient != b.ambient:
        raise ValueError(f"ambient mismatch: {a.ambient} vs {b.ambient}")


def saturation(lat: Lattice) -> Lattice:
    """``span_Q(lat) ∩ Z^N``: the annihilator of the right kernel."""
    if lat.rank == 0:
        return lat
    right_kernel = integer_kernel(transpose(lat.rows), lat.rank)
    if right_kernel.rank == 0:
        return Lattice.full(lat.ambient)
    return integer_kernel(transpose(right_kernel.rows), right_kernel.rank)


def index(sub: Lattice, sup: Lattice) -> int | float:
    """``[sup : sub]``; ``math.inf`` when the ranks differ."""
    _check_ambient(sub, sup)
    for row in sub.basis:
        if not member(sup, row):
            raise NotSublatticeError(f"{list(row)} is not in the larger lattice")
    if sub.rank != sup.rank:
        return math.inf
    coeffs = [coordinates(sup, row) for row in sub.basis]
    return abs(det(coeffs))


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    _check_ambient(a, b)
    return hnf(a.rows + b.rows, a.ambient)


def lattice_intersection(a: Lattice, b: Lattice) -> Lattice:
    _check_ambient(a, b)
    if a.rank == 0 or b.rank == 0:
        return Lattice.zero(a.ambient)
    stacked = a.rows + [[-x for x in r] for r in b.rows]
    ker = integer_kernel(stacked, a.ambient)
    gens = [
        [sum(k[i] * a.basis[i][j] for i in range(a.rank)) for j in range(a.ambient)]
        for k in ker.basis
    ]
    return hnf(gens, a.ambient)
