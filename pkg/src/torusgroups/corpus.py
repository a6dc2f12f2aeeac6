"""Deterministic pseudo-random corpora for the oracle test suites.

The same ``seed`` always produces the same corpus, item for item.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .exactnum import TorusPoint
from .finabelian import FinAbelian, all_groups_up_to
from .lattice import Lattice, hnf
from .multitab import (
    FiniteGroupTable,
    cyclic_table,
    dihedral_table,
    direct_product,
    push_forward,
    quaternion_table,
    table_from_operation,
    validate_table,
)
from .torusgrp import TorusSubgroup, generated_subgroup, order

__all__ = [
    "CorpusBoundsError",
    "random_lattices",
    "random_matrices",
    "finabelian_corpus",
    "finite_subgroups",
    "small_groups",
    "abelian_table",
    "table_corpus",
    "gen_corpus",
]

MAX_TABLE_ORDER = 12


class CorpusBoundsError(ValueError):
    pass


def random_matrices(count: int, max_rows: int, max_cols: int, bound: int, seed: int) -> list[list[list[int]]]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        r, c = rng.randint(1, max_rows), rng.randint(1, max_cols)
        out.append([[rng.randint(-bound, bound) for _ in range(c)] for _ in range(r)])
    return out


def random_lattices(count: int, max_n: int, bound: int, seed: int) -> list[Lattice]:
    """Lattices spanned by 0..N+1 random rows with entries in [-bound, bound]."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_n)
        rows = rng.randint(0, n + 1)
        gens = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(rows)]
        out.append(hnf(gens, n))
    return out


def finabelian_corpus(max_order: int, seed: int = 0, count: int | None = None) -> list[FinAbelian]:
    """All groups of order <= max_order, or ``count`` of them drawn with replacement."""
    groups = all_groups_up_to(max_order)
    if count is None:
        return groups
    rng = random.Random(seed)
    return [rng.choice(groups) for _ in range(count)]


def finite_subgroups(
    count: int, max_n: int, max_order: int, max_den: int, seed: int, max_gens: int = 3
) -> list[TorusSubgroup]:
    """Finite subgroups generated by points with a common denominator <= max_den.

    Every element then has coordinates with denominator <= max_den.
    """
    rng = random.Random(seed)
    out: list[TorusSubgroup] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 1000:
            raise CorpusBoundsError("could not fill the subgroup corpus within its bounds")
        n = rng.randint(1, max_n)
        den = rng.randint(1, max_den)
        gens = [
            TorusPoint(Fraction(rng.randrange(den), den) for _ in range(n))
            for _ in range(rng.randint(1, max_gens))
        ]
        k = generated_subgroup(gens, n)
        if order(k) <= max_order:
            out.append(k)
    return out


def abelian_table(a: FinAbelian) -> FiniteGroupTable:
    t = cyclic_table(1)
    for d in a.invariant_factors:
        t = direct_product(t, cyclic_table(d)) if t.size > 1 else cyclic_table(d)
    return t


def _a4() -> FiniteGroupTable:
    perms = [p for p in itertools.permutations(range(4)) if _parity(p) == 0]
    return table_from_operation(perms, lambda a, b: tuple(a[b[i]] for i in range(4)), (0, 1, 2, 3))


def _parity(p) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(p)), 2) if p[i] > p[j]) % 2


def _dicyclic3() -> FiniteGroupTable:
    # a^6 = 1, x^2 = a^3, x a x^-1 = a^-1; elements a^r x^s
    elems = [(r, s) for s in range(2) for r in range(6)]

    def op(u, v):
        r1, s1 = u
        r2, s2 = v
        r = r1 + (-r2 if s1 else r2)
        if s1 and s2:
            r += 3
        return (r % 6, (s1 + s2) % 2)

    return table_from_operation(elems, op, (0, 0))


def small_groups(max_order: int = MAX_TABLE_ORDER) -> list[tuple[str, FiniteGroupTable]]:
    """One table per isomorphism class of groups of order <= max_order (<= 12)."""
    if max_order > MAX_TABLE_ORDER:
        raise CorpusBoundsError(f"the group library stops at order {MAX_TABLE_ORDER}")
    out = [(str(a), abelian_table(a)) for a in all_groups_up_to(max_order)]
    nonabelian = [
        ("S3", lambda: dihedral_table(3)),
        ("D4", lambda: dihedral_table(4)),
        ("Q8", quaternion_table),
        ("D5", lambda: dihedral_table(5)),
        ("D6", lambda: dihedral_table(6)),
        ("A4", _a4),
        ("Dic3", _dicyclic3),
    ]
    for name, make in nonabelian:
        t = make()
        if t.size <= max_order:
            out.append((name, t))
    return sorted(out, key=lambda nt: (nt[1].size, nt[0]))


def table_corpus(max_order: int, seed: int, relabelings: int = 2, abelian_only: bool = False) -> list[FiniteGroupTable]:
    """Library tables plus random relabelings fixing the identity."""
    rng = random.Random(seed)
    out = []
    for _, t in small_groups(max_order):
        if abelian_only and not t.is_abelian():
            continue
        out.append(t)
        for _ in range(relabelings if t.size > 2 else 0):
            rest = list(range(2, t.size + 1))
            rng.shuffle(rest)
            out.append(push_forward(t, [1] + rest))
    return [t for t in out if validate_table(t) is None]


def gen_corpus(kind: str, seed: int = 0, max_n: int = 3, max_order: int = 12, count: int = 20,
               bound: int = 20, max_den: int = 12, exhaustive: bool = False) -> list[dict]:
    """Serialized corpus items of one kind: lattices, finabelian, tables or subgroups."""
    if max_n < 1 or max_order < 1 or count < 0 or bound < 0 or max_den < 1:
        raise CorpusBoundsError("corpus bounds must be positive")
    if max_n > 12 or bound > 10**6 or count > 10**5:
        raise CorpusBoundsError("corpus bounds exceed desk scale (N <= 12, entries <= 10^6)")
    if kind == "lattices":
        return [x.to_json() for x in random_lattices(count, max_n, bound, seed)]
    if kind == "finabelian":
        items = finabelian_corpus(max_order, seed, None if exhaustive else count)
        return [x.to_json() for x in items]
    if kind == "tables":
        return [t.to_json() for t in table_corpus(max_order, seed)]
    if kind == "subgroups":
        return [k.to_json() for k in finite_subgroups(count, max_n, max_order, max_den, seed)]
    raise CorpusBoundsError(f"unknown corpus kind {kind!r}")
