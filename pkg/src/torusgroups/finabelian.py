"""Finite and finitely generated abelian groups by invariant factors."""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

from sympy import factorint

from .lattice import Lattice, diag, snf

__all__ = [
    "FinAbelian",
    "FgAbelian",
    "EnumerationCapError",
    "enumeration_cap",
    "quotient_group",
    "dual",
    "embeds",
    "is_quotient",
    "order",
    "enumerate_elements",
    "primary_decomposition",
    "from_primary_decomposition",
    "realize_in_torus",
    "all_groups_up_to",
]

DEFAULT_ENUMERATION_CAP = 10**6


class EnumerationCapError(RuntimeError):
    pass


def enumeration_cap() -> int:
    return int(os.environ.get("TORUSGROUPS_ENUM_CAP", DEFAULT_ENUMERATION_CAP))


@dataclass(frozen=True)
class FinAbelian:
    """Z/d1 x ... x Z/dm with d1 | d2 | ... | dm and every di >= 2."""

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        ds = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", ds)
        if any(d < 2 for d in ds):
            raise ValueError(f"invariant factors must be >= 2, got {ds}")
        if any(b % a for a, b in zip(ds, ds[1:])):
            raise ValueError(f"{ds} is not a divisibility chain")

    @classmethod
    def from_cyclic_orders(cls, orders: Sequence[int]) -> "FinAbelian":
        """Normalize an arbitrary product of cyclic groups Z/n1 x Z/n2 ..."""
        if any(n < 1 for n in orders):
            raise ValueError("cyclic orders must be positive")
        if not orders:
            return cls()
        _, d, _ = snf(diag(list(orders)))
        return cls(tuple(d[i][i] for i in range(len(orders)) if d[i][i] > 1))

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariant_factors))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple(-x % d for x, d in zip(a, self.invariant_factors))

    def scale(self, k: int, a: Sequence[int]) -> tuple[int, ...]:
        return tuple(k * x % d for x, d in zip(a, self.invariant_factors))

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.invariant_factors)

    def to_json(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, data: dict) -> "FinAbelian":
        return cls.from_cyclic_orders([int(d) for d in data["invariant_factors"]])

    def __str__(self) -> str:
        if self.is_trivial():
            return "trivial"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


@dataclass(frozen=True)
class FgAbelian:
    """Z^free_rank x torsion."""

    free_rank: int
    torsion: FinAbelian = FinAbelian()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": self.torsion.to_json()}


def quotient_group(n: int, lat: Lattice) -> FgAbelian:
    """Structure of Z^n / lat."""
    if lat.ambient != n:
        raise ValueError(f"ambient mismatch: lattice in Z^{lat.ambient}, expected Z^{n}")
    if lat.rank == 0:
        return FgAbelian(n)
    _, d, _ = snf(lat.rows, n)
    factors = [d[i][i] for i in range(lat.rank)]
    return FgAbelian(n - lat.rank, FinAbelian(tuple(x for x in factors if x > 1)))


def dual(a: FinAbelian) -> FinAbelian:
    """Character group Hom(A, T).

    Each cyclic factor Z/d has dual Z/d (characters k -> jk/d), and the dual
    of a finite product is the product of duals, so the chain is unchanged.
    """
    return FinAbelian(a.invariant_factors)


def order(a: FinAbelian) -> int:
    return a.order


def enumerate_elements(a: FinAbelian, cap: int | None = None) -> list[tuple[int, ...]]:
    cap = enumeration_cap() if cap is None else cap
    if a.order > cap:
        raise EnumerationCapError(f"order {a.order} exceeds enumeration cap {cap}")
    return list(itertools.product(*(range(d) for d in a.invariant_factors)))


def _vp(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def primary_decomposition(a: FinAbelian) -> dict[int, list[int]]:
    """For each prime p | |A|, the sorted exponents of the p-parts of the di."""
    out: dict[int, list[int]] = {}
    for p in sorted(factorint(a.order)) if a.order > 1 else []:
        out[p] = [e for e in (_vp(d, p) for d in a.invariant_factors) if e > 0]
    return out


def from_primary_decomposition(parts: dict[int, Sequence[int]]) -> FinAbelian:
    """Inverse of :func:`primary_decomposition`."""
    m = max((len(v) for v in parts.values()), default=0)
    factors = [1] * m
    for p, exps in parts.items():
        exps = sorted(exps)
        for i, e in enumerate(exps):
            factors[m - len(exps) + i] *= p**e
    return FinAbelian(tuple(factors))


def embeds(a: FinAbelian, b: FinAbelian) -> bool:
    """Whether A is isomorphic to a subgroup of B.

    Per prime p, with the exponent partitions of the p-parts sorted in
    decreasing order, A's i-th part must not exceed B's i-th part.
    """
    pa, pb = primary_decomposition(a), primary_decomposition(b)
    for p, ea in pa.items():
        ea = sorted(ea, reverse=True)
        eb = sorted(pb.get(p, []), reverse=True)
        if len(ea) > len(eb) or any(x > y for x, y in zip(ea, eb)):
            return False
    return True


def is_quotient(a: FinAbelian, b: FinAbelian) -> bool:
    """Whether A is a quotient of B: dual(A) embeds in dual(B)."""
    return embeds(dual(a), dual(b))


def realize_in_torus(a: FinAbelian | Sequence[int]):
    """A subgroup of T^m isomorphic to A, with annihilator diag(d1..dm).

    A plain sequence of cyclic orders ``(n1, ..., nm)`` is realized as is,
    in T^m, without normalizing to invariant factors first.
    """
    from .torusgrp import TorusSubgroup

    orders = list(a.invariant_factors) if isinstance(a, FinAbelian) else [int(n) for n in a]
    if any(n < 1 for n in orders):
        raise ValueError("cyclic orders must be positive")
    if not orders:
        return TorusSubgroup(Lattice.full(1))
    return TorusSubgroup(Lattice(len(orders), tuple(tuple(r) for r in diag(orders))))


def _partitions(n: int, max_part: int | None = None) -> Iterator[list[int]]:
    max_part = n if max_part is None else max_part
    if n == 0:
        yield []
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - k, k):
            yield [k] + rest


def all_groups_of_order(n: int) -> list[FinAbelian]:
    """Every abelian group of order n, one per isomorphism class."""
    if n == 1:
        return [FinAbelian()]
    primes = factorint(n)
    choices = [[(p, lam) for lam in _partitions(e)] for p, e in sorted(primes.items())]
    return [from_primary_decomposition(dict(combo)) for combo in itertools.product(*choices)]


def all_groups_up_to(n: int) -> list[FinAbelian]:
    return [g for k in range(1, n + 1) for g in all_groups_of_order(k)]
