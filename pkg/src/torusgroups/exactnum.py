"""Exact rational and circle arithmetic.

Rationals are :class:`fractions.Fraction`.  A point of the circle R/Z is a
Fraction in ``[0, 1)``; a point of the truncated torus T^N is a
:class:`TorusPoint` holding ``N`` such coordinates.

The torus metric weights coordinate ``n`` (1-based) by ``2**-n`` unless an
explicit weight vector is supplied.  Coordinates beyond the ambient
dimension contribute at most ``TAIL_BOUND(N) = 2**-N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction

__all__ = [
    "Rat",
    "TorusPoint",
    "as_rat",
    "circle",
    "circle_dist",
    "default_weights",
    "tail_bound",
    "torus_dist",
    "rat_to_str",
    "rat_from_str",
]


def as_rat(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return rat_from_str(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def circle(x) -> Fraction:
    """Canonical representative of ``x`` mod 1, in ``[0, 1)``."""
    x = as_rat(x)
    return x - (x.numerator // x.denominator)


def circle_dist(a, b) -> Fraction:
    """Arc-length distance on R/Z; always in ``[0, 1/2]``."""
    d = circle(as_rat(a) - as_rat(b))
    return min(d, 1 - d)


def default_weights(n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1, 2**i) for i in range(1, n + 1))


def tail_bound(n: int) -> Fraction:
    """Total weight of the coordinates past ``n``: sum_{i>n} 2^-i."""
    return Fraction(1, 2**n)


def rat_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def rat_from_str(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        q = int(q)
        if q <= 0:
            raise ValueError(f"denominator must be positive in {s!r}")
        return Fraction(int(p), q)
    return Fraction(int(s))


@dataclass(frozen=True, slots=True)
class TorusPoint:
    """A point of T^N with exact rational coordinates, each reduced mod 1."""

    coords: tuple[Fraction, ...]

    def __init__(self, coords: Iterable):
        cs = tuple(circle(c) for c in coords)
        if not cs:
            raise ValueError("a torus point needs ambient dimension >= 1")
        object.__setattr__(self, "coords", cs)

    @classmethod
    def zero(cls, ambient: int) -> "TorusPoint":
        return cls([0] * ambient)

    @property
    def ambient(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _check(self, other: "TorusPoint") -> None:
        if self.ambient != other.ambient:
            raise ValueError(
                f"ambient mismatch: {self.ambient} vs {other.ambient}"
            )

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        self._check(other)
        return TorusPoint(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        self._check(other)
        return TorusPoint(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(-a for a in self.coords)

    def __mul__(self, k: int) -> "TorusPoint":
        return TorusPoint(k * a for a in self.coords)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def extend(self, ambient: int) -> "TorusPoint":
        """Pad with zero coordinates up to ``ambient``."""
        if ambient < self.ambient:
            raise ValueError("cannot extend to a smaller ambient")
        return TorusPoint(self.coords + (Fraction(0),) * (ambient - self.ambient))

    def to_json(self) -> list[str]:
        return [rat_to_str(c) for c in self.coords]

    @classmethod
    def from_json(cls, data: Sequence) -> "TorusPoint":
        return cls(as_rat(c) for c in data)

    def __repr__(self) -> str:
        return "TorusPoint(" + ", ".join(str(c) for c in self.coords) + ")"


def torus_dist(x: TorusPoint, y: TorusPoint, weights: Sequence[Fraction] | None = None) -> Fraction:
    """Weighted sum of coordinate arc distances (weights default to 2^-n)."""
    if x.ambient != y.ambient:
        raise ValueError(f"ambient mismatch: {x.ambient} vs {y.ambient}")
    if weights is None:
        weights = default_weights(x.ambient)
    elif len(weights) < x.ambient:
        raise ValueError("weight vector shorter than ambient dimension")
    return sum(
        (w * circle_dist(a, b) for w, a, b in zip(weights, x.coords, y.coords)),
        Fraction(0),
    )
