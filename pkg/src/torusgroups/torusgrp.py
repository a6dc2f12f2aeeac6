"""Closed subgroups of the truncated torus T^N, stored by annihilator.

A :class:`TorusSubgroup` is the set ``K = {x in T^N : l.x in Z for all l in
Λ}`` for a lattice ``Λ <= Z^N``.  Every closed subgroup of T^N arises this
way from exactly one lattice, so the lattice is the whole representation and
element lists are derived views.

Writing ``U Λ V = D`` for a Smith form of the annihilator basis, the
substitution ``x = V y`` identifies ``K`` with
``(1/d1)Z/Z x ... x (1/ds)Z/Z x T^(N-s)``; the columns of ``V`` therefore
give torsion generators and subtorus directions of ``K``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .exactnum import TorusPoint, as_rat, default_weights
from .finabelian import (
    EnumerationCapError,
    FinAbelian,
    dual,
    embeds,
    enumeration_cap,
    quotient_group,
)
from .lattice import (
    Lattice,
    hnf,
    index,
    integer_kernel,
    lattice_intersection,
    saturation,
    snf,
    transpose,
)

__all__ = [
    "TorusSubgroup",
    "FiniteQuotientMap",
    "InfiniteGroupError",
    "TransferError",
    "NotCloseError",
    "AmbiguousCosetError",
    "HomomorphismError",
    "SurjectivityError",
    "annihilator_from_generators",
    "generated_subgroup",
    "elements",
    "order",
    "support",
    "project",
    "annihilator_of",
    "ann_of_lattice",
    "identity_component",
    "component_count",
    "is_totally_disconnected",
    "hausdorff_dist",
    "hausdorff_sets",
    "hausdorff_bounds",
    "certified_net",
    "diameter",
    "quotient_exists",
    "find_quotient_map",
    "transfer_quotient",
    "kernel",
    "coset_gap",
]


class InfiniteGroupError(ValueError):
    pass


class TransferError(ValueError):
    """Base class for the ways a quotient map fails to transfer."""


class NotCloseError(TransferError):
    pass


class AmbiguousCosetError(TransferError):
    pass


class HomomorphismError(TransferError):
    pass


class SurjectivityError(TransferError):
    pass


@dataclass(frozen=True)
class TorusSubgroup:
    annihilator: Lattice

    @property
    def ambient(self) -> int:
        return self.annihilator.ambient

    @classmethod
    def trivial(cls, ambient: int) -> "TorusSubgroup":
        return cls(Lattice.full(ambient))

    @classmethod
    def whole(cls, ambient: int) -> "TorusSubgroup":
        return cls(Lattice.zero(ambient))

    @cached_property
    def _smith(self):
        lat = self.annihilator
        if lat.rank == 0:
            return [], [[int(i == j) for j in range(lat.ambient)] for i in range(lat.ambient)]
        _, d, v = snf(lat.rows, lat.ambient)
        return [d[i][i] for i in range(lat.rank)], v

    @cached_property
    def torsion_generators(self) -> tuple[tuple[TorusPoint, int], ...]:
        """Pairs ``(g, d)`` with ``g`` of order ``d``; ``K/K°`` is their direct sum."""
        ds, v = self._smith
        n = self.ambient
        return tuple(
            (TorusPoint(Fraction(v[r][i], d) for r in range(n)), d)
            for i, d in enumerate(ds)
            if d > 1
        )

    @cached_property
    def directions(self) -> tuple[tuple[int, ...], ...]:
        """Integer basis of the real kernel of the annihilator: K° = {tB mod 1}."""
        lat = self.annihilator
        if lat.rank == 0:
            return tuple(tuple(int(i == j) for j in range(lat.ambient)) for i in range(lat.ambient))
        if lat.rank == lat.ambient:
            return ()
        return integer_kernel(transpose(lat.rows), lat.rank).basis

    @property
    def dimension(self) -> int:
        return self.ambient - self.annihilator.rank

    def is_finite(self) -> bool:
        return self.annihilator.is_full_rank()

    def contains(self, x: TorusPoint) -> bool:
        if x.ambient != self.ambient:
            return False
        return all(
            sum(l * c for l, c in zip(row, x.coords)).denominator == 1
            for row in self.annihilator.basis
        )

    __contains__ = contains

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "annihilator": self.annihilator.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "TorusSubgroup":
        lat = Lattice.from_json(data["annihilator"])
        if "ambient" in data and int(data["ambient"]) != lat.ambient:
            raise ValueError("ambient does not match the annihilator")
        return cls(lat)


def _annihilator(ambient: int, points: Sequence[TorusPoint], directions: Sequence[Sequence[int]]) -> Lattice:
    if not points and not directions:
        return Lattice.full(ambient)
    den = math.lcm(1, *(c.denominator for p in points for c in p.coords))
    k = len(points)
    cols = k + len(directions)
    rows = [
        [int(p.coords[n] * den) for p in points] + [int(b[n]) for b in directions]
        for n in range(ambient)
    ]
    for i in range(k):
        rows.append([-den if j == i else 0 for j in range(cols)])
    ker = integer_kernel(rows, cols)
    return hnf([list(r[:ambient]) for r in ker.basis], ambient)


def annihilator_from_generators(
    ambient: int,
    points: Sequence[TorusPoint] = (),
    directions: Sequence[Sequence[int]] = (),
) -> Lattice:
    """``{m in Z^N : m.p in Z for each point, m.b = 0 for each direction}``.

    Denominators are cleared to a common ``D`` and the congruences
    ``m.(D p) = D t`` are solved as an integer kernel in the unknowns
    ``(m, t)``.  Points already in the group generated by earlier points
    are skipped; this keeps the kernel problem small without changing the
    (canonical) result.
    """
    for p in points:
        if p.ambient != ambient:
            raise ValueError(f"ambient mismatch: {p.ambient} vs {ambient}")
    lat = _annihilator(ambient, (), directions)
    used: list[TorusPoint] = []
    for p in points:
        if TorusSubgroup(lat).contains(p):
            continue
        used.append(p)
        lat = _annihilator(ambient, used, directions)
    return lat


def generated_subgroup(points: Sequence[TorusPoint], ambient: int | None = None) -> TorusSubgroup:
    """Closed subgroup generated by rational points (always finite)."""
    if ambient is None:
        if not points:
            raise ValueError("ambient required for an empty generator list")
        ambient = points[0].ambient
    return TorusSubgroup(annihilator_from_generators(ambient, points))


def ann_of_lattice(lat: Lattice) -> TorusSubgroup:
    return TorusSubgroup(lat)


def annihilator_of(k: TorusSubgroup) -> Lattice:
    """Recompute Ann(K) from K's torsion generators and subtorus directions."""
    return annihilator_from_generators(
        k.ambient, [g for g, _ in k.torsion_generators], k.directions
    )


def order(k: TorusSubgroup) -> int | float:
    if not k.is_finite():
        return math.inf
    return index(k.annihilator, Lattice.full(k.ambient))


def _require_finite(k: TorusSubgroup) -> None:
    if not k.is_finite():
        raise InfiniteGroupError("operation needs a finite subgroup (full-rank annihilator)")


def _span(gens: Sequence[tuple[TorusPoint, int]], ambient: int) -> list[TorusPoint]:
    if not gens:
        return [TorusPoint.zero(ambient)]
    out = []
    for coeffs in itertools.product(*(range(d) for _, d in gens)):
        out.append(TorusPoint(sum(c * g.coords[n] for c, (g, _) in zip(coeffs, gens)) for n in range(ambient)))
    return out


def elements(k: TorusSubgroup, cap: int | None = None) -> list[TorusPoint]:
    _require_finite(k)
    cap = enumeration_cap() if cap is None else cap
    n = order(k)
    if n > cap:
        raise EnumerationCapError(f"order {n} exceeds enumeration cap {cap}")
    return _span(k.torsion_generators, k.ambient)


def support(k: TorusSubgroup) -> set[int]:
    """1-based coordinates on which some element of K is nonzero."""
    n = k.ambient
    return {i + 1 for i in range(n) if [int(i == j) for j in range(n)] not in k.annihilator}


def project(k: TorusSubgroup, n: int) -> TorusSubgroup:
    """Image of K under x -> (x(1), ..., x(n)).

    Its annihilator consists of the characters of K that only read the first
    ``n`` coordinates: ``Λ ∩ (Z^n x 0)``.
    """
    if not 1 <= n <= k.ambient:
        raise ValueError(f"projection index {n} outside 1..{k.ambient}")
    if n == k.ambient:
        return k
    head = hnf([[int(i == j) for j in range(k.ambient)] for i in range(n)], k.ambient)
    cut = lattice_intersection(k.annihilator, head)
    return TorusSubgroup(hnf([list(r[:n]) for r in cut.basis], n))


def identity_component(k: TorusSubgroup) -> TorusSubgroup:
    return TorusSubgroup(saturation(k.annihilator))


def component_count(k: TorusSubgroup) -> int:
    return index(k.annihilator, saturation(k.annihilator))


def is_totally_disconnected(k: TorusSubgroup) -> bool:
    return k.is_finite()


# -- metric geometry ---------------------------------------------------------


class _IntMetric:
    """Weighted torus metric on points rescaled to integer coordinates.

    Coordinates become integers mod ``den``; distances are integers over
    ``den * wden``.  All comparisons stay exact.
    """

    def __init__(self, point_sets, ambient: int, weights=None):
        weights = default_weights(ambient) if weights is None else tuple(as_rat(w) for w in weights)
        if len(weights) < ambient:
            raise ValueError("weight vector shorter than ambient dimension")
        self.den = math.lcm(1, *(c.denominator for ps in point_sets for p in ps for c in p.coords))
        self.wden = math.lcm(*(w.denominator for w in weights[:ambient]))
        self.w = [int(w * self.wden) for w in weights[:ambient]]

    def embed(self, pts):
        d = self.den
        return [tuple(int(c * d) for c in p.coords) for p in pts]

    def dist(self, a, b) -> int:
        d = self.den
        total = 0
        for w, x, y in zip(self.w, a, b):
            t = x - y if x >= y else y - x
            total += w * (t if 2 * t <= d else d - t)
        return total

    def value(self, n: int) -> Fraction:
        return Fraction(n, self.den * self.wden)


def _directed(metric: _IntMetric, a, b) -> int:
    best = 0
    dist = metric.dist
    for x in a:
        m = min(dist(x, y) for y in b)
        if m > best:
            best = m
    return best


def hausdorff_sets(a: Sequence[TorusPoint], b: Sequence[TorusPoint], weights=None) -> Fraction:
    """Exact Hausdorff distance between two nonempty finite point sets."""
    if not a or not b:
        raise ValueError("Hausdorff distance needs nonempty sets")
    ambient = a[0].ambient
    if any(p.ambient != ambient for p in itertools.chain(a, b)):
        raise ValueError("ambient mismatch")
    m = _IntMetric([a, b], ambient, weights)
    ia, ib = m.embed(a), m.embed(b)
    return m.value(max(_directed(m, ia, ib), _directed(m, ib, ia)))


def hausdorff_dist(k: TorusSubgroup, l: TorusSubgroup, weights=None) -> Fraction:
    if k.ambient != l.ambient:
        raise ValueError(f"ambient mismatch: {k.ambient} vs {l.ambient}")
    if not (k.is_finite() and l.is_finite()):
        raise InfiniteGroupError("exact Hausdorff distance needs finite groups; use hausdorff_bounds")
    if k == l:
        return Fraction(0)
    return hausdorff_sets(elements(k), elements(l), weights)


def diameter(points: Sequence[TorusPoint], weights=None) -> Fraction:
    if not points:
        raise ValueError("diameter of the empty set")
    m = _IntMetric([points], points[0].ambient, weights)
    ip = m.embed(points)
    return m.value(max((m.dist(x, y) for x, y in itertools.combinations(ip, 2)), default=0))


def certified_net(k: TorusSubgroup, radius, weights=None, cap: int | None = None):
    """Rational points of K with every point of K within ``radius`` of one.

    Returns ``(points, rho)`` where ``rho <= radius`` is the certified
    covering radius (0 for finite K).  Each coset of K° is covered by the
    image of a uniform grid under ``t -> c + tB``; moving ``t_j`` by ``h``
    moves the point by at most ``h * sum_n w_n |B_jn|``.
    """
    radius = as_rat(radius)
    if radius <= 0:
        raise ValueError("net radius must be positive")
    cap = enumeration_cap() if cap is None else cap
    if k.is_finite():
        return elements(k, cap), Fraction(0)
    n = k.ambient
    weights = default_weights(n) if weights is None else tuple(as_rat(w) for w in weights)
    dirs = k.directions
    r = len(dirs)
    lips = [sum((w * abs(b) for w, b in zip(weights, row)), Fraction(0)) for row in dirs]
    steps = [max(1, math.ceil(r * c / (2 * radius))) for c in lips]
    reps = _span(k.torsion_generators, n)
    size = len(reps) * math.prod(steps)
    if size > cap:
        raise EnumerationCapError(f"net of {size} points exceeds cap {cap}; increase the mesh")
    rho = sum((c / (2 * s) for c, s in zip(lips, steps)), Fraction(0))
    grid = [
        TorusPoint(sum(Fraction(i, s) * row[j] for i, s, row in zip(idx, steps, dirs)) for j in range(n))
        for idx in itertools.product(*(range(s) for s in steps))
    ]
    return [c + g for c in reps for g in grid], rho


def hausdorff_bounds(k: TorusSubgroup, l: TorusSubgroup, mesh, weights=None, cap: int | None = None):
    """Certified ``(lower, upper)`` for d_H(K, L); width at most ``2 * mesh``.

    With nets K', L' of covering radii rK, rL:
    ``h(K',L') - rL <= h(K,L) <= h(K',L') + rK`` for each directed distance.
    """
    if k.ambient != l.ambient:
        raise ValueError(f"ambient mismatch: {k.ambient} vs {l.ambient}")
    mesh = as_rat(mesh)
    if mesh <= 0:
        raise ValueError("mesh must be positive")
    if k == l:
        return Fraction(0), Fraction(0)
    kp, rk = certified_net(k, mesh, weights, cap)
    lp, rl = certified_net(l, mesh, weights, cap)
    m = _IntMetric([kp, lp], k.ambient, weights)
    ik, il = m.embed(kp), m.embed(lp)
    hkl, hlk = m.value(_directed(m, ik, il)), m.value(_directed(m, il, ik))
    lower = max(hkl - rl, hlk - rk, Fraction(0))
    upper = max(hkl + rk, hlk + rl)
    return lower, upper


# -- quotients ------------------------------------------------------------------


def quotient_exists(k: TorusSubgroup, a: FinAbelian) -> bool:
    """Whether A is a continuous quotient of K.

    The dual of K is Z^N/Λ, and A is a quotient of K iff dual(A) embeds in
    that dual, i.e. in its torsion part.
    """
    return embeds(dual(a), quotient_group(k.ambient, k.annihilator).torsion)


@dataclass(frozen=True, eq=False)
class FiniteQuotientMap:
    """Surjective homomorphism from a finite torus subgroup onto a FinAbelian."""

    domain: TorusSubgroup
    codomain: FinAbelian
    assignment: Mapping[TorusPoint, tuple[int, ...]] = field(repr=False)

    def __post_init__(self):
        _require_finite(self.domain)
        pts = elements(self.domain)
        amap = {p: tuple(v) for p, v in self.assignment.items()}
        if set(amap) != set(pts):
            raise ValueError("assignment must be defined on exactly the domain's elements")
        object.__setattr__(self, "assignment", amap)
        _check_hom(amap, self.codomain, HomomorphismError)

    def __call__(self, x: TorusPoint) -> tuple[int, ...]:
        return self.assignment[x]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteQuotientMap)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.assignment == other.assignment
        )

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "assignment": [
                [p.to_json(), list(v)] for p, v in sorted(self.assignment.items(), key=lambda kv: kv[0].coords)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteQuotientMap":
        return cls(
            TorusSubgroup.from_json(data["domain"]),
            FinAbelian.from_json(data["codomain"]),
            {TorusPoint.from_json(p): tuple(int(x) for x in v) for p, v in data["assignment"]},
        )


def _check_hom(amap: Mapping[TorusPoint, tuple], a: FinAbelian, hom_error=HomomorphismError) -> None:
    for v in amap.values():
        if len(v) != len(a.invariant_factors) or any(not 0 <= x < d for x, d in zip(v, a.invariant_factors)):
            raise ValueError(f"{v} is not an element of {a}")
    den = math.lcm(1, *(c.denominator for p in amap for c in p.coords))
    table = {tuple(int(c * den) for c in p.coords): v for p, v in amap.items()}
    items = list(table.items())
    for x, vx in items:
        for y, vy in items:
            s = tuple((i + j) % den for i, j in zip(x, y))
            if table.get(s) != a.add(vx, vy):
                raise hom_error(f"map is not additive at {x} + {y} (denominator {den})")
    if len(set(amap.values())) != a.order:
        raise SurjectivityError("map is not surjective")


def _extend(gens: Sequence[TorusPoint], images: Sequence[tuple], a: FinAbelian, ambient: int):
    """Extend generator images along the Cayley graph; ``None`` if inconsistent."""
    zero = TorusPoint.zero(ambient)
    amap = {zero: a.zero}
    queue = deque([zero])
    while queue:
        x = queue.popleft()
        for g, img in zip(gens, images):
            y = x + g
            val = a.add(amap[x], img)
            if y in amap:
                if amap[y] != val:
                    return None
            else:
                amap[y] = val
                queue.append(y)
    return amap


def find_quotient_map(k: TorusSubgroup, a: FinAbelian) -> FiniteQuotientMap | None:
    """Some surjective homomorphism K -> A, found by search over generator images."""
    _require_finite(k)
    gens = k.torsion_generators
    if not quotient_exists(k, a):
        return None
    cands = [
        [v for v in itertools.product(*(range(d) for d in a.invariant_factors)) if not any(a.scale(o, v))]
        for _, o in gens
    ]
    for images in itertools.product(*cands):
        amap = _extend([g for g, _ in gens], images, a, k.ambient)
        if amap is not None and len(set(amap.values())) == a.order:
            return FiniteQuotientMap(k, a, amap)
    return None


def kernel(phi: FiniteQuotientMap) -> list[TorusPoint]:
    zero = phi.codomain.zero
    return [p for p, v in phi.assignment.items() if v == zero]


def transfer_quotient(phi: FiniteQuotientMap, l: TorusSubgroup, weights=None) -> FiniteQuotientMap:
    """Carry ``phi : K -> A`` over to a nearby finite group L.

    Let δ be the least distance between distinct cosets of ker(phi).  Each
    element of L must be strictly nearest to one coset and within δ/4 of
    it, and d_H(L, K) < δ/4; then ψ sends x to the value of that coset.
    ψ is re-verified as a surjective homomorphism before it is returned.
    """
    k = phi.domain
    if k.ambient != l.ambient:
        raise ValueError(f"ambient mismatch: {k.ambient} vs {l.ambient}")
    _require_finite(l)
    kpts, lpts = list(phi.assignment), elements(l)
    m = _IntMetric([kpts, lpts], k.ambient, weights)
    ik, il = m.embed(kpts), m.embed(lpts)
    cosets: dict[tuple, list] = {}
    for p, ip in zip(kpts, ik):
        cosets.setdefault(phi.assignment[p], []).append(ip)
    izero = tuple([0] * k.ambient)
    zero_val = phi.codomain.zero
    # translation invariance: dist(kH, k'H) = min |x| over x outside H
    off = [m.dist(izero, ip) for p, ip in zip(kpts, ik) if phi.assignment[p] != zero_val]
    delta4 = Fraction(min(off), 4) if off else None  # in integer units

    values = list(cosets)
    psi = {}
    for p, ip in zip(lpts, il):
        ds = [min(m.dist(ip, c) for c in cosets[v]) for v in values]
        best = min(ds)
        winners = [v for v, d in zip(values, ds) if d == best]
        if len(winners) > 1:
            raise AmbiguousCosetError(f"{p} is equidistant from {len(winners)} cosets of the kernel")
        if delta4 is not None and best >= delta4:
            raise NotCloseError(f"{p} is not within delta/4 = {m.value(1) * delta4} of K")
        psi[p] = winners[0]
    if delta4 is not None:
        dh = max(_directed(m, ik, il), _directed(m, il, ik))
        if dh >= delta4:
            raise NotCloseError(f"d_H(L, K) = {m.value(dh)} is not below delta/4 = {m.value(1) * delta4}")
    return FiniteQuotientMap(l, phi.codomain, psi)


def coset_gap(phi: FiniteQuotientMap, weights=None) -> Fraction | None:
    """δ: least distance between distinct kernel cosets (``None`` if A is trivial)."""
    kpts = list(phi.assignment)
    m = _IntMetric([kpts], phi.domain.ambient, weights)
    z = tuple([0] * phi.domain.ambient)
    zero_val = phi.codomain.zero
    off = [m.dist(z, ip) for p, ip in zip(kpts, m.embed(kpts)) if phi.assignment[p] != zero_val]
    return m.value(min(off)) if off else None
