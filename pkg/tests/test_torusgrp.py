import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    closure,
    hausdorff,
    is_hom,
    random_generators,
    random_point,
    surjection_from_points,
)
from torusgroups.corpus import random_lattices
from torusgroups.exactnum import TorusPoint, default_weights, tail_bound, torus_dist
from torusgroups.finabelian import FinAbelian, all_groups_up_to, quotient_group, realize_in_torus
from torusgroups.lattice import Lattice, hnf, index, member
from torusgroups.torusgrp import (
    AmbiguousCosetError,
    FiniteQuotientMap,
    HomomorphismError,
    InfiniteGroupError,
    NotCloseError,
    SurjectivityError,
    TorusSubgroup,
    ann_of_lattice,
    annihilator_of,
    certified_net,
    component_count,
    coset_gap,
    diameter,
    elements,
    find_quotient_map,
    generated_subgroup,
    hausdorff_bounds,
    hausdorff_dist,
    hausdorff_sets,
    identity_component,
    is_totally_disconnected,
    kernel,
    order,
    project,
    quotient_exists,
    support,
    transfer_quotient,
)


def P(*xs):
    return TorusPoint(xs)


def ann(*rows, n=None):
    return TorusSubgroup(hnf([list(r) for r in rows], n or len(rows[0])))


HALF = TorusSubgroup(hnf([[2]]))
CIRCLE = TorusSubgroup.whole(1)
C6 = generated_subgroup([P(F(1, 2), F(1, 3))])


def finite_samples(count, seed, max_n=3, max_den=12, max_order=500):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n, gens = random_generators(rng, max_n, max_den)
        pts = closure(gens, n)
        if len(pts) <= max_order:
            out.append((n, gens, pts))
    return out


# -- examples --------------------------------------------------------------------


def test_generated_subgroup_examples():
    assert order(C6) == 6
    assert member(C6.annihilator, [2, 0]) and member(C6.annihilator, [0, 3])
    assert member(C6.annihilator, [2, 3]) and not member(C6.annihilator, [1, 0])
    assert index(C6.annihilator, Lattice.full(2)) == 6
    assert generated_subgroup([P(0, 0, 0)]) == TorusSubgroup.trivial(3)
    klein = generated_subgroup([P(F(1, 2), 0), P(0, F(1, 2))])
    assert order(klein) == 4 and all(x + x == P(0, 0) for x in elements(klein))
    assert generated_subgroup([], 2) == TorusSubgroup.trivial(2)


def test_elements_examples():
    assert set(elements(HALF)) == {P(0), P(F(1, 2))}
    assert elements(TorusSubgroup.trivial(1)) == [P(0)]
    six = ann((2, 0), (0, 3))
    assert set(elements(six)) == {P(F(a, 2), F(b, 3)) for a in range(2) for b in range(3)}
    with pytest.raises(InfiniteGroupError):
        elements(CIRCLE)


def test_order_examples():
    assert order(ann((2, 0), (0, 3))) == 6
    assert order(ann((2, 0))) == math.inf
    assert order(TorusSubgroup.trivial(4)) == 1


def test_support_examples():
    assert support(generated_subgroup([P(0, F(1, 2))])) == {2}
    assert support(ann((2, 0, 0))) == {1, 2, 3}
    assert support(TorusSubgroup.trivial(3)) == set()


def test_project_examples():
    assert project(C6, 2) == C6
    assert project(C6, 1) == HALF
    assert project(TorusSubgroup.trivial(3), 2) == TorusSubgroup.trivial(2)
    with pytest.raises(ValueError):
        project(C6, 3)


def test_annihilator_round_trip_examples():
    assert ann_of_lattice(hnf([[2]])) == HALF
    assert annihilator_of(HALF) == hnf([[2]])
    assert annihilator_of(ann_of_lattice(Lattice.zero(3))) == Lattice.zero(3)
    assert ann_of_lattice(Lattice.full(2)) == TorusSubgroup.trivial(2)
    assert annihilator_of(TorusSubgroup.trivial(2)) == Lattice.full(2)


def test_identity_component_examples():
    assert identity_component(ann((2, 0))).annihilator == hnf([[1, 0]])
    assert identity_component(C6) == TorusSubgroup.trivial(2)
    assert identity_component(TorusSubgroup.whole(2)) == TorusSubgroup.whole(2)


def test_component_count_examples():
    assert component_count(ann((2, 0))) == 2
    assert component_count(TorusSubgroup.whole(3)) == 1
    assert component_count(C6) == 6


def test_total_disconnectedness_examples():
    assert is_totally_disconnected(ann((2, 0), (0, 3)))
    assert not is_totally_disconnected(TorusSubgroup.whole(2))
    assert not is_totally_disconnected(ann((2, 0)))


def test_hausdorff_examples():
    assert hausdorff_dist(C6, C6) == 0
    assert hausdorff_dist(TorusSubgroup.trivial(1), HALF) == F(1, 4)
    quarter = generated_subgroup([P(F(1, 4))])
    assert hausdorff_dist(HALF, quarter) == F(1, 8)
    with pytest.raises(InfiniteGroupError):
        hausdorff_dist(CIRCLE, HALF)


def test_hausdorff_bounds_examples():
    for mesh in (F(1, 4), F(1, 16), F(1, 100)):
        lo, hi = hausdorff_bounds(CIRCLE, CIRCLE, mesh)
        assert lo == 0 and hi <= 2 * mesh
    for mesh in (F(1, 32), F(1, 64), F(1, 97)):
        lo, hi = hausdorff_bounds(CIRCLE, HALF, mesh)
        assert lo <= F(1, 8) <= hi and hi - lo <= 2 * mesh
    quarter = generated_subgroup([P(F(1, 4))])
    assert hausdorff_bounds(HALF, quarter, F(1, 10)) == (F(1, 8), F(1, 8))


def test_diameter_examples():
    assert diameter([P(F(1, 3))]) == 0
    assert diameter([P(0), P(F(1, 2))]) == F(1, 4)
    assert diameter([P(0), P(F(1, 4)), P(F(1, 2))]) == F(1, 4)
    with pytest.raises(ValueError):
        diameter([])


def test_quotient_exists_examples():
    assert quotient_exists(C6, FinAbelian((3,)))
    assert not quotient_exists(C6, FinAbelian((4,)))
    assert not quotient_exists(CIRCLE, FinAbelian((2,)))
    assert quotient_exists(CIRCLE, FinAbelian())


def test_kernel_examples():
    z2 = realize_in_torus(FinAbelian((2,)))
    ident = FiniteQuotientMap(z2, FinAbelian((2,)), {P(0): (0,), P(F(1, 2)): (1,)})
    assert kernel(ident) == [P(0)]
    z4 = realize_in_torus(FinAbelian((4,)))
    canon = FiniteQuotientMap(z4, FinAbelian((2,)), {P(F(i, 4)): (i % 2,) for i in range(4)})
    assert set(kernel(canon)) == {P(0), P(F(1, 2))}
    to_trivial = FiniteQuotientMap(z4, FinAbelian(), {p: () for p in elements(z4)})
    assert set(kernel(to_trivial)) == set(elements(z4))


def test_quotient_map_validation():
    z4 = realize_in_torus(FinAbelian((4,)))
    with pytest.raises(HomomorphismError):
        FiniteQuotientMap(z4, FinAbelian((2,)), {P(F(i, 4)): (int(i == 1),) for i in range(4)})
    with pytest.raises(SurjectivityError):
        FiniteQuotientMap(z4, FinAbelian((4,)), {P(F(i, 4)): ((2 * i) % 4,) for i in range(4)})
    with pytest.raises(ValueError):
        FiniteQuotientMap(z4, FinAbelian((2,)), {P(0): (0,)})


def test_transfer_identity_when_l_equals_k():
    phi = find_quotient_map(C6, FinAbelian((3,)))
    assert transfer_quotient(phi, C6) == phi


def test_transfer_far_coordinate_torsion():
    k = TorusSubgroup(hnf([[2] + [0] * 7] + [[0] * i + [1] + [0] * (7 - i) for i in range(1, 8)]))
    phi = find_quotient_map(k, FinAbelian((2,)))
    z = TorusPoint([0] * 7 + [F(1, 2)])
    l = generated_subgroup(elements(k) + [z], 8)
    assert order(l) == 4
    delta = coset_gap(phi)
    assert delta == F(1, 4)
    assert hausdorff_dist(l, k) == F(1, 2**9) < delta / 4
    psi = transfer_quotient(phi, l)
    for x in elements(k):
        assert psi(x) == phi(x) == psi(x + z)
    assert is_hom(psi.assignment, (2,))


def test_transfer_ambiguous():
    phi = find_quotient_map(HALF, FinAbelian((2,)))
    quarter = generated_subgroup([P(F(1, 4))])
    with pytest.raises(AmbiguousCosetError):
        transfer_quotient(phi, quarter)


def test_transfer_not_close():
    phi = find_quotient_map(HALF, FinAbelian((2,)))
    with pytest.raises(NotCloseError):
        transfer_quotient(phi, generated_subgroup([P(F(1, 12))]))


def test_quotient_map_json_round_trip():
    phi = find_quotient_map(C6, FinAbelian((6,)))
    again = FiniteQuotientMap.from_json(phi.to_json())
    assert again == phi and again.to_json() == phi.to_json()


def test_subgroup_json_round_trip():
    k = ann((2, 4, 0), (0, 6, 3))
    assert TorusSubgroup.from_json(k.to_json()) == k


# -- properties -------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_ann_ann_identity(seed):
    for lat in random_lattices(60, 5, 20, seed):
        k = ann_of_lattice(lat)
        assert annihilator_of(k) == lat
        assert ann_of_lattice(annihilator_of(k)) == k


def test_elements_match_closure_oracle():
    for n, gens, pts in finite_samples(80, seed=11):
        k = generated_subgroup(gens, n)
        els = elements(k)
        assert len(els) == len(set(els)) == order(k) == len(pts)
        assert set(els) == pts
        assert order(k) == index(k.annihilator, Lattice.full(n))
        assert order(k) == quotient_group(n, k.annihilator).torsion.order
        assert all(k.contains(x) for x in pts)


def test_contains_matches_closure_oracle():
    rng = random.Random(5)
    for n, gens, pts in finite_samples(40, seed=12, max_den=6):
        k = generated_subgroup(gens, n)
        for _ in range(20):
            x = random_point(rng, n, rng.choice([2, 3, 4, 6, 12]))
            assert k.contains(x) == (x in pts)


def test_hausdorff_matches_brute_force_and_triangle():
    samples = finite_samples(60, seed=13, max_n=2, max_order=40)
    by_n = {}
    for n, gens, pts in samples:
        by_n.setdefault(n, []).append((generated_subgroup(gens, n), pts))
    rng = random.Random(1)
    for groups in by_n.values():
        for _ in range(40):
            (a, pa), (b, pb), (c, pc) = rng.choices(groups, k=3)
            dab = hausdorff_dist(a, b)
            assert dab == hausdorff(pa, pb)
            assert hausdorff_dist(a, c) <= dab + hausdorff_dist(b, c)
            assert hausdorff_dist(a, b) == hausdorff_dist(b, a)


def test_hausdorff_with_custom_weights():
    w = (F(1), F(1))
    a = generated_subgroup([P(F(1, 2), 0)])
    b = generated_subgroup([P(0, F(1, 3))])
    assert hausdorff_dist(a, b, w) == hausdorff(elements(a), elements(b), w)
    assert hausdorff_sets(elements(a), elements(b), w) == hausdorff_dist(a, b, w)


def test_projection_monotone():
    samples = finite_samples(50, seed=14, max_n=3, max_order=60)
    by_n = {}
    for n, gens, _ in samples:
        by_n.setdefault(n, []).append(generated_subgroup(gens, n))
    rng = random.Random(2)
    for n, groups in by_n.items():
        for _ in range(20):
            k, l = rng.choices(groups, k=2)
            full = hausdorff_dist(k, l)
            for m in range(1, n + 1):
                pk, pl = project(k, m), project(l, m)
                assert hausdorff_dist(pk, pl) <= full + tail_bound(m)
                expected = closure([TorusPoint(x.coords[:m]) for x in elements(k)], m)
                assert set(elements(pk)) == expected


def test_projection_of_infinite_group():
    # K = {(t, 2t)}: every first coordinate occurs
    k = TorusSubgroup(hnf([[2, -1]]))
    assert project(k, 1) == TorusSubgroup.whole(1)
    k = TorusSubgroup(hnf([[2, 0], [0, 0]], 2))
    assert project(k, 1) == HALF


def test_support_matches_elements():
    for n, gens, pts in finite_samples(40, seed=15):
        k = generated_subgroup(gens, n)
        expected = {i + 1 for i in range(n) if any(x.coords[i] for x in pts)}
        assert support(k) == expected


def test_quotient_exists_matches_brute_force_sampled():
    targets = all_groups_up_to(8)
    for n, gens, pts in finite_samples(25, seed=16, max_order=24):
        k = generated_subgroup(gens, n)
        for a in targets:
            brute = surjection_from_points(pts, n, a.invariant_factors) is not None
            assert quotient_exists(k, a) == brute
            phi = find_quotient_map(k, a)
            assert (phi is not None) == brute
            if phi is not None:
                assert is_hom(phi.assignment, a.invariant_factors)


@pytest.mark.parametrize("lat", random_lattices(40, 3, 6, seed=21), ids=str)
def test_certified_net_covers_infinite_groups(lat):
    k = TorusSubgroup(lat)
    if k.is_finite():
        pts, rho = certified_net(k, F(1, 8))
        assert rho == 0 and set(pts) == set(elements(k))
        return
    radius = F(1, 8)
    pts, rho = certified_net(k, radius)
    assert rho <= radius and all(k.contains(p) for p in pts)
    rng = random.Random(str(lat))
    reps = [g for g, _ in k.torsion_generators]
    for _ in range(25):
        # random rational point of K: torsion combination plus a subtorus point
        x = TorusPoint.zero(k.ambient)
        for g in reps:
            x = x + g * rng.randrange(12)
        for row in k.directions:
            t = F(rng.randrange(97), 97)
            x = x + TorusPoint(t * b for b in row)
        assert k.contains(x)
        assert min(torus_dist(x, p) for p in pts) <= rho


def test_bounds_bracket_sampled_distance():
    k = TorusSubgroup(hnf([[1, -2]]))  # {(2t, t)}
    l = generated_subgroup([P(F(1, 3), F(1, 6))])
    lo, hi = hausdorff_bounds(k, l, F(1, 32))
    assert hi - lo <= F(1, 16)
    lpts = elements(l)
    for i in range(60):
        t = F(i, 60)
        x = P(2 * t, t)
        assert min(torus_dist(x, y) for y in lpts) <= hi


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_transfer_random_far_torsion(seed):
    rng = random.Random(seed)
    n, gens = random_generators(rng, max_n=2, max_den=8)
    k = generated_subgroup(gens, n)
    cands = [a for a in all_groups_up_to(8) if not a.is_trivial() and quotient_exists(k, a)]
    if not cands:
        return
    a = rng.choice(cands)
    big = 10
    kk = generated_subgroup([g.extend(big) for g in gens], big)
    phi = find_quotient_map(kk, a)
    z = TorusPoint([0] * (big - 1) + [F(1, rng.choice([2, 3]))])
    l = generated_subgroup([g.extend(big) for g in gens] + [z], big)
    psi = transfer_quotient(phi, l)
    assert is_hom(psi.assignment, a.invariant_factors)
    assert len(set(psi.assignment.values())) == a.order
    for x in elements(kk):
        assert psi(x) == phi(x)


def test_default_weights_are_powers_of_two():
    assert default_weights(3) == (F(1, 2), F(1, 4), F(1, 8))
