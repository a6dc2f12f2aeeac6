"""Finite windows of group multiplication tables.

Labels are positive integers and the identity is always label 1.  A
:class:`PartialTable` fixes finitely many products ``i*j = m`` with
``i, j <= k``; ``m`` may name a label beyond ``k`` because the ambient
tables live on all of N.  A :class:`FiniteGroupTable` is a closed, total
window that satisfies the group axioms.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Sequence, Union

from .lattice import Lattice, hnf

__all__ = [
    "PartialTable",
    "FiniteGroupTable",
    "Violation",
    "InvalidTableError",
    "SearchCapError",
    "Var",
    "Const",
    "EqSystem",
    "validate_table",
    "eval_word",
    "in_basic_clopen",
    "solve_system",
    "push_forward",
    "embeds_table",
    "find_embedding",
    "finite_predicates",
    "phi_lattice",
    "embedding_system",
    "table_from_operation",
    "cyclic_table",
    "direct_product",
    "dihedral_table",
    "quaternion_table",
]

DEFAULT_SEARCH_CAP = 10**8


def _search_cap() -> int:
    return int(os.environ.get("TORUSGROUPS_SEARCH_CAP", DEFAULT_SEARCH_CAP))


class SearchCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str  # identity | cancellation | closure | associativity | shape
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


class InvalidTableError(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(f"{violation.kind}: {violation.detail}")
        self.violation = violation


@dataclass(frozen=True)
class PartialTable:
    """``entries[i-1][j-1]`` is ``i*j``, or 0 when undefined."""

    size: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ent = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", ent)
        if self.size < 1:
            raise ValueError("table size must be >= 1")
        if len(ent) != self.size or any(len(r) != self.size for r in ent):
            raise ValueError(f"entries must be a {self.size}x{self.size} array")
        if any(x < 0 for r in ent for x in r):
            raise ValueError("entries must be labels >= 1 or 0 for undefined")

    @classmethod
    def from_constraints(cls, size: int, constraints) -> "PartialTable":
        rows = [[0] * size for _ in range(size)]
        for i, j, m in constraints:
            rows[i - 1][j - 1] = m
        return cls(size, tuple(map(tuple, rows)))

    def get(self, i: int, j: int) -> int | None:
        v = self.entries[i - 1][j - 1]
        return v or None

    def is_total(self) -> bool:
        return all(all(r) for r in self.entries)

    def to_json(self) -> dict:
        return {"size": self.size, "entries": [list(r) for r in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "PartialTable":
        return cls(int(data["size"]), tuple(tuple(r) for r in data["entries"]))


def validate_table(t) -> Violation | None:
    """First violated group-table constraint, or ``None``.

    Partial windows are checked for the identity row and column, repeated
    values within a row or column, and associativity on every triple where
    both bracketings are defined.  Total windows must also be closed, and
    then these checks amount to the full group axioms.
    """
    if isinstance(t, FiniteGroupTable):
        t = PartialTable(t.size, t.entries)
    k = t.size
    get = t.get
    for j in range(1, k + 1):
        for a, b in ((1, j), (j, 1)):
            v = get(a, b)
            if v is not None and v != j:
                return Violation("identity", f"{a}*{b} = {v}, expected {j}")
    for i in range(1, k + 1):
        seen: dict[int, int] = {}
        for j in range(1, k + 1):
            v = get(i, j)
            if v is not None:
                if v in seen:
                    return Violation("cancellation", f"{i}*{seen[v]} = {i}*{j} = {v}")
                seen[v] = j
        seen = {}
        for j in range(1, k + 1):
            v = get(j, i)
            if v is not None:
                if v in seen:
                    return Violation("cancellation", f"{seen[v]}*{i} = {j}*{i} = {v}")
                seen[v] = j
    total = t.is_total()
    if total:
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                if get(i, j) > k:
                    return Violation("closure", f"{i}*{j} = {get(i, j)} lies outside 1..{k}")

    def prod(a, b):
        if a > k or b > k:
            return None
        return get(a, b)

    for a in range(1, k + 1):
        for b in range(1, k + 1):
            ab = get(a, b)
            if ab is None:
                continue
            for c in range(1, k + 1):
                bc = get(b, c)
                if bc is None:
                    continue
                left, right = prod(ab, c), prod(a, bc)
                if left is not None and right is not None and left != right:
                    return Violation(
                        "associativity", f"({a}*{b})*{c} = {left} but {a}*({b}*{c}) = {right}"
                    )
    return None


@dataclass(frozen=True)
class FiniteGroupTable:
    size: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        pt = PartialTable(self.size, self.entries)
        object.__setattr__(self, "entries", pt.entries)
        if not pt.is_total():
            raise InvalidTableError(Violation("shape", "group tables must be fully defined"))
        bad = validate_table(pt)
        if bad is not None:
            raise InvalidTableError(bad)
        inv = [0] * (self.size + 1)
        for i in range(1, self.size + 1):
            inv[i] = self.entries[i - 1].index(1) + 1
        object.__setattr__(self, "_inv", tuple(inv))

    def mul(self, i: int, j: int) -> int:
        return self.entries[i - 1][j - 1]

    def inv(self, i: int) -> int:
        return self._inv[i]

    def power(self, i: int, e: int) -> int:
        if e < 0:
            i, e = self.inv(i), -e
        out = 1
        for _ in range(e):
            out = self.mul(out, i)
        return out

    def element_order(self, i: int) -> int:
        n, x = 1, i
        while x != 1:
            x = self.mul(x, i)
            n += 1
        return n

    @property
    def labels(self) -> range:
        return range(1, self.size + 1)

    def is_abelian(self) -> bool:
        return all(self.mul(i, j) == self.mul(j, i) for i in self.labels for j in self.labels)

    def to_json(self) -> dict:
        return {"size": self.size, "entries": [list(r) for r in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroupTable":
        return cls(int(data["size"]), tuple(tuple(r) for r in data["entries"]))


# -- words and systems ----------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int
    exp: int = 1

    def to_json(self) -> dict:
        return {"var": self.index, "exp": self.exp}


@dataclass(frozen=True)
class Const:
    label: int
    exp: int = 1

    def to_json(self) -> dict:
        return {"const": self.label, "exp": self.exp}


Letter = Union[Var, Const]
Word = tuple  # tuple[Letter, ...]; () is the empty word


def _check_letter(x: Letter) -> None:
    if x.exp not in (1, -1):
        raise ValueError(f"letter exponent must be +1 or -1, got {x.exp}")


def word_from_json(data) -> Word:
    out = []
    for item in data:
        exp = int(item.get("exp", 1))
        if "var" in item:
            out.append(Var(int(item["var"]), exp))
        elif "const" in item:
            out.append(Const(int(item["const"]), exp))
        else:
            raise ValueError(f"letter {item!r} has neither 'var' nor 'const'")
        _check_letter(out[-1])
    return tuple(out)


def word_to_json(w: Word) -> list[dict]:
    return [x.to_json() for x in w]


@dataclass(frozen=True)
class EqSystem:
    equations: tuple[Word, ...] = ()
    inequations: tuple[Word, ...] = ()

    @property
    def variables(self) -> list[int]:
        return sorted({x.index for w in self.equations + self.inequations for x in w if isinstance(x, Var)})

    def to_json(self) -> dict:
        return {
            "E": [word_to_json(w) for w in self.equations],
            "I": [word_to_json(w) for w in self.inequations],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EqSystem":
        return cls(
            tuple(word_from_json(w) for w in data.get("E", [])),
            tuple(word_from_json(w) for w in data.get("I", [])),
        )


def eval_word(w: Word, assignment: Mapping[int, int], g: FiniteGroupTable) -> int:
    """Left-to-right product of the letters of ``w`` in ``g``."""
    acc = 1
    for x in w:
        if isinstance(x, Var):
            if x.index not in assignment:
                raise KeyError(f"variable {x.index} is unbound")
            v = assignment[x.index]
        else:
            v = x.label
        if not 1 <= v <= g.size:
            raise ValueError(f"label {v} outside 1..{g.size}")
        if x.exp == -1:
            v = g.inv(v)
        acc = g.mul(acc, v)
    return acc


def in_basic_clopen(g: FiniteGroupTable, constraints) -> bool:
    """Whether ``g`` satisfies every ``(i, j, m)``: i*j = m."""
    ok = True
    for i, j, m in constraints:
        if not (1 <= i <= g.size and 1 <= j <= g.size):
            raise IndexError(f"constraint ({i}, {j}, {m}) indexes outside 1..{g.size}")
        ok = ok and g.mul(i, j) == m
    return ok


def solve_system(
    s: EqSystem,
    g: FiniteGroupTable,
    variables: Sequence[int] | None = None,
    cap: int | None = None,
) -> dict[int, int] | None:
    """Lexicographically first assignment solving ``s`` in ``g``.

    Assignments are scanned in lexicographic order of label tuples (variables
    sorted by index).  A word is evaluated as soon as its last variable is
    bound, which discards failing prefixes without changing which
    assignment is found first.
    """
    variables = sorted(set(variables) | set(s.variables)) if variables is not None else s.variables
    cap = _search_cap() if cap is None else cap
    if g.size ** len(variables) > cap:
        raise SearchCapError(f"{g.size}^{len(variables)} assignments exceed the search cap {cap}")
    pos = {v: i for i, v in enumerate(variables)}
    checks: list[list[tuple[Word, bool]]] = [[] for _ in range(len(variables) + 1)]
    for words, want_one in ((s.equations, True), (s.inequations, False)):
        for w in words:
            depth = max((pos[x.index] + 1 for x in w if isinstance(x, Var)), default=0)
            checks[depth].append((w, want_one))

    assignment: dict[int, int] = {}

    def ok(depth: int) -> bool:
        return all((eval_word(w, assignment, g) == 1) == want for w, want in checks[depth])

    if not ok(0):
        return None

    def go(i: int) -> bool:
        if i == len(variables):
            return True
        v = variables[i]
        for label in g.labels:
            assignment[v] = label
            if ok(i + 1) and go(i + 1):
                return True
        del assignment[v]
        return False

    return dict(assignment) if go(0) else None


def embedding_system(h: FiniteGroupTable) -> EqSystem:
    """x_i x_j = x_(ij) for all i, j, and x_i != x_j for i < j."""
    eqs = tuple(
        (Var(i), Var(j), Var(h.mul(i, j), -1)) for i in h.labels for j in h.labels
    )
    neqs = tuple((Var(i), Var(j, -1)) for i, j in itertools.combinations(h.labels, 2))
    return EqSystem(eqs, neqs)


def _check_perm(phi: Sequence[int], k: int) -> tuple[int, ...]:
    phi = tuple(phi)
    if sorted(phi) != list(range(1, k + 1)):
        raise ValueError(f"{phi} is not a permutation of 1..{k}")
    if phi[0] != 1:
        raise ValueError("the permutation must fix the identity label 1")
    return phi


def push_forward(g: FiniteGroupTable, phi: Sequence[int]) -> FiniteGroupTable:
    """Relabel by ``phi`` (``phi[i-1]`` is the image of label i): i.j = phi(g(phi^-1 i, phi^-1 j))."""
    phi = _check_perm(phi, g.size)
    inv = [0] * (g.size + 1)
    for i, p in enumerate(phi, start=1):
        inv[p] = i
    k = g.size
    out = FiniteGroupTable(
        k,
        tuple(
            tuple(phi[g.mul(inv[i], inv[j]) - 1] for j in range(1, k + 1)) for i in range(1, k + 1)
        ),
    )
    for a in g.labels:
        for b in g.labels:
            if phi[g.mul(a, b) - 1] != out.mul(phi[a - 1], phi[b - 1]):
                raise AssertionError("push_forward failed to produce an isomorphic table")
    return out


def _generators(g: FiniteGroupTable) -> list[int]:
    gens: list[int] = []
    span = {1}
    for x in g.labels:
        if x not in span:
            gens.append(x)
            span = _closure(g, gens)
    return gens


def _closure(g: FiniteGroupTable, gens: Sequence[int]) -> set[int]:
    seen = {1}
    queue = deque([1])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = g.mul(x, s)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def _extend_hom(h: FiniteGroupTable, g: FiniteGroupTable, gens, images) -> dict[int, int] | None:
    """Extend x*s -> f(x)*f(s) along the Cayley graph; ``None`` if some relation breaks."""
    f = {1: 1}
    queue = deque([1])
    while queue:
        x = queue.popleft()
        for s, t in zip(gens, images):
            y, val = h.mul(x, s), g.mul(f[x], t)
            if y in f:
                if f[y] != val:
                    return None
            else:
                f[y] = val
                queue.append(y)
    return f


def find_embedding(h: FiniteGroupTable, g: FiniteGroupTable, cap: int | None = None) -> dict[int, int] | None:
    """An injective homomorphism h -> g as a label map, or ``None``."""
    if g.size % h.size:
        return None
    gens = _generators(h)
    cap = _search_cap() if cap is None else cap
    if g.size ** len(gens) > cap:
        raise SearchCapError(f"{g.size}^{len(gens)} generator images exceed the search cap {cap}")
    g_orders = {x: g.element_order(x) for x in g.labels}
    cands = [[x for x in g.labels if g_orders[x] == h.element_order(s)] for s in gens]
    for images in itertools.product(*cands):
        f = _extend_hom(h, g, gens, images)
        if f is not None and len(set(f.values())) == h.size:
            return f
    return None


def embeds_table(h: FiniteGroupTable, g: FiniteGroupTable, cap: int | None = None) -> bool:
    return find_embedding(h, g, cap) is not None


def finite_predicates(g: FiniteGroupTable) -> dict:
    orders = [g.element_order(x) for x in g.labels]
    exponent = math.lcm(*orders)
    powers = {e: {g.power(m, e) for m in g.labels} for e in range(1, exponent + 1)}
    divisible = all(len(p) == g.size for p in powers.values())
    return {"abelian": g.is_abelian(), "torsion_orders": orders, "divisible": divisible}


def phi_lattice(g: FiniteGroupTable) -> Lattice:
    """``{x in Z^k : prod n^x(n) = 1 in g}`` for abelian ``g``.

    This is the kernel of Z^k -> g, e_n -> n.  It is spanned by the
    table relations e_i + e_j - e_(ij), since those present g.
    """
    if not g.is_abelian():
        raise ValueError("phi_lattice needs an abelian table")
    k = g.size
    rows = []
    for i in g.labels:
        for j in range(i, k + 1):
            r = [0] * k
            r[i - 1] += 1
            r[j - 1] += 1
            r[g.mul(i, j) - 1] -= 1
            rows.append(r)
    return hnf(rows, k)


# -- constructors ---------------------------------------------------------------


def table_from_operation(elements: Sequence[Hashable], op: Callable, identity) -> FiniteGroupTable:
    """Label ``identity`` as 1 and the remaining elements 2, 3, ... in order."""
    order = [identity] + [e for e in elements if e != identity]
    label = {e: i + 1 for i, e in enumerate(order)}
    k = len(order)
    return FiniteGroupTable(
        k, tuple(tuple(label[op(a, b)] for b in order) for a in order)
    )


def cyclic_table(n: int) -> FiniteGroupTable:
    return table_from_operation(range(n), lambda a, b: (a + b) % n, 0)


def direct_product(g: FiniteGroupTable, h: FiniteGroupTable) -> FiniteGroupTable:
    elems = list(itertools.product(g.labels, h.labels))
    return table_from_operation(elems, lambda a, b: (g.mul(a[0], b[0]), h.mul(a[1], b[1])), (1, 1))


def dihedral_table(n: int) -> FiniteGroupTable:
    """Symmetries of the n-gon (order 2n); elements (r, s) mean rot^r ref^s."""
    elems = [(r, s) for s in range(2) for r in range(n)]

    def op(a, b):
        r1, s1 = a
        r2, s2 = b
        return ((r1 + (-r2 if s1 else r2)) % n, (s1 + s2) % 2)

    return table_from_operation(elems, op, (0, 0))


def quaternion_table() -> FiniteGroupTable:
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    basis_mul = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }

    def split(x):
        return (-1, x[1:]) if x.startswith("-") else (1, x)

    def op(a, b):
        sa, ua = split(a)
        sb, ub = split(b)
        s, u = basis_mul[(ua, ub)]
        return u if sa * sb * s == 1 else "-" + u

    return table_from_operation(names, op, "1")
