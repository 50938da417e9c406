"""Finite groups given by multiplication tables or by explicit laws.

Every concrete group in the package (finite abelian groups, Heisenberg
groups, theta groups, quotient action groups, dense tables) satisfies the
FiniteGroup protocol, so the exhaustive oracles here and in the verify
module work on all of them.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import prod
from typing import Any, Callable, Hashable, Iterable, Optional, Protocol, Sequence

from nilpotent_actions.bounds import Bounds, current_bounds
from nilpotent_actions.checks import CheckResult, Report, failed, passed
from nilpotent_actions.errors import PreconditionError

log = logging.getLogger(__name__)


class FiniteGroup(Protocol):
    @property
    def order(self) -> int: ...

    def elements(self) -> Iterable[Any]: ...

    def identity(self) -> Any: ...

    def mul(self, x: Any, y: Any) -> Any: ...

    def inv(self, x: Any) -> Any: ...

    def generators(self) -> Sequence[Any]: ...


@dataclass(frozen=True)
class TableGroup:
    """A group on 0..n-1 given by a dense table, row = left factor."""

    table: tuple[tuple[int, ...], ...]
    name: str = "table"

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if n == 0:
            raise ValueError("a group table needs at least one element")
        full = set(range(n))
        for i, row in enumerate(table):
            if len(row) != n:
                raise ValueError(f"row {i} has length {len(row)}, expected {n}")
            if set(row) != full:
                raise ValueError(f"row {i} is not a permutation of the elements")
        if self._identity is None:
            raise ValueError("table has no identity element")

    @cached_property
    def _identity(self) -> Optional[int]:
        for e in range(len(self.table)):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(len(self.table))):
                return e
        return None

    @cached_property
    def _inverses(self) -> tuple[int, ...]:
        e = self._identity
        inverses = []
        for x, row in enumerate(self.table):
            inverses.append(row.index(e))
        return tuple(inverses)

    @property
    def order(self) -> int:
        return len(self.table)

    def elements(self) -> range:
        return range(len(self.table))

    def identity(self) -> int:
        return self._identity

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inv(self, x: int) -> int:
        return self._inverses[x]

    def commutator(self, x: int, y: int) -> int:
        """[x, y] = x^-1 y^-1 x y."""
        t = self.table
        return t[t[t[self._inverses[x]][self._inverses[y]]][x]][y]

    def element_order(self, x: int) -> int:
        n, y = 1, x
        while y != self._identity:
            y = self.table[y][x]
            n += 1
        return n

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        """The subgroup generated by gens."""
        gens = [g for g in gens if g != self._identity]
        seen = {self._identity}
        frontier = [self._identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    @cached_property
    def _generators(self) -> tuple[int, ...]:
        gens: list[int] = []
        span = frozenset({self._identity})
        # elements of larger order first give shorter generating lists
        for x in sorted(self.elements(), key=lambda x: (-self.element_order(x), x)):
            if x not in span:
                gens.append(x)
                span = self.closure(gens)
                if len(span) == self.order:
                    break
        return tuple(gens)

    def generators(self) -> tuple[int, ...]:
        return self._generators

    def is_abelian(self) -> bool:
        gens = self.generators()
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)

    @classmethod
    def from_group(cls, group: FiniteGroup, name: str = "table") -> TableGroup:
        return to_table(group, name=name)[0]


def to_table(group: FiniteGroup, name: str = "table") -> tuple[TableGroup, list[Any]]:
    """Index the elements of group and tabulate its multiplication.

    The identity is placed at index 0.
    """
    identity = group.identity()
    elements = [identity] + [x for x in group.elements() if x != identity]
    index = {x: i for i, x in enumerate(elements)}
    if len(index) != len(elements):
        raise ValueError("group elements are not distinct")
    table = tuple(tuple(index[group.mul(x, y)] for y in elements) for x in elements)
    return TableGroup(table, name=name), elements


@dataclass(frozen=True)
class ProductGroup:
    """Direct product of finitely many groups, elements are tuples."""

    factors: tuple[Any, ...]

    @property
    def order(self) -> int:
        return prod(g.order for g in self.factors)

    def elements(self) -> Iterable[tuple]:
        return itertools.product(*(list(g.elements()) for g in self.factors))

    def identity(self) -> tuple:
        return tuple(g.identity() for g in self.factors)

    def mul(self, x: tuple, y: tuple) -> tuple:
        return tuple(g.mul(a, b) for g, a, b in zip(self.factors, x, y))

    def inv(self, x: tuple) -> tuple:
        return tuple(g.inv(a) for g, a in zip(self.factors, x))

    def generators(self) -> list[tuple]:
        identity = self.identity()
        gens = []
        for i, g in enumerate(self.factors):
            for s in g.generators():
                element = list(identity)
                element[i] = s
                gens.append(tuple(element))
        return gens


@dataclass(frozen=True)
class GroupMorphism:
    """A map between finite groups, claimed to be a homomorphism."""

    source: Any
    target: Any
    func: Callable[[Any], Any] = field(compare=False)
    name: str = "morphism"

    def __call__(self, x: Any) -> Any:
        return self.func(x)

    def then(self, other: GroupMorphism, name: Optional[str] = None) -> GroupMorphism:
        """The composite other ∘ self."""
        return GroupMorphism(self.source, other.target, lambda x: other(self(x)), name or f"{other.name}∘{self.name}")


def identity_morphism(group: Any, name: str = "id") -> GroupMorphism:
    return GroupMorphism(group, group, lambda x: x, name)


@dataclass(frozen=True)
class CentralByAbelianExt:
    """1 → kernel → total → quotient → 1 with central kernel and abelian quotient."""

    kernel: Any
    total: Any
    quotient: Any
    inject: GroupMorphism
    project: GroupMorphism
    name: str = "extension"


@dataclass(frozen=True)
class SesMorphismWitness:
    """Vertical maps between two extensions forming a commutative ladder."""

    source: CentralByAbelianExt
    target: CentralByAbelianExt
    kernel_map: GroupMorphism
    total_map: GroupMorphism
    quotient_map: GroupMorphism
    name: str = "ses morphism"


def is_homomorphism(f: GroupMorphism, bounds: Optional[Bounds] = None) -> CheckResult:
    """Check f(xy) = f(x)f(y).

    All pairs are compared when |G|² fits in the multiplication bound.
    Otherwise y runs over a generating set, which decides the same property
    for finite groups.
    """
    bounds = bounds or current_bounds()
    source, target = f.source, f.target
    elements = list(source.elements())
    if len(elements) ** 2 <= bounds.multiplications:
        right = elements
    else:
        right = list(source.generators())
        bounds.require("multiplications", len(elements) * len(right), f"homomorphism scan of {f.name}")
    images = {x: f(x) for x in elements}
    for x in elements:
        fx = images[x]
        for y in right:
            lhs = images[source.mul(x, y)]
            rhs = target.mul(fx, images[y])
            if lhs != rhs:
                return failed(f"{f.name}:homomorphism", witness=[x, y, lhs, rhs])
    if images[source.identity()] != target.identity():
        return failed(f"{f.name}:homomorphism", witness=[source.identity(), images[source.identity()]])
    return passed(f"{f.name}:homomorphism")


def is_injective(f: GroupMorphism) -> CheckResult:
    seen: dict = {}
    for x in f.source.elements():
        y = f(x)
        if y in seen:
            return failed(f"{f.name}:injective", witness=[seen[y], x, y])
        seen[y] = x
    return passed(f"{f.name}:injective")


def image_of(f: GroupMorphism) -> set:
    return {f(x) for x in f.source.elements()}


def check_group_axioms(group: Any, bounds: Optional[Bounds] = None) -> Report:
    """Exhaustive identity, inverse and associativity laws.

    Associativity uses Light's criterion: (xg)y = x(gy) for all x, y and
    every g in a generating set.
    """
    bounds = bounds or current_bounds()
    bounds.require("group_order", group.order, "group axioms")
    table, elements = to_table(group)
    report = Report()
    e = table.identity()
    bad_identity = [elements[x] for x in table.elements() if table.mul(e, x) != x or table.mul(x, e) != x]
    report.add(failed("identity", bad_identity) if bad_identity else passed("identity"))
    bad_inverse = [
        elements[x]
        for x in table.elements()
        if table.mul(x, table.inv(x)) != e or table.mul(table.inv(x), x) != e
    ]
    report.add(failed("inverse", bad_inverse) if bad_inverse else passed("inverse"))

    gens = group.generators()
    index = {x: i for i, x in enumerate(elements)}
    gen_idx = [index[g] for g in gens]
    if table.closure(gen_idx) != frozenset(table.elements()):
        report.add(failed("generators", [str(g) for g in gens], "listed generators do not generate"))
    t = table.table
    witness = None
    for g in gen_idx:
        for x in table.elements():
            xg = t[x][g]
            row = t[xg]
            for y in table.elements():
                if row[y] != t[x][t[g][y]]:
                    witness = [elements[x], elements[g], elements[y]]
                    break
            if witness:
                break
        if witness:
            break
    report.add(failed("associativity", witness) if witness else passed("associativity"))
    return report


def commutes_with_generators(group: Any, x: Any) -> bool:
    return all(group.mul(x, g) == group.mul(g, x) for g in group.generators())


# Standard families -------------------------------------------------------


def cyclic_table(n: int) -> TableGroup:
    return TableGroup(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)), name=f"C{n}")


def dihedral_table(n: int) -> TableGroup:
    """Dihedral group of order 2n: (r, s) for r^k s^s, s r s = r^-1."""

    def mul(x, y):
        (a, s), (b, t) = x, y
        return ((a + (b if s == 0 else -b)) % n, (s + t) % 2)

    elements = [(a, s) for s in range(2) for a in range(n)]
    return TableGroup.from_group(LawGroup(elements, mul, gens=[(1, 0), (0, 1)]), name=f"D{n}")


def quaternion_table() -> TableGroup:
    """Q8 as ±1, ±i, ±j, ±k, encoded (sign, unit) with unit in 1,i,j,k."""
    units = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def mul(x, y):
        sign, unit = units[(x[1], y[1])]
        return (x[0] * y[0] * sign, unit)

    elements = [(s, u) for s in (1, -1) for u in range(4)]
    return TableGroup.from_group(LawGroup(elements, mul, gens=[(1, 1), (1, 2)]), name="Q8")


def symmetric_table(n: int) -> TableGroup:
    perms = list(itertools.permutations(range(n)))

    def mul(p, q):
        # apply q first, then p
        return tuple(p[q[i]] for i in range(n))

    gens = []
    if n > 1:
        gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return TableGroup.from_group(LawGroup(perms, mul, gens=gens), name=f"S{n}")


@dataclass(frozen=True)
class LawGroup:
    """A group from an explicit element list and multiplication law."""

    element_list: Sequence[Hashable]
    law: Callable[[Any, Any], Any] = field(compare=False)
    gens: Sequence[Hashable] = ()

    @property
    def order(self) -> int:
        return len(self.element_list)

    def elements(self) -> Sequence[Hashable]:
        return self.element_list

    @cached_property
    def _identity(self) -> Hashable:
        for e in self.element_list:
            if all(self.law(e, x) == x for x in self.element_list):
                return e
        raise PreconditionError("law has no identity element")

    def identity(self) -> Hashable:
        return self._identity

    def mul(self, x, y):
        return self.law(x, y)

    def inv(self, x):
        e = self._identity
        for y in self.element_list:
            if self.law(x, y) == e:
                return y
        raise PreconditionError(f"{x!r} has no inverse")

    def generators(self) -> Sequence[Hashable]:
        return list(self.gens) or list(self.element_list)


def check_ses_morphism(w: SesMorphismWitness, bounds: Optional[Bounds] = None) -> Report:
    """All three vertical maps are homomorphisms and both squares commute."""
    bounds = bounds or current_bounds()
    bounds.require("group_order", w.source.total.order, w.name)
    report = Report()
    for f in (w.kernel_map, w.total_map, w.quotient_map):
        report.add(is_homomorphism(f, bounds))

    bad_left = None
    for c in w.source.kernel.elements():
        lhs = w.total_map(w.source.inject(c))
        rhs = w.target.inject(w.kernel_map(c))
        if lhs != rhs:
            bad_left = [c, lhs, rhs]
            break
    report.add(failed("left square", bad_left) if bad_left else passed("left square"))

    bad_right = None
    for x in w.source.total.elements():
        lhs = w.target.project(w.total_map(x))
        rhs = w.quotient_map(w.source.project(x))
        if lhs != rhs:
            bad_right = [x, lhs, rhs]
            break
    report.add(failed("right square", bad_right) if bad_right else passed("right square"))
    log.debug("check_ses_morphism %s: %s", w.name, "ok" if report.ok else "failed")
    return report
