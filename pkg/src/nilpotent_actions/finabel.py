"""Finite abelian groups in invariant-factor form.

Groups are stored as d_1 ≥ d_2 ≥ … ≥ d_t with d_{i+1} | d_i and every
d_i ≥ 2, which is the convention admissible tuples use, so K(δ) is simply
FinAbGroup(δ). Roots of unity are residues mod m throughout.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import gcd, prod
from typing import Iterable, Iterator, Optional, Sequence

from sympy import factorint
from sympy.ntheory.modular import crt
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors, smith_normal_decomp

from nilpotent_actions.bounds import Bounds, current_bounds
from nilpotent_actions.errors import GroupMismatch, InfiniteGroupError, PreconditionError
from nilpotent_actions.groups import TableGroup

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FinAbGroup:
    factors: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(int(d) for d in self.factors)
        object.__setattr__(self, "factors", factors)
        for d in factors:
            if d < 2:
                raise ValueError(f"invariant factors must be at least 2, got {factors}")
        for big, small in zip(factors, factors[1:]):
            if big % small:
                raise ValueError(f"invariant factors must satisfy d_(i+1) | d_i, got {factors}")

    @classmethod
    def trivial(cls) -> FinAbGroup:
        return cls(())

    @classmethod
    def cyclic(cls, n: int) -> FinAbGroup:
        if n < 1:
            raise ValueError(f"cyclic group order must be positive, got {n}")
        return cls(() if n == 1 else (n,))

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int]) -> FinAbGroup:
        """Invariant factors of Z/o_1 ⊕ … ⊕ Z/o_k (orders need not divide each other)."""
        return _PrimaryLayout.from_orders(orders).group

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return prod(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[0] if self.factors else 1

    def is_trivial(self) -> bool:
        return not self.factors

    def is_cyclic(self) -> bool:
        return len(self.factors) <= 1

    def elem(self, coords: Iterable[int]) -> FinAbElem:
        coords = tuple(coords)
        if len(coords) != len(self.factors):
            raise ValueError(f"expected {len(self.factors)} coordinates for {self}, got {coords}")
        return FinAbElem(self, tuple(int(x) % d for x, d in zip(coords, self.factors)))

    def zero(self) -> FinAbElem:
        return FinAbElem(self, (0,) * len(self.factors))

    def generator(self, i: int) -> FinAbElem:
        coords = [0] * len(self.factors)
        coords[i] = 1
        return FinAbElem(self, tuple(coords))

    def elements(self) -> Iterator[FinAbElem]:
        for coords in itertools.product(*(range(d) for d in self.factors)):
            yield FinAbElem(self, coords)

    # FiniteGroup protocol

    def identity(self) -> FinAbElem:
        return self.zero()

    def mul(self, x: FinAbElem, y: FinAbElem) -> FinAbElem:
        return elem_add(x, y)

    def inv(self, x: FinAbElem) -> FinAbElem:
        return -x

    def generators(self) -> list[FinAbElem]:
        return [self.generator(i) for i in range(len(self.factors))]

    def __str__(self) -> str:
        if not self.factors:
            return "0"
        return " ⊕ ".join(f"Z/{d}" for d in self.factors)

    def to_json(self) -> list[int]:
        return list(self.factors)


@dataclass(frozen=True)
class FinAbElem:
    group: FinAbGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.group.factors):
            raise ValueError(f"{self.coords} has the wrong length for {self.group}")
        for x, d in zip(self.coords, self.group.factors):
            if not 0 <= x < d:
                raise ValueError(f"{self.coords} is not reduced in {self.group}")

    def __add__(self, other: FinAbElem) -> FinAbElem:
        return elem_add(self, other)

    def __neg__(self) -> FinAbElem:
        return FinAbElem(self.group, tuple((-x) % d for x, d in zip(self.coords, self.group.factors)))

    def __sub__(self, other: FinAbElem) -> FinAbElem:
        return self + (-other)

    def __mul__(self, k: int) -> FinAbElem:
        return FinAbElem(self.group, tuple((k * x) % d for x, d in zip(self.coords, self.group.factors)))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def order(self) -> int:
        n = 1
        for x, d in zip(self.coords, self.group.factors):
            k = d // gcd(x, d)
            n = n * k // gcd(n, k)
        return n

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.coords) + ")"

    def to_json(self) -> list[int]:
        return list(self.coords)


def elem_add(x: FinAbElem, y: FinAbElem) -> FinAbElem:
    if x.group != y.group:
        raise GroupMismatch(f"cannot add elements of {x.group} and {y.group}")
    return FinAbElem(x.group, tuple((a + b) % d for a, b, d in zip(x.coords, y.coords, x.group.factors)))


@dataclass(frozen=True)
class FinAbHom:
    """Homomorphism given by the images of the canonical generators."""

    domain: FinAbGroup
    codomain: FinAbGroup
    images: tuple[FinAbElem, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.domain.rank:
            raise PreconditionError(f"need {self.domain.rank} generator images, got {len(images)}")
        for d, image in zip(self.domain.factors, images):
            if image.group != self.codomain:
                raise GroupMismatch(f"image {image} does not lie in {self.codomain}")
            if not (image * d).is_zero():
                raise PreconditionError(f"image {image} of a generator of order {d} is not killed by {d}")

    @classmethod
    def from_coords(cls, domain: FinAbGroup, codomain: FinAbGroup, rows: Sequence[Sequence[int]]) -> FinAbHom:
        return cls(domain, codomain, tuple(codomain.elem(row) for row in rows))

    @classmethod
    def identity(cls, group: FinAbGroup) -> FinAbHom:
        return cls(group, group, tuple(group.generators()))

    @classmethod
    def zero(cls, domain: FinAbGroup, codomain: FinAbGroup) -> FinAbHom:
        return cls(domain, codomain, tuple(codomain.zero() for _ in domain.factors))

    def __call__(self, x: FinAbElem) -> FinAbElem:
        if x.group != self.domain:
            raise GroupMismatch(f"{x} is not in the domain {self.domain}")
        out = [0] * self.codomain.rank
        for k, image in zip(x.coords, self.images):
            for i, c in enumerate(image.coords):
                out[i] += k * c
        return self.codomain.elem(out)

    def compose(self, inner: FinAbHom) -> FinAbHom:
        """self ∘ inner."""
        if inner.codomain != self.domain:
            raise GroupMismatch("composition of incompatible homomorphisms")
        return FinAbHom(inner.domain, self.codomain, tuple(self(image) for image in inner.images))

    def image_order(self) -> int:
        return len({self(x) for x in self.domain.elements()})

    def is_injective(self) -> bool:
        return self.image_order() == self.domain.order

    def is_isomorphism(self) -> bool:
        return self.domain.order == self.codomain.order and self.is_injective()


@dataclass(frozen=True)
class Character:
    """A character A → Z/m, g ↦ Σ e_i·coords[i] mod m."""

    domain: FinAbGroup
    modulus: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        m = int(self.modulus)
        if m < 1:
            raise ValueError(f"character modulus must be positive, got {m}")
        exponents = tuple(int(e) % m for e in self.exponents)
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "exponents", exponents)
        if len(exponents) != self.domain.rank:
            raise ValueError(f"need {self.domain.rank} exponents, got {exponents}")
        for d, e in zip(self.domain.factors, exponents):
            if (d * e) % m:
                raise ValueError(f"exponent {e} is not well defined on Z/{d} with values mod {m}")

    @classmethod
    def trivial(cls, domain: FinAbGroup, modulus: int) -> Character:
        return cls(domain, modulus, (0,) * domain.rank)

    def __call__(self, x: FinAbElem) -> int:
        if x.group != self.domain:
            raise GroupMismatch(f"{x} is not in the domain {self.domain}")
        return sum(e * c for e, c in zip(self.exponents, x.coords)) % self.modulus

    def _check(self, other: Character) -> None:
        if self.domain != other.domain or self.modulus != other.modulus:
            raise GroupMismatch("characters on different groups or moduli")

    def __add__(self, other: Character) -> Character:
        self._check(other)
        return Character(self.domain, self.modulus, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __neg__(self) -> Character:
        return Character(self.domain, self.modulus, tuple(-e for e in self.exponents))

    def __sub__(self, other: Character) -> Character:
        return self + (-other)

    def __mul__(self, k: int) -> Character:
        return Character(self.domain, self.modulus, tuple(k * e for e in self.exponents))

    __rmul__ = __mul__

    def is_trivial(self) -> bool:
        return not any(self.exponents)

    def __str__(self) -> str:
        return "χ[" + ",".join(str(e) for e in self.exponents) + f"]/{self.modulus}"

    def to_json(self) -> dict:
        return {"exponents": list(self.exponents), "modulus": self.modulus}


def dual_group(group: FinAbGroup, modulus: int) -> list[Character]:
    """Generators of Hom(A, Z/m), one per invariant factor.

    The i-th generator sends the i-th canonical generator to m/d_i.
    """
    if modulus % group.exponent:
        raise PreconditionError(f"modulus {modulus} is not divisible by exp(A) = {group.exponent}")
    gens = []
    for i, d in enumerate(group.factors):
        exponents = [0] * group.rank
        exponents[i] = modulus // d
        gens.append(Character(group, modulus, tuple(exponents)))
    return gens


@dataclass(frozen=True)
class CharacterGroup:
    """The full dual Hom(A, Z/m) as a finite group, isomorphic to A."""

    domain: FinAbGroup
    modulus: int

    def __post_init__(self):
        if self.modulus % self.domain.exponent:
            raise PreconditionError(f"modulus {self.modulus} is not divisible by exp(A) = {self.domain.exponent}")

    @property
    def order(self) -> int:
        return self.domain.order

    def from_coords(self, coords: Sequence[int]) -> Character:
        return Character(
            self.domain,
            self.modulus,
            tuple(k * (self.modulus // d) for k, d in zip(coords, self.domain.factors)),
        )

    def coords(self, chi: Character) -> tuple[int, ...]:
        return tuple(e // (self.modulus // d) for e, d in zip(chi.exponents, self.domain.factors))

    def elements(self) -> Iterator[Character]:
        for coords in itertools.product(*(range(d) for d in self.domain.factors)):
            yield self.from_coords(coords)

    def identity(self) -> Character:
        return Character.trivial(self.domain, self.modulus)

    def mul(self, x: Character, y: Character) -> Character:
        return x + y

    def inv(self, x: Character) -> Character:
        return -x

    def generators(self) -> list[Character]:
        return dual_group(self.domain, self.modulus)


def min_generators(group: FinAbGroup) -> int:
    """d(A), the size of a smallest generating set."""
    return group.rank


# Presentations -----------------------------------------------------------


@dataclass(frozen=True)
class _PrimaryLayout:
    """Explicit isomorphism ⊕ Z/o_i → invariant-factor form via primary parts.

    slots[j] lists (i, q) pairs: the q-primary part of Z/o_i lands in the
    j-th invariant factor.
    """

    orders: tuple[int, ...]
    group: FinAbGroup
    slots: tuple[tuple[tuple[int, int], ...], ...]

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> _PrimaryLayout:
        orders = tuple(abs(int(o)) for o in orders)
        if any(o == 0 for o in orders):
            raise InfiniteGroupError(f"cyclic orders {orders} include an infinite summand")
        by_prime: dict[int, list[tuple[int, int]]] = {}
        for i, o in enumerate(orders):
            for p, v in factorint(o).items():
                by_prime.setdefault(p, []).append((p**v, i))
        for parts in by_prime.values():
            parts.sort(key=lambda qi: (-qi[0], qi[1]))
        length = max((len(parts) for parts in by_prime.values()), default=0)
        factors, slots = [], []
        for j in range(length):
            slot = tuple((parts[j][1], parts[j][0]) for _, parts in sorted(by_prime.items()) if j < len(parts))
            slots.append(slot)
            factors.append(prod(q for _, q in slot))
        return cls(orders, FinAbGroup(tuple(factors)), tuple(slots))

    def to_invariant(self, values: Sequence[int]) -> tuple[int, ...]:
        out = []
        for slot in self.slots:
            if len(slot) == 1:
                i, q = slot[0]
                out.append(values[i] % q)
            else:
                moduli = [q for _, q in slot]
                residues = [values[i] % q for i, q in slot]
                out.append(int(crt(moduli, residues)[0]))
        return tuple(out)

    def from_invariant(self, coords: Sequence[int]) -> tuple[int, ...]:
        parts: dict[int, list[tuple[int, int]]] = {}
        for x, slot in zip(coords, self.slots):
            for i, q in slot:
                parts.setdefault(i, []).append((q, x % q))
        values = []
        for i in range(len(self.orders)):
            if i not in parts:
                values.append(0)
            elif len(parts[i]) == 1:
                values.append(parts[i][0][1])
            else:
                moduli = [q for q, _ in parts[i]]
                residues = [r for _, r in parts[i]]
                values.append(int(crt(moduli, residues)[0]))
        return tuple(values)


def _domain_matrix(matrix: Sequence[Sequence[int]]) -> tuple[DomainMatrix, int, int]:
    rows = [[int(x) for x in row] for row in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    if any(len(row) != ncols for row in rows):
        raise ValueError("relation matrix rows have different lengths")
    return DomainMatrix([[ZZ(x) for x in row] for row in rows], (nrows, ncols), ZZ), nrows, ncols


def smith_invariant_factors(matrix: Sequence[Sequence[int]], ncols: Optional[int] = None) -> FinAbGroup:
    """Invariant factors of coker(matrix), rows are relations.

    An empty matrix needs ncols to say how many generators it relates.
    Raises InfiniteGroupError when the cokernel is infinite.
    """
    if not matrix:
        if ncols:
            raise InfiniteGroupError(f"no relations on {ncols} generators")
        return FinAbGroup.trivial()
    dm, nrows, cols = _domain_matrix(matrix)
    if cols > nrows:
        raise InfiniteGroupError(f"{nrows} relations cannot make {cols} generators finite")
    diagonal = [int(d) for d in invariant_factors(dm)]
    if len(diagonal) < cols or any(d == 0 for d in diagonal):
        raise InfiniteGroupError(f"relation matrix has infinite cokernel (diagonal {diagonal})")
    return FinAbGroup.from_cyclic_orders(diagonal)


@dataclass(frozen=True)
class Presentation:
    """Z^n / rowspace(relations) with explicit coordinates.

    project sends an integer vector to its class in invariant-factor form,
    lift returns a representative vector for an element.
    """

    relations: tuple[tuple[int, ...], ...]
    ncols: int
    transform: tuple[tuple[int, ...], ...]
    inverse: tuple[tuple[int, ...], ...]
    diagonal: tuple[int, ...]
    layout: _PrimaryLayout

    @classmethod
    def from_relations(cls, relations: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Presentation:
        relations = tuple(tuple(int(x) for x in row) for row in relations)
        n = len(relations[0]) if relations else (ncols or 0)
        if not relations:
            if n:
                raise InfiniteGroupError(f"no relations on {n} generators")
            layout = _PrimaryLayout.from_orders(())
            return cls((), 0, (), (), (), layout)
        dm, nrows, n = _domain_matrix(relations)
        if n > nrows:
            raise InfiniteGroupError(f"{nrows} relations cannot make {n} generators finite")
        smf, s, t = smith_normal_decomp(dm)
        if smf != s * dm * t:
            raise RuntimeError("Smith normal form decomposition does not reproduce the matrix")
        smf_rows = smf.to_list()
        diagonal = tuple(abs(int(smf_rows[i][i])) for i in range(n))
        if any(d == 0 for d in diagonal):
            raise InfiniteGroupError(f"relation matrix has infinite cokernel (diagonal {diagonal})")
        t_rows = [[int(x) for x in row] for row in t.to_list()]
        t_inv = t.to_field().inv().to_list()
        inverse = []
        for row in t_inv:
            out = []
            for x in row:
                if x.denominator != 1:
                    raise RuntimeError("column transform of the Smith form is not unimodular")
                out.append(int(x.numerator))
            inverse.append(tuple(out))
        layout = _PrimaryLayout.from_orders(diagonal)
        return cls(relations, n, tuple(tuple(r) for r in t_rows), tuple(inverse), diagonal, layout)

    @property
    def group(self) -> FinAbGroup:
        return self.layout.group

    def project(self, vector: Sequence[int]) -> FinAbElem:
        if len(vector) != self.ncols:
            raise ValueError(f"expected a vector of length {self.ncols}, got {vector}")
        n = self.ncols
        y = [sum(int(vector[k]) * self.transform[k][j] for k in range(n)) for j in range(n)]
        return self.group.elem(self.layout.to_invariant(y))

    def lift(self, element: FinAbElem) -> tuple[int, ...]:
        if element.group != self.group:
            raise GroupMismatch(f"{element} is not in {self.group}")
        y = self.layout.from_invariant(element.coords)
        n = self.ncols
        return tuple(sum(y[k] * self.inverse[k][j] for k in range(n)) for j in range(n))


# Exhaustive subgroup utilities -------------------------------------------


def rank_bruteforce(table: TableGroup, bounds: Optional[Bounds] = None) -> int:
    """Largest minimal generating-set size over all subgroups.

    Subgroups are enumerated in layers: layer k holds the subgroups generated
    by k elements, built as joins of layer k-1 with single elements. A
    subgroup's generation number is the first layer it appears in.
    """
    bounds = bounds or current_bounds()
    bounds.require("subgroup_order", table.order, "rank_bruteforce")
    trivial = frozenset({table.identity()})
    depth = {trivial: 0}
    layer = {trivial: ()}
    # one representative per cyclic subgroup is enough to extend a layer
    cyclic_reps = {}
    for x in table.elements():
        cyclic_reps.setdefault(table.closure([x]), x)
    reps = sorted(cyclic_reps.values())
    k = 0
    while layer:
        k += 1
        nxt: dict[frozenset, tuple] = {}
        for subgroup, gens in layer.items():
            for x in reps:
                if x in subgroup:
                    continue
                joined = table.closure(gens + (x,))
                if joined not in depth:
                    depth[joined] = k
                    nxt[joined] = gens + (x,)
        layer = nxt
    rank = max(depth.values())
    log.debug("rank_bruteforce: %d subgroups of a group of order %d, rank %d", len(depth), table.order, rank)
    return rank
