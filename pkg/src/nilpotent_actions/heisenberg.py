"""Heisenberg groups H(μ) of bilinear pairings μ: A × B → C.

Elements are triples (a, b, c) with

    (a, b, c)(a', b', c') = (a + a', b + b', c + μ(a, b') + c')
    (a, b, c)^-1          = (-a, -b, μ(a, b) - c)

so C sits centrally and A × B is the abelian quotient.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Any, Iterator, Optional, Sequence, Union

from nilpotent_actions.bounds import Bounds, current_bounds
from nilpotent_actions.checks import CheckResult, Report, failed, passed
from nilpotent_actions.errors import GroupMismatch, PreconditionError
from nilpotent_actions.finabel import FinAbElem, FinAbGroup, FinAbHom
from nilpotent_actions.groups import (
    CentralByAbelianExt,
    GroupMorphism,
    ProductGroup,
    SesMorphismWitness,
    commutes_with_generators,
    image_of,
    is_homomorphism,
    is_injective,
)

log = logging.getLogger(__name__)

MatrixEntry = Union[int, Sequence[int]]


@dataclass(frozen=True)
class BilinearPairing:
    """μ given by its values on canonical generators.

    matrix[i][j] holds the C-coordinates of μ(a_i, b_j). A bare int is
    accepted when C is cyclic.
    """

    A: FinAbGroup
    B: FinAbGroup
    C: FinAbGroup
    matrix: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        rows = tuple(self.matrix)
        if len(rows) != self.A.rank:
            raise PreconditionError(f"pairing matrix needs {self.A.rank} rows, got {len(rows)}")
        normalized = []
        for i, row in enumerate(rows):
            row = tuple(row)
            if len(row) != self.B.rank:
                raise PreconditionError(f"pairing matrix row {i} needs {self.B.rank} entries, got {len(row)}")
            normalized.append(tuple(self._entry(i, j, v) for j, v in enumerate(row)))
        object.__setattr__(self, "matrix", tuple(normalized))

    def _entry(self, i: int, j: int, value: MatrixEntry) -> tuple[int, ...]:
        if isinstance(value, int):
            if self.C.rank > 1:
                raise PreconditionError(f"entry ({i},{j}) is an int but C = {self.C} is not cyclic")
            coords = (value,) if self.C.rank == 1 else ()
        else:
            coords = tuple(int(x) for x in value)
        element = self.C.elem(coords)
        k = gcd(self.A.factors[i], self.B.factors[j])
        if not (element * k).is_zero():
            raise PreconditionError(
                f"μ(a_{i}, b_{j}) = {element} has order not dividing gcd({self.A.factors[i]}, {self.B.factors[j]})"
            )
        return element.coords

    @classmethod
    def zero(cls, A: FinAbGroup, B: FinAbGroup, C: FinAbGroup) -> BilinearPairing:
        zero = C.zero().coords
        return cls(A, B, C, tuple(tuple(zero for _ in B.factors) for _ in A.factors))

    def __call__(self, a: FinAbElem, b: FinAbElem) -> FinAbElem:
        if a.group != self.A or b.group != self.B:
            raise GroupMismatch(f"μ expects elements of {self.A} and {self.B}")
        out = [0] * self.C.rank
        for i, x in enumerate(a.coords):
            if not x:
                continue
            for j, y in enumerate(b.coords):
                if not y:
                    continue
                for k, v in enumerate(self.matrix[i][j]):
                    out[k] += x * y * v
        return self.C.elem(out)

    def generator_value(self, i: int, j: int) -> FinAbElem:
        return FinAbElem(self.C, self.matrix[i][j])

    def image_subgroup(self) -> frozenset[FinAbElem]:
        """The subgroup of C generated by μ(A, B)."""
        span = {self.C.zero()}
        for i in range(self.A.rank):
            for j in range(self.B.rank):
                g = self.generator_value(i, j)
                frontier = list(span)
                while frontier:
                    nxt = []
                    for x in frontier:
                        y = x + g
                        if y not in span:
                            span.add(y)
                            nxt.append(y)
                    frontier = nxt
        return frozenset(span)

    def is_symmetric_shape(self) -> bool:
        return self.A == self.B

    def to_json(self) -> dict:
        return {
            "A": self.A.to_json(),
            "B": self.B.to_json(),
            "C": self.C.to_json(),
            "matrix": [[list(v) for v in row] for row in self.matrix],
        }


def extraspecial(p: int, n: int = 1) -> BilinearPairing:
    """The dot product on (Z/p)^n into Z/p, whose H(μ) is extraspecial of order p^(2n+1)."""
    if p < 2 or n < 1:
        raise PreconditionError(f"extraspecial needs p ≥ 2 and n ≥ 1, got p={p}, n={n}")
    A = FinAbGroup((p,) * n)
    C = FinAbGroup((p,))
    matrix = tuple(tuple((1 if i == j else 0,) for j in range(n)) for i in range(n))
    return BilinearPairing(A, A, C, matrix)


@dataclass(frozen=True)
class HeisenbergElem:
    pairing: BilinearPairing = field(compare=False, repr=False)
    a: FinAbElem
    b: FinAbElem
    c: FinAbElem

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"

    def to_json(self) -> list:
        return [self.a.to_json(), self.b.to_json(), self.c.to_json()]


def _same_pairing(x: HeisenbergElem, y: HeisenbergElem) -> BilinearPairing:
    if x.pairing is not y.pairing and x.pairing != y.pairing:
        raise GroupMismatch("Heisenberg elements come from different pairings")
    return x.pairing


def hh_mul(x: HeisenbergElem, y: HeisenbergElem) -> HeisenbergElem:
    mu = _same_pairing(x, y)
    return HeisenbergElem(mu, x.a + y.a, x.b + y.b, x.c + mu(x.a, y.b) + y.c)


def hh_inv(x: HeisenbergElem) -> HeisenbergElem:
    mu = x.pairing
    return HeisenbergElem(mu, -x.a, -x.b, mu(x.a, x.b) - x.c)


@dataclass(frozen=True)
class HeisenbergGroup:
    pairing: BilinearPairing

    @property
    def order(self) -> int:
        mu = self.pairing
        return mu.A.order * mu.B.order * mu.C.order

    def elem(self, a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> HeisenbergElem:
        mu = self.pairing
        return HeisenbergElem(mu, mu.A.elem(a), mu.B.elem(b), mu.C.elem(c))

    def elements(self) -> Iterator[HeisenbergElem]:
        mu = self.pairing
        for a, b, c in itertools.product(list(mu.A.elements()), list(mu.B.elements()), list(mu.C.elements())):
            yield HeisenbergElem(mu, a, b, c)

    def identity(self) -> HeisenbergElem:
        mu = self.pairing
        return HeisenbergElem(mu, mu.A.zero(), mu.B.zero(), mu.C.zero())

    def mul(self, x: HeisenbergElem, y: HeisenbergElem) -> HeisenbergElem:
        return hh_mul(x, y)

    def inv(self, x: HeisenbergElem) -> HeisenbergElem:
        return hh_inv(x)

    def central(self, c: FinAbElem) -> HeisenbergElem:
        mu = self.pairing
        return HeisenbergElem(mu, mu.A.zero(), mu.B.zero(), c)

    @cached_property
    def _generators(self) -> tuple[HeisenbergElem, ...]:
        mu = self.pairing
        e = self.identity()
        gens = [HeisenbergElem(mu, g, e.b, e.c) for g in mu.A.generators()]
        gens += [HeisenbergElem(mu, e.a, g, e.c) for g in mu.B.generators()]
        gens += [HeisenbergElem(mu, e.a, e.b, g) for g in mu.C.generators()]
        return tuple(gens)

    def generators(self) -> tuple[HeisenbergElem, ...]:
        return self._generators

    def extension(self) -> CentralByAbelianExt:
        """The sequence C → H(μ) → A × B."""
        mu = self.pairing
        quotient = ProductGroup((mu.A, mu.B))
        inject = GroupMorphism(mu.C, self, self.central, name="ι̅")
        project = GroupMorphism(self, quotient, lambda x: (x.a, x.b), name="π̅")
        return CentralByAbelianExt(mu.C, self, quotient, inject, project, name="H(μ)")

    def __str__(self) -> str:
        mu = self.pairing
        return f"H({mu.A} × {mu.B} → {mu.C})"


def center_of(mu: BilinearPairing, bounds: Optional[Bounds] = None) -> frozenset[HeisenbergElem]:
    bounds = bounds or current_bounds()
    group = HeisenbergGroup(mu)
    bounds.require("multiplications", 2 * group.order * len(group.generators()), "center_of")
    return frozenset(x for x in group.elements() if commutes_with_generators(group, x))


def _left_kernel(mu: BilinearPairing) -> list[FinAbElem]:
    gens = mu.B.generators()
    return [a for a in mu.A.elements() if all(mu(a, b).is_zero() for b in gens)]


def _right_kernel(mu: BilinearPairing) -> list[FinAbElem]:
    gens = mu.A.generators()
    return [b for b in mu.B.elements() if all(mu(a, b).is_zero() for a in gens)]


def is_nondegenerate(mu: BilinearPairing) -> bool:
    return len(_left_kernel(mu)) == 1 and len(_right_kernel(mu)) == 1


def degeneracy_witness(mu: BilinearPairing) -> Optional[tuple[str, FinAbElem]]:
    """A nonzero element of the left or right kernel, if any."""
    for side, kernel in (("left", _left_kernel(mu)), ("right", _right_kernel(mu))):
        for x in kernel:
            if not x.is_zero():
                return side, x
    return None


@dataclass(frozen=True)
class HeisenbergMorphism:
    """γ: H(μ1) → H(μ2), (a, b, c) ↦ (λ_A a, λ_B b, κ c)."""

    source: BilinearPairing
    target: BilinearPairing
    lambda_a: FinAbHom
    lambda_b: FinAbHom
    kappa: FinAbHom

    def __call__(self, x: HeisenbergElem) -> HeisenbergElem:
        return HeisenbergElem(self.target, self.lambda_a(x.a), self.lambda_b(x.b), self.kappa(x.c))

    @property
    def morphism(self) -> GroupMorphism:
        return GroupMorphism(HeisenbergGroup(self.source), HeisenbergGroup(self.target), self, name="γ")

    def as_ses_witness(self) -> SesMorphismWitness:
        src = HeisenbergGroup(self.source).extension()
        dst = HeisenbergGroup(self.target).extension()
        quotient_map = GroupMorphism(
            src.quotient, dst.quotient, lambda ab: (self.lambda_a(ab[0]), self.lambda_b(ab[1])), name="λ×λ"
        )
        kernel_map = GroupMorphism(self.source.C, self.target.C, self.kappa, name="κ")
        return SesMorphismWitness(src, dst, kernel_map, self.morphism, quotient_map, name="H(λ,κ)")


def functorial_map(
    lambda_a: FinAbHom,
    lambda_b: FinAbHom,
    kappa: FinAbHom,
    mu1: BilinearPairing,
    mu2: BilinearPairing,
    bounds: Optional[Bounds] = None,
) -> HeisenbergMorphism:
    """The morphism H(μ1) → H(μ2) induced by a commuting square κ∘μ1 = μ2∘(λ×λ).

    The square is checked on generator pairs, which suffices by bilinearity.
    When H(μ1) is small enough the homomorphism property is also scanned.
    """
    bounds = bounds or current_bounds()
    if lambda_a.domain != mu1.A or lambda_a.codomain != mu2.A:
        raise GroupMismatch("λ_A does not map A1 to A2")
    if lambda_b.domain != mu1.B or lambda_b.codomain != mu2.B:
        raise GroupMismatch("λ_B does not map B1 to B2")
    if kappa.domain != mu1.C or kappa.codomain != mu2.C:
        raise GroupMismatch("κ does not map C1 to C2")
    for i, a in enumerate(mu1.A.generators()):
        for j, b in enumerate(mu1.B.generators()):
            lhs = kappa(mu1(a, b))
            rhs = mu2(lambda_a(a), lambda_b(b))
            if lhs != rhs:
                raise PreconditionError(f"square does not commute on (a_{i}, b_{j}): κμ1 = {lhs}, μ2(λ×λ) = {rhs}")
    gamma = HeisenbergMorphism(mu1, mu2, lambda_a, lambda_b, kappa)
    order = HeisenbergGroup(mu1).order
    if order * len(HeisenbergGroup(mu1).generators()) <= bounds.multiplications:
        check = is_homomorphism(gamma.morphism, bounds)
        if not check:
            raise RuntimeError(f"induced map is not a homomorphism: {check.witness}")
    log.debug("functorial_map: γ from a group of order %d verified", order)
    return gamma


def nilpotency_class_le2(group: Any, bounds: Optional[Bounds] = None) -> CheckResult:
    """Every commutator is central, i.e. [[g, h], k] = 1 for all g, h, k."""
    bounds = bounds or current_bounds()
    bounds.require("group_order", group.order, "nilpotency_class_le2")
    elements = list(group.elements())
    gens = list(group.generators())
    bounds.require("multiplications", len(elements) * len(gens) * 4, "nilpotency_class_le2")
    seen = set()
    for g in elements:
        g_inv = group.inv(g)
        for h in gens:
            # [g, st] = [g, t][g, s] once these are central, so generators h suffice
            comm = group.mul(group.mul(g_inv, group.inv(h)), group.mul(g, h))
            if comm in seen:
                continue
            seen.add(comm)
            for k in gens:
                if group.mul(comm, k) != group.mul(k, comm):
                    return failed("class ≤ 2", witness=[g, h, k])
    return passed("class ≤ 2")


def verify_extension(ext: CentralByAbelianExt, bounds: Optional[Bounds] = None) -> Report:
    """Exactness, centrality of the kernel and abelianness of the quotient."""
    bounds = bounds or current_bounds()
    bounds.require("group_order", ext.total.order, "verify_extension")
    report = Report()
    report.add(is_homomorphism(ext.inject, bounds))
    report.add(is_injective(ext.inject))
    report.add(is_homomorphism(ext.project, bounds))

    image = image_of(ext.project)
    missing = [q for q in ext.quotient.elements() if q not in image]
    report.add(failed("surjective", missing[:1]) if missing else passed("surjective"))

    injected = image_of(ext.inject)
    q_id = ext.quotient.identity()
    kernel = {x for x in ext.total.elements() if ext.project(x) == q_id}
    if injected != kernel:
        report.add(failed("exact", sorted(injected ^ kernel, key=str)[:1]))
    else:
        report.add(passed("exact"))

    noncentral = None
    for x in injected:
        for g in ext.total.generators():
            if ext.total.mul(x, g) != ext.total.mul(g, x):
                noncentral = [x, g]
                break
        if noncentral:
            break
    report.add(failed("central", noncentral) if noncentral else passed("central"))

    qgens = list(ext.quotient.generators())
    bad = next(
        ([x, y] for x in qgens for y in qgens if ext.quotient.mul(x, y) != ext.quotient.mul(y, x)),
        None,
    )
    report.add(failed("abelian quotient", bad) if bad else passed("abelian quotient"))
    return report
