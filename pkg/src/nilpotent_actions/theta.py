"""Finite theta groups Θ(δ) and the embedding of Heisenberg groups into them.

Scalars are exponents of a primitive m-th root of unity, so Θ(δ) is the
set of triples (s, b, χ) with s mod m, b ∈ K(δ) and χ: K(δ) → Z/m, and

    (s, b, χ)(s', b', χ') = (s + s' + χ'(b), b + b', χ + χ').
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from math import lcm, prod
from typing import Iterator, Optional, Sequence

from sympy import isprime

from nilpotent_actions.bounds import Bounds, current_bounds
from nilpotent_actions.checks import CheckResult, Report, failed, passed
from nilpotent_actions.errors import CoprimalityError, GroupMismatch, PreconditionError
from nilpotent_actions.finabel import CharacterGroup, Character, FinAbElem, FinAbGroup, FinAbHom
from nilpotent_actions.groups import (
    CentralByAbelianExt,
    GroupMorphism,
    ProductGroup,
    SesMorphismWitness,
    check_ses_morphism,
    is_injective,
)
from nilpotent_actions.heisenberg import (
    BilinearPairing,
    HeisenbergElem,
    HeisenbergGroup,
    degeneracy_witness,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdmissibleTuple:
    """d_t | … | d_1 with every entry at least 2.

    The empty tuple stands for the degree-one case and is reported through
    is_empty rather than rejected.
    """

    entries: tuple[int, ...] = ()
    char_exclusion: Optional[int] = None

    def __post_init__(self):
        entries = tuple(int(d) for d in self.entries)
        object.__setattr__(self, "entries", entries)
        for d in entries:
            if d < 2:
                raise PreconditionError(f"admissible entries must be at least 2, got {entries}")
        for big, small in zip(entries, entries[1:]):
            if big % small:
                raise PreconditionError(f"admissible entries must satisfy d_(i+1) | d_i, got {entries}")
        p = self.char_exclusion
        if p is not None:
            if not isprime(p):
                raise PreconditionError(f"char_exclusion must be prime, got {p}")
            if entries and entries[-1] % p == 0:
                raise CoprimalityError(f"characteristic {p} divides d_t = {entries[-1]}")

    @property
    def is_empty(self) -> bool:
        return not self.entries

    @property
    def group(self) -> FinAbGroup:
        """K(δ)."""
        return FinAbGroup(self.entries)

    def to_json(self) -> dict:
        data: dict = {"entries": list(self.entries)}
        if self.char_exclusion is not None:
            data["char_exclusion"] = self.char_exclusion
        if self.is_empty:
            data["empty"] = True
        return data


def mumford_degree(delta: AdmissibleTuple) -> tuple[int, int]:
    degree = prod(delta.entries)
    return degree, degree * degree


@dataclass(frozen=True)
class ThetaElem:
    scalar: int
    b: FinAbElem
    chi: Character

    def __str__(self) -> str:
        return f"({self.scalar},{self.b},{self.chi})"

    def to_json(self) -> list:
        return [self.scalar, self.b.to_json(), list(self.chi.exponents)]


def theta_mul(x: ThetaElem, y: ThetaElem) -> ThetaElem:
    if x.b.group != y.b.group or x.chi.modulus != y.chi.modulus:
        raise GroupMismatch("theta elements come from different theta groups")
    m = x.chi.modulus
    return ThetaElem((x.scalar + y.scalar + y.chi(x.b)) % m, x.b + y.b, x.chi + y.chi)


def theta_inv(x: ThetaElem) -> ThetaElem:
    m = x.chi.modulus
    return ThetaElem((x.chi(x.b) - x.scalar) % m, -x.b, -x.chi)


@dataclass(frozen=True)
class ThetaGroup:
    delta: AdmissibleTuple
    modulus: int

    def __post_init__(self):
        if self.modulus < 1 or self.modulus % self.K.exponent:
            raise PreconditionError(f"scalar modulus {self.modulus} is not divisible by exp(K(δ)) = {self.K.exponent}")

    @property
    def K(self) -> FinAbGroup:
        return self.delta.group

    @property
    def dual(self) -> CharacterGroup:
        return CharacterGroup(self.K, self.modulus)

    @property
    def scalars(self) -> FinAbGroup:
        return FinAbGroup.cyclic(self.modulus)

    @property
    def order(self) -> int:
        return self.modulus * self.K.order**2

    def elem(self, scalar: int, b: Sequence[int], chi: Sequence[int]) -> ThetaElem:
        """chi is given in dual coordinates, chi_i counting multiples of m/d_i."""
        return ThetaElem(scalar % self.modulus, self.K.elem(b), self.dual.from_coords(chi))

    def elements(self, bounds: Optional[Bounds] = None) -> Iterator[ThetaElem]:
        (bounds or current_bounds()).require("theta_order", self.order, "theta group enumeration")
        chars = list(self.dual.elements())
        for s, b, chi in itertools.product(range(self.modulus), list(self.K.elements()), chars):
            yield ThetaElem(s, b, chi)

    def identity(self) -> ThetaElem:
        return ThetaElem(0, self.K.zero(), self.dual.identity())

    def mul(self, x: ThetaElem, y: ThetaElem) -> ThetaElem:
        return theta_mul(x, y)

    def inv(self, x: ThetaElem) -> ThetaElem:
        return theta_inv(x)

    @cached_property
    def _generators(self) -> tuple[ThetaElem, ...]:
        e = self.identity()
        gens = [ThetaElem(1 % self.modulus, e.b, e.chi)]
        gens += [ThetaElem(0, g, e.chi) for g in self.K.generators()]
        gens += [ThetaElem(0, e.b, chi) for chi in self.dual.generators()]
        return tuple(gens)

    def generators(self) -> tuple[ThetaElem, ...]:
        return self._generators

    def iota(self, scalar: int | FinAbElem) -> ThetaElem:
        return iota_delta(self, scalar)

    def extension(self) -> CentralByAbelianExt:
        quotient = ProductGroup((self.K, self.dual))
        inject = GroupMorphism(self.scalars, self, self.iota, name="ι_δ")
        project = GroupMorphism(self, quotient, pi_delta, name="π_δ")
        return CentralByAbelianExt(self.scalars, self, quotient, inject, project, name="Θ(δ)")


def iota_delta(theta: ThetaGroup, scalar: int | FinAbElem) -> ThetaElem:
    if isinstance(scalar, FinAbElem):
        scalar = scalar.coords[0] if scalar.coords else 0
    e = theta.identity()
    return ThetaElem(scalar % theta.modulus, e.b, e.chi)


def pi_delta(x: ThetaElem) -> tuple[FinAbElem, Character]:
    return x.b, x.chi


# Parametrisation ---------------------------------------------------------


@dataclass(frozen=True)
class ParametrisationWitness:
    """γ(a, b, c) = (κ(c), λ1(b), λ2(a))^-1 together with its ingredients.

    lambda2 holds the characters λ2(a_i) on the canonical generators of A.
    """

    pairing: BilinearPairing
    delta: AdmissibleTuple
    theta: ThetaGroup
    kappa: FinAbHom
    lambda1: FinAbHom
    lambda2: tuple[Character, ...]

    def lambda2_of(self, a: FinAbElem) -> Character:
        out = Character.trivial(self.theta.K, self.theta.modulus)
        for k, chi in zip(a.coords, self.lambda2):
            out = out + chi * k
        return out

    def kappa_scalar(self, c: FinAbElem) -> int:
        image = self.kappa(c)
        return image.coords[0] if image.coords else 0

    def gamma(self, x: HeisenbergElem) -> ThetaElem:
        inner = ThetaElem(self.kappa_scalar(x.c), self.lambda1(x.b), self.lambda2_of(x.a))
        return theta_inv(inner)

    def kappa_mu(self, c: FinAbElem) -> FinAbElem:
        return -self.kappa(c)

    def lambda_mu(self, ab: tuple[FinAbElem, FinAbElem]) -> tuple[FinAbElem, Character]:
        a, b = ab
        return -self.lambda1(b), -self.lambda2_of(a)

    def gamma_images(self) -> list[ThetaElem]:
        return [self.gamma(x) for x in HeisenbergGroup(self.pairing).generators()]

    def as_ses_witness(self) -> SesMorphismWitness:
        source = HeisenbergGroup(self.pairing).extension()
        target = self.theta.extension()
        return SesMorphismWitness(
            source,
            target,
            GroupMorphism(source.kernel, target.kernel, self.kappa_mu, name="κ_μ"),
            GroupMorphism(source.total, target.total, self.gamma, name="γ_μ"),
            GroupMorphism(source.quotient, target.quotient, self.lambda_mu, name="λ_μ"),
            name="H(μ) → Θ(δ)",
        )

    def to_json(self) -> dict:
        return {
            "delta": self.delta.to_json(),
            "modulus": self.theta.modulus,
            "kappa": [image.to_json() for image in self.kappa.images],
            "lambda1": [image.to_json() for image in self.lambda1.images],
            "lambda2": [list(chi.exponents) for chi in self.lambda2],
            "gamma_images": [g.to_json() for g in self.gamma_images()],
        }


def _inverse_images(f: FinAbHom) -> dict[FinAbElem, FinAbElem]:
    table = {}
    for x in f.domain.elements():
        table.setdefault(f(x), x)
    return table


def parametrise(
    mu: BilinearPairing,
    lambda1: Optional[FinAbHom] = None,
    char_exclusion: Optional[int] = None,
) -> ParametrisationWitness:
    """Embed H(μ) into Θ(δ(μ)) for non-degenerate μ on A × A with cyclic C.

    δ(μ) is the invariant-factor tuple of A, the scalars live in Z/m with
    m = lcm(|C|, exp A), and κ sends the generator of C to m/|C|.
    """
    if mu.A != mu.B:
        raise PreconditionError(f"parametrise needs A = B, got {mu.A} and {mu.B}")
    if not mu.C.is_cyclic():
        raise PreconditionError(f"parametrise needs cyclic C, got {mu.C}")
    witness = degeneracy_witness(mu)
    if witness:
        raise PreconditionError(f"pairing is degenerate: {witness[1]} lies in the {witness[0]} kernel")

    A = mu.A
    delta = AdmissibleTuple(A.factors, char_exclusion)
    m = lcm(mu.C.order, A.exponent)
    theta = ThetaGroup(delta, m)
    K = theta.K
    Zm = theta.scalars
    kappa = FinAbHom(mu.C, Zm, tuple(Zm.elem([m // mu.C.order]) for _ in mu.C.factors))

    if lambda1 is None:
        lambda1 = FinAbHom(A, K, tuple(K.generators()))
    if lambda1.domain != A or lambda1.codomain != K or not lambda1.is_isomorphism():
        raise PreconditionError("λ1 must be an isomorphism A → K(δ)")
    preimage = _inverse_images(lambda1)

    lambda2 = []
    for a in A.generators():
        exponents = []
        for g in K.generators():
            image = kappa(mu(a, preimage[g]))
            exponents.append(image.coords[0] if image.coords else 0)
        lambda2.append(Character(K, m, tuple(exponents)))
    w = ParametrisationWitness(mu, delta, theta, kappa, lambda1, tuple(lambda2))

    images = {w.lambda2_of(a) for a in A.elements()}
    if len(images) != A.order:
        raise RuntimeError("λ2 is not injective although μ is non-degenerate")
    log.debug("parametrise: δ = %s, m = %d", delta.entries, m)
    return w


def _compatibility(w: ParametrisationWitness) -> CheckResult:
    mu = w.pairing
    for a in mu.A.generators():
        for b in mu.B.generators():
            lhs = w.lambda2_of(a)(w.lambda1(b))
            rhs = w.kappa_scalar(mu(a, b))
            if lhs != rhs:
                return failed("λ2(a)(λ1 b) = κ μ(a, b)", witness=[a, b, lhs, rhs])
    return passed("λ2(a)(λ1 b) = κ μ(a, b)")


def verify_parametrisation(
    w: ParametrisationWitness, mu: BilinearPairing, bounds: Optional[Bounds] = None
) -> Report:
    """γ is an injective homomorphism and both squares into Θ(δ) commute."""
    bounds = bounds or current_bounds()
    if w.pairing != mu:
        raise GroupMismatch("witness was built for a different pairing")
    report = Report()
    report.add(_compatibility(w))
    ses = w.as_ses_witness()
    report.extend(check_ses_morphism(ses, bounds))
    report.add(is_injective(ses.total_map))
    return report
