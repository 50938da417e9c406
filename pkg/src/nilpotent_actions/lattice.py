"""Isotropic sublattice data and the cocycle actions they induce.

A data set D is a rational Hermitian form h = H/c on V = C^n, the lattice
L = L_Re ⊕ iL_Re with L_Re = Z^n, a full-rank sublattice Λ_Re ⊂ L_Re (rows
of lambda_basis), Λ = Λ_Re ⊕ iΛ_Re, and Γ = (1/g)Z.

h is linear in the first argument and conjugate-linear in the second.
Scalars exp(π z) are carried as exact exponents z ∈ Q(i) and compared
modulo 2iZ.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd, prod
from typing import Any, Iterator, Optional, Sequence

from sympy.polys.domains import QQ, QQ_I, ZZ
from sympy.polys.matrices import DomainMatrix

from nilpotent_actions.bounds import Bounds, current_bounds
from nilpotent_actions.checks import CheckResult, Report, failed, passed, rational_json
from nilpotent_actions.chern import EvenClass
from nilpotent_actions.errors import (
    PreconditionError,
    SearchFailure,
    VerificationFailed,
)
from nilpotent_actions.finabel import FinAbElem, FinAbGroup, FinAbHom, Presentation
from nilpotent_actions.groups import GroupMorphism, is_homomorphism, is_injective
from nilpotent_actions.heisenberg import (
    BilinearPairing,
    HeisenbergElem,
    HeisenbergGroup,
    HeisenbergMorphism,
    degeneracy_witness,
    functorial_map,
)

log = logging.getLogger(__name__)

Vector = tuple[Any, ...]


def gaussian(re: Any = 0, im: Any = 0):
    """A Gaussian rational from ints, QQ elements or "p/q" strings."""
    return QQ_I(_rational(re), _rational(im))


def _rational(value: Any):
    if isinstance(value, str):
        num, sep, den = value.strip().partition("/")
        return QQ(int(num), int(den)) if sep else QQ(int(num))
    if isinstance(value, int):
        return QQ(value)
    return QQ(value.numerator, value.denominator)


def _conj(z):
    return QQ_I(z.x, -z.y)


def _is_integer(q) -> bool:
    return q.denominator == 1


def _as_int(q) -> int:
    if q.denominator != 1:
        raise ValueError(f"{q} is not an integer")
    return int(q.numerator)


def real_vector(coords: Sequence[Any]) -> Vector:
    return tuple(gaussian(x, 0) for x in coords)


def imaginary_vector(coords: Sequence[Any]) -> Vector:
    return tuple(gaussian(0, y) for y in coords)


def lattice_vector(x: Sequence[int], y: Sequence[int]) -> Vector:
    """l = x + i·y with x, y ∈ Z^n."""
    return tuple(gaussian(a, b) for a, b in zip(x, y))


def vec_add(v: Vector, w: Vector) -> Vector:
    return tuple(a + b for a, b in zip(v, w))


def vec_neg(v: Vector) -> Vector:
    return tuple(-a for a in v)


def re_part(v: Vector) -> Vector:
    return tuple(QQ_I(z.x, 0) for z in v)


def im_part(v: Vector) -> Vector:
    """The component of v in iV_Re, still as a vector of V."""
    return tuple(QQ_I(0, z.y) for z in v)


@dataclass(frozen=True)
class ExponentValue:
    """The scalar exp(π·value), determined by value modulo 2iZ."""

    value: Any
    modular: bool = True

    @classmethod
    def zero(cls) -> ExponentValue:
        return cls(QQ_I(0, 0))

    def __add__(self, other: ExponentValue) -> ExponentValue:
        return ExponentValue(self.value + other.value)

    def __neg__(self) -> ExponentValue:
        return ExponentValue(-self.value)

    def __sub__(self, other: ExponentValue) -> ExponentValue:
        return ExponentValue(self.value - other.value)

    def is_trivial(self) -> bool:
        z = self.value
        return not z.x and _is_integer(z.y) and int(z.y.numerator) % 2 == 0

    def same_scalar(self, other: ExponentValue) -> bool:
        return (self - other).is_trivial()

    def __str__(self) -> str:
        return f"exp(π({rational_json(self.value.x)} + {rational_json(self.value.y)}i))"

    def to_json(self) -> dict:
        return {"re": rational_json(self.value.x), "im": rational_json(self.value.y)}


@dataclass(frozen=True)
class IsotropicSublatticeData:
    n: int
    H: tuple[tuple[Any, ...], ...]
    c: int
    lambda_basis: tuple[tuple[int, ...], ...]
    gamma_denominator: int

    def __post_init__(self):
        H = tuple(tuple(z if isinstance(z, QQ_I.dtype) else gaussian(*z) for z in row) for row in self.H)
        lam = tuple(tuple(int(x) for x in row) for row in self.lambda_basis)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "lambda_basis", lam)
        if self.n < 0 or self.c < 1 or self.gamma_denominator < 1:
            raise PreconditionError("n must be ≥ 0 and c, gamma_denominator ≥ 1")
        if len(H) != self.n or any(len(row) != self.n for row in H):
            raise PreconditionError(f"H must be {self.n}×{self.n}")
        if len(lam) != self.n or any(len(row) != self.n for row in lam):
            raise PreconditionError(f"lambda must be {self.n}×{self.n}")

    @classmethod
    def zero(cls, gamma_denominator: int = 1) -> IsotropicSublatticeData:
        return cls(0, (), 1, (), gamma_denominator)

    def h(self, v: Vector, w: Vector):
        total = QQ_I(0, 0)
        for j, vj in enumerate(v):
            if not vj:
                continue
            for k, wk in enumerate(w):
                if wk:
                    total += vj * _conj(wk) * self.H[j][k]
        scale = QQ(1, self.c)
        return QQ_I(total.x * scale, total.y * scale)

    def im_h(self, v: Vector, w: Vector):
        return self.h(v, w).y

    def real_basis(self) -> list[Vector]:
        return [real_vector([1 if i == j else 0 for i in range(self.n)]) for j in range(self.n)]

    def lambda_vectors(self) -> list[Vector]:
        return [real_vector(row) for row in self.lambda_basis]

    def is_zero_form(self) -> bool:
        return not any(z for row in self.H for z in row)

    @cached_property
    def presentation(self) -> Presentation:
        """L_Re/Λ_Re, which is also L_Im/Λ_Im through multiplication by i."""
        return Presentation.from_relations(self.lambda_basis, ncols=self.n)

    @property
    def gamma_group(self) -> FinAbGroup:
        """Γ/Z ≅ Z/g, the class of k/g having coordinate k."""
        return FinAbGroup.cyclic(self.gamma_denominator)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "c": self.c,
            "H": [[[rational_json(z.x), rational_json(z.y)] for z in row] for row in self.H],
            "lambda": [list(row) for row in self.lambda_basis],
            "gamma_denominator": self.gamma_denominator,
        }

    def digest(self) -> str:
        encoded = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(encoded.encode()).hexdigest()

    def first_chern_class(self) -> EvenClass:
        """Im h on Λ in the real basis (λ_1..λ_n, iλ_1..iλ_n).

        Only the pairs (λ_j, iλ_k) contribute, since the real structure is
        isotropic.
        """
        lam = self.lambda_vectors()
        n = self.n
        terms = {}
        for j, lj in enumerate(lam):
            for k, lk in enumerate(lam):
                value = self.im_h(lj, tuple(QQ_I(0, z.x) for z in lk))
                if value:
                    terms[(j + 1, n + k + 1)] = value
        return EvenClass.from_terms(2 * n, terms)


# Validation and the quotient pairing -------------------------------------


def validate_data(D: IsotropicSublatticeData) -> Report:
    report = Report()
    n = D.n

    asym = [
        (j, k) for j in range(n) for k in range(n) if D.H[j][k] != _conj(D.H[k][j])
    ]
    report.add(failed("conjugate symmetric", asym) if asym else passed("conjugate symmetric"))

    basis = D.real_basis()
    nonreal = [(j, k) for j in range(n) for k in range(n) if D.im_h(basis[j], basis[k])]
    report.add(failed("isotropic", nonreal) if nonreal else passed("isotropic"))

    pairings = []
    bad = []
    for j, e in enumerate(basis):
        for k, lam in enumerate(D.lambda_vectors()):
            value = D.im_h(e, tuple(QQ_I(0, z.x) for z in lam))
            if not _is_integer(value):
                bad.append([j, k, rational_json(value)])
            else:
                pairings.append(_as_int(value))
    if bad:
        report.add(failed("lattice pairing", bad, "Im h(L_Re, iΛ_Re) is not integral"))
    elif not D.is_zero_form() and reduce(gcd, pairings, 0) != 1:
        report.add(failed("lattice pairing", pairings, f"gcd is {reduce(gcd, pairings, 0)}, expected 1"))
    else:
        report.add(passed("lattice pairing"))

    g = D.gamma_denominator
    outside = []
    for j, e in enumerate(basis):
        for k, f in enumerate(basis):
            value = D.im_h(e, tuple(QQ_I(0, z.x) for z in f))
            if not _is_integer(value * g):
                outside.append([j, k, rational_json(value)])
    report.add(failed("gamma", outside, f"values outside (1/{g})Z") if outside else passed("gamma"))

    if n:
        det = DomainMatrix([[ZZ(x) for x in row] for row in D.lambda_basis], (n, n), ZZ).det()
        report.add(passed("full rank") if det else failed("full rank", detail="Λ_Re has determinant 0"))
    else:
        report.add(passed("full rank"))
    return report


def _gamma_coord(D: IsotropicSublatticeData, value) -> int:
    scaled = value * D.gamma_denominator
    if not _is_integer(scaled):
        raise VerificationFailed(f"value {rational_json(value)} is not in (1/{D.gamma_denominator})Z")
    return _as_int(scaled) % D.gamma_denominator


def _mu_value(D: IsotropicSublatticeData, x: Sequence[int], y: Sequence[int]) -> int:
    return _gamma_coord(D, D.im_h(real_vector(x), imaginary_vector(y)))


def mu_from_data(D: IsotropicSublatticeData) -> BilinearPairing:
    """μ_D(l_Re + Λ_Re, l_Im + Λ_Im) = Im h(l_Re, l_Im) + Z, into Γ/Z ≅ Z/g."""
    report = validate_data(D)
    if not report.ok:
        raise PreconditionError(f"invalid sublattice data: {[c.name for c in report.failures()]}")
    P = D.presentation
    A = P.group
    C = D.gamma_group
    gens = [P.lift(a) for a in A.generators()]
    matrix = tuple(tuple(C.elem([_mu_value(D, x, y)] if C.rank else []).coords for y in gens) for x in gens)
    return BilinearPairing(A, A, C, matrix)


def check_mu_well_defined(D: IsotropicSublatticeData) -> CheckResult:
    """μ_D does not depend on representatives: every fundamental-domain pair
    shifted by a Λ generator on either side gives the same class."""
    P = D.presentation
    reps = [P.lift(a) for a in P.group.elements()]
    shifts = [list(row) for row in D.lambda_basis]
    for x in reps:
        for y in reps:
            base = _mu_value(D, x, y)
            for lam in shifts:
                moved_x = [a + b for a, b in zip(x, lam)]
                moved_y = [a + b for a, b in zip(y, lam)]
                for mx, my in ((moved_x, y), (x, moved_y)):
                    if _mu_value(D, mx, my) != base:
                        return failed("μ_D well defined", witness=[list(x), list(y), lam])
    return passed("μ_D well defined")


# Hermitian forms from Heisenberg groups ----------------------------------


@dataclass(frozen=True)
class HermitianSolution:
    """h_M, φ and α with μ(a, ψ a') = φ(Im h_M(a, i a')).

    form holds S = h_M on the canonical generators of the real part, a
    symmetric matrix over Z/c. φ: Z/c ↪ C sends 1 to (|C|/c)·unit.
    """

    A: FinAbGroup
    C: FinAbGroup
    c: int
    unit: int
    psi: FinAbHom
    form: tuple[tuple[int, ...], ...]
    alpha: FinAbElem
    normalization: int

    def h_m(self, a: FinAbElem, b: FinAbElem) -> int:
        return _form_value(self.form, self.c, a, b)

    def phi(self, t: int) -> FinAbElem:
        return self.C.elem([t * self.unit * (self.C.order // self.c)])

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "unit": self.unit,
            "psi": [image.to_json() for image in self.psi.images],
            "form": [list(row) for row in self.form],
            "alpha": self.alpha.to_json(),
            "normalization": self.normalization,
        }


def _form_value(form, c: int, a: FinAbElem, b: FinAbElem) -> int:
    total = 0
    for i, x in enumerate(a.coords):
        if x:
            for j, y in enumerate(b.coords):
                total += x * y * form[i][j]
    return total % c


def _automorphism_candidates(A: FinAbGroup) -> Iterator[tuple[FinAbElem, ...]]:
    """Identity first, then generator images in lexicographic order."""
    identity = tuple(A.generators())
    yield identity
    options = [[x for x in A.elements() if (x * d).is_zero()] for d in A.factors]
    for images in itertools.product(*options):
        if images != identity:
            yield images


def _check_hermitian_input(mu: BilinearPairing) -> None:
    if mu.A != mu.B:
        raise PreconditionError(f"need A = B, got {mu.A} and {mu.B}")
    if not mu.C.is_cyclic():
        raise PreconditionError(f"need cyclic C, got {mu.C}")
    witness = degeneracy_witness(mu)
    if witness:
        raise PreconditionError(f"pairing is degenerate: {witness[1]} lies in the {witness[0]} kernel")


def hermitian_search(mu: BilinearPairing, bounds: Optional[Bounds] = None) -> HermitianSolution:
    """Search ψ ∈ Aut(A) and a unit u so that S(a, a') = -φ⁻¹(μ(a, ψ a'))
    is symmetric and some α of order c = exp(A) has S(α, α) ≡ ±1.

    normalization records which sign held: -1 is the Im h_M(α, iα) = 1 case.
    """
    bounds = bounds or current_bounds()
    _check_hermitian_input(mu)
    A = mu.A
    if A.is_trivial():
        raise PreconditionError("hermitian_search needs a nontrivial A")
    bounds.require("hermitian_order", A.order, "hermitian_search")
    c = A.exponent
    step = mu.C.order // c
    units = [u for u in range(1, c) if gcd(u, c) == 1] or [1]
    gens = A.generators()
    log.debug("hermitian_search: |A| = %d, c = %d", A.order, c)

    for images in _automorphism_candidates(A):
        raw = []
        for a in gens:
            row = []
            for image in images:
                value = mu(a, image).coords[0]
                if value % step:
                    raise RuntimeError(f"μ value {value} outside the order-{c} subgroup of C")
                row.append(value // step)
            raw.append(row)
        if any((raw[i][j] - raw[j][i]) % c for i in range(len(gens)) for j in range(len(gens))):
            continue
        psi = FinAbHom(A, A, images)
        if not psi.is_isomorphism():
            continue
        for u in units:
            u_inv = pow(u, -1, c) if c > 1 else 0
            form = tuple(tuple((-u_inv * v) % c for v in row) for row in raw)
            for alpha in A.elements():
                if alpha.order() != c:
                    continue
                value = _form_value(form, c, alpha, alpha)
                if value in {(-1) % c, 1 % c}:
                    sign = -1 if value == (-1) % c else 1
                    log.debug("hermitian_search: ψ = %s, u = %d, α = %s", [str(x) for x in images], u, alpha)
                    return HermitianSolution(A, mu.C, c, u, psi, form, alpha, sign)
    raise SearchFailure(f"no Hermitian realisation found for pairing on {A}")


def _span(gens: Sequence[FinAbElem], group: FinAbGroup) -> set[FinAbElem]:
    span = {group.zero()}
    for g in gens:
        span = {x + g * k for x in span for k in range(g.order())}
    return span


def _extend_basis(A: FinAbGroup, alpha: FinAbElem) -> list[FinAbElem]:
    """α = g_1, g_2, … with order(g_j) = d_j and A = ⊕⟨g_j⟩."""
    d = A.factors
    candidates = list(A.elements())

    def extend(chosen: list[FinAbElem]) -> Optional[list[FinAbElem]]:
        j = len(chosen)
        if j == len(d):
            return chosen
        target = prod(d[: j + 1])
        for x in candidates:
            if x.order() == d[j] and len(_span(chosen + [x], A)) == target:
                found = extend(chosen + [x])
                if found:
                    return found
        return None

    basis = extend([alpha])
    if basis is None:
        raise SearchFailure(f"{alpha} does not extend to an invariant-factor basis of {A}")
    return basis


@dataclass(frozen=True)
class HermitianRealisation:
    """Data D with μ ≅ μ_D through λ_D^A, λ_D^B and κ_D."""

    pairing: BilinearPairing
    data: IsotropicSublatticeData
    solution: Optional[HermitianSolution]
    morphism: HeisenbergMorphism
    negated: bool = False

    @property
    def mu_d(self) -> BilinearPairing:
        return self.morphism.target

    def to_json(self) -> dict:
        return {
            "data": self.data.to_json(),
            "digest": self.data.digest(),
            "solution": self.solution.to_json() if self.solution else None,
            "negated": self.negated,
            "kappa": [image.to_json() for image in self.morphism.kappa.images],
            "lambda_A": [image.to_json() for image in self.morphism.lambda_a.images],
            "lambda_B": [image.to_json() for image in self.morphism.lambda_b.images],
        }


def data_from_heisenberg(mu: BilinearPairing, bounds: Optional[Bounds] = None) -> HermitianRealisation:
    """Isotropic sublattice data realising a non-degenerate μ on A × A with cyclic C.

    S(α, α) is normalised to +1 by negating S and φ together, so that the
    lifted matrix pairs Λ with L to all of Z.
    """
    bounds = bounds or current_bounds()
    _check_hermitian_input(mu)
    A = mu.A
    g = mu.C.order
    if A.is_trivial():
        data = IsotropicSublatticeData.zero(g)
        mu_d = mu_from_data(data)
        kappa = FinAbHom(mu.C, mu_d.C, tuple(mu_d.C.generators()))
        empty = FinAbHom(A, mu_d.A, ())
        morphism = functorial_map(empty, empty, kappa, mu, mu_d, bounds)
        return HermitianRealisation(mu, data, None, morphism)

    sol = hermitian_search(mu, bounds)
    c = sol.c
    form, unit, negated = sol.form, sol.unit, False
    if _form_value(form, c, sol.alpha, sol.alpha) != 1 % c:
        form = tuple(tuple((-v) % c for v in row) for row in form)
        unit, negated = (-unit) % c, True

    basis = _extend_basis(A, sol.alpha)
    coords = {}
    for x in itertools.product(*(range(d) for d in A.factors)):
        element = A.zero()
        for k, b in zip(x, basis):
            element = element + b * k
        coords[element] = x

    n = A.rank
    H = tuple(tuple(gaussian(_form_value(form, c, gj, gk), 0) for gk in basis) for gj in basis)
    lam = tuple(tuple(d if i == j else 0 for j in range(n)) for i, d in enumerate(A.factors))
    data = IsotropicSublatticeData(n, H, c, lam, g)
    report = validate_data(data)
    if not report.ok:
        raise VerificationFailed(f"constructed data fails validation: {[x.name for x in report.failures()]}")

    mu_d = mu_from_data(data)
    P = data.presentation
    psi_inv = {}
    for x in A.elements():
        psi_inv[sol.psi(x)] = x
    lambda_a = FinAbHom(A, mu_d.A, tuple(P.project(coords[a]) for a in A.generators()))
    lambda_b = FinAbHom(A, mu_d.B, tuple(P.project(coords[psi_inv[b]]) for b in A.generators()))

    w0 = pow(unit, -1, c) if c > 1 else 1
    w = next(w0 + k * c for k in range(g + 1) if gcd(w0 + k * c, g) == 1)
    kappa = FinAbHom(mu.C, mu_d.C, tuple(mu_d.C.elem([w]) for _ in mu.C.factors))
    morphism = functorial_map(lambda_a, lambda_b, kappa, mu, mu_d, bounds)
    log.debug("data_from_heisenberg: n = %d, c = %d, g = %d, negated = %s", n, c, g, negated)
    return HermitianRealisation(mu, data, sol, morphism, negated)


# Cocycle exponents -------------------------------------------------------


def chi(D: IsotropicSublatticeData, l: Vector) -> ExponentValue:
    """χ_D(l) = exp(πi Im h(l_Re, l_Im))."""
    return ExponentValue(QQ_I(0, D.im_h(re_part(l), im_part(l))))


def f_exponent(D: IsotropicSublatticeData, l: Vector, v: Vector) -> ExponentValue:
    """f_D(l, v) = χ_D(l) exp(π h(v, l) + (π/2) h(l, l))."""
    hll = D.h(l, l)
    half = QQ_I(hll.x * QQ(1, 2), hll.y * QQ(1, 2))
    return chi(D, l) + ExponentValue(D.h(v, l) + half)


def _twist(D: IsotropicSublatticeData, l: Vector, l2: Vector):
    """Im h(l_Re, l'_Im)."""
    return D.im_h(re_part(l), im_part(l2))


def _two_i(q) -> ExponentValue:
    return ExponentValue(QQ_I(0, 2 * q))


@dataclass(frozen=True)
class TwistedTranslation:
    """(v, z) ↦ (v + shift, z + scalar + f_D(shift, v)), z an exponent."""

    shift: Vector
    scalar: Any = field(default_factory=lambda: QQ_I(0, 0))

    def multiplier(self, D: IsotropicSublatticeData, v: Vector) -> ExponentValue:
        return ExponentValue(self.scalar) + f_exponent(D, self.shift, v)

    def apply(self, D: IsotropicSublatticeData, v: Vector, z: ExponentValue) -> tuple[Vector, ExponentValue]:
        return vec_add(v, self.shift), z + self.multiplier(D, v)

    def to_json(self) -> dict:
        return {
            "shift": [[rational_json(z.x), rational_json(z.y)] for z in self.shift],
            "scalar": ExponentValue(self.scalar).to_json(),
        }


def rho(l: Vector) -> TwistedTranslation:
    return TwistedTranslation(tuple(l))


def sigma(n: int, value) -> TwistedTranslation:
    """σ_D(c): multiplication by exp(-2πi c) on fibres."""
    return TwistedTranslation(tuple(QQ_I(0, 0) for _ in range(n)), QQ_I(0, -2 * _rational(value)))


def twisted_compose(
    t1: TwistedTranslation, t2: TwistedTranslation, D: IsotropicSublatticeData
) -> tuple[TwistedTranslation, ExponentValue]:
    """t1 ∘ t2, with the correction exp(-2πi Im h(l_Re, l'_Im)) folded into the scalar."""
    correction = _two_i(-_twist(D, t1.shift, t2.shift))
    composite = TwistedTranslation(vec_add(t1.shift, t2.shift), t1.scalar + t2.scalar + correction.value)
    return composite, correction


def check_multiplier_law(
    D: IsotropicSublatticeData, t1: TwistedTranslation, t2: TwistedTranslation, v: Vector
) -> CheckResult:
    """f_{t1∘t2}(v) = f_{t1}(v + shift t2) · f_{t2}(v)."""
    composite, _ = twisted_compose(t1, t2, D)
    lhs = composite.multiplier(D, v)
    rhs = t1.multiplier(D, vec_add(v, t2.shift)) + t2.multiplier(D, v)
    if lhs.same_scalar(rhs):
        return passed("multiplier law")
    return failed("multiplier law", witness=lhs - rhs)


def check_cocycle_identities(D: IsotropicSublatticeData, l: Vector, l2: Vector, v: Vector) -> Report:
    report = Report()
    twist = _twist(D, l, l2)

    lhs = chi(D, vec_add(l, l2))
    rhs = chi(D, l) + chi(D, l2) + ExponentValue(QQ_I(0, D.im_h(l2, l))) + _two_i(twist)
    report.add(passed("chi") if lhs.same_scalar(rhs) else failed("chi", witness=lhs - rhs))

    lhs = f_exponent(D, vec_add(l, l2), v)
    rhs = f_exponent(D, l, vec_add(l2, v)) + f_exponent(D, l2, v) + _two_i(twist)
    report.add(passed("f") if lhs.same_scalar(rhs) else failed("f", witness=lhs - rhs))

    zero = ExponentValue.zero()
    direct = rho(vec_add(l, l2)).apply(D, v, zero)
    w, z = sigma(D.n, -twist).apply(D, v, zero)
    w, z = rho(l2).apply(D, w, z)
    w, z = rho(l).apply(D, w, z)
    ok = direct[0] == w and direct[1].same_scalar(z)
    report.add(passed("rho") if ok else failed("rho", witness=direct[1] - z))
    return report


# The quotient-level action group -----------------------------------------


@dataclass(frozen=True)
class ActionElem:
    """The class of ρ(q_a + i q_b) ∘ σ(k/g) with canonical lifts q."""

    a: FinAbElem
    b: FinAbElem
    c: FinAbElem

    def __str__(self) -> str:
        return f"E({self.a},{self.b},{self.c})"

    def to_json(self) -> list:
        return [self.a.to_json(), self.b.to_json(), self.c.to_json()]


@dataclass(frozen=True)
class ActionGroup:
    """Twisted translations by L modulo ρ(Λ) and σ(Z)."""

    data: IsotropicSublatticeData

    @property
    def quotient(self) -> FinAbGroup:
        return self.data.presentation.group

    @property
    def scalars(self) -> FinAbGroup:
        return self.data.gamma_group

    @property
    def order(self) -> int:
        return self.quotient.order**2 * self.scalars.order

    def _scalar_coord(self, e: FinAbElem) -> int:
        return e.coords[0] if e.coords else 0

    def lift(self, e: ActionElem) -> TwistedTranslation:
        D, P = self.data, self.data.presentation
        shift = lattice_vector(P.lift(e.a), P.lift(e.b))
        k = self._scalar_coord(e.c)
        return TwistedTranslation(shift, QQ_I(0, QQ(-2 * k, D.gamma_denominator)))

    def normalize(self, t: TwistedTranslation) -> ActionElem:
        D, P = self.data, self.data.presentation
        try:
            x = [_as_int(z.x) for z in t.shift]
            y = [_as_int(z.y) for z in t.shift]
        except ValueError as e:
            raise VerificationFailed(f"shift {t.to_json()} is not a lattice vector") from e
        a, b = P.project(x), P.project(y)
        qx, qy = P.lift(a), P.lift(b)
        lam_x = [u - v for u, v in zip(x, qx)]
        scalar = t.scalar + QQ_I(0, 2 * D.im_h(real_vector(lam_x), imaginary_vector(qy)))
        if scalar.x:
            raise VerificationFailed(f"scalar {ExponentValue(scalar)} is not unitary")
        value = -scalar.y * QQ(1, 2)
        return ActionElem(a, b, self.scalars.elem([_gamma_coord(D, value)] if self.scalars.rank else []))

    def elements(self) -> Iterator[ActionElem]:
        Q = list(self.quotient.elements())
        for a, b, c in itertools.product(Q, Q, list(self.scalars.elements())):
            yield ActionElem(a, b, c)

    def identity(self) -> ActionElem:
        return ActionElem(self.quotient.zero(), self.quotient.zero(), self.scalars.zero())

    def mul(self, x: ActionElem, y: ActionElem) -> ActionElem:
        composite, _ = twisted_compose(self.lift(x), self.lift(y), self.data)
        return self.normalize(composite)

    def inv(self, x: ActionElem) -> ActionElem:
        t = self.lift(x)
        twist = self.data.im_h(re_part(t.shift), im_part(t.shift))
        return self.normalize(TwistedTranslation(vec_neg(t.shift), -t.scalar - QQ_I(0, 2 * twist)))

    def from_heisenberg(self, x: HeisenbergElem) -> ActionElem:
        """ρ(l_Im) ∘ σ(c) ∘ ρ(l_Re) for (a, b, c) ∈ H(μ_D)."""
        D, P = self.data, self.data.presentation
        l_re = real_vector(P.lift(x.a))
        l_im = imaginary_vector(P.lift(x.b))
        k = self._scalar_coord(x.c)
        inner, _ = twisted_compose(sigma(D.n, QQ(k, D.gamma_denominator)), rho(l_re), D)
        outer, _ = twisted_compose(rho(l_im), inner, D)
        return self.normalize(outer)

    def generators(self) -> list[ActionElem]:
        mu_d = mu_from_data(self.data)
        return [self.from_heisenberg(x) for x in HeisenbergGroup(mu_d).generators()]


def verify_action_morphisms(D: IsotropicSublatticeData, bounds: Optional[Bounds] = None) -> Report:
    """ρ_D is a morphism on L_Re ⊕ Λ_Im and on Λ_Re ⊕ L_Im, and the quotient
    action of H(μ_D) is an injective homomorphism."""
    bounds = bounds or current_bounds()
    report = Report()
    basis = D.real_basis()
    lam = D.lambda_vectors()

    def non_integral(pairs) -> list:
        return [[j, k] for j, v in enumerate(pairs[0]) for k, w in enumerate(pairs[1])
                if not _is_integer(D.im_h(v, tuple(QQ_I(0, z.x) for z in w)))]

    bad = non_integral((basis, lam))
    report.add(failed("ρ on L_Re ⊕ Λ_Im", bad) if bad else passed("ρ on L_Re ⊕ Λ_Im"))
    bad = non_integral((lam, basis))
    report.add(failed("ρ on Λ_Re ⊕ L_Im", bad) if bad else passed("ρ on Λ_Re ⊕ L_Im"))

    mu_d = mu_from_data(D)
    source = HeisenbergGroup(mu_d)
    bounds.require("group_order", source.order, "verify_action_morphisms")
    action = ActionGroup(D)
    E = GroupMorphism(source, action, action.from_heisenberg, name="E")
    try:
        report.add(is_homomorphism(E, bounds))
        report.add(is_injective(E))
        trivial = [k for k in range(1, D.gamma_denominator)
                   if action.normalize(sigma(D.n, QQ(k, D.gamma_denominator))) == action.identity()]
        report.add(failed("σ injective", trivial) if trivial else passed("σ injective"))
    except VerificationFailed as e:
        report.add(failed("E:normalize", detail=str(e)))
    return report
