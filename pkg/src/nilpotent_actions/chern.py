"""Chern characters of sums of line-bundle powers on a real m-torus.

H^{2•}(T^m; Q) is the even part of the exterior algebra on e_1, …, e_m, and
a class is integral exactly when all of its coefficients are integers.
Generators are numbered from 1.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from math import factorial
from typing import Any, Iterable, Mapping, Optional

from sympy.polys.domains import QQ

from nilpotent_actions.checks import Report, failed, passed, rational_json
from nilpotent_actions.errors import ConfigError, PreconditionError, VerificationFailed
from nilpotent_actions.waring import WaringCertificate, r1_bound, waring_extend

log = logging.getLogger(__name__)

Key = tuple[int, ...]


def _q(value: Any):
    if isinstance(value, str):
        num, sep, den = value.strip().partition("/")
        return QQ(int(num), int(den)) if sep else QQ(int(num))
    if isinstance(value, int):
        return QQ(value)
    return QQ(value.numerator, value.denominator)


def _sort_sign(indices: Iterable[int]) -> tuple[Optional[Key], int]:
    """Sorted key and permutation sign, or (None, 0) on a repeated index."""
    indices = list(indices)
    if len(set(indices)) != len(indices):
        return None, 0
    inversions = sum(1 for i in range(len(indices)) for j in range(i + 1, len(indices)) if indices[i] > indices[j])
    return tuple(sorted(indices)), -1 if inversions % 2 else 1


@dataclass(frozen=True)
class EvenClass:
    n_generators: int
    terms: tuple[tuple[Key, Any], ...] = ()

    @classmethod
    def from_terms(cls, n_generators: int, terms: Mapping[Iterable[int], Any]) -> EvenClass:
        acc: dict[Key, Any] = {}
        for indices, coefficient in terms.items():
            indices = tuple(indices)
            if len(indices) % 2:
                raise PreconditionError(f"term {indices} has odd degree")
            if any(not 1 <= i <= n_generators for i in indices):
                raise PreconditionError(f"term {indices} uses a generator outside 1..{n_generators}")
            key, sign = _sort_sign(indices)
            if key is None:
                continue
            acc[key] = acc.get(key, QQ(0)) + sign * _q(coefficient)
        return cls._canonical(n_generators, acc)

    @classmethod
    def _canonical(cls, n: int, acc: Mapping[Key, Any]) -> EvenClass:
        return cls(n, tuple(sorted(((k, v) for k, v in acc.items() if v), key=lambda kv: (len(kv[0]), kv[0]))))

    @classmethod
    def constant(cls, n_generators: int, value: Any) -> EvenClass:
        return cls.from_terms(n_generators, {(): value})

    @classmethod
    def zero(cls, n_generators: int) -> EvenClass:
        return cls(n_generators)

    @classmethod
    def parse(cls, text: str, n_generators: int) -> EvenClass:
        """Parse "e12:1,e34:-2" or, with two-digit generators, "e1.10:1".

        Coefficients may be "p/q". An empty string is the zero class.
        """
        acc: dict[Key, Any] = {}
        for item in filter(None, (part.strip() for part in text.split(","))):
            match = re.fullmatch(r"e([0-9.]+)\s*:\s*(-?\d+(?:/\d+)?)", item)
            if not match:
                raise ConfigError(f"cannot parse class term {item!r}")
            name, coefficient = match.groups()
            indices = [int(x) for x in name.split(".")] if "." in name else [int(x) for x in name]
            try:
                term = cls.from_terms(n_generators, {tuple(indices): coefficient})
            except PreconditionError as e:
                raise ConfigError(f"class term {item!r}: {e}") from e
            for key, value in term.terms:
                acc[key] = acc.get(key, QQ(0)) + value
        return cls._canonical(n_generators, acc)

    def as_dict(self) -> dict[Key, Any]:
        return dict(self.terms)

    def _check(self, other: EvenClass) -> None:
        if self.n_generators != other.n_generators:
            raise PreconditionError(
                f"classes live on tori of dimension {self.n_generators} and {other.n_generators}"
            )

    def __add__(self, other: EvenClass | int) -> EvenClass:
        if isinstance(other, int):
            other = EvenClass.constant(self.n_generators, other)
        self._check(other)
        acc = self.as_dict()
        for key, value in other.terms:
            acc[key] = acc.get(key, QQ(0)) + value
        return EvenClass._canonical(self.n_generators, acc)

    __radd__ = __add__

    def __neg__(self) -> EvenClass:
        return EvenClass(self.n_generators, tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other: EvenClass | int) -> EvenClass:
        if isinstance(other, int):
            other = EvenClass.constant(self.n_generators, other)
        return self + (-other)

    def __rsub__(self, other: int) -> EvenClass:
        return EvenClass.constant(self.n_generators, other) - self

    def scale(self, factor: Any) -> EvenClass:
        q = _q(factor)
        return EvenClass._canonical(self.n_generators, {k: v * q for k, v in self.terms})

    def __mul__(self, other: EvenClass | int) -> EvenClass:
        if isinstance(other, EvenClass):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other: int) -> EvenClass:
        return self.scale(other)

    def is_zero(self) -> bool:
        return not self.terms

    def degree_part(self, degree: int) -> EvenClass:
        return EvenClass(self.n_generators, tuple((k, v) for k, v in self.terms if len(k) == degree))

    def degrees(self) -> list[int]:
        return sorted({len(k) for k, _ in self.terms})

    def constant_term(self):
        return self.as_dict().get((), QQ(0))

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for _, v in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, value in self.terms:
            name = "∧".join(f"e{i}" for i in key) or "1"
            parts.append(f"{rational_json(value)}·{name}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "n_generators": self.n_generators,
            "terms": [[list(k), rational_json(v)] for k, v in self.terms],
        }


def wedge(x: EvenClass, y: EvenClass) -> EvenClass:
    x._check(y)
    acc: dict[Key, Any] = {}
    for kx, vx in x.terms:
        for ky, vy in y.terms:
            key, sign = _sort_sign(kx + ky)
            if key is None:
                continue
            acc[key] = acc.get(key, QQ(0)) + sign * vx * vy
    return EvenClass._canonical(x.n_generators, acc)


@dataclass(frozen=True)
class LineBundleSymbol:
    """A line bundle through its first Chern class, integral of degree 2."""

    c1: EvenClass

    def __post_init__(self):
        if any(len(k) != 2 for k, _ in self.c1.terms):
            raise PreconditionError(f"c1 = {self.c1} is not homogeneous of degree 2")
        if not self.c1.is_integral():
            raise PreconditionError(f"c1 = {self.c1} is not integral")

    @property
    def n_generators(self) -> int:
        return self.c1.n_generators


def exp_trunc(c1: LineBundleSymbol, t: int) -> EvenClass:
    """ch(α^⊗t) = Σ_k (t·c1)^k / k!, which terminates past degree m."""
    m = c1.n_generators
    x = c1.c1.scale(t)
    total = EvenClass.constant(m, 1)
    power = EvenClass.constant(m, 1)
    k = 0
    while True:
        k += 1
        power = wedge(power, x)
        if power.is_zero():
            return total
        total = total + power.scale(QQ(1, factorial(k)))


@dataclass(frozen=True)
class VirtualBundleSymbol:
    """⊕_{t ∈ powers} α^⊗t ⊕ trivial^extra_trivial."""

    base: LineBundleSymbol
    powers: tuple[int, ...] = ()
    extra_trivial: int = 0

    def __post_init__(self):
        object.__setattr__(self, "powers", tuple(sorted(int(t) for t in self.powers)))
        if self.extra_trivial < 0:
            raise PreconditionError("extra_trivial must be non-negative")

    @property
    def rank(self) -> int:
        return len(self.powers) + self.extra_trivial

    def to_json(self) -> dict:
        return {"powers": list(self.powers), "extra_trivial": self.extra_trivial, "rank": self.rank}


def ch_virtual(v: VirtualBundleSymbol) -> EvenClass:
    """Σ_t exp(t·c1) collected by degree: c1^k/k! weighted by the power sum Σ_t t^k."""
    counts = Counter(v.powers)
    total = EvenClass.constant(v.base.n_generators, v.extra_trivial + len(v.powers))
    power = EvenClass.constant(v.base.n_generators, 1)
    k = 0
    while True:
        k += 1
        power = wedge(power, v.base.c1)
        if power.is_zero():
            return total
        weight = sum(multiplicity * t**k for t, multiplicity in counts.items())
        if weight:
            total = total + power.scale(QQ(weight, factorial(k)))


@dataclass(frozen=True)
class BundleCertificate:
    rank: int
    ch: EvenClass
    d: int
    divisibility_witness: dict = field(default_factory=dict, compare=False)
    trivial: bool = False
    checks: Report = field(default_factory=Report, compare=False)
    details: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return self.checks.ok

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "ch": self.ch.to_json(),
            "d": self.d,
            "divisibility": {str(k): v.to_json() for k, v in sorted(self.divisibility_witness.items())},
            "trivial": self.trivial,
            "checks": self.checks.to_json(),
            **{k: v for k, v in sorted(self.details.items())},
        }


# Rank bounds ---------------------------------------------------------------


def r2_bound(m: int) -> int:
    return r1_bound(m // 2, 1) - 1


def r2_bound_alt(m: int) -> int:
    """The second reading R1(⌊m/2⌋, 2) - 1 of the same bound."""
    return r1_bound(m // 2, 2) - 1


def r3_bound(m: int) -> int:
    value = 1 + r2_bound(m) + m // 2
    if m > 0 and value < 1 + r2_bound(m - 1) + (m - 1) // 2:
        log.warning("R3 is not monotone at m = %d", m)
    return value


def r2_closed_form_ok(m: int) -> bool:
    """R2(m) ≤ 5^(m/2)·⌊m/2⌋!, compared after squaring."""
    return r2_bound(m) ** 2 <= 5**m * factorial(m // 2) ** 2


def r3_closed_form_ok(m: int) -> bool:
    """R3(m) ≤ 5^(m/2)·⌊m/2⌋!, compared after squaring. Fails at m = 0."""
    return r3_bound(m) ** 2 <= 5**m * factorial(m // 2) ** 2


# Certificates --------------------------------------------------------------


def _divisibility(diff: EvenClass, d: int) -> tuple[dict, list]:
    witness = {}
    bad = []
    for degree in diff.degrees():
        if degree == 0:
            continue
        quotient = diff.degree_part(degree).scale(QQ(1, d))
        witness[degree] = quotient
        if not quotient.is_integral():
            bad.append(degree)
    return witness, bad


def alpha_d(c1: LineBundleSymbol, d: int, m: int) -> tuple[VirtualBundleSymbol, BundleCertificate]:
    """α[d] = ⊕_{t ∈ T - {1}} α^⊗t with T from waring_extend(⌊m/2⌋, {1}, ⌊m/2⌋!·d).

    The certificate shows ch(α ⊕ α[d]) - rank ∈ d·H_Z degree by degree.
    """
    if d < 1:
        raise PreconditionError(f"d must be positive, got {d}")
    if c1.n_generators != m:
        raise PreconditionError(f"c1 lives on a {c1.n_generators}-torus, expected {m}")
    n = m // 2
    waring: WaringCertificate = waring_extend(n, [1], factorial(n) * d)
    remaining = Counter(waring.output.entries)
    if remaining[1]:
        remaining[1] -= 1
    symbol = VirtualBundleSymbol(c1, tuple(remaining.elements()))

    total = exp_trunc(c1, 1) + ch_virtual(symbol)
    rank = 1 + symbol.rank
    witness, bad = _divisibility(total - rank, d)

    checks = Report()
    checks.extend(waring.checks, prefix="waring:")
    checks.add(passed("divisible by d") if not bad else failed("divisible by d", bad))
    r2, r2_alt = r2_bound(m), r2_bound_alt(m)
    ceiling = max(r2, r2_alt)
    checks.add(
        passed("rank α[d] ≤ R2") if symbol.rank <= ceiling else failed("rank α[d] ≤ R2", [symbol.rank, ceiling])
    )
    details = {
        "alpha_d": symbol.to_json(),
        "waring": waring.to_json(),
        "r2": r2,
        "r2_alt": r2_alt,
        "r2_binding": "R1(n,1)-1" if symbol.rank <= r2 else "R1(n,2)-1",
        "r2_closed_form": r2_closed_form_ok(m),
    }
    cert = BundleCertificate(rank, total, d, witness, False, checks, details)
    log.debug("alpha_d(m=%d, d=%d): rank α[d] = %d", m, d, symbol.rank)
    return symbol, cert


def triviality_certificate(rank: int, ch: EvenClass, m: int) -> BundleCertificate:
    checks = Report()
    higher = [deg for deg in ch.degrees() if deg > 0]
    checks.add(failed("ch in degree 0", higher) if higher else passed("ch in degree 0"))
    constant = ch.constant_term()
    if constant == rank:
        checks.add(passed("ch = rank"))
    else:
        checks.add(failed("ch = rank", [rational_json(constant), rank]))
    stable = -(-m // 2)
    checks.add(passed("rank ≥ m/2") if rank >= stable else failed("rank ≥ m/2", [rank, stable]))
    return BundleCertificate(rank, ch, 1, {}, checks.ok, checks)


@dataclass(frozen=True)
class Summand:
    label: str
    rank: int
    ch: EvenClass
    source: str

    def to_json(self) -> dict:
        return {"label": self.label, "rank": self.rank, "ch": self.ch.to_json(), "source": self.source}


def complement_plan(c1: LineBundleSymbol, d: int, m: int) -> BundleCertificate:
    """β = α ⊕ α^⊥ ⊕ trivial^k', of rank exactly R3(m) and trivial Chern character.

    α^⊥ = α[d] ⊕ α_χ ⊕ trivial^k, where α_χ is a declared summand with
    ch = rank(α_χ) + χ for χ = rank - ch(α ⊕ α[d]).
    """
    if d < 1:
        raise PreconditionError(f"d must be positive, got {d}")
    symbol, alpha_cert = alpha_d(c1, d, m)
    head = exp_trunc(c1, 1) + ch_virtual(symbol)
    head_rank = 1 + symbol.rank
    chi = EvenClass.constant(m, head_rank) - head

    rank_chi = 0 if chi.is_zero() else m // 2
    k = max(0, -(-m // 2) - symbol.rank - rank_chi)
    r3 = r3_bound(m)
    used = head_rank + rank_chi + k
    if used > r3:
        raise VerificationFailed(f"complement needs rank {used}, above R3({m}) = {r3}")
    pad = r3 - used

    summands = [
        Summand("α", 1, exp_trunc(c1, 1), "constructed"),
        Summand("α[d]", symbol.rank, ch_virtual(symbol), "constructed"),
        Summand("α_χ", rank_chi, chi + rank_chi, "declared"),
        Summand("trivial^k", k, EvenClass.constant(m, k), "padding"),
        Summand("trivial^k'", pad, EvenClass.constant(m, pad), "padding"),
    ]
    total = EvenClass.zero(m)
    for s in summands:
        total = total + s.ch

    triviality = triviality_certificate(r3, total, m)
    checks = Report()
    checks.extend(alpha_cert.checks, prefix="alpha_d:")
    checks.add(passed("rank ≤ R3"))
    checks.extend(triviality.checks, prefix="trivial:")
    details = {
        "summands": [s.to_json() for s in summands],
        "chi": chi.to_json(),
        "r3": r3,
        "r3_closed_form": r3_closed_form_ok(m),
        "alpha_d": alpha_cert.details["alpha_d"],
        "r2_binding": alpha_cert.details["r2_binding"],
        "waring": alpha_cert.details["waring"],
    }
    log.debug("complement_plan(m=%d, d=%d): k=%d, padding=%d", m, d, k, pad)
    return BundleCertificate(r3, total, d, alpha_cert.divisibility_witness, triviality.trivial, checks, details)
