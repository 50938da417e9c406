"""Multisets whose power sums vanish modulo δ.

waring_extend builds, from any multiset S, a multiset T ⊇ S with
Σ_{t∈T} t^k ≡ 0 (mod δ) for 1 ≤ k ≤ n. T is the set of all products
t_1⋯t_n with t_1 ∈ S + {-ΣS} and t_k ∈ P_k + {1}, where the k-th powers
of P_k sum to -1 mod δ. Power sums are multiplicative over such products.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cache
from math import prod
from typing import Iterable, Optional

from nilpotent_actions.bounds import Bounds, current_bounds
from nilpotent_actions.checks import Report, failed, passed
from nilpotent_actions.errors import PreconditionError

log = logging.getLogger(__name__)


def power_sum(entries: Iterable[int], k: int) -> int:
    return sum(t**k for t in entries)


def congruences_hold(entries: Iterable[int], n: int, delta: int) -> bool:
    entries = list(entries)
    return all(power_sum(entries, k) % delta == 0 for k in range(1, n + 1))


def canonical_residue(t: int, delta: int) -> int:
    """The representative of t mod δ in (-δ/2, δ/2]."""
    r = t % delta
    return r - delta if 2 * r > delta else r


@dataclass(frozen=True)
class WaringMultiset:
    entries: tuple[int, ...]
    modulus: int
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(int(t) for t in self.entries)))

    def __len__(self) -> int:
        return len(self.entries)

    def is_valid(self) -> bool:
        return congruences_hold(self.entries, self.degree, self.modulus)

    def contains(self, subset: Iterable[int]) -> bool:
        return not Counter(subset) - Counter(self.entries)

    def display(self) -> list[int]:
        return sorted(canonical_residue(t, self.modulus) for t in self.entries)

    def to_json(self) -> dict:
        return {
            "entries": list(self.entries),
            "display": self.display(),
            "modulus": self.modulus,
            "degree": self.degree,
        }


@dataclass(frozen=True)
class WaringCertificate:
    input_set: tuple[int, ...]
    output: WaringMultiset
    bound: int
    trace: dict = field(compare=False)
    checks: Report = field(compare=False)

    @property
    def ok(self) -> bool:
        return self.checks.ok

    def to_json(self) -> dict:
        return {
            "input": list(self.input_set),
            "entries": list(self.output.entries),
            "display": self.output.display(),
            "size": len(self.output),
            "bound": self.bound,
            "trace": self.trace,
            "checks": self.checks.to_json(),
        }


def r1_bound(n: int, m: int) -> int:
    """(m + 1)·∏_{k=2}^{n} (4k + 1)."""
    return (m + 1) * prod(4 * k + 1 for k in range(2, n + 1))


@cache
def negone_powers(k: int, m: int) -> tuple[int, ...]:
    """A smallest multiset of residues in [0, m) whose k-th powers sum to -1 mod m.

    Sizes are searched upward from 1; among multisets of the minimal size
    the lexicographically smallest sorted one is returned.
    """
    if k < 1 or m < 1:
        raise PreconditionError(f"negone_powers needs k ≥ 1 and m ≥ 1, got k={k}, m={m}")
    target = (-1) % m
    powers = {x: pow(x, k, m) for x in range(m)}
    values = set(powers.values())
    reach = [{0}]
    while target not in reach[-1] or len(reach) == 1:
        nxt = {(r + p) % m for r in reach[-1] for p in values}
        if nxt == reach[-1] and len(reach) > 1:
            raise RuntimeError(f"-1 is not a sum of {k}-th powers mod {m}")
        reach.append(nxt)
    size = len(reach) - 1

    entries = []
    remaining = target
    for s in range(size, 0, -1):
        lower = entries[-1] if entries else 0
        x = next(x for x in range(lower, m) if (remaining - powers[x]) % m in reach[s - 1])
        entries.append(x)
        remaining = (remaining - powers[x]) % m
    if size > 4 * k:
        log.warning("negone_powers(%d, %d) needed %d terms, above the 4k ceiling %d", k, m, size, 4 * k)
    return tuple(entries)


def waring_extend(n: int, S: Iterable[int], delta: int) -> WaringCertificate:
    if n < 0 or delta < 1:
        raise PreconditionError(f"waring_extend needs n ≥ 0 and δ ≥ 1, got n={n}, δ={delta}")
    S = tuple(int(s) for s in S)
    bound = r1_bound(n, len(S))
    trace: dict = {}
    if n == 0 or not S:
        factors: list[list[int]] = []
        T: list[int] = []
    else:
        t1 = list(S) + [-sum(S)]
        factors = [t1]
        trace["T_1"] = t1
        for k in range(2, n + 1):
            pk = list(negone_powers(k, delta))
            trace[f"P_{k}"] = pk
            trace[f"T_{k}"] = pk + [1]
            factors.append(pk + [1])
        T = [prod(choice) for choice in itertools.product(*factors)]

    output = WaringMultiset(tuple(T), delta, n)
    checks = Report()
    bad = [k for k in range(1, n + 1) if power_sum(T, k) % delta]
    checks.add(failed("congruences", bad) if bad else passed("congruences"))
    if n == 0:
        # no congruences to meet; T is empty whatever S is
        checks.add(passed("contains S", detail="n = 0, T is empty"))
    elif output.contains(S):
        checks.add(passed("contains S"))
    else:
        checks.add(failed("contains S", list(S)))
    checks.add(
        passed("size ≤ R1") if len(T) <= bound else failed("size ≤ R1", [len(T), bound])
    )
    if factors:
        broken = [k for k in range(1, n + 1) if power_sum(T, k) != prod(power_sum(f, k) for f in factors)]
        checks.add(failed("multiplicative", broken) if broken else passed("multiplicative"))
    log.debug("waring_extend(n=%d, |S|=%d, δ=%d): |T| = %d", n, len(S), delta, len(T))
    return WaringCertificate(S, output, bound, trace, checks)


def _value_order(delta: int) -> list[int]:
    values = [0]
    for x in range(1, delta + 1):
        values += [x, -x]
    return values


def waring_minimal(
    n: int, S: Iterable[int], delta: int, size_cap: int, bounds: Optional[Bounds] = None
) -> Optional[WaringMultiset]:
    """Smallest multiset S + E with entries of E in [-δ, δ] meeting all congruences.

    Extras are tried by size, then in the order 0, 1, -1, 2, -2, …
    """
    bounds = bounds or current_bounds()
    bounds.require("waring_budget", (2 * delta + 1) ** size_cap, "waring_minimal")
    S = tuple(int(s) for s in S)
    values = _value_order(delta)
    for extra in range(0, size_cap - len(S) + 1):
        for combo in itertools.combinations_with_replacement(values, extra):
            candidate = S + combo
            if congruences_hold(candidate, n, delta):
                return WaringMultiset(candidate, delta, n)
    return None
