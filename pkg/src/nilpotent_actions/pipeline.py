"""End-to-end runs and the JSON documents the CLI and the MCP server emit.

Every document carries a schema name and version, and is serialised with
sorted keys so that repeated runs on the same input are byte-identical.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from sympy.polys.domains import QQ, QQ_I

from nilpotent_actions.bounds import Bounds, current_bounds
from nilpotent_actions.checks import Report, failed, passed
from nilpotent_actions.chern import EvenClass, LineBundleSymbol, complement_plan, r3_bound
from nilpotent_actions.config import PipelineConfig
from nilpotent_actions.errors import BoundExceeded, ConfigError, PreconditionError
from nilpotent_actions.finabel import rank_bruteforce
from nilpotent_actions.groups import ProductGroup, check_group_axioms, to_table
from nilpotent_actions.heisenberg import (
    BilinearPairing,
    HeisenbergGroup,
    nilpotency_class_le2,
    verify_extension,
)
from nilpotent_actions.lattice import (
    IsotropicSublatticeData,
    check_cocycle_identities,
    check_multiplier_law,
    check_mu_well_defined,
    data_from_heisenberg,
    lattice_vector,
    mu_from_data,
    rho,
    validate_data,
    verify_action_morphisms,
)
from nilpotent_actions.theta import ThetaGroup, mumford_degree, parametrise, verify_parametrisation
from nilpotent_actions.verify import check_coprimality, composed_pipeline_check
from nilpotent_actions.waring import waring_extend, waring_minimal

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def dumps(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)


def _envelope(kind: str, ok: bool, body: dict) -> dict:
    return {"schema": f"nilpotent-actions/{kind}", "version": SCHEMA_VERSION, "ok": ok, **body}


# Target-space parameters ---------------------------------------------------


def variety_params(r: int) -> tuple[int, int]:
    """(torus power, projective dimension) of T^(r⌊r/2⌋) × P^r."""
    if r < 0:
        raise PreconditionError(f"rank bound must be non-negative, got {r}")
    return r * (r // 2), r


def stiefel_dim(k: int, t: int) -> int:
    if not 1 <= k <= t:
        raise PreconditionError(f"Stiefel_k(C^t) needs 1 ≤ k ≤ t, got k={k}, t={t}")
    return k * (2 * t - k)


def grassmann_dim(k: int, t: int) -> int:
    if not 1 <= k <= t:
        raise PreconditionError(f"Grassmann_k(C^t) needs 1 ≤ k ≤ t, got k={k}, t={t}")
    return k * (t - k)


@dataclass(frozen=True)
class ManifoldParams:
    torus_dim: int
    t: int
    fiber_menu: tuple[dict, ...]

    def to_json(self) -> dict:
        return {"torus_dim": self.torus_dim, "t": self.t, "fiber_choices": list(self.fiber_menu)}


def manifold_params(r: int) -> ManifoldParams:
    """T^(2r⌊r/2⌋) with fibres Stiefel_k(C^t) or Grassmann_k(C^(t+1)), t = R3(2⌊r/2⌋)."""
    if r < 0:
        raise PreconditionError(f"rank bound must be non-negative, got {r}")
    t = r3_bound(2 * (r // 2))
    menu = [{"kind": "stiefel", "k": k, "ambient": t, "dim": stiefel_dim(k, t)} for k in range(1, t + 1)]
    menu += [
        {"kind": "grassmann", "k": k, "ambient": t + 1, "dim": grassmann_dim(k, t + 1)} for k in range(1, t + 2)
    ]
    return ManifoldParams(2 * r * (r // 2), t, tuple(menu))


# Pipeline ------------------------------------------------------------------


@dataclass
class PipelineReport:
    input_summary: dict
    per_factor: list[dict]
    variety_params: dict
    manifold_params: dict
    verification: Report = field(default_factory=Report)

    @property
    def ok(self) -> bool:
        return self.verification.ok

    def to_json(self) -> dict:
        return _envelope(
            "pipeline-report",
            self.ok,
            {
                "input": self.input_summary,
                "per_factor": self.per_factor,
                "variety_params": self.variety_params,
                "manifold_params": self.manifold_params,
                "verification": self.verification.to_json(),
            },
        )

    def summary(self) -> str:
        failures = self.verification.failures()
        status = "PASS" if self.ok else f"FAIL ({len(failures)} failed)"
        lines = [
            f"pipeline: {status}",
            f"  rank r = {self.input_summary['rank']} ({self.input_summary['rank_source']})",
            f"  variety: T^{self.variety_params['torus_power']} × P^{self.variety_params['projective_dim']}",
            f"  manifold: T^{self.manifold_params['torus_dim']} (real), t = {self.manifold_params['t']}",
        ]
        lines += [f"  failed: {check.name}" for check in failures]
        return "\n".join(lines)


def determine_rank(
    factors: Sequence[BilinearPairing], declared: Optional[int], bounds: Bounds
) -> tuple[int, str, Optional[int]]:
    """The rank bound r, where it came from, and the computed rank when the order permits."""
    group = ProductGroup(tuple(HeisenbergGroup(mu) for mu in factors))
    computed = None
    if group.order <= bounds.subgroup_order:
        table, _ = to_table(group, name="G")
        computed = rank_bruteforce(table, bounds)
    if declared is None:
        if computed is None:
            raise ConfigError(
                f"rank_bound: required because |G| = {group.order} exceeds the subgroup bound {bounds.subgroup_order}"
            )
        return computed, "computed", computed
    if computed is not None and computed != declared:
        log.warning("declared rank bound %d differs from the computed rank %d", declared, computed)
    return declared, "declared", computed


def _factor_entry(
    index: int, mu: BilinearPairing, config: PipelineConfig, t: int, report: Report, bounds: Bounds
) -> dict:
    prefix = f"factor{index}:"
    entry: dict[str, Any] = {
        "pairing": mu.to_json(),
        "d(A)": mu.A.rank,
        "admissible_tuple": None,
        "theta_modulus": None,
        "mumford_degree": None,
        "lattice_data": None,
        "lattice_data_digest": None,
        "waring_certificate": None,
        "chern_certificate": None,
        "fiber_rank": None,
    }
    if config.mode in ("birational", "both"):
        w = parametrise(mu, char_exclusion=config.char_exclusion)
        entry["admissible_tuple"] = w.delta.to_json()
        entry["theta_modulus"] = w.theta.modulus
        entry["mumford_degree"] = list(mumford_degree(w.delta))

    if config.mode in ("diff", "both"):
        realisation = data_from_heisenberg(mu, bounds)
        D = realisation.data
        m = 2 * D.n
        c1 = LineBundleSymbol(D.first_chern_class())
        certificate = complement_plan(c1, config.d, m)
        report.extend(certificate.checks, prefix=f"{prefix}chern:")
        t_i = r3_bound(m)
        name = f"{prefix}t_i ≤ t"
        report.add(passed(name, detail=f"{t_i} ≤ {t}") if t_i <= t else failed(name, [t_i, t]))
        entry["lattice_data"] = realisation.to_json()
        entry["lattice_data_digest"] = D.digest()
        entry["waring_certificate"] = certificate.details["waring"]
        entry["chern_certificate"] = certificate.to_json()
        entry["fiber_rank"] = t_i
    return entry


def run(config: PipelineConfig, bounds: Optional[Bounds] = None) -> PipelineReport:
    bounds = bounds or current_bounds()
    factors = config.require_factors()
    check_coprimality(factors, config.char_exclusion)
    r, source, computed = determine_rank(factors, config.rank_bound, bounds)
    log.debug("pipeline: %d factor(s), mode %s, r = %d (%s)", len(factors), config.mode, r, source)

    report = Report()
    if computed is not None and source == "declared":
        name = "rank bound ≥ rank"
        report.add(passed(name) if computed <= r else failed(name, [r, computed]))
    report.extend(composed_pipeline_check(factors, config.mode, config.char_exclusion, bounds))

    torus_power, projective_dim = variety_params(r)
    manifold = manifold_params(r)
    per_factor = [_factor_entry(i, mu, config, manifold.t, report, bounds) for i, mu in enumerate(factors)]

    used_power = sum(mu.A.rank for mu in factors)
    name = "Σ d(A_i) ≤ r⌊r/2⌋"
    report.add(passed(name) if used_power <= torus_power else failed(name, [used_power, torus_power]))
    name = "factors ≤ r"
    report.add(passed(name) if len(factors) <= projective_dim else failed(name, [len(factors), projective_dim]))

    order = 1
    for mu in factors:
        order *= HeisenbergGroup(mu).order
    summary = {
        "factors": len(factors),
        "order": order,
        "rank": r,
        "rank_source": source,
        "computed_rank": computed,
        "mode": config.mode,
        "d": config.d,
        "char_exclusion": config.char_exclusion,
    }
    return PipelineReport(
        input_summary=summary,
        per_factor=per_factor,
        variety_params={
            "torus_power": torus_power,
            "projective_dim": projective_dim,
            "factor_torus_power": used_power,
        },
        manifold_params=manifold.to_json(),
        verification=report,
    )


# Single-stage documents ------------------------------------------------------


def waring_document(
    n: int, S: Sequence[int], delta: int, minimal_cap: Optional[int] = None, bounds: Optional[Bounds] = None
) -> dict:
    """waring_extend, optionally cross-checked by the exhaustive minimal search."""
    certificate = waring_extend(n, S, delta)
    body: dict[str, Any] = {"n": n, "delta": delta, "certificate": certificate.to_json()}
    ok = certificate.ok
    if minimal_cap is not None:
        minimal = waring_minimal(n, S, delta, minimal_cap, bounds)
        body["minimal"] = minimal.to_json() if minimal else None
    return _envelope("waring", ok, body)


def chern_document(m: int, c1_text: str, d: int) -> dict:
    c1 = LineBundleSymbol(EvenClass.parse(c1_text, m))
    certificate = complement_plan(c1, d, m)
    return _envelope("chern", certificate.ok, {"m": m, "c1": c1.c1.to_json(), "certificate": certificate.to_json()})


def _admissible_entry(delta, bounds: Bounds) -> tuple[dict, Report]:
    modulus = delta.entries[0] if delta.entries else 1
    theta = ThetaGroup(delta, modulus)
    report = Report()
    report.extend(check_group_axioms(theta, bounds))
    report.extend(verify_extension(theta.extension(), bounds))
    report.add(nilpotency_class_le2(theta, bounds))
    degree, self_intersection = mumford_degree(delta)
    entry = {
        "delta": delta.to_json(),
        "modulus": modulus,
        "order": theta.order,
        "mumford_degree": [degree, self_intersection],
        "checks": report.to_json(),
    }
    return entry, report


def theta_document(config: PipelineConfig, bounds: Optional[Bounds] = None) -> dict:
    """Parametrise every group factor and check the theta group of every admissible tuple."""
    bounds = bounds or current_bounds()
    check_coprimality(config.factors, config.char_exclusion)
    report = Report()
    factors = []
    for i, mu in enumerate(config.factors):
        w = parametrise(mu, char_exclusion=config.char_exclusion)
        checks = verify_parametrisation(w, mu, bounds)
        report.extend(checks, prefix=f"group[{i}]:")
        factors.append({"witness": w.to_json(), "checks": checks.to_json()})
    admissible = []
    for i, delta in enumerate(config.admissible):
        entry, checks = _admissible_entry(delta, bounds)
        report.extend(checks, prefix=f"admissible[{i}]:")
        admissible.append(entry)
    return _envelope("theta-check", report.ok, {"factors": factors, "admissible": admissible, "checks": report.to_json()})


def _shift_box(n: int, radius: int) -> list:
    """Lattice vectors x + i·y with x, y ∈ [-radius, radius]^n."""
    coords = list(itertools.product(range(-radius, radius + 1), repeat=n))
    return [lattice_vector(x, y) for x in coords for y in coords]


def _point_grid(D: IsotropicSublatticeData) -> list:
    """The (1/2c)-grid of the unit cell: (a + i·b)/(2c) with a, b ∈ [0, 2c)^n."""
    step = QQ(1, 2 * D.c)
    coords = list(itertools.product(range(2 * D.c), repeat=D.n))
    return [tuple(QQ_I(x * step, y * step) for x, y in zip(a, b)) for a in coords for b in coords]


def _box_radius(D: IsotropicSublatticeData, bounds: Bounds) -> int:
    """The largest radius up to 2c whose box × box × grid fits cocycle_triples."""
    grid = (2 * D.c) ** (2 * D.n)
    full = 2 * D.c
    for radius in range(full, 0, -1):
        if (2 * radius + 1) ** (4 * D.n) * grid <= bounds.cocycle_triples:
            if radius < full:
                log.warning("cocycle scan limited to the box of radius %d (2c = %d) by cocycle_triples", radius, full)
            return radius
    raise BoundExceeded("cocycle scan", 3 ** (4 * D.n) * grid, bounds.cocycle_triples)


def cocycle_report(D: IsotropicSublatticeData, bounds: Optional[Bounds] = None) -> Report:
    """Cocycle identities and the multiplier law for l, l' in the box [-2c, 2c]^n and v on the grid.

    The box shrinks when the scan would exceed cocycle_triples; the detail
    records the radius used. Each identity becomes one check whose witness is
    the first failing triple.
    """
    bounds = bounds or current_bounds()
    radius = _box_radius(D, bounds)
    shifts, points = _shift_box(D.n, radius), _point_grid(D)
    names = ["chi", "f", "rho", "multiplier law"]
    first_failure: dict[str, list] = {}
    for l, l2 in itertools.product(shifts, repeat=2):
        translations = (rho(l), rho(l2))
        for v in points:
            results = list(check_cocycle_identities(D, l, l2, v).checks)
            results.append(check_multiplier_law(D, *translations, v))
            for check in results:
                if not check and check.name not in first_failure:
                    first_failure[check.name] = [l, l2, v, check.witness]
        if len(first_failure) == len(names):
            break
    detail = f"radius {radius} of {2 * D.c}, {len(shifts) ** 2 * len(points)} triples"
    report = Report()
    for name in names:
        if name in first_failure:
            report.add(failed(name, witness=first_failure[name], detail=detail))
        else:
            report.add(passed(name, detail=detail))
    return report


def _sublattice_entry(D: IsotropicSublatticeData, bounds: Bounds) -> tuple[dict, Report]:
    report = Report()
    report.extend(validate_data(D), prefix="data:")
    entry: dict[str, Any] = {"data": D.to_json(), "digest": D.digest()}
    if report.ok:
        entry["mu"] = mu_from_data(D).to_json()
        report.add(check_mu_well_defined(D))
        report.extend(verify_action_morphisms(D, bounds), prefix="action:")
        report.extend(cocycle_report(D, bounds), prefix="cocycle:")
    entry["checks"] = report.to_json()
    return entry, report


def lattice_document(config: PipelineConfig, bounds: Optional[Bounds] = None) -> dict:
    """Validate every sublattice fragment and realise every group factor as lattice data."""
    bounds = bounds or current_bounds()
    report = Report()
    factors = []
    for i, mu in enumerate(config.factors):
        realisation = data_from_heisenberg(mu, bounds)
        entry, checks = _sublattice_entry(realisation.data, bounds)
        entry["realisation"] = realisation.to_json()
        report.extend(checks, prefix=f"group[{i}]:")
        factors.append(entry)
    sublattices = []
    for i, D in enumerate(config.sublattice):
        entry, checks = _sublattice_entry(D, bounds)
        report.extend(checks, prefix=f"sublattice[{i}]:")
        sublattices.append(entry)
    return _envelope(
        "lattice-check", report.ok, {"factors": factors, "sublattice": sublattices, "checks": report.to_json()}
    )


def document_summary(document: dict) -> str:
    """One status line plus the names of failed checks."""
    kind = document["schema"].split("/", 1)[1]
    lines = [f"{kind}: {'PASS' if document['ok'] else 'FAIL'}"]
    checks = document.get("checks") or document.get("certificate", {}).get("checks", {})
    lines += [f"  failed: {name}" for name, result in checks.items() if not result["ok"]]
    return "\n".join(lines)
