"""Exhaustive oracles shared by the pipeline and the tests."""

from __future__ import annotations

import logging
from typing import Any, Optional, Sequence

from nilpotent_actions.bounds import Bounds, current_bounds
from nilpotent_actions.checks import Report, passed
from nilpotent_actions.errors import CoprimalityError
from nilpotent_actions.groups import (
    GroupMorphism,
    ProductGroup,
    TableGroup,
    check_group_axioms,
    check_ses_morphism,
    is_homomorphism,
    is_injective,
    to_table,
)
from nilpotent_actions.heisenberg import BilinearPairing, HeisenbergGroup, verify_extension
from nilpotent_actions.lattice import ActionGroup, data_from_heisenberg, validate_data, verify_action_morphisms
from nilpotent_actions.theta import parametrise, verify_parametrisation

__all__ = [
    "check_coprimality",
    "check_group_axioms",
    "check_ses_morphism",
    "composed_pipeline_check",
    "embed_search",
    "is_homomorphism",
    "is_injective",
]

log = logging.getLogger(__name__)

MODES = ("birational", "diff", "both")


def _extend_to_closure(G: TableGroup, H: TableGroup, assigned: list[tuple[int, int]]) -> Optional[dict[int, int]]:
    """Extend generator images to ⟨gens⟩ by f(gs) = f(g)f(s), failing on a
    conflict or a collision of images."""
    mapping = {G.identity(): H.identity()}
    used = {H.identity()}
    queue = [G.identity()]
    while queue:
        g = queue.pop()
        for s, fs in assigned:
            gs = G.mul(g, s)
            image = H.mul(mapping[g], fs)
            known = mapping.get(gs)
            if known is None:
                if image in used:
                    return None
                mapping[gs] = image
                used.add(image)
                queue.append(gs)
            elif known != image:
                return None
    return mapping


def _search(G: TableGroup, H: TableGroup, prune: bool) -> Optional[dict[int, int]]:
    gens = sorted(G.generators(), key=lambda x: (-G.element_order(x), x))
    if prune:
        options = [
            [y for y in sorted(H.elements(), key=lambda y: (H.element_order(y), y))
             if H.element_order(y) == G.element_order(x)]
            for x in gens
        ]
    else:
        options = [list(H.elements()) for _ in gens]

    def backtrack(assigned: list[tuple[int, int]]) -> Optional[dict[int, int]]:
        if prune or len(assigned) == len(gens):
            mapping = _extend_to_closure(G, H, assigned)
            if mapping is None:
                return None
            if len(assigned) == len(gens):
                return mapping
        for y in options[len(assigned)]:
            found = backtrack(assigned + [(gens[len(assigned)], y)])
            if found is not None:
                return found
        return None

    return backtrack([])


def embed_search(G: Any, H: Any, bounds: Optional[Bounds] = None) -> Optional[GroupMorphism]:
    """An injective homomorphism G → H, or None.

    Generator images are chosen by backtracking, with generators taken by
    decreasing order and candidates restricted to elements of equal order.
    """
    bounds = bounds or current_bounds()
    bounds.require("embed_source", G.order, "embed_search source")
    bounds.require("embed_target", H.order, "embed_search target")
    g_table, g_elements = to_table(G)
    h_table, h_elements = to_table(H)
    mapping = _search(g_table, h_table, prune=True)
    if mapping is None:
        if g_table.order <= 16 and h_table.order <= 256 and _search(g_table, h_table, prune=False) is not None:
            raise RuntimeError("pruned embedding search missed an embedding")
        log.debug("embed_search: no embedding of order %d into order %d", G.order, H.order)
        return None
    g_index = {x: i for i, x in enumerate(g_elements)}
    f = GroupMorphism(G, H, lambda x: h_elements[mapping[g_index[x]]], name="embedding")
    for check in (is_homomorphism(f, bounds), is_injective(f)):
        if not check:
            raise RuntimeError(f"embed_search produced an invalid map: {check.name}")
    return f


def check_coprimality(pairings: Sequence[BilinearPairing], char_exclusion: Optional[int]) -> None:
    if char_exclusion is None:
        return
    for i, mu in enumerate(pairings):
        order = HeisenbergGroup(mu).order
        if order % char_exclusion == 0:
            raise CoprimalityError(f"group[{i}]: characteristic {char_exclusion} divides |H(μ)| = {order}")


def composed_pipeline_check(
    pairings: Sequence[BilinearPairing] | BilinearPairing,
    mode: str = "both",
    char_exclusion: Optional[int] = None,
    bounds: Optional[Bounds] = None,
) -> Report:
    """Check every arrow from ∏ H(μ_i) to ∏ Θ(δ_i) and to the lattice action groups.

    Check names are prefixed with the factor index and the path.
    """
    bounds = bounds or current_bounds()
    if isinstance(pairings, BilinearPairing):
        pairings = [pairings]
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    check_coprimality(pairings, char_exclusion)

    report = Report()
    sources = [HeisenbergGroup(mu) for mu in pairings]
    thetas, gammas, actions, actions_maps = [], [], [], []
    for i, (mu, source) in enumerate(zip(pairings, sources)):
        prefix = f"factor{i}:"
        report.extend(check_group_axioms(source, bounds), prefix=f"{prefix}H(μ):")
        report.extend(verify_extension(source.extension(), bounds), prefix=f"{prefix}H(μ):")
        if mode in ("birational", "both"):
            w = parametrise(mu, char_exclusion=char_exclusion)
            report.extend(verify_parametrisation(w, mu, bounds), prefix=f"{prefix}theta:")
            thetas.append(w.theta)
            gammas.append(w.gamma)
        if mode in ("diff", "both"):
            realisation = data_from_heisenberg(mu, bounds)
            D = realisation.data
            report.extend(validate_data(D), prefix=f"{prefix}lattice:data:")
            report.extend(check_ses_morphism(realisation.morphism.as_ses_witness(), bounds), prefix=f"{prefix}lattice:")
            report.extend(verify_action_morphisms(D, bounds), prefix=f"{prefix}lattice:action:")
            action = ActionGroup(D)
            actions.append(action)
            actions_maps.append(lambda x, r=realisation, a=action: a.from_heisenberg(r.morphism(x)))

    source = ProductGroup(tuple(sources))
    bounds.require("group_order", source.order, "composed_pipeline_check")
    for path, targets, maps in (("theta", thetas, gammas), ("lattice", actions, actions_maps)):
        if not targets:
            continue
        composite = GroupMorphism(
            source,
            ProductGroup(tuple(targets)),
            lambda x, maps=maps: tuple(f(xi) for f, xi in zip(maps, x)),
            name=f"{path}:composite",
        )
        report.add(is_homomorphism(composite, bounds))
        injective = is_injective(composite)
        report.add(injective)
        if injective:
            report.add(passed(f"{path}:image order", detail=str(source.order)))
    return report
