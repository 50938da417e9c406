from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Mapping, Optional

from nilpotent_actions.errors import BoundExceeded, ConfigError

BOUND_ENV_VAR = "NILPOTENT_ACTIONS_BOUND"


@dataclass(frozen=True)
class Bounds:
    """Size limits for every exhaustive scan in the package.

    Exceeding a bound raises BoundExceeded before the scan starts.
    """

    subgroup_order: int = 512
    multiplications: int = 1_000_000
    group_order: int = 4096
    hermitian_order: int = 729
    embed_source: int = 64
    embed_target: int = 4096
    waring_budget: int = 1_000_000
    theta_order: int = 1_000_000
    cocycle_triples: int = 10_000

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ValueError(f"bound {f.name} must be a positive integer, got {value!r}")

    def require(self, name: str, size: int, what: Optional[str] = None) -> None:
        """Raise BoundExceeded if size is above the named bound."""
        bound = getattr(self, name)
        if size > bound:
            raise BoundExceeded(what or name, size, bound)

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> Bounds:
        """Read overrides from NILPOTENT_ACTIONS_BOUND.

        The variable holds either a bare integer, which raises every bound to
        at least that value, or comma separated ``field=value`` pairs.
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(BOUND_ENV_VAR, "").strip()
        bounds = cls()
        if not raw:
            return bounds
        if raw.isdigit():
            floor = int(raw)
            if floor <= 0:
                raise ConfigError(f"{BOUND_ENV_VAR} must be positive, got {raw!r}")
            return replace(bounds, **{f.name: max(getattr(bounds, f.name), floor) for f in fields(cls)})

        known = {f.name for f in fields(cls)}
        overrides = {}
        for item in raw.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in known or not value.strip().isdigit():
                raise ConfigError(f"invalid {BOUND_ENV_VAR} entry {item!r}")
            overrides[key] = int(value)
        try:
            return replace(bounds, **overrides)
        except ValueError as e:
            raise ConfigError(str(e)) from e


def current_bounds() -> Bounds:
    return Bounds.from_env()
