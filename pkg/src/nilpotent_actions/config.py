from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import yaml
from sympy import isprime

from nilpotent_actions.errors import ConfigError, CoprimalityError
from nilpotent_actions.finabel import FinAbGroup
from nilpotent_actions.heisenberg import BilinearPairing, extraspecial
from nilpotent_actions.lattice import IsotropicSublatticeData, gaussian
from nilpotent_actions.theta import AdmissibleTuple
from nilpotent_actions.verify import MODES

_PIPELINE_KEYS = {"group", "rank_bound", "char_exclusion", "mode", "d", "admissible", "sublattice"}


def _unwrap(data: Any, key: str) -> Any:
    if isinstance(data, dict) and set(data) == {key}:
        return data[key]
    return data


def _int(value: Any, key: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key}: must be at least {minimum}, got {value}")
    return value


def _fields(data: Any, key: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{key}: expected a mapping, got {type(data).__name__}")
    missing = required - set(data)
    if missing:
        raise ConfigError(f"{key}: missing field(s) {sorted(missing)}")
    unknown = set(data) - required - set(optional)
    if unknown:
        raise ConfigError(f"{key}: unknown field(s) {sorted(unknown)}")
    return data


def parse_abelian(data: Any, key: str = "abelian") -> FinAbGroup:
    """{"abelian": [d1, d2, ...]}, a bare list of invariant factors, or an int for a cyclic group."""
    data = _unwrap(data, "abelian")
    if isinstance(data, int) and not isinstance(data, bool):
        return FinAbGroup.cyclic(_int(data, key, minimum=1))
    if not isinstance(data, list):
        raise ConfigError(f"{key}: expected a list of invariant factors, got {data!r}")
    factors = [_int(d, f"{key}[{i}]") for i, d in enumerate(data)]
    try:
        return FinAbGroup(tuple(factors))
    except ValueError as e:
        raise ConfigError(f"{key}: {e}") from e


def _parse_heisenberg(data: Any, key: str) -> BilinearPairing:
    data = _fields(data, key, {"A", "C", "matrix"}, {"B"})
    A = parse_abelian(data["A"], f"{key}.A")
    B = parse_abelian(data["B"], f"{key}.B") if "B" in data else A
    C = parse_abelian(data["C"], f"{key}.C")
    matrix = data["matrix"]
    if not isinstance(matrix, list) or not all(isinstance(row, list) for row in matrix):
        raise ConfigError(f"{key}.matrix: expected a list of rows")
    try:
        return BilinearPairing(A, B, C, tuple(tuple(row) for row in matrix))
    except (ValueError, TypeError) as e:
        raise ConfigError(f"{key}.matrix: {e}") from e


def _parse_extraspecial(data: Any, key: str) -> BilinearPairing:
    data = _fields(data, key, {"p"}, {"n", "exponent"})
    p = _int(data["p"], f"{key}.p", minimum=2)
    if not isprime(p):
        raise ConfigError(f"{key}.p: must be prime, got {p}")
    n = _int(data.get("n", 1), f"{key}.n", minimum=1)
    # exponent p² groups are not Heisenberg groups of a pairing on (Z/p)^n
    exponent = data.get("exponent", "p")
    if exponent != "p":
        raise ConfigError(f"{key}.exponent: only exponent \"p\" is supported, got {exponent!r}")
    return extraspecial(p, n)


def parse_pairing(data: Any, key: str = "group") -> BilinearPairing:
    """A {"heisenberg": {...}} or {"extraspecial": {...}} factor fragment."""
    if not isinstance(data, dict) or len(data) != 1:
        raise ConfigError(f"{key}: expected exactly one of 'heisenberg' or 'extraspecial'")
    (kind, body), = data.items()
    if kind == "heisenberg":
        return _parse_heisenberg(body, f"{key}.heisenberg")
    if kind == "extraspecial":
        return _parse_extraspecial(body, f"{key}.extraspecial")
    raise ConfigError(f"{key}: unknown group kind {kind!r}")


def parse_admissible(
    data: Any, key: str = "admissible", char_exclusion: Optional[int] = None
) -> AdmissibleTuple:
    """{"entries": [...], "char_exclusion": p} or a bare list of entries."""
    data = _unwrap(data, "admissible")
    if isinstance(data, list):
        data = {"entries": data}
    data = _fields(data, key, {"entries"}, {"char_exclusion"})
    entries = data["entries"]
    if not isinstance(entries, list):
        raise ConfigError(f"{key}.entries: expected a list, got {entries!r}")
    entries = [_int(d, f"{key}.entries[{i}]") for i, d in enumerate(entries)]
    p = data.get("char_exclusion", char_exclusion)
    if p is not None:
        p = _int(p, f"{key}.char_exclusion", minimum=2)
    try:
        return AdmissibleTuple(tuple(entries), p)
    except CoprimalityError:
        raise
    except ValueError as e:
        raise ConfigError(f"{key}: {e}") from e


def _gaussian_entry(value: Any, key: str):
    if isinstance(value, list) and len(value) != 2:
        raise ConfigError(f"{key}: a Gaussian rational is a [re, im] pair, got {value!r}")
    parts = value if isinstance(value, list) else [value]
    try:
        return gaussian(*parts)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ConfigError(f"{key}: cannot read {value!r} as a rational") from e


def parse_sublattice(data: Any, key: str = "sublattice") -> IsotropicSublatticeData:
    """{"n", "H", "c", "lambda", "gamma_denominator"}; H entries are rationals or [re, im] pairs."""
    data = _unwrap(data, "sublattice")
    data = _fields(data, key, {"n", "H", "c", "lambda", "gamma_denominator"})
    n = _int(data["n"], f"{key}.n", minimum=0)
    c = _int(data["c"], f"{key}.c", minimum=1)
    g = _int(data["gamma_denominator"], f"{key}.gamma_denominator", minimum=1)
    H = data["H"]
    if not isinstance(H, list) or len(H) != n or any(not isinstance(row, list) or len(row) != n for row in H):
        raise ConfigError(f"{key}.H: expected a {n}×{n} matrix")
    H = tuple(
        tuple(_gaussian_entry(z, f"{key}.H[{j}][{k}]") for k, z in enumerate(row)) for j, row in enumerate(H)
    )
    lam = data["lambda"]
    if not isinstance(lam, list) or len(lam) != n or any(not isinstance(row, list) or len(row) != n for row in lam):
        raise ConfigError(f"{key}.lambda: expected a {n}×{n} integer matrix")
    lam = tuple(tuple(_int(x, f"{key}.lambda[{j}][{k}]") for k, x in enumerate(row)) for j, row in enumerate(lam))
    try:
        return IsotropicSublatticeData(n, H, c, lam, g)
    except ValueError as e:
        raise ConfigError(f"{key}: {e}") from e


def _as_list(data: Any) -> list:
    if data is None:
        return []
    return data if isinstance(data, list) else [data]


@dataclass
class PipelineConfig:
    """A pipeline run: the Heisenberg factors of G and how to treat them."""
    factors: list[BilinearPairing]
    rank_bound: Optional[int] = None
    char_exclusion: Optional[int] = None
    mode: str = "both"
    d: int = 1
    admissible: list[AdmissibleTuple] = field(default_factory=list)
    sublattice: list[IsotropicSublatticeData] = field(default_factory=list)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode: must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.d < 1:
            raise ConfigError(f"d: must be positive, got {self.d}")
        if self.rank_bound is not None and self.rank_bound < 0:
            raise ConfigError(f"rank_bound: must be non-negative, got {self.rank_bound}")
        if self.char_exclusion is not None and not isprime(self.char_exclusion):
            raise ConfigError(f"char_exclusion: must be prime, got {self.char_exclusion}")

    @classmethod
    def from_yaml(cls, yaml_path: str) -> PipelineConfig:
        """Load a run configuration from a YAML (or JSON) file."""
        try:
            with open(yaml_path, "r") as f:
                data = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config {yaml_path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"config {yaml_path} is not valid YAML: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Any) -> PipelineConfig:
        if not isinstance(data, dict):
            raise ConfigError("config: expected a mapping at the top level")
        unknown = set(data) - _PIPELINE_KEYS
        if unknown:
            raise ConfigError(f"config: unknown key(s) {sorted(unknown)}")

        # Scalars first, so that fragments can inherit char_exclusion
        rank_bound = data.get("rank_bound")
        if rank_bound is not None:
            rank_bound = _int(rank_bound, "rank_bound", minimum=0)
        char_exclusion = data.get("char_exclusion")
        if char_exclusion is not None:
            char_exclusion = _int(char_exclusion, "char_exclusion", minimum=2)
        d = _int(data.get("d", 1), "d", minimum=1)
        mode = data.get("mode", "both")

        factors = [parse_pairing(item, f"group[{i}]") for i, item in enumerate(_as_list(data.get("group")))]

        admissible = [
            parse_admissible(item, f"admissible[{i}]", char_exclusion)
            for i, item in enumerate(_as_list(data.get("admissible")))
        ]

        sublattice = [
            parse_sublattice(item, f"sublattice[{i}]") for i, item in enumerate(_as_list(data.get("sublattice")))
        ]

        return cls(
            factors=factors,
            rank_bound=rank_bound,
            char_exclusion=char_exclusion,
            mode=mode,
            d=d,
            admissible=admissible,
            sublattice=sublattice,
        )

    def require_factors(self) -> list[BilinearPairing]:
        if not self.factors:
            raise ConfigError("group: at least one factor is required")
        return self.factors
