"""Tests for run configuration parsing."""

import pytest

from nilpotent_actions.config import (
    PipelineConfig,
    parse_abelian,
    parse_admissible,
    parse_pairing,
    parse_sublattice,
)
from nilpotent_actions.errors import ConfigError, CoprimalityError
from nilpotent_actions.finabel import FinAbGroup
from nilpotent_actions.heisenberg import extraspecial

SAMPLE_CONFIG = """
group:
  - extraspecial: {p: 3}
  - heisenberg:
      A: [4, 2]
      C: [4]
      matrix: [[1, 0], [0, 2]]
rank_bound: 4
char_exclusion: 5
mode: birational
d: 2
admissible:
  - [4, 2]
  - entries: [3]
sublattice:
  n: 1
  H: [[1]]
  c: 2
  lambda: [[2]]
  gamma_denominator: 2
"""


class TestFragments:
    """Test suite for the per-fragment parsers."""

    @pytest.mark.parametrize(
        "data,factors", [({"abelian": [4, 2]}, (4, 2)), ([6, 3], (6, 3)), (5, (5,)), (1, ()), ([], ())]
    )
    def test_abelian(self, data, factors):
        """Abelian groups come as a wrapped list, a bare list or a cyclic order."""
        assert parse_abelian(data).factors == factors

    @pytest.mark.parametrize("data", [[2, 4], [4, 1], "Z/4", [True]])
    def test_abelian_errors(self, data):
        """Non-chains, unit factors and non-integers are rejected."""
        with pytest.raises(ConfigError):
            parse_abelian(data)

    def test_extraspecial(self):
        """{"extraspecial": {p, n}} builds the dot product pairing."""
        assert parse_pairing({"extraspecial": {"p": 3, "n": 2}}) == extraspecial(3, 2)

    @pytest.mark.parametrize(
        "data",
        [
            {"extraspecial": {"p": 4}},
            {"extraspecial": {"p": 3, "exponent": "p^2"}},
            {"extraspecial": {"p": 3, "q": 1}},
            {"torus": {}},
            {"extraspecial": {"p": 3}, "heisenberg": {}},
        ],
    )
    def test_pairing_errors(self, data):
        """Composite p, exponent p² and unknown fields are configuration errors."""
        with pytest.raises(ConfigError):
            parse_pairing(data)

    def test_heisenberg_defaults_b_to_a(self):
        """B defaults to A."""
        mu = parse_pairing({"heisenberg": {"A": [2], "C": [2], "matrix": [[1]]}})
        assert mu.B == FinAbGroup((2,))

    def test_heisenberg_bad_matrix(self):
        """A matrix violating order compatibility is reported against the fragment."""
        with pytest.raises(ConfigError, match="group.heisenberg.matrix"):
            parse_pairing({"heisenberg": {"A": [2], "C": [4], "matrix": [[1]]}})

    def test_admissible_forms(self):
        """A bare list and an entries mapping are both accepted."""
        assert parse_admissible([4, 2]).entries == (4, 2)
        assert parse_admissible({"entries": [3], "char_exclusion": 2}).char_exclusion == 2

    def test_admissible_coprimality(self):
        """The inherited characteristic is checked against d_t."""
        with pytest.raises(CoprimalityError):
            parse_admissible([4, 2], char_exclusion=2)

    def test_admissible_chain(self):
        """A non-chain is a configuration error."""
        with pytest.raises(ConfigError):
            parse_admissible([2, 4])

    def test_sublattice(self):
        """Gaussian entries may be given as [re, im] pairs or "p/q" strings."""
        D = parse_sublattice(
            {"n": 2, "H": [[1, [0, "1/2"]], [[0, "-1/2"], 1]], "c": 2, "lambda": [[2, 0], [0, 2]], "gamma_denominator": 4}
        )
        assert D.n == 2
        assert D.H[0][1].y == D.H[1][0].y * -1

    @pytest.mark.parametrize(
        "data",
        [
            {"n": 1, "H": [[1, 0]], "c": 2, "lambda": [[2]], "gamma_denominator": 2},
            {"n": 1, "H": [[[1, 2, 3]]], "c": 2, "lambda": [[2]], "gamma_denominator": 2},
            {"n": 1, "H": [[1]], "c": 0, "lambda": [[2]], "gamma_denominator": 2},
            {"n": 1, "H": [[1]], "c": 2, "lambda": [[2]]},
        ],
    )
    def test_sublattice_errors(self, data):
        """Shape, entry and range problems are configuration errors."""
        with pytest.raises(ConfigError):
            parse_sublattice(data)


class TestPipelineConfig:
    """Test suite for whole run configurations."""

    def test_from_yaml(self, tmp_path):
        """Every section of a run configuration is read."""
        path = tmp_path / "run.yaml"
        path.write_text(SAMPLE_CONFIG)
        config = PipelineConfig.from_yaml(str(path))
        assert len(config.factors) == 2
        assert config.factors[0] == extraspecial(3)
        assert config.rank_bound == 4
        assert config.char_exclusion == 5
        assert config.mode == "birational"
        assert config.d == 2
        assert [delta.entries for delta in config.admissible] == [(4, 2), (3,)]
        assert all(delta.char_exclusion == 5 for delta in config.admissible)
        assert len(config.sublattice) == 1

    def test_defaults(self):
        """Only the group is needed."""
        config = PipelineConfig.from_dict({"group": {"extraspecial": {"p": 2}}})
        assert config.mode == "both"
        assert config.d == 1
        assert config.rank_bound is None
        assert config.admissible == []

    def test_missing_file(self, tmp_path):
        """An unreadable file is a configuration error."""
        with pytest.raises(ConfigError):
            PipelineConfig.from_yaml(str(tmp_path / "missing.yaml"))

    def test_invalid_yaml(self, tmp_path):
        """Malformed YAML is a configuration error."""
        path = tmp_path / "broken.yaml"
        path.write_text("group: [unclosed")
        with pytest.raises(ConfigError):
            PipelineConfig.from_yaml(str(path))

    @pytest.mark.parametrize(
        "data",
        [
            ["not", "a", "mapping"],
            {"group": {"extraspecial": {"p": 2}}, "colour": "blue"},
            {"group": {"extraspecial": {"p": 2}}, "mode": "sideways"},
            {"group": {"extraspecial": {"p": 2}}, "d": 0},
            {"group": {"extraspecial": {"p": 2}}, "char_exclusion": 4},
            {"group": {"extraspecial": {"p": 2}}, "rank_bound": "two"},
        ],
    )
    def test_invalid_configs(self, data):
        """Unknown keys and out-of-range values are configuration errors."""
        with pytest.raises(ConfigError):
            PipelineConfig.from_dict(data)

    def test_require_factors(self):
        """A run needs at least one group factor."""
        with pytest.raises(ConfigError):
            PipelineConfig.from_dict({"admissible": [[2]]}).require_factors()
