"""Tests for target-space parameters, pipeline runs and the JSON documents."""

import json

import pytest

from nilpotent_actions.bounds import Bounds
from nilpotent_actions.config import PipelineConfig, parse_pairing
from nilpotent_actions.errors import BoundExceeded, ConfigError, CoprimalityError, PreconditionError
from nilpotent_actions.heisenberg import extraspecial
from nilpotent_actions.lattice import IsotropicSublatticeData, gaussian
from nilpotent_actions.pipeline import (
    _box_radius,
    chern_document,
    cocycle_report,
    determine_rank,
    document_summary,
    dumps,
    grassmann_dim,
    lattice_document,
    manifold_params,
    run,
    stiefel_dim,
    theta_document,
    variety_params,
    waring_document,
)
from nilpotent_actions.theta import AdmissibleTuple


def extraspecial_config(p: int, **kwargs) -> PipelineConfig:
    return PipelineConfig(factors=[extraspecial(p)], **kwargs)


class TestVarietyParams:
    """Test suite for T^(r⌊r/2⌋) × P^r."""

    @pytest.mark.parametrize("r,expected", [(2, (2, 2)), (1, (0, 1)), (3, (3, 3)), (0, (0, 0)), (4, (8, 4))])
    def test_values(self, r, expected):
        """Torus power r⌊r/2⌋ and projective dimension r."""
        assert variety_params(r) == expected

    def test_negative(self):
        """Negative ranks are rejected."""
        with pytest.raises(PreconditionError):
            variety_params(-1)


class TestManifoldParams:
    """Test suite for the differentiable target."""

    def test_rank_two(self):
        """r = 2 gives T^4 and t = R3(2) = 3."""
        params = manifold_params(2)
        assert params.torus_dim == 4
        assert params.t == 3

    def test_rank_zero(self):
        """r = 0 gives the point torus."""
        assert manifold_params(0).torus_dim == 0

    def test_rank_four(self):
        """r = 4 gives T^16."""
        assert manifold_params(4).torus_dim == 16

    def test_fiber_menu(self):
        """Stiefel choices use C^t and Grassmann choices C^(t+1)."""
        menu = manifold_params(2).to_json()["fiber_choices"]
        stiefel = [c for c in menu if c["kind"] == "stiefel"]
        grassmann = [c for c in menu if c["kind"] == "grassmann"]
        assert [c["k"] for c in stiefel] == [1, 2, 3]
        assert [c["k"] for c in grassmann] == [1, 2, 3, 4]
        assert all(c["ambient"] == 4 for c in grassmann)

    @pytest.mark.parametrize("k,t,dim", [(1, 1, 1), (1, 3, 5), (3, 3, 9), (2, 4, 12)])
    def test_stiefel_dim(self, k, t, dim):
        """dim_C Stiefel_k(C^t) = k(2t - k)."""
        assert stiefel_dim(k, t) == dim

    @pytest.mark.parametrize("k,t,dim", [(1, 4, 3), (2, 4, 4), (4, 4, 0)])
    def test_grassmann_dim(self, k, t, dim):
        """dim_C Gr_k(C^t) = k(t - k)."""
        assert grassmann_dim(k, t) == dim

    def test_out_of_range(self):
        """k must lie in 1..t."""
        with pytest.raises(PreconditionError):
            stiefel_dim(4, 3)
        with pytest.raises(PreconditionError):
            grassmann_dim(0, 3)


class TestDetermineRank:
    """Test suite for the rank bound."""

    def test_computed(self):
        """Without a declaration the rank of H(μ) is computed."""
        r, source, computed = determine_rank([extraspecial(2)], None, Bounds())
        assert (r, source, computed) == (2, "computed", 2)

    def test_declared_wins(self):
        """A declared bound is used as given."""
        r, source, computed = determine_rank([extraspecial(2)], 5, Bounds())
        assert (r, source, computed) == (5, "declared", 2)

    def test_too_large_to_compute(self):
        """Without a declaration a large group is a configuration error."""
        with pytest.raises(ConfigError):
            determine_rank([extraspecial(5)], None, Bounds(subgroup_order=64))


class TestRun:
    """Test suite for end-to-end pipeline runs."""

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_extraspecial(self, p):
        """Every check passes for the extraspecial group of order p³."""
        report = run(extraspecial_config(p))
        assert report.ok, report.verification.failures()
        assert report.input_summary["rank"] == 2
        assert report.input_summary["order"] == p**3
        assert report.variety_params["torus_power"] == 2
        assert report.manifold_params["torus_dim"] == 4
        entry = report.per_factor[0]
        assert entry["admissible_tuple"]["entries"] == [p]
        assert entry["theta_modulus"] == p
        assert entry["fiber_rank"] == 3
        assert entry["lattice_data_digest"] == entry["lattice_data"]["digest"]

    def test_byte_identical(self):
        """Repeated runs serialise to the same bytes."""
        first = dumps(run(extraspecial_config(3)).to_json())
        second = dumps(run(extraspecial_config(3)).to_json())
        assert first == second

    def test_envelope(self):
        """The report carries its schema name and version."""
        document = json.loads(dumps(run(extraspecial_config(2), Bounds()).to_json()))
        assert document["schema"] == "nilpotent-actions/pipeline-report"
        assert document["version"] == 1
        assert document["ok"] is True

    def test_characteristic_two(self):
        """char_exclusion = 2 with a 2-group is a coprimality error."""
        with pytest.raises(CoprimalityError):
            run(extraspecial_config(2, char_exclusion=2))

    def test_declared_bound_too_small(self):
        """A declared bound below the computed rank fails its check."""
        report = run(extraspecial_config(3, rank_bound=1, mode="birational"))
        assert not report.ok
        assert not report.verification.get("rank bound ≥ rank")
        assert "failed: rank bound ≥ rank" in report.summary()

    def test_birational_mode_skips_lattice(self):
        """birational mode leaves the lattice entries empty."""
        entry = run(extraspecial_config(3, mode="birational")).per_factor[0]
        assert entry["lattice_data"] is None
        assert entry["chern_certificate"] is None

    def test_trivial_factor_differentiable(self):
        """A factor with trivial A lives on the point torus and passes in diff mode."""
        mu = parse_pairing({"heisenberg": {"A": [], "C": [2], "matrix": []}})
        report = run(PipelineConfig(factors=[mu], mode="diff"))
        assert report.ok, report.verification.failures()
        entry = report.per_factor[0]
        assert entry["fiber_rank"] == 2
        assert entry["chern_certificate"]["rank"] == 2

    def test_no_factors(self):
        """A run without factors is a configuration error."""
        with pytest.raises(ConfigError):
            run(PipelineConfig(factors=[]))


class TestDocuments:
    """Test suite for the single-stage documents."""

    def test_waring_document(self):
        """The Waring document wraps the certificate and the optional minimal search."""
        document = waring_document(2, [1], 5, minimal_cap=4)
        assert document["schema"] == "nilpotent-actions/waring"
        assert document["ok"]
        assert document["minimal"] is not None
        assert document_summary(document) == "waring: PASS"

    def test_chern_document(self):
        """The Chern document certifies the complement on T^2."""
        document = chern_document(2, "e12:1", 1)
        assert document["ok"]
        assert document["certificate"]["rank"] == 3

    def test_chern_document_point_torus(self):
        """dim 0 with the empty class certifies the rank-2 complement."""
        document = chern_document(0, "", 1)
        assert document["ok"]
        assert document["certificate"]["rank"] == 2

    def test_chern_document_rejects_bad_class(self):
        """A malformed class is a configuration error."""
        with pytest.raises(ConfigError):
            chern_document(2, "e12", 1)

    def test_theta_document(self):
        """Factors and admissible tuples are checked together."""
        config = extraspecial_config(3, admissible=[AdmissibleTuple((2, 2)), AdmissibleTuple(())])
        document = theta_document(config)
        assert document["ok"], document_summary(document)
        assert [entry["order"] for entry in document["admissible"]] == [32, 1]

    def test_lattice_document(self):
        """Realised factors and declared fragments are checked together."""
        fragment = IsotropicSublatticeData(1, ((gaussian(1),),), 2, ((2,),), 2)
        document = lattice_document(extraspecial_config(2, sublattice=[fragment]))
        assert document["ok"], document_summary(document)
        assert "mu" in document["sublattice"][0]

    def test_lattice_document_reports_invalid_fragment(self):
        """An invalid fragment fails without stopping the run."""
        fragment = IsotropicSublatticeData(1, ((gaussian(1),),), 2, ((3,),), 2)
        document = lattice_document(extraspecial_config(2, sublattice=[fragment]))
        assert not document["ok"]
        assert "sublattice[0]:data:lattice pairing" in document_summary(document)
        assert "mu" not in document["sublattice"][0]


def test_cocycle_report_scans_full_box():
    """With c = 1 the box [-2, 2] and the whole (1/2)-grid fit the default bound."""
    D = IsotropicSublatticeData(1, ((gaussian(1),),), 1, ((1,),), 1)
    report = cocycle_report(D, Bounds())
    assert report.ok
    assert [c.name for c in report.checks] == ["chi", "f", "rho", "multiplier law"]
    assert report.get("chi").detail == "radius 2 of 2, 2500 triples"


def test_cocycle_report_default_bound():
    """The line data with c = 2 covers the box of radius 2 by default."""
    D = IsotropicSublatticeData(1, ((gaussian(1),),), 2, ((2,),), 2)
    report = cocycle_report(D, Bounds())
    assert report.ok
    assert report.get("f").detail == "radius 2 of 4, 10000 triples"


def test_cocycle_report_full_box_with_raised_bound():
    """Raising cocycle_triples restores the full box [-2c, 2c]."""
    D = IsotropicSublatticeData(1, ((gaussian(1),),), 2, ((2,),), 2)
    assert _box_radius(D, Bounds(cocycle_triples=81**2 * 16)) == 4


def test_cocycle_report_shrinks_to_bound():
    """A small bound scans a smaller box and says so."""
    D = IsotropicSublatticeData(1, ((gaussian(1),),), 2, ((2,),), 2)
    report = cocycle_report(D, Bounds(cocycle_triples=2000))
    assert report.ok
    assert report.get("rho").detail == "radius 1 of 4, 1296 triples"


def test_cocycle_report_bound_exceeded():
    """Without room for the unit box the scan is refused."""
    D = IsotropicSublatticeData(1, ((gaussian(1),),), 2, ((2,),), 2)
    with pytest.raises(BoundExceeded):
        cocycle_report(D, Bounds(cocycle_triples=100))


def test_cocycle_report_corrupted_data():
    """A non-Hermitian form fails with the first failing triple as witness."""
    D = IsotropicSublatticeData(1, ((gaussian(1, 1),),), 2, ((2,),), 2)
    report = cocycle_report(D, Bounds(cocycle_triples=2000))
    assert not report.get("f")
    assert len(report.get("f").witness) == 4
