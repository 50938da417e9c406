"""Tests for the embedding search and the composed pipeline check."""

import pytest

from nilpotent_actions.bounds import Bounds
from nilpotent_actions.config import PipelineConfig
from nilpotent_actions.errors import BoundExceeded, CoprimalityError
from nilpotent_actions.finabel import FinAbGroup
from nilpotent_actions.groups import cyclic_table, dihedral_table, quaternion_table
from nilpotent_actions.heisenberg import HeisenbergGroup, extraspecial
from nilpotent_actions.pipeline import run
from nilpotent_actions.theta import AdmissibleTuple, ThetaGroup
from nilpotent_actions.verify import check_coprimality, composed_pipeline_check, embed_search, is_homomorphism, is_injective


class TestEmbedSearch:
    """Test suite for injective homomorphism search."""

    def test_extraspecial_into_theta(self):
        """3^(1+2) embeds into Θ((3)) with scalars mod 3."""
        f = embed_search(HeisenbergGroup(extraspecial(3)), ThetaGroup(AdmissibleTuple((3,)), 3))
        assert f is not None
        assert is_homomorphism(f)
        assert is_injective(f)

    def test_quaternion_not_in_dihedral(self):
        """Q8 has six elements of order 4 and D4 only two."""
        assert embed_search(quaternion_table(), dihedral_table(4)) is None

    def test_dihedral_not_in_quaternion(self):
        """D4 has five involutions and Q8 one."""
        assert embed_search(dihedral_table(4), quaternion_table()) is None

    def test_klein_four_into_dihedral(self):
        """(Z/2)² sits inside D4."""
        assert embed_search(FinAbGroup((2, 2)), dihedral_table(4)) is not None

    def test_cyclic_not_in_elementary(self):
        """Z/4 has no image in (Z/2)²."""
        assert embed_search(cyclic_table(4), FinAbGroup((2, 2))) is None

    def test_source_bound(self):
        """Sources above embed_source raise BoundExceeded."""
        with pytest.raises(BoundExceeded):
            embed_search(cyclic_table(9), cyclic_table(9), Bounds(embed_source=8))


class TestComposedPipelineCheck:
    """Test suite for the end-to-end oracle."""

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_single_factor(self, p):
        """Every arrow checks out for the extraspecial group of order p³."""
        report = composed_pipeline_check(extraspecial(p))
        assert report.ok, report.failures()
        assert report.get("theta:composite:injective")
        assert report.get("lattice:composite:injective")

    def test_two_factors_birational(self):
        """The product of the p = 2 and p = 3 groups embeds into the product of theta groups."""
        report = composed_pipeline_check([extraspecial(2), extraspecial(3)], mode="birational")
        assert report.ok, report.failures()
        assert report.get("theta:image order").detail == "216"
        assert report.get("lattice:composite:injective") is None

    def test_diff_mode_only(self):
        """diff mode skips the theta path."""
        report = composed_pipeline_check([extraspecial(3)], mode="diff")
        assert report.ok
        assert report.get("theta:composite:homomorphism") is None
        assert report.get("factor0:lattice:action:E:injective")

    def test_coprimality(self):
        """char_exclusion dividing a group order is rejected before any scan."""
        with pytest.raises(CoprimalityError):
            composed_pipeline_check(extraspecial(2), char_exclusion=2)

    def test_check_coprimality_names_the_factor(self):
        """The guard reports the offending factor and order; the pipeline raises the same error."""
        factors = [extraspecial(3), extraspecial(2)]
        with pytest.raises(CoprimalityError, match=r"group\[1\]: characteristic 2 divides \|H\(μ\)\| = 8"):
            check_coprimality(factors, 2)
        with pytest.raises(CoprimalityError, match=r"group\[1\]"):
            run(PipelineConfig(factors=factors, char_exclusion=2))
        check_coprimality(factors, None)
        check_coprimality(factors, 5)

    def test_coprime_characteristic_passes(self):
        """char_exclusion = 5 does not divide 27."""
        assert composed_pipeline_check(extraspecial(3), mode="birational", char_exclusion=5).ok

    def test_unknown_mode(self):
        """Unknown modes are rejected."""
        with pytest.raises(ValueError):
            composed_pipeline_check(extraspecial(2), mode="sideways")
