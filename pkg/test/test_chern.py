"""Tests for even cohomology classes, line-bundle symbols and complement plans."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.polys.domains import QQ

from nilpotent_actions.errors import ConfigError, PreconditionError
from nilpotent_actions.chern import (
    EvenClass,
    LineBundleSymbol,
    VirtualBundleSymbol,
    alpha_d,
    ch_virtual,
    complement_plan,
    exp_trunc,
    r2_bound,
    r2_bound_alt,
    r2_closed_form_ok,
    r3_bound,
    r3_closed_form_ok,
    triviality_certificate,
    wedge,
)

EVEN_KEYS = [(), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (1, 2, 3, 4)]

even_classes = st.dictionaries(st.sampled_from(EVEN_KEYS), st.integers(-3, 3), max_size=5).map(
    lambda terms: EvenClass.from_terms(4, terms)
)


def symplectic(m: int, scale: int = 1) -> LineBundleSymbol:
    """c1 = scale·(e12 + e34 + …) on T^m."""
    return LineBundleSymbol(EvenClass.from_terms(m, {(2 * j + 1, 2 * j + 2): scale for j in range(m // 2)}))


class TestEvenClass:
    """Test suite for the even exterior algebra."""

    def test_parse(self):
        """e12:1,e34:-2 has two degree-2 terms."""
        x = EvenClass.parse("e12:1,e34:-2", 4)
        assert x.as_dict() == {(1, 2): 1, (3, 4): -2}

    def test_parse_reorders_with_sign(self):
        """e21 is -e12."""
        assert EvenClass.parse("e21:3", 2).as_dict() == {(1, 2): -3}

    def test_parse_two_digit_generators(self):
        """Dotted names allow generators above 9."""
        assert EvenClass.parse("e1.10:1/2", 10).as_dict() == {(1, 10): QQ(1, 2)}

    def test_parse_repeated_index_is_zero(self):
        """e11 vanishes."""
        assert EvenClass.parse("e11:5", 2).is_zero()

    def test_parse_empty(self):
        """The empty string is the zero class."""
        assert EvenClass.parse("", 4).is_zero()

    @pytest.mark.parametrize("text", ["e12", "e15:1", "e1:1", "x12:1"])
    def test_parse_errors(self, text):
        """Malformed terms, odd degrees and out-of-range generators are configuration errors."""
        with pytest.raises(ConfigError):
            EvenClass.parse(text, 4)

    def test_square_of_symplectic_class(self):
        """(e12 + e34)² = 2·e1234."""
        c1 = symplectic(4).c1
        assert wedge(c1, c1).as_dict() == {(1, 2, 3, 4): 2}

    def test_mixed_tori_rejected(self):
        """Classes on different tori do not add."""
        with pytest.raises(PreconditionError):
            EvenClass.constant(2, 1) + EvenClass.constant(4, 1)

    @settings(max_examples=50, derandomize=True)
    @given(x=even_classes, y=even_classes, z=even_classes)
    def test_ring_laws(self, x, y, z):
        """The even part is a commutative, associative ring with distributive wedge."""
        assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))
        assert wedge(x, y) == wedge(y, x)
        assert wedge(x, y + z) == wedge(x, y) + wedge(x, z)
        assert x + EvenClass.zero(4) == x
        assert (x - x).is_zero()
        assert wedge(x, EvenClass.constant(4, 1)) == x

    def test_str(self):
        """Classes print with wedge names."""
        assert str(EvenClass.parse("e12:2", 2)) == "2·e1∧e2"
        assert str(EvenClass.zero(2)) == "0"


class TestLineBundles:
    """Test suite for line-bundle symbols and their Chern characters."""

    def test_non_integral_rejected(self):
        """c1 must be integral."""
        with pytest.raises(PreconditionError):
            LineBundleSymbol(EvenClass.parse("e12:1/2", 2))

    def test_degree_four_rejected(self):
        """c1 must have degree 2."""
        with pytest.raises(PreconditionError):
            LineBundleSymbol(EvenClass.parse("e1234:1", 4))

    def test_exp_trunc(self):
        """ch(α) = 1 + c1 + c1²/2 = 1 + c1 + e1234 on T^4."""
        ch = exp_trunc(symplectic(4), 1)
        assert ch.as_dict() == {(): 1, (1, 2): 1, (3, 4): 1, (1, 2, 3, 4): 1}

    def test_exp_trunc_of_power(self):
        """ch(α^⊗t) has degree-2 part t·c1."""
        ch = exp_trunc(symplectic(2), -3)
        assert ch.degree_part(2).as_dict() == {(1, 2): -3}

    def test_ch_virtual(self):
        """α ⊕ α⁻¹ ⊕ trivial has ch = 3 on T^2."""
        symbol = VirtualBundleSymbol(symplectic(2), (1, -1), 1)
        assert ch_virtual(symbol) == EvenClass.constant(2, 3)
        assert symbol.rank == 3

    @settings(max_examples=40, derandomize=True)
    @given(powers=st.lists(st.integers(-4, 4), max_size=6), extra=st.integers(0, 3))
    def test_ch_virtual_is_sum_of_line_bundles(self, powers, extra):
        """The collected form equals the sum of exp(t·c1) over the summands."""
        base = LineBundleSymbol(EvenClass.parse("e12:1,e13:2,e34:-1", 4))
        expected = EvenClass.constant(4, extra)
        for t in powers:
            expected = expected + exp_trunc(base, t)
        assert ch_virtual(VirtualBundleSymbol(base, tuple(powers), extra)) == expected


class TestBounds:
    """Test suite for the rank bounds."""

    def test_values(self):
        """R2(2) = 1, R3(2) = 3, R2(4) = 17 and its alternative reading 26."""
        assert r2_bound(2) == 1
        assert r3_bound(2) == 3
        assert r2_bound(4) == 17
        assert r2_bound_alt(4) == 26

    @pytest.mark.parametrize("m", [2, 4, 6, 8, 10])
    def test_closed_forms(self, m):
        """Both closed-form ceilings hold for positive even m."""
        assert r2_closed_form_ok(m)
        assert r3_closed_form_ok(m)

    def test_r3_closed_form_fails_at_zero(self):
        """R3(0) = 2 exceeds the closed form 1."""
        assert r3_bound(0) == 2
        assert not r3_closed_form_ok(0)


@st.composite
def integral_c1(draw, m: int) -> LineBundleSymbol:
    """A random integral degree-2 class on T^m."""
    keys = list(itertools.combinations(range(1, m + 1), 2))
    terms = draw(st.dictionaries(st.sampled_from(keys), st.integers(-6, 6), max_size=len(keys)))
    return LineBundleSymbol(EvenClass.from_terms(m, terms))


class TestAlphaD:
    """Test suite for α[d] and its divisibility certificate."""

    @pytest.mark.parametrize("m", [2, 4, 6, 8])
    @pytest.mark.parametrize("d", range(1, 101))
    def test_divisibility(self, m, d):
        """ch(α ⊕ α[d]) - rank is divisible by d in every positive degree."""
        symbol, cert = alpha_d(symplectic(m), d, m)
        assert cert.ok, cert.checks.failures()
        assert all(q.is_integral() for q in cert.divisibility_witness.values())
        assert cert.rank == 1 + symbol.rank
        assert symbol.rank <= max(r2_bound(m), r2_bound_alt(m))

    @pytest.mark.parametrize("m", [2, 4, 6, 8])
    @settings(max_examples=50, derandomize=True, deadline=None)
    @given(data=st.data(), d=st.integers(1, 100))
    def test_random_integral_classes(self, m, data, d):
        """Any integral c1 gives an integral certificate."""
        c1 = data.draw(integral_c1(m))
        symbol, cert = alpha_d(c1, d, m)
        assert cert.ok, cert.checks.failures()
        assert symbol.rank <= max(r2_bound(m), r2_bound_alt(m))

    @pytest.mark.parametrize("m", [0, 1])
    def test_low_dimensional_torus(self, m):
        """With ⌊m/2⌋ = 0 there are no congruences and α[d] is empty."""
        symbol, cert = alpha_d(LineBundleSymbol(EvenClass.zero(m)), 1, m)
        assert cert.ok, cert.checks.failures()
        assert symbol.rank == 0
        assert cert.rank == 1

    def test_torus_of_dimension_two(self):
        """On T^2 with d = 1, α[d] = α⁻¹ of rank R2(2) = 1."""
        symbol, _ = alpha_d(symplectic(2), 1, 2)
        assert symbol.powers == (-1,)

    def test_nonsymplectic_class(self):
        """Any integral degree-2 class works."""
        c1 = LineBundleSymbol(EvenClass.parse("e12:2,e13:1,e24:-1", 4))
        _, cert = alpha_d(c1, 2, 4)
        assert cert.ok

    def test_torus_dimension_mismatch(self):
        """c1 must live on T^m."""
        with pytest.raises(PreconditionError):
            alpha_d(symplectic(4), 1, 2)

    def test_d_positive(self):
        """d = 0 is rejected."""
        with pytest.raises(PreconditionError):
            alpha_d(symplectic(2), 0, 2)


class TestComplementPlan:
    """Test suite for the trivialising complement."""

    @pytest.mark.parametrize("m", [2, 4, 6])
    @pytest.mark.parametrize("d", [1, 3])
    def test_rank_and_triviality(self, m, d):
        """β has rank R3(m) and Chern character equal to its rank."""
        cert = complement_plan(symplectic(m, 2), d, m)
        assert cert.ok, cert.checks.failures()
        assert cert.rank == r3_bound(m)
        assert cert.trivial
        assert cert.ch == EvenClass.constant(m, r3_bound(m))

    @pytest.mark.parametrize("m", [0, 1])
    def test_low_dimensional_torus(self, m):
        """T^0 and T^1 get a trivial complement of rank R3(m) = 2."""
        cert = complement_plan(LineBundleSymbol(EvenClass.zero(m)), 1, m)
        assert cert.ok, cert.checks.failures()
        assert cert.rank == r3_bound(m) == 2
        assert cert.trivial

    def test_two_torus(self):
        """R3(2) = 3: α, α⁻¹ and one trivial summand."""
        cert = complement_plan(symplectic(2), 1, 2)
        ranks = {s["label"]: s["rank"] for s in cert.details["summands"]}
        assert cert.rank == 3
        assert ranks == {"α": 1, "α[d]": 1, "α_χ": 0, "trivial^k": 0, "trivial^k'": 1}

    def test_json_carries_waring_certificate(self):
        """The certificate embeds the power-sum construction it used."""
        payload = complement_plan(symplectic(4), 1, 4).to_json()
        assert payload["waring"]["checks"]["congruences"]["ok"] is True
        assert payload["r3"] == r3_bound(4)


class TestTrivialityCertificate:
    """Test suite for the sufficient triviality criterion."""

    def test_constant_class(self):
        """ch = rank with rank ≥ m/2 is trivial."""
        assert triviality_certificate(3, EvenClass.constant(4, 3), 4).trivial

    def test_higher_degree_fails(self):
        """A degree-2 part is not trivial."""
        cert = triviality_certificate(3, EvenClass.parse("e12:1", 4) + 3, 4)
        assert not cert.trivial
        assert not cert.checks.get("ch in degree 0")

    def test_rank_below_stable_range(self):
        """Rank 1 on T^4 is below the stable range."""
        assert not triviality_certificate(1, EvenClass.constant(4, 1), 4).trivial
