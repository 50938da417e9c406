"""Tests for power-sum multisets."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilpotent_actions.bounds import Bounds
from nilpotent_actions.errors import BoundExceeded, PreconditionError
from nilpotent_actions.waring import (
    WaringMultiset,
    canonical_residue,
    congruences_hold,
    negone_powers,
    r1_bound,
    waring_extend,
    waring_minimal,
)


class TestNegonePowers:
    """Test suite for sums of k-th powers equal to -1."""

    @pytest.mark.parametrize("k,m", [(k, m) for k in range(1, 5) for m in range(1, 51)])
    def test_sum_and_size(self, k, m):
        """The k-th powers sum to -1 mod m with at most 4k terms."""
        entries = negone_powers(k, m)
        assert sum(pow(x, k, m) for x in entries) % m == (-1) % m
        assert 1 <= len(entries) <= 4 * k

    def test_squares_mod_5(self):
        """-1 ≡ 2² mod 5 needs a single square."""
        assert negone_powers(2, 5) == (2,)

    def test_squares_mod_3(self):
        """-1 is not a square mod 3 but 1 + 1 is."""
        assert negone_powers(2, 3) == (1, 1)

    def test_entries_sorted_minimal(self):
        """The result is sorted and no shorter multiset exists."""
        entries = negone_powers(3, 9)
        assert list(entries) == sorted(entries)
        for size in range(1, len(entries)):
            assert not any(
                sum(x**3 for x in combo) % 9 == 8 for combo in itertools.combinations_with_replacement(range(9), size)
            )

    def test_rejects_bad_arguments(self):
        """k and m must be positive."""
        with pytest.raises(PreconditionError):
            negone_powers(0, 5)


class TestWaringExtend:
    """Test suite for the product construction."""

    def test_degree_one(self):
        """n = 1 appends -ΣS."""
        cert = waring_extend(1, [1, 2], 7)
        assert cert.output.entries == (-3, 1, 2)
        assert cert.ok

    def test_empty_input(self):
        """An empty S gives the empty multiset."""
        cert = waring_extend(3, [], 11)
        assert len(cert.output) == 0
        assert cert.ok

    def test_degree_zero(self):
        """n = 0 gives the empty multiset for any S and still passes."""
        cert = waring_extend(0, [1, 3], 7)
        assert cert.output.entries == ()
        assert cert.ok, cert.checks.failures()
        assert cert.checks.get("contains S").detail == "n = 0, T is empty"

    def test_modulus_one(self):
        """Every multiset satisfies the congruences modulo 1."""
        cert = waring_extend(2, [2, 5], 1)
        assert cert.ok
        assert cert.output.contains([2, 5])

    def test_trace_records_factors(self):
        """The trace carries T_1 and one P_k, T_k pair per degree."""
        cert = waring_extend(3, [1], 13)
        assert set(cert.trace) == {"T_1", "P_2", "T_2", "P_3", "T_3"}

    def test_r1_bound(self):
        """R1(n, m) = (m + 1)·∏_{k=2}^n (4k + 1)."""
        assert r1_bound(1, 3) == 4
        assert r1_bound(2, 1) == 18
        assert r1_bound(3, 2) == 3 * 9 * 13

    @settings(max_examples=200, derandomize=True, deadline=None)
    @given(
        n=st.integers(0, 4),
        delta=st.integers(1, 50),
        S=st.lists(st.integers(-5, 5), max_size=3),
    )
    def test_congruences(self, n, delta, S):
        """T ⊇ S when n ≥ 1, all power sums up to n vanish mod δ and |T| ≤ R1."""
        cert = waring_extend(n, S, delta)
        T = cert.output
        assert T.contains(S) or n == 0
        assert congruences_hold(T.entries, n, delta)
        assert len(T) <= cert.bound
        assert cert.ok, cert.checks.failures()

    @pytest.mark.parametrize("n", range(0, 5))
    @pytest.mark.parametrize("delta", range(1, 51))
    def test_sweep(self, n, delta):
        """Every S ⊆ [-5, 5] with |S| ≤ 3 for n ≤ 2, and |S| ≤ 1 above."""
        largest = 3 if n <= 2 else 1
        for size in range(largest + 1):
            for S in itertools.combinations(range(-5, 6), size):
                cert = waring_extend(n, S, delta)
                assert cert.ok, (S, cert.checks.failures())
                assert len(cert.output) <= r1_bound(n, size)

    def test_to_json(self):
        """The certificate reports size, bound and per-check results."""
        payload = waring_extend(2, [1], 5).to_json()
        assert payload["size"] == len(payload["entries"])
        assert payload["checks"]["congruences"]["ok"] is True


class TestWaringMinimal:
    """Test suite for the bounded minimal search."""

    def test_degree_one_needs_one_extra(self):
        """S = {1} mod 5 needs one extra entry, -1 in the search order."""
        T = waring_minimal(1, [1], 5, 4)
        assert T.entries == (-1, 1)

    def test_already_valid(self):
        """A valid S is returned unchanged."""
        assert waring_minimal(2, [1, -1, 2, -2], 5, 4).entries == (-2, -1, 1, 2)

    def test_cap_too_small(self):
        """None when no multiset fits under the cap."""
        assert waring_minimal(2, [1], 7, 1) is None

    def test_budget(self):
        """The search budget is checked before enumeration."""
        with pytest.raises(BoundExceeded):
            waring_minimal(3, [1], 50, 6, Bounds(waring_budget=1000))

    @settings(max_examples=30, derandomize=True)
    @given(n=st.integers(1, 3), delta=st.integers(2, 6), S=st.lists(st.integers(-5, 5), min_size=1, max_size=2))
    def test_never_larger_than_product_construction(self, n, delta, S):
        """A minimal multiset, when found under the product size, is valid and no larger."""
        cert = waring_extend(n, S, delta)
        cap = min(len(cert.output), len(S) + 3)
        T = waring_minimal(n, S, delta, cap)
        if T is not None:
            assert T.is_valid()
            assert T.contains(S)
            assert len(T) <= len(cert.output)


def test_canonical_residue():
    """Residues are shown in (-δ/2, δ/2]."""
    assert [canonical_residue(t, 5) for t in range(5)] == [0, 1, 2, -2, -1]
    assert canonical_residue(2, 4) == 2


def test_display():
    """Displayed entries use signed residues."""
    assert WaringMultiset((4, 6, 1), 5, 1).display() == [-1, 1, 1]
