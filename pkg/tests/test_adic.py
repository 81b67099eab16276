"""Tests for the adic module."""
import numpy as np
import pytest

from arithdyn.adic import (
    AdicPath,
    Extremal,
    Level,
    MarkovCompactum,
    check_path,
    iterate,
    mixed_radix,
    odometer_equivalence_check,
    predecessor,
    sample_path,
    successor,
)
from arithdyn.errors import InadmissibleError, OutOfRangeError, SpecParseError


class TestCompacta:
    """Tests for building Markov compacta."""

    def test_level_order_must_be_permutation(self):
        """Orders list every digit once."""
        with pytest.raises(SpecParseError):
            Level(3, (0, 0, 1))

    def test_descending(self):
        """A descending level ranks its largest digit first."""
        assert Level.descending(3).order == (2, 1, 0)
        assert Level.descending(3).rank(2) == 0

    def test_non_square_stationary(self):
        """A stationary compactum needs a square matrix."""
        with pytest.raises(SpecParseError):
            MarkovCompactum.stationary_from([[1, 1, 1], [1, 1, 1]])

    def test_dead_row(self):
        """A digit with no allowed follower is rejected."""
        with pytest.raises(SpecParseError):
            MarkovCompactum.from_levels([2], [[[1, 0], [0, 0]]])

    def test_shape_mismatch(self):
        """Matrix shapes must chain with the level sizes."""
        with pytest.raises(SpecParseError):
            MarkovCompactum.from_levels([2, 3], [np.ones((2, 2)), np.ones((3, 3))])

    def test_json(self):
        """Descriptions survive a trip through JSON."""
        odometer = MarkovCompactum.full_odometer([2, 3, 2])
        assert MarkovCompactum.from_json(odometer.to_json()).to_json() == odometer.to_json()
        assert MarkovCompactum.from_json({"kind": "golden"}).name == "golden"

    def test_json_missing_field(self):
        """Missing fields are reported."""
        with pytest.raises(SpecParseError):
            MarkovCompactum.from_json({"kind": "odometer"})

    def test_levels_start_at_one(self):
        """Level 0 does not exist."""
        with pytest.raises(IndexError):
            MarkovCompactum.golden().level(0)


class TestPaths:
    """Tests for admissibility of path prefixes."""

    def test_golden_forbids_adjacent_ones(self):
        """1 may only be followed by 0."""
        with pytest.raises(InadmissibleError) as exc_info:
            check_path(AdicPath((0, 1, 1)), MarkovCompactum.golden())
        assert exc_info.value.position == 1

    def test_alphabet(self):
        """Digits outside the alphabet are located."""
        with pytest.raises(InadmissibleError) as exc_info:
            check_path(AdicPath((2,)), MarkovCompactum.golden())
        assert exc_info.value.position == 0

    def test_sample_path_is_admissible(self, rng):
        """Random paths follow the incidence rule."""
        golden = MarkovCompactum.golden()
        path = sample_path(golden, 30, rng)
        assert path.depth == 30
        check_path(path, golden)


class TestAdicTransformation:
    """Tests for successor and predecessor."""

    def test_golden_counts_in_zeckendorf(self):
        """Eight steps from zero enumerate N = 0..7 with weights 1, 2, 3, 5."""
        orbit = iterate(AdicPath.zero(4), MarkovCompactum.golden(), 8)
        assert [p.digits for p in orbit.paths] == [
            (0, 0, 0, 0),
            (1, 0, 0, 0),
            (0, 1, 0, 0),
            (0, 0, 1, 0),
            (1, 0, 1, 0),
            (0, 0, 0, 1),
            (1, 0, 0, 1),
            (0, 1, 0, 1),
        ]
        assert orbit.stopped == Extremal.MAXIMAL

    def test_predecessor_inverts_successor(self):
        """Stepping back undoes a step."""
        golden = MarkovCompactum.golden()
        path = AdicPath((1, 0, 1, 0, 0))
        assert predecessor(successor(path, golden), golden) == path

    def test_backwards(self):
        """Negative step counts run the inverse."""
        orbit = iterate(AdicPath((0, 1, 0, 1)), MarkovCompactum.golden(), -8)
        assert orbit.paths[-1] == AdicPath.zero(4)
        assert orbit.stopped == Extremal.MINIMAL

    def test_zero_is_minimal(self):
        """The zero path has no predecessor."""
        assert predecessor(AdicPath.zero(3), MarkovCompactum.golden()) == Extremal.MINIMAL

    def test_descending_order(self):
        """With order 1 < 0 the successor of (1, 0) is (0, 0)."""
        compactum = MarkovCompactum.stationary_from([[1, 1], [1, 1]], order=(1, 0))
        assert successor(AdicPath((1, 0)), compactum) == AdicPath((0, 0))
        assert successor(AdicPath((0, 0)), compactum) == Extremal.MAXIMAL

    def test_non_stationary_levels(self):
        """Level sizes may change with the level."""
        compactum = MarkovCompactum.from_levels([2, 3], [np.ones((2, 3)), np.ones((3, 3))])
        assert successor(AdicPath((1, 0)), compactum) == AdicPath((0, 1))
        assert successor(AdicPath((1, 2)), compactum) == Extremal.MAXIMAL


class TestOdometer:
    """Tests for the mixed-radix odometer."""

    def test_mixed_radix(self):
        """11 = 1 + 2*2 + 6*1 in radices (2, 3, 2)."""
        assert mixed_radix(11, (2, 3, 2)) == (1, 2, 1)

    def test_mixed_radix_overflow(self):
        """12 does not fit in radices (2, 3, 2)."""
        with pytest.raises(OutOfRangeError):
            mixed_radix(12, (2, 3, 2))

    def test_equivalence(self):
        """N successor steps reach the mixed-radix digits of N."""
        assert odometer_equivalence_check((2, 3, 2), 11)

    def test_equivalence_range(self):
        """n_max must fit in the radices."""
        with pytest.raises(OutOfRangeError):
            odometer_equivalence_check((2, 3, 2), 12)

    def test_top_is_maximal(self):
        """999 has no successor in three decimal digits."""
        odometer = MarkovCompactum.full_odometer([10, 10, 10])
        assert successor(AdicPath((9, 9, 9)), odometer) == Extremal.MAXIMAL
