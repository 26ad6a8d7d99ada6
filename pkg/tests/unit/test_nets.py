"""
Unit tests for Nets

Digit expansion, elementary intervals, the net check and Latin hypercube
expansion.
"""

from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.errors import ParameterError
from src.designs.arrays import Array
from src.designs.nets import (
    LCG_MASK,
    DigitPointSet,
    ElementaryInterval,
    latin_hypercube,
    resolution_vectors,
    soa_to_digits,
    verify_net,
)


class TestDigits:
    """Test suite for soa_to_digits and DigitPointSet."""

    @pytest.mark.unit
    def test_expansion(self):
        """Test 5 = 101 in base 2 and 26 = 222 in base 3."""
        p = soa_to_digits(Array([[5], [2]], 8), 2, 3)
        assert p.digits[0, 0].tolist() == [1, 0, 1]
        assert p.digits[1, 0].tolist() == [0, 1, 0]
        q = soa_to_digits(Array([[26]], 27), 3, 3)
        assert q.digits[0, 0].tolist() == [2, 2, 2]

    @pytest.mark.unit
    def test_points_and_prefixes(self, soa_8):
        """Test that points are level / s^t and prefixes truncate digits."""
        p = soa_to_digits(soa_8, 2, 3)
        assert (p.n, p.m, p.k, p.s) == (8, 3, 3, 2)
        assert p.points()[0] == tuple(Fraction(int(v), 8) for v in soa_8.row(0))
        assert np.array_equal(p.prefixes(3), soa_8.cells)
        assert np.array_equal(p.prefixes(1), soa_8.cells // 4)
        assert not p.prefixes(0).any()

    @pytest.mark.unit
    def test_level_mismatch(self, soa_8):
        """Test that columns must have s^t levels."""
        with pytest.raises(ParameterError):
            soa_to_digits(soa_8, 3, 3)

    @pytest.mark.unit
    def test_invalid_digits(self):
        """Test that digits must lie in 0..s-1."""
        with pytest.raises(ParameterError):
            DigitPointSet(np.full((2, 1, 1), 2), 2)
        with pytest.raises(ParameterError):
            DigitPointSet(np.zeros((2, 2)), 2)


class TestElementaryInterval:
    """Test suite for ElementaryInterval."""

    @pytest.mark.unit
    def test_geometry(self):
        """Test volume and bounds of [1/4, 1/2) x [0, 1)."""
        box = ElementaryInterval(s=2, resolutions=[2, 0], cells=[1, 0])
        assert box.volume == Fraction(1, 4)
        assert box.bounds() == [(Fraction(1, 4), Fraction(1, 2)), (Fraction(0), Fraction(1))]

    @pytest.mark.unit
    def test_contains(self, soa_8):
        """Test membership against exact coordinates."""
        p = soa_to_digits(soa_8, 2, 3)
        box = ElementaryInterval(s=2, resolutions=[1, 2], cells=[1, 3])
        (lo0, hi0), (lo1, hi1) = box.bounds()
        for i, point in enumerate(p.points()):
            inside = lo0 <= point[0] < hi0 and lo1 <= point[1] < hi1
            assert box.contains(p, i) == inside

    @pytest.mark.unit
    def test_cell_out_of_range(self):
        """Test that cells must fit their resolution."""
        with pytest.raises(ValidationError):
            ElementaryInterval(s=2, resolutions=[1], cells=[2])
        with pytest.raises(ValidationError):
            ElementaryInterval(s=2, resolutions=[1, 1], cells=[0])


class TestVerifyNet:
    """Test suite for verify_net and resolution_vectors."""

    @pytest.mark.unit
    def test_resolution_order(self):
        """Test lexicographic weak compositions."""
        assert list(resolution_vectors(2, 2)) == [(0, 2), (1, 1), (2, 0)]
        assert len(list(resolution_vectors(3, 3))) == 10

    @pytest.mark.unit
    def test_soa_8_is_a_net(self, soa_8):
        """Test that SOA(8, 3, 8, 3) digits form a (0, 3, 3)-net in base 2."""
        assert verify_net(soa_to_digits(soa_8, 2, 3), 0, 3).passed

    @pytest.mark.unit
    def test_one_digit_net(self, bush_3):
        """Test that the OA(27, 4, 3, 3) read as one digit per coordinate is a (2, 3, 4)-net."""
        p = soa_to_digits(bush_3, 3, 1)
        assert verify_net(p, 2, 3).passed
        assert verify_net(p, 3, 3).passed
        with pytest.raises(ParameterError):
            verify_net(p, 1, 3)

    @pytest.mark.unit
    def test_collapsed_points_fail(self):
        """Test the witness when all points coincide."""
        p = DigitPointSet(np.zeros((8, 3, 3), dtype=int), 2)
        report = verify_net(p, 0, 3)
        assert not report.passed
        w = report.witness
        assert w.label == "elementary interval"
        assert w.composition == [0, 0, 3]
        assert w.combination == [0, 0, 0]
        assert (w.observed, w.expected) == (8, 1)

    @pytest.mark.unit
    def test_requires_power_run_size(self, soa_54_iii):
        """Test that 54 points cannot be checked as a base-3 net."""
        p = soa_to_digits(soa_54_iii, 3, 3)
        with pytest.raises(ParameterError, match="power run size"):
            verify_net(p, 0, 3)

    @pytest.mark.unit
    def test_quality_range(self, soa_8):
        """Test w outside 0..k and missing digits."""
        p = soa_to_digits(soa_8, 2, 3)
        with pytest.raises(ParameterError):
            verify_net(p, 4, 3)
        q = DigitPointSet(p.digits[:, :, :1], 2)
        with pytest.raises(ParameterError):
            verify_net(q, 0, 3)


class TestLatinHypercube:
    """Test suite for latin_hypercube."""

    @pytest.mark.unit
    def test_refines_bush(self, bush_3):
        """Test that each column is a permutation that collapses back."""
        lhd = latin_hypercube(bush_3, 7)
        assert lhd.levels == (27,) * 4
        for j in range(4):
            assert sorted(lhd.column(j).tolist()) == list(range(27))
        assert np.array_equal(lhd.cells // 9, bush_3.cells)

    @pytest.mark.unit
    def test_full_level_columns_unchanged(self, soa_8):
        """Test that n-level columns have nothing to refine."""
        assert latin_hypercube(soa_8, 123).cells.tolist() == soa_8.cells.tolist()

    @pytest.mark.unit
    def test_deterministic(self, bush_3):
        """Test identical output for identical seeds."""
        assert latin_hypercube(bush_3, 42) == latin_hypercube(bush_3, 42)
        assert latin_hypercube(bush_3, 42) != latin_hypercube(bush_3, 43)

    @pytest.mark.unit
    def test_first_draw(self):
        """Test the first LCG draw from seed 0 (high word 0x14057B7E, even)."""
        lhd = latin_hypercube(Array([[0], [0], [1], [1]], 2), 0)
        assert lhd.column(0)[:2].tolist() == [1, 0]
        assert sorted(lhd.column(0)[2:].tolist()) == [2, 3]

    @pytest.mark.unit
    def test_seed_range(self, bush_3):
        """Test that seeds must be unsigned 64-bit integers."""
        latin_hypercube(bush_3, LCG_MASK)
        with pytest.raises(ParameterError):
            latin_hypercube(bush_3, -1)
        with pytest.raises(ParameterError):
            latin_hypercube(bush_3, LCG_MASK + 1)

    @pytest.mark.unit
    def test_unbalanced_column(self):
        """Test that every level must appear equally often."""
        with pytest.raises(ParameterError, match="column 0"):
            latin_hypercube(Array([[0], [0], [1]], 2), 1)
