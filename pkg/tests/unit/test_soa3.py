"""
Unit tests for SOA Strength Three

GOA/SOA digit maps, underlying-OA extraction and both SOA constructions.
"""

import numpy as np
import pytest

from src.core.errors import ConstructionError, ParameterError
from src.core.models import ChildEmbedding, EmbeddingReport, SoaParams
from src.designs.arrays import Array, GroupedArray, verify_goa, verify_oa, verify_soa
from src.designs.soa3 import (
    extract_underlying_oa,
    goa_to_soa,
    soa_from_embeddable,
    soa_from_semi_embeddable,
    soa_to_goa,
)


class TestDigitMaps:
    """Test suite for goa_to_soa, soa_to_goa and extract_underlying_oa."""

    @pytest.mark.unit
    def test_split_soa_8(self, soa_8):
        """Test that the digits of SOA(8, 3, 8, 3) form a GOA and map back."""
        g = soa_to_goa(soa_8, 2)
        assert (g.n, g.m, g.s) == (8, 3, 2)
        assert np.array_equal(g.a * 4 + g.b * 2 + g.c, soa_8.cells)
        assert verify_goa(g).passed
        assert goa_to_soa(g, 2) == soa_8

    @pytest.mark.unit
    def test_digit_values(self):
        """Test 17 = 1*9 + 2*3 + 2 in base 3."""
        g = soa_to_goa(Array([[17], [0], [26]], 27), 3)
        assert g.a[:, 0].tolist() == [1, 0, 2]
        assert g.b[:, 0].tolist() == [2, 0, 2]
        assert g.c[:, 0].tolist() == [2, 0, 2]

    @pytest.mark.unit
    def test_extract_underlying_oa(self, soa_8, soa_54_iv):
        """Test that the leading digits form an OA of strength 3."""
        oa = extract_underlying_oa(soa_8, 2)
        assert oa.levels == (2, 2, 2)
        assert verify_oa(oa, 3).passed
        assert verify_oa(extract_underlying_oa(soa_54_iv, 3), 3).passed

    @pytest.mark.unit
    def test_level_mismatch(self, soa_8):
        """Test that only s^3-level columns are split."""
        with pytest.raises(ParameterError, match="s\\^3=27"):
            soa_to_goa(soa_8, 3)
        with pytest.raises(ParameterError):
            extract_underlying_oa(soa_8, 3)
        with pytest.raises(ParameterError):
            goa_to_soa(soa_to_goa(soa_8, 2), 3)

    @pytest.mark.unit
    def test_rejects_non_goa(self, soa_8):
        """Test that a broken GOA is refused unless verification is off."""
        g = soa_to_goa(soa_8, 2)
        c = g.c.copy()
        c[:, 0] = 0
        broken = GroupedArray(g.a, g.b, c, 2)
        with pytest.raises(ConstructionError) as exc:
            goa_to_soa(broken, 2, verify=True)
        assert exc.value.report is not None
        unchecked = goa_to_soa(broken, 2, verify=False)
        assert not verify_soa(unchecked, SoaParams(s=2, t=3)).passed

    @pytest.mark.unit
    def test_rejects_constant_b(self, soa_8):
        """Test that a GOA whose b columns are all zero is refused."""
        g = soa_to_goa(soa_8, 2)
        zeros = np.zeros_like(g.a)
        with pytest.raises(ConstructionError, match="not a GOA"):
            goa_to_soa(GroupedArray(g.a, zeros, zeros, 2), 2, verify=True)


class TestFromEmbeddable:
    """Test suite for soa_from_embeddable."""

    @pytest.mark.unit
    def test_soa_8_from_extended_bush(self, bush_2_extended):
        """Test SOA(8, 3, 8, 3) from the OA(8, 4, 2, 3)."""
        soa, trace = soa_from_embeddable(bush_2_extended, 2)
        assert (soa.n, soa.m, soa.levels) == (8, 3, (8, 8, 8))
        assert verify_soa(soa, SoaParams(s=2, t=3)).passed
        assert trace.source == "embeddable"
        assert trace.shared_b()
        assert trace.b_columns[0] == bush_2_extended.column(3).tolist()
        assert trace.c_columns[2] == bush_2_extended.column(0).tolist()
        assert extract_underlying_oa(soa, 2) == bush_2_extended.select_columns([0, 1, 2])

    @pytest.mark.unit
    def test_full_factorial_plus_parity(self, factorial_2_3):
        """Test SOA(8, 3, 8, 3) from 2^3 with its parity column appended."""
        parity = factorial_2_3.cells.sum(axis=1) % 2
        soa, _ = soa_from_embeddable(factorial_2_3.append_column(parity, 2), 2)
        assert verify_soa(soa, SoaParams(s=2, t=3)).passed

    @pytest.mark.unit
    def test_rejects_weak_input(self, half_fraction, factorial_2_3):
        """Test strength and column-count checks."""
        with pytest.raises(ParameterError, match="not an OA of strength 3"):
            soa_from_embeddable(Array(np.vstack([half_fraction.cells] * 2), 2), 2)
        with pytest.raises(ParameterError, match="at least 3 columns"):
            soa_from_embeddable(factorial_2_3.select_columns([0, 1]), 2)
        with pytest.raises(ParameterError):
            soa_from_embeddable(factorial_2_3, 3)


class TestFromSemiEmbeddable:
    """Test suite for soa_from_semi_embeddable."""

    @pytest.mark.unit
    def test_soa_27_from_bush(self, bush_3):
        """Test SOA(27, 4, 27, 3) from the nonembeddable OA(27, 4, 3, 3)."""
        soa, trace = soa_from_semi_embeddable(bush_3, 3)
        assert (soa.n, soa.m) == (27, 4)
        assert verify_soa(soa, SoaParams(s=3, t=3)).passed
        assert extract_underlying_oa(soa, 3) == bush_3
        assert trace.source == "semi_embeddable"
        assert verify_goa(trace.goa).passed

    @pytest.mark.unit
    def test_b_columns_extend_children(self, bush_3):
        """Test that b_i restricted to a child's rows extends that child."""
        _, trace = soa_from_semi_embeddable(bush_3, 3)
        b = np.array(trace.b_columns).T
        for i in range(bush_3.m):
            for level in range(3):
                rows = np.flatnonzero(bush_3.column(i) == level)
                others = [j for j in range(bush_3.m) if j != i]
                child = bush_3.take_rows(rows.tolist()).select_columns(others)
                assert verify_oa(child.append_column(b[rows, i], 3), 2).passed

    @pytest.mark.unit
    def test_soa_8_from_full_factorial(self, factorial_2_3):
        """Test that an embeddable OA also goes through the semi-embeddable route."""
        soa, _ = soa_from_semi_embeddable(factorial_2_3, 2)
        assert verify_soa(soa, SoaParams(s=2, t=3)).passed

    @pytest.mark.unit
    def test_blocked_child_is_named(self, bush_3, mocker):
        """Test that a nonembeddable child raises with its (column, level)."""
        blocked = [
            ChildEmbedding(
                column=0, level=0, report=EmbeddingReport(embeddable=True, extension=[0] * 9)
            ),
            ChildEmbedding(column=0, level=1, report=EmbeddingReport(embeddable=False)),
        ]
        mocker.patch("src.designs.soa3.search_children", return_value=blocked)
        with pytest.raises(ConstructionError) as exc:
            soa_from_semi_embeddable(bush_3, 3)
        assert exc.value.child == (0, 1)
        assert "not semi-embeddable" in str(exc.value)

    @pytest.mark.unit
    def test_minimum_columns(self):
        """Test that m = 1 is refused."""
        with pytest.raises(ParameterError):
            soa_from_semi_embeddable(Array([[v] for v in range(2)] * 4, 2), 2)
