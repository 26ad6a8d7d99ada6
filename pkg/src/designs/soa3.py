"""
SOA Strength Three - GOA/SOA correspondence and the two SOA constructions

A strength-three SOA column d_i splits into base-s digits
d_i = a_i s^2 + b_i s + c_i, and D is an SOA(n, m, s^3, 3) exactly when the
digit columns form a GOA. Both constructions below build a GOA on top of an
OA(n, m, s, 3) and map it back:

- soa_from_embeddable uses one extension column as every b_i;
- soa_from_semi_embeddable assembles each b_i from the extension columns of
  the s children obtained by branching on column i.

Both take c_i = a_{i+1} (cyclically).
"""

from typing import List, Literal, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import ConfigDict, Field

from src.core.config import config
from src.core.errors import ConstructionError, ParameterError
from src.core.models import FrozenModel, SoaParams
from src.designs.arrays import Array, GroupedArray, verify_goa, verify_oa, verify_soa
from src.designs.embed import all_children, search_children


class SoaBuildTrace(FrozenModel):
    """Intermediate objects of an SOA construction."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source: Literal["embeddable", "semi_embeddable"] = Field(
        ..., description="Which construction produced the SOA"
    )
    b_columns: List[List[int]] = Field(..., description="Auxiliary columns b_1..b_m")
    c_columns: List[List[int]] = Field(..., description="Columns c_1..c_m")
    goa: GroupedArray = Field(..., description="Intermediate GOA")

    def shared_b(self) -> bool:
        """Whether every b_i is the same column."""
        return all(col == self.b_columns[0] for col in self.b_columns)


def _reverify(verify: Optional[bool]) -> bool:
    return config.verification.reverify_constructions if verify is None else verify


def _require_cube_levels(d: Array, s: int) -> None:
    if s < 2:
        raise ParameterError(f"base s={s} must be at least 2")
    if any(level != s ** 3 for level in d.levels):
        raise ParameterError(f"every column must have s^3={s ** 3} levels, got {d.levels}")


def goa_to_soa(g: GroupedArray, s: int, verify: Optional[bool] = None) -> Array:
    """
    Map a GOA to the array with columns a_i s^2 + b_i s + c_i.

    Args:
        g: Grouped array over s levels
        s: Base
        verify: Re-check the GOA first (defaults to ``verification.reverify_constructions``)

    Returns:
        n x m Array with s^3 levels

    Raises:
        ParameterError: If s differs from the GOA's level count
        ConstructionError: If the GOA check fails
    """
    if s != g.s:
        raise ParameterError(f"base s={s} does not match the grouped array's {g.s} levels")
    if _reverify(verify):
        report = verify_goa(g)
        if not report.passed:
            logger.warning(f"GOA check failed: {report.witness.describe()}")
            raise ConstructionError(
                f"input is not a GOA: {report.witness.describe()}", report=report
            )
    return Array(g.a * s * s + g.b * s + g.c, s ** 3)


def soa_to_goa(d: Array, s: int) -> GroupedArray:
    """
    Split every entry into its base-s digits (a, b, c).

    Raises:
        ParameterError: If a column does not have s^3 levels
    """
    _require_cube_levels(d, s)
    cells = d.cells
    return GroupedArray(cells // (s * s), (cells // s) % s, cells % s, s)


def extract_underlying_oa(d: Array, s: int) -> Array:
    """Collapse every column by floor(d / s^2)."""
    _require_cube_levels(d, s)
    return Array(d.cells // (s * s), s)


def _cyclic_shift(a: Array) -> np.ndarray:
    return np.roll(a.cells, -1, axis=1)


def _finish(
    g: GroupedArray,
    s: int,
    source: str,
    verify: Optional[bool],
) -> Tuple[Array, SoaBuildTrace]:
    check = _reverify(verify)
    if check:
        report = verify_goa(g)
        if not report.passed:
            logger.warning(f"intermediate GOA failed: {report.witness.describe()}")
            raise ConstructionError(
                f"intermediate GOA failed ({report.witness.describe()}); "
                "the input does not satisfy the construction's contract",
                report=report,
            )
    soa = goa_to_soa(g, s, verify=False)
    if check:
        report = verify_soa(soa, SoaParams(s=s, t=3))
        if not report.passed:
            raise ConstructionError(
                f"constructed array is not an SOA: {report.witness.describe()}", report=report
            )
    trace = SoaBuildTrace(
        source=source,
        b_columns=g.b.T.tolist(),
        c_columns=g.c.T.tolist(),
        goa=g,
    )
    logger.info(f"built SOA({soa.n}, {soa.m}, {s ** 3}, 3) from {source} OA")
    return soa, trace


def _require_strength_three(a: Array, s: int, minimum_m: int) -> None:
    if not a.is_symmetric or a.s != s:
        raise ParameterError(f"input must have {s} levels in every column, got {a.levels}")
    if a.m < minimum_m:
        raise ParameterError(
            f"input needs at least {minimum_m} columns, got {a.m}; "
            "the cyclic c-assignment needs m >= 2"
        )
    report = verify_oa(a, 3)
    if not report.passed:
        raise ParameterError(f"input is not an OA of strength 3: {report.witness.describe()}")


def soa_from_embeddable(
    a_plus: Array, s: int, verify: Optional[bool] = None
) -> Tuple[Array, SoaBuildTrace]:
    """
    Build an SOA(n, m, s^3, 3) from an OA(n, m+1, s, 3).

    The first m columns are the a_i, the last column is every b_i and
    c_i = a_{i+1} cyclically.

    Raises:
        ParameterError: If a_plus is not an OA of strength 3 with m >= 2
        ConstructionError: If an intermediate check fails
    """
    _require_strength_three(a_plus, s, minimum_m=3)
    m = a_plus.m - 1
    a = a_plus.select_columns(range(m))
    b = np.repeat(a_plus.cells[:, m:], m, axis=1)
    g = GroupedArray(a.cells, b, _cyclic_shift(a), s)
    return _finish(g, s, "embeddable", verify)


def soa_from_semi_embeddable(
    a: Array, s: int, verify: Optional[bool] = None
) -> Tuple[Array, SoaBuildTrace]:
    """
    Build an SOA(n, m, s^3, 3) from a semi-embeddable OA(n, m, s, 3).

    For each column i the s children from branching on i are extended by
    their lexicographically least strength-2 columns; the extension values
    are written back to the children's parent rows to form b_i.

    Raises:
        ParameterError: If a is not an OA of strength 3 with m >= 2
        ConstructionError: If some child has no extension (a is not
            semi-embeddable); ``child`` names it as (column, level)
    """
    _require_strength_three(a, s, minimum_m=2)
    children = all_children(a)
    per_child = search_children(children, 2)

    b = np.empty((a.n, a.m), dtype=np.int64)
    for child, result in zip(children, per_child):
        if not result.report.embeddable:
            raise ConstructionError(
                f"child (column {child.parent_column}, level {child.branch_level}) "
                "has no extension column; the input is not semi-embeddable",
                child=(child.parent_column, child.branch_level),
            )
        b[child.rows, child.parent_column] = result.report.extension

    g = GroupedArray(a.cells, b, _cyclic_shift(a), s)
    return _finish(g, s, "semi_embeddable", verify)
