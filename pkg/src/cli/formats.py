"""
Array Files - Canonical text format for arrays

Layout (LF line endings, '#' comment lines allowed anywhere):

    oa <n> <m> <t>
    <level count per column>
    base <s> power <t>        (optional SOA metadata)
    provenance <text>         (optional)
    <n body lines of m integers>

``t = 0`` in the header claims no strength. GOA files are 3m-column arrays
with the columns ordered a_1 b_1 c_1 a_2 b_2 c_2 ...
"""

from typing import List, Optional, Union

from pydantic import ConfigDict, Field, model_validator

from src.core.errors import ArrayParseError, ParameterError
from src.core.models import FrozenModel
from src.designs.arrays import Array


class ArrayFile(FrozenModel):
    """An array together with its header claims."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    array: Array = Field(..., description="Body")
    strength: int = Field(default=0, ge=0, description="Claimed strength (0 = none)")
    base: Optional[int] = Field(default=None, ge=2, description="SOA base s")
    power: Optional[int] = Field(default=None, ge=1, description="SOA strength t (levels s^t)")
    provenance: Optional[str] = Field(default=None, description="Free-text origin")

    @model_validator(mode="after")
    def base_and_power_together(self) -> "ArrayFile":
        if (self.base is None) != (self.power is None):
            raise ValueError("base and power must be given together")
        if self.provenance is not None and "\n" in self.provenance:
            raise ValueError("provenance must be a single line")
        return self

    def emit(self) -> str:
        return emit_array(
            self.array,
            strength=self.strength,
            base=self.base,
            power=self.power,
            provenance=self.provenance,
        )


def emit_array(
    array: Array,
    strength: int = 0,
    base: Optional[int] = None,
    power: Optional[int] = None,
    provenance: Optional[str] = None,
) -> str:
    """Render an array in the canonical format."""
    lines = [
        f"oa {array.n} {array.m} {strength}",
        " ".join(str(s) for s in array.levels),
    ]
    if base is not None and power is not None:
        lines.append(f"base {base} power {power}")
    if provenance:
        lines.append(f"provenance {provenance}")
    lines.extend(" ".join(str(x) for x in row) for row in array.cells.tolist())
    return "\n".join(lines) + "\n"


def _ints(fields: List[str], line: int, what: str) -> List[int]:
    try:
        return [int(x) for x in fields]
    except ValueError:
        raise ArrayParseError(f"{what} must be decimal integers", line) from None


def parse_array(text: Union[str, bytes]) -> ArrayFile:
    """
    Parse the canonical format.

    Raises:
        ArrayParseError: On malformed headers, dimension mismatches or
            out-of-range entries, naming the offending line
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ArrayParseError("input is not UTF-8", text[: e.start].count(b"\n") + 1) from None

    header_line = 0
    n = m = strength = 0
    levels: List[int] = []
    base: Optional[int] = None
    power: Optional[int] = None
    provenance: Optional[str] = None
    rows: List[List[int]] = []

    for number, raw in enumerate(text.split("\n"), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()

        if not header_line:
            if fields[0] != "oa" or len(fields) != 4:
                raise ArrayParseError("header must read 'oa <n> <m> <t>'", number)
            n, m, strength = _ints(fields[1:], number, "header values")
            if n < 1 or m < 1 or strength < 0:
                raise ArrayParseError(f"invalid header values n={n} m={m} t={strength}", number)
            header_line = number
            continue

        if not levels:
            levels = _ints(fields, number, "level counts")
            if len(levels) != m:
                raise ArrayParseError(f"{len(levels)} level counts for {m} columns", number)
            if any(s < 1 for s in levels):
                raise ArrayParseError("level counts must be positive", number)
            continue

        if not rows and fields[0] == "base":
            if len(fields) != 4 or fields[2] != "power":
                raise ArrayParseError("metadata must read 'base <s> power <t>'", number)
            base, power = _ints([fields[1], fields[3]], number, "base and power")
            if base < 2 or power < 1:
                raise ArrayParseError(f"invalid base {base} or power {power}", number)
            if any(s != base ** power for s in levels):
                raise ArrayParseError(
                    f"levels {levels} do not match base {base} power {power}", number
                )
            continue

        if not rows and fields[0] == "provenance":
            provenance = stripped[len("provenance"):].strip() or None
            continue

        row = _ints(fields, number, "entries")
        if len(row) != m:
            raise ArrayParseError(f"row has {len(row)} entries, expected {m}", number)
        for j, x in enumerate(row):
            if not 0 <= x < levels[j]:
                raise ArrayParseError(
                    f"entry {x} in column {j} outside 0..{levels[j] - 1}", number
                )
        if len(rows) == n:
            raise ArrayParseError(f"more than the declared {n} rows", number)
        rows.append(row)

    if not header_line:
        raise ArrayParseError("missing 'oa <n> <m> <t>' header", 1)
    if not levels:
        raise ArrayParseError("missing level counts", header_line)
    if len(rows) != n:
        raise ArrayParseError(f"header declares n={n} rows, body has {len(rows)}", header_line)

    try:
        array = Array(rows, levels)
    except ParameterError as e:
        raise ArrayParseError(str(e), header_line) from None
    return ArrayFile(
        array=array, strength=strength, base=base, power=power, provenance=provenance
    )
