"""
Report Models - Pydantic models shared by the design modules

Verification, coincidence and embedding reports. All models are frozen so
that reports can be compared, cached and sent across worker processes.
"""

from typing import Any, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class FrozenModel(BaseModel):
    """Base class for immutable report models."""

    model_config = ConfigDict(frozen=True)


# ============================================================================
# PARAMETERS
# ============================================================================

class SoaParams(FrozenModel):
    """Base and strength of a strong orthogonal array (s^t levels per column)."""

    s: int = Field(..., ge=2, description="Base")
    t: int = Field(..., ge=1, description="Strength")

    @property
    def levels(self) -> int:
        """Level count s^t of every column."""
        return self.s ** self.t


# ============================================================================
# VERIFICATION
# ============================================================================

class Witness(FrozenModel):
    """
    First violation found by a balance check.

    ``columns`` are indices into the checked array; ``combination`` is the
    level combination whose frequency deviates.
    """

    columns: List[int] = Field(default_factory=list, description="Column subset")
    composition: Optional[List[int]] = Field(
        default=None,
        description="Collapsing composition (u_1..u_g) when the check collapsed columns"
    )
    combination: List[int] = Field(default_factory=list, description="Deviating level combination")
    observed: int = Field(..., description="Observed count")
    expected: int = Field(..., description="Expected count")
    label: Optional[str] = Field(default=None, description="Which family of checks failed")

    def describe(self) -> str:
        """One-line human readable description."""
        parts = []
        if self.label:
            parts.append(self.label)
        if self.columns:
            parts.append(f"columns {tuple(self.columns)}")
        if self.composition is not None:
            parts.append(f"composition {tuple(self.composition)}")
        if self.combination:
            parts.append(f"combination {tuple(self.combination)}")
        parts.append(f"observed {self.observed} != expected {self.expected}")
        return ", ".join(parts)


class VerificationReport(FrozenModel):
    """Pass/fail verdict of a check plus the first-violation witness."""

    passed: bool = Field(..., description="Whether the check passed")
    witness: Optional[Witness] = Field(default=None, description="First violation on failure")

    @model_validator(mode="after")
    def witness_iff_failed(self) -> "VerificationReport":
        """Reports carry a witness exactly when they failed."""
        if self.passed == (self.witness is not None):
            raise ValueError("passed reports have no witness; failed reports need one")
        return self

    @classmethod
    def ok(cls) -> "VerificationReport":
        return cls(passed=True)

    @classmethod
    def fail(cls, witness: Witness) -> "VerificationReport":
        return cls(passed=False, witness=witness)


class CoincidenceProfile(FrozenModel):
    """Counts n_i of other rows agreeing with a reference row in exactly i columns."""

    reference_row: int = Field(..., ge=0, description="Reference row index")
    counts: List[int] = Field(..., description="n_0..n_m")

    @model_validator(mode="after")
    def counts_nonnegative(self) -> "CoincidenceProfile":
        if any(c < 0 for c in self.counts):
            raise ValueError("coincidence counts must be nonnegative")
        return self

    @property
    def total(self) -> int:
        return sum(self.counts)


# ============================================================================
# EMBEDDING
# ============================================================================

class EmbeddingReport(FrozenModel):
    """Outcome of a complete column-extension search."""

    embeddable: bool = Field(..., description="Whether an extension column exists")
    extension: Optional[List[int]] = Field(
        default=None,
        description="Lexicographically least valid extension column"
    )
    search_nodes: int = Field(default=0, ge=0, description="Backtracking nodes explored")

    @model_validator(mode="after")
    def extension_iff_embeddable(self) -> "EmbeddingReport":
        if self.embeddable != (self.extension is not None):
            raise ValueError("extension must be present exactly when embeddable")
        return self

    def __eq__(self, other: Any) -> bool:
        # search_nodes is informational only
        if not isinstance(other, EmbeddingReport):
            return NotImplemented
        return self.embeddable == other.embeddable and self.extension == other.extension

    def __hash__(self) -> int:
        return hash((self.embeddable, tuple(self.extension or ())))


class ChildEmbedding(FrozenModel):
    """Embedding verdict of one child array."""

    column: int = Field(..., ge=0, description="Branched parent column")
    level: int = Field(..., ge=0, description="Branch level")
    report: EmbeddingReport


class SemiEmbedReport(FrozenModel):
    """Semi-embeddability verdict with the per-child evidence."""

    semi_embeddable: bool = Field(..., description="Whether every child is embeddable")
    per_child: List[ChildEmbedding] = Field(
        default_factory=list,
        description="Child reports in column-major, level-minor order"
    )
    short_circuit: Optional[Literal["repeated_run_shape"]] = Field(
        default=None,
        description="Set when the verdict was reached without searching"
    )

    @model_validator(mode="after")
    def verdict_matches_children(self) -> "SemiEmbedReport":
        if self.short_circuit is None:
            all_ok = all(child.report.embeddable for child in self.per_child)
            if self.semi_embeddable != all_ok:
                raise ValueError("semi_embeddable must equal 'every child embeddable'")
        return self

    def first_blocked_child(self) -> Optional[ChildEmbedding]:
        """First nonembeddable child, if any."""
        for child in self.per_child:
            if not child.report.embeddable:
                return child
        return None


class BoundsWitness(FrozenModel):
    """Result of chasing extension columns until none exists."""

    n: int = Field(..., ge=1)
    s: int = Field(..., ge=2)
    t: int = Field(..., ge=1)
    start_columns: int = Field(..., ge=1, description="Columns of the starting array")
    columns_reached: int = Field(..., ge=1, description="Columns after the last extension")
    exhaustive: bool = Field(
        ...,
        description="True when the chase stopped on a completed search rather than the column limit"
    )

    @model_validator(mode="after")
    def reached_at_least_start(self) -> "BoundsWitness":
        if self.columns_reached < self.start_columns:
            raise ValueError("columns_reached cannot be below the starting column count")
        return self
