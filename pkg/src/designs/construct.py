"""
Constructions - Finite-field orthogonal arrays

Linear arrays whose rows run over all messages v in GF(q)^k (lexicographic,
first coordinate most significant) and whose entries are v . g_j for the
generator columns g_j. Bush, Rao-Hamming and ovoid arrays are instances with
particular generator columns. Every constructor re-checks its advertised
strength unless ``verification.reverify_constructions`` is off.
"""

import itertools
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import Field, model_validator

from src.core.config import config
from src.core.errors import ConstructionError, ParameterError
from src.core.models import FrozenModel
from src.designs.arrays import Array, verify_oa
from src.designs.gf import FieldTable, field_eval_poly, field_new, is_prime_power


class LinearArraySpec(FrozenModel):
    """
    Generator of a linear array over GF(q).

    ``generator`` is k x m: one length-k column per array column.
    """

    q: int = Field(..., ge=2, description="Field order")
    k: int = Field(..., ge=1, description="Message length")
    generator: List[List[int]] = Field(..., description="k x m generator matrix")

    @model_validator(mode="after")
    def generator_matches(self) -> "LinearArraySpec":
        if not is_prime_power(self.q):
            raise ValueError(f"q={self.q} is not a prime power")
        if len(self.generator) != self.k:
            raise ValueError(f"generator has {len(self.generator)} rows, expected k={self.k}")
        widths = {len(row) for row in self.generator}
        if len(widths) != 1 or 0 in widths:
            raise ValueError("generator rows must share a positive length")
        if any(not 0 <= x < self.q for row in self.generator for x in row):
            raise ValueError(f"generator entries must lie in 0..{self.q - 1}")
        return self

    @property
    def m(self) -> int:
        return len(self.generator[0])

    @classmethod
    def from_columns(cls, q: int, columns: Sequence[Sequence[int]]) -> "LinearArraySpec":
        """Build from a list of generator columns."""
        k = len(columns[0])
        return cls(q=q, k=k, generator=[[int(col[i]) for col in columns] for i in range(k)])


def full_factorial(s: int, k: int) -> Array:
    """All s^k level combinations of k columns, rows in lexicographic order."""
    if s < 1 or k < 1:
        raise ParameterError(f"full factorial needs s >= 1 and k >= 1, got s={s}, k={k}")
    return Array(list(itertools.product(range(s), repeat=k)), s)


def linear_array(spec: LinearArraySpec) -> Array:
    """
    Rows v . G for every message v in GF(q)^k.

    Raises:
        ParameterError: If q exceeds the supported field orders
    """
    field = field_new(spec.q)
    messages = full_factorial(spec.q, spec.k).cells
    generator = np.array(spec.generator, dtype=np.int64)
    columns = [field.dot(messages, generator[:, j].tolist()) for j in range(spec.m)]
    return Array(np.column_stack(columns), spec.q)


def _checked(a: Array, t: int, name: str) -> Array:
    if config.verification.reverify_constructions:
        report = verify_oa(a, t)
        if not report.passed:
            logger.warning(f"{name} failed its strength-{t} check: {report.witness.describe()}")
            raise ConstructionError(
                f"{name} is not an OA of strength {t}: {report.witness.describe()}",
                report=report,
            )
    logger.info(f"constructed {name} = OA({a.n}, {a.m}, {a.s}, {t})")
    return a


def _field(s: int) -> FieldTable:
    if not is_prime_power(s):
        raise ParameterError(f"s={s} is not a prime power")
    return field_new(s)


# ============================================================================
# BUSH
# ============================================================================

def bush(s: int, extended: bool = False) -> Array:
    """
    Linear OA(s^3, s+1, s, 3) from quadratics a_2 e^2 + a_1 e + a_0.

    Columns: one per field element e (ascending), then a_2, then a_1 when
    extended. The extended OA(s^3, s+2, s, 3) exists only for even s.

    Raises:
        ParameterError: If s is not a prime power, or extended with odd s
    """
    field = _field(s)
    if extended and s % 2 == 1:
        raise ParameterError(
            f"s={s} is odd: an OA(s^3, m, s, 3) has at most s+1 columns, so no extension exists"
        )
    columns = [
        (field.mul[e, e], e, 1) for e in range(s)
    ]
    columns.append((1, 0, 0))
    if extended:
        columns.append((0, 1, 0))
    spec = LinearArraySpec.from_columns(s, columns)
    return _checked(linear_array(spec), 3, f"bush(s={s}, extended={extended})")


# ============================================================================
# RAO-HAMMING
# ============================================================================

def normalized_vectors(s: int, k: int) -> List[Tuple[int, ...]]:
    """Nonzero vectors of GF(s)^k whose first nonzero coordinate is 1, lexicographic."""
    return [
        v for v in itertools.product(range(s), repeat=k)
        if any(v) and next(x for x in v if x) == 1
    ]


def rao_hamming(s: int, k: int) -> Array:
    """
    Saturated linear OA(s^k, (s^k - 1)/(s - 1), s, 2).

    One column per 1-dimensional subspace of GF(s)^k.

    Raises:
        ParameterError: If s is not a prime power or k < 2
    """
    _field(s)
    if k < 2:
        raise ParameterError(f"dimension k={k} must be at least 2")
    spec = LinearArraySpec.from_columns(s, normalized_vectors(s, k))
    return _checked(linear_array(spec), 2, f"rao_hamming(s={s}, k={k})")


# ============================================================================
# OVOID
# ============================================================================

def _normalize(field: FieldTable, v: Sequence[int]) -> Tuple[int, ...]:
    lead = next(x for x in v if x)
    scale = int(field.inv[lead])
    return tuple(int(field.mul[x, scale]) for x in v)


def irreducible_quadratic(field: FieldTable) -> Tuple[int, int]:
    """Least (b, c) for which x^2 + b x + c has no root in GF(s)."""
    for b, c in itertools.product(range(field.q), repeat=2):
        if all(field_eval_poly(field, (c, b, 1), x) != 0 for x in range(field.q)):
            return b, c
    raise ConstructionError(f"no irreducible quadratic over GF({field.q})")


def ovoid_points(s: int) -> List[Tuple[int, int, int, int]]:
    """
    Points of the elliptic quadric x0 x1 + x2^2 + b x2 x3 + c x3^2 = 0 in PG(3, s).

    Points are normalized (first nonzero coordinate 1) and sorted.

    Raises:
        ConstructionError: If the point count is not s^2 + 1 or three points
            are collinear
    """
    field = _field(s)
    b, c = irreducible_quadratic(field)
    add, mul = field.add, field.mul

    def quadric(x: Tuple[int, ...]) -> int:
        x0, x1, x2, x3 = x
        terms = (mul[x0, x1], mul[x2, x2], mul[b, mul[x2, x3]], mul[c, mul[x3, x3]])
        total = 0
        for term in terms:
            total = add[total, term]
        return int(total)

    points = [p for p in normalized_vectors(s, 4) if quadric(p) == 0]
    if len(points) != s * s + 1:
        raise ConstructionError(
            f"quadric over GF({s}) has {len(points)} points, expected {s * s + 1}"
        )

    # no three points on a line: no P + lambda Q is another point
    members = set(points)
    for p, q in itertools.combinations(points, 2):
        for lam in range(1, s):
            combined = tuple(int(add[x, mul[lam, y]]) for x, y in zip(p, q))
            if _normalize(field, combined) in members:
                raise ConstructionError(f"points {p} and {q} span a third quadric point")
    return points


def ovoid_oa(s: int) -> Array:
    """
    Linear OA(s^4, s^2 + 1, s, 3) from the points of an ovoid in PG(3, s).

    Raises:
        ParameterError: If s is not a prime power or exceeds ``construction.ovoid_max_s``
        ConstructionError: If the quadric fails the ovoid checks
    """
    _field(s)
    if s > config.construction.ovoid_max_s:
        raise ParameterError(
            f"s={s} exceeds the largest supported ovoid order {config.construction.ovoid_max_s}"
        )
    spec = LinearArraySpec.from_columns(s, ovoid_points(s))
    return _checked(linear_array(spec), 3, f"ovoid_oa(s={s})")


# ============================================================================
# JUXTAPOSITION
# ============================================================================

def juxtapose(a: Array, b: Array) -> Array:
    """
    Stack a over b.

    Raises:
        ParameterError: If column counts or level profiles differ
    """
    if a.m != b.m or a.levels != b.levels:
        raise ParameterError(
            f"cannot juxtapose arrays with levels {a.levels} and {b.levels}"
        )
    return Array(np.vstack([a.cells, b.cells]), a.levels)
