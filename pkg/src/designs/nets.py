"""
Nets - Digit point sets, net verification and OA-based Latin hypercubes

An SOA with s^t levels places point i of dimension j at level / s^t, the left
endpoint of its cell. Membership in an elementary interval depends only on
digit prefixes, so every check here is exact integer arithmetic.
"""

from fractions import Fraction
from typing import Iterator, List, Tuple

import numpy as np
from loguru import logger
from pydantic import Field, model_validator

from src.core.errors import ParameterError
from src.core.models import FrozenModel, VerificationReport, Witness
from src.designs.arrays import Array


# 64-bit LCG constants
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
LCG_MASK = (1 << 64) - 1


class DigitPointSet:
    """
    Base-s digit expansions of n points in [0, 1)^m.

    ``digits[i, j, l]`` is digit l (0 most significant) of coordinate j of
    point i, so the coordinate is sum_l digits[i, j, l] * s^-(l+1).
    """

    __slots__ = ("_digits", "_s")

    def __init__(self, digits: np.ndarray, s: int) -> None:
        digits = np.array(digits, dtype=np.int64)
        if digits.ndim != 3 or 0 in digits.shape:
            raise ParameterError(
                f"digits must form a non-empty n x m x k tensor, got {digits.shape}"
            )
        if s < 2:
            raise ParameterError(f"base s={s} must be at least 2")
        if (digits < 0).any() or (digits >= s).any():
            raise ParameterError(f"digits must lie in 0..{s - 1}")
        digits.setflags(write=False)
        self._digits = digits
        self._s = int(s)

    @property
    def digits(self) -> np.ndarray:
        return self._digits

    @property
    def s(self) -> int:
        return self._s

    @property
    def n(self) -> int:
        return int(self._digits.shape[0])

    @property
    def m(self) -> int:
        return int(self._digits.shape[1])

    @property
    def k(self) -> int:
        return int(self._digits.shape[2])

    def prefixes(self, depth: int) -> np.ndarray:
        """(n, m) integers formed by the first ``depth`` digits of every coordinate."""
        values = np.zeros(self._digits.shape[:2], dtype=np.int64)
        for level in range(depth):
            values = values * self._s + self._digits[:, :, level]
        return values

    def points(self) -> List[Tuple[Fraction, ...]]:
        """Exact point coordinates."""
        scale = self._s ** self.k
        return [
            tuple(Fraction(int(v), scale) for v in row)
            for row in self.prefixes(self.k)
        ]

    def __repr__(self) -> str:
        return f"DigitPointSet(n={self.n}, m={self.m}, s={self._s}, k={self.k})"


class ElementaryInterval(FrozenModel):
    """Box prod_j [c_j s^-d_j, (c_j + 1) s^-d_j) in base s."""

    s: int = Field(..., ge=2, description="Base")
    resolutions: List[int] = Field(..., description="d_j per dimension")
    cells: List[int] = Field(..., description="c_j per dimension")

    @model_validator(mode="after")
    def cells_in_range(self) -> "ElementaryInterval":
        if len(self.resolutions) != len(self.cells):
            raise ValueError("resolutions and cells must have the same length")
        for d, c in zip(self.resolutions, self.cells):
            if d < 0 or not 0 <= c < self.s ** d:
                raise ValueError(f"cell {c} out of range for resolution {d}")
        return self

    @property
    def volume(self) -> Fraction:
        return Fraction(1, self.s ** sum(self.resolutions))

    def bounds(self) -> List[Tuple[Fraction, Fraction]]:
        return [
            (Fraction(c, self.s ** d), Fraction(c + 1, self.s ** d))
            for d, c in zip(self.resolutions, self.cells)
        ]

    def contains(self, points: DigitPointSet, index: int) -> bool:
        """Whether point ``index`` lies in the box (decided on digit prefixes)."""
        for j, (d, c) in enumerate(zip(self.resolutions, self.cells)):
            value = 0
            for level in range(d):
                value = value * self.s + int(points.digits[index, j, level])
            if value != c:
                return False
        return True


def soa_to_digits(a: Array, s: int, t: int) -> DigitPointSet:
    """
    Expand every s^t-level entry into t base-s digits, most significant first.

    Raises:
        ParameterError: If a column does not have s^t levels
    """
    if s < 2 or t < 1:
        raise ParameterError(f"need s >= 2 and t >= 1, got s={s}, t={t}")
    if any(level != s ** t for level in a.levels):
        raise ParameterError(f"every column must have s^t={s ** t} levels, got {a.levels}")
    digits = np.stack(
        [(a.cells // s ** (t - 1 - level)) % s for level in range(t)],
        axis=2,
    )
    return DigitPointSet(digits, s)


def resolution_vectors(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Nonnegative (d_1..d_parts) summing to ``total``, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in resolution_vectors(total - first, parts - 1):
            yield (first, *rest)


def verify_net(p: DigitPointSet, w: int, k: int) -> VerificationReport:
    """
    Check that every elementary interval of volume s^(w-k) holds s^w points.

    Resolution vectors are visited lexicographically, cells in mixed-radix
    order; the first miscounted interval is the witness.

    Raises:
        ParameterError: If n != s^k, w is outside 0..k, or fewer than k-w
            digits are available
    """
    s = p.s
    if p.n != s ** k:
        raise ParameterError(
            f"net checks require a power run size: n={p.n} is not s^k = {s}^{k}"
        )
    if not 0 <= w <= k:
        raise ParameterError(f"quality w={w} must lie in 0..{k}")
    if p.k < k - w:
        raise ParameterError(f"{p.k} digits per coordinate, need at least {k - w}")

    depth = k - w
    expected = s ** w
    prefixes = [p.prefixes(d) for d in range(depth + 1)]
    for resolutions in resolution_vectors(depth, p.m):
        keys = np.zeros(p.n, dtype=np.int64)
        for j, d in enumerate(resolutions):
            keys = keys * s ** d + prefixes[d][:, j]
        counts = np.bincount(keys, minlength=s ** depth)
        bad = np.flatnonzero(counts != expected)
        if bad.size:
            key = int(bad[0])
            cells = []
            for d in reversed(resolutions):
                key, c = divmod(key, s ** d)
                cells.append(c)
            interval = ElementaryInterval(s=s, resolutions=list(resolutions), cells=cells[::-1])
            logger.debug(f"net check failed on {interval}")
            return VerificationReport.fail(Witness(
                columns=list(range(p.m)),
                composition=list(resolutions),
                combination=interval.cells,
                observed=int(counts[bad[0]]),
                expected=expected,
                label="elementary interval",
            ))
    return VerificationReport.ok()


def _lcg(state: int) -> int:
    return (state * LCG_MULTIPLIER + LCG_INCREMENT) & LCG_MASK


def latin_hypercube(a: Array, seed: int) -> Array:
    """
    Refine every level v of a column into the n/L levels v*r .. v*r + r - 1.

    Column j is shuffled by the LCG seeded with ``seed ^ j``: for each level
    in ascending order a Fisher-Yates pass (i from r-1 down to 1, index drawn
    from the high 32 bits modulo i+1) permutes v*r .. v*r + r - 1, and the
    result fills that level's rows in ascending row order.

    Raises:
        ParameterError: If a column is unbalanced or the seed is not a 64-bit
            unsigned integer
    """
    if not 0 <= seed <= LCG_MASK:
        raise ParameterError(f"seed {seed} is not a 64-bit unsigned integer")
    out = np.empty((a.n, a.m), dtype=np.int64)
    for j in range(a.m):
        levels = a.levels[j]
        column = a.column(j)
        counts = np.bincount(column, minlength=levels)
        if a.n % levels != 0 or (counts != a.n // levels).any():
            raise ParameterError(f"column {j} does not hold its {levels} levels equally often")
        r = a.n // levels

        state = (seed ^ j) & LCG_MASK
        for v in range(levels):
            perm = list(range(v * r, v * r + r))
            for i in range(r - 1, 0, -1):
                state = _lcg(state)
                pick = (state >> 32) % (i + 1)
                perm[i], perm[pick] = perm[pick], perm[i]
            out[column == v, j] = perm
    return Array(out, a.n)
