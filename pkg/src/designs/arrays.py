"""
Arrays - Core array types and balance verification

Holds the Array carrier used for every OA/SOA/child array, the GroupedArray
of strength-three GOAs, and the checks built on exact level-combination
counting: orthogonal arrays (mixed levels), strong orthogonal arrays through
collapsing, generalized orthogonal arrays, coincidence profiles and the
repeated-run bound.
"""

import itertools
from math import comb, prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from src.core.errors import ParameterError
from src.core.models import (
    CoincidenceProfile,
    SoaParams,
    VerificationReport,
    Witness,
)


# ============================================================================
# ARRAY TYPES
# ============================================================================

class Array:
    """
    Immutable n x m integer matrix with a per-column level profile.

    Attributes:
        n: Run count
        m: Column count
        levels: Level count of every column
        cells: Read-only (n, m) int64 matrix

    Example:
        >>> a = Array([[0, 1], [1, 0]], levels=2)
        >>> a.levels
        (2, 2)
    """

    __slots__ = ("_cells", "_levels")

    def __init__(
        self,
        cells: Union[np.ndarray, Sequence[Sequence[int]]],
        levels: Union[int, Sequence[int]],
    ) -> None:
        """
        Build an array.

        Args:
            cells: Row-major matrix of nonnegative integers
            levels: One level count for every column, or a single shared count

        Raises:
            ParameterError: On empty shapes, negative entries or level overflow
        """
        matrix = np.array(cells, dtype=np.int64)
        if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise ParameterError(
                f"array must be a non-empty n x m matrix, got shape {matrix.shape}"
            )
        n, m = matrix.shape

        if isinstance(levels, (int, np.integer)):
            profile = (int(levels),) * m
        else:
            profile = tuple(int(s) for s in levels)
        if len(profile) != m:
            raise ParameterError(f"{len(profile)} level counts given for {m} columns")
        if any(s < 1 for s in profile):
            raise ParameterError(f"level counts must be positive: {profile}")

        if (matrix < 0).any():
            row, col = map(int, np.argwhere(matrix < 0)[0])
            raise ParameterError(f"negative entry {matrix[row, col]} at ({row}, {col})")
        over = matrix >= np.array(profile, dtype=np.int64)[None, :]
        if over.any():
            row, col = map(int, np.argwhere(over)[0])
            raise ParameterError(
                f"entry {matrix[row, col]} at ({row}, {col}) exceeds {profile[col]} levels"
            )

        matrix.setflags(write=False)
        self._cells = matrix
        self._levels = profile

    @property
    def cells(self) -> np.ndarray:
        return self._cells

    @property
    def n(self) -> int:
        return int(self._cells.shape[0])

    @property
    def m(self) -> int:
        return int(self._cells.shape[1])

    @property
    def levels(self) -> Tuple[int, ...]:
        return self._levels

    @property
    def is_symmetric(self) -> bool:
        return len(set(self._levels)) == 1

    @property
    def s(self) -> int:
        """Shared level count of a symmetric array."""
        if not self.is_symmetric:
            raise ParameterError(f"array has mixed levels {self._levels}")
        return self._levels[0]

    def column(self, j: int) -> np.ndarray:
        return self._cells[:, j]

    def row(self, i: int) -> Tuple[int, ...]:
        return tuple(int(x) for x in self._cells[i])

    def rows(self) -> List[Tuple[int, ...]]:
        return [tuple(int(x) for x in r) for r in self._cells]

    def select_columns(self, columns: Sequence[int]) -> "Array":
        columns = list(columns)
        return Array(self._cells[:, columns], [self._levels[j] for j in columns])

    def take_rows(self, rows: Sequence[int]) -> "Array":
        return Array(self._cells[list(rows)], self._levels)

    def append_column(self, column: Sequence[int], levels: int) -> "Array":
        column = np.asarray(column, dtype=np.int64).reshape(-1, 1)
        if column.shape[0] != self.n:
            raise ParameterError(f"column of length {column.shape[0]} for {self.n} runs")
        return Array(np.hstack([self._cells, column]), (*self._levels, levels))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Array):
            return NotImplemented
        return self._levels == other._levels and np.array_equal(self._cells, other._cells)

    def __hash__(self) -> int:
        return hash((self._levels, self._cells.tobytes()))

    def __reduce__(self):
        return (Array, (self._cells.copy(), self._levels))

    def __repr__(self) -> str:
        return f"Array(n={self.n}, m={self.m}, levels={self._levels})"


class GroupedArray:
    """
    m groups of column triples (a_i, b_i, c_i) over s levels.

    The three families are stored as (n, m) matrices ``a``, ``b`` and ``c``.
    """

    __slots__ = ("_a", "_b", "_c", "_s")

    def __init__(self, a: np.ndarray, b: np.ndarray, c: np.ndarray, s: int) -> None:
        """
        Raises:
            ParameterError: On shape mismatch or entries outside 0..s-1
        """
        mats = [np.array(x, dtype=np.int64) for x in (a, b, c)]
        if s < 2:
            raise ParameterError(f"level count s={s} must be at least 2")
        shape = mats[0].shape
        if len(shape) != 2 or shape[0] < 1 or shape[1] < 1:
            raise ParameterError(f"group columns must form a non-empty n x m matrix, got {shape}")
        if any(x.shape != shape for x in mats):
            raise ParameterError(
                f"column length mismatch: {[x.shape for x in mats]}"
            )
        for x in mats:
            if (x < 0).any() or (x >= s).any():
                raise ParameterError(f"group entries must lie in 0..{s - 1}")
            x.setflags(write=False)
        self._a, self._b, self._c = mats
        self._s = int(s)

    @classmethod
    def from_groups(
        cls, groups: Sequence[Tuple[Sequence[int], Sequence[int], Sequence[int]]], s: int
    ) -> "GroupedArray":
        """Build from a list of (a_i, b_i, c_i) column triples."""
        if not groups:
            raise ParameterError("a grouped array needs at least one group")
        lengths = {len(col) for group in groups for col in group}
        if len(lengths) != 1:
            raise ParameterError(f"column length mismatch: {sorted(lengths)}")
        a, b, c = (np.column_stack([g[k] for g in groups]) for k in range(3))
        return cls(a, b, c, s)

    @classmethod
    def from_array(cls, flat: Array) -> "GroupedArray":
        """Read a 3m-column array laid out a_1 b_1 c_1 a_2 b_2 c_2 ..."""
        if flat.m % 3 != 0:
            raise ParameterError(f"grouped layout needs 3m columns, got {flat.m}")
        cells = flat.cells
        return cls(cells[:, 0::3], cells[:, 1::3], cells[:, 2::3], flat.s)

    def to_array(self) -> Array:
        """Flatten to the a_1 b_1 c_1 a_2 ... column layout."""
        n, m = self._a.shape
        flat = np.empty((n, 3 * m), dtype=np.int64)
        flat[:, 0::3], flat[:, 1::3], flat[:, 2::3] = self._a, self._b, self._c
        return Array(flat, self._s)

    @property
    def a(self) -> np.ndarray:
        return self._a

    @property
    def b(self) -> np.ndarray:
        return self._b

    @property
    def c(self) -> np.ndarray:
        return self._c

    @property
    def s(self) -> int:
        return self._s

    @property
    def n(self) -> int:
        return int(self._a.shape[0])

    @property
    def m(self) -> int:
        return int(self._a.shape[1])

    @property
    def groups(self) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
        return [(self._a[:, i], self._b[:, i], self._c[:, i]) for i in range(self.m)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupedArray):
            return NotImplemented
        return (
            self._s == other._s
            and np.array_equal(self._a, other._a)
            and np.array_equal(self._b, other._b)
            and np.array_equal(self._c, other._c)
        )

    def __hash__(self) -> int:
        return hash((self._s, self._a.tobytes(), self._b.tobytes(), self._c.tobytes()))

    def __reduce__(self):
        return (GroupedArray, (self._a.copy(), self._b.copy(), self._c.copy(), self._s))

    def __repr__(self) -> str:
        return f"GroupedArray(n={self.n}, m={self.m}, s={self._s})"


# ============================================================================
# BALANCE COUNTING
# ============================================================================

def _first_imbalance(
    columns: Sequence[np.ndarray],
    levels: Sequence[int],
    n: int,
) -> Optional[Tuple[Tuple[int, ...], int, int]]:
    """
    Count every level combination of the given columns exactly.

    Combinations are keyed mixed-radix with the first column most
    significant, so key order is lexicographic combination order.

    Returns:
        (combination, observed, expected) of the first deviating combination,
        or None when all combinations occur n / prod(levels) times
    """
    cells = prod(levels)
    expected = n // cells
    keys = np.zeros(n, dtype=np.int64)
    for col, s in zip(columns, levels):
        keys = keys * s + col
    counts = np.bincount(keys, minlength=cells)
    bad = np.flatnonzero(counts != expected)
    if bad.size == 0:
        return None
    key = int(bad[0])
    combo = []
    for s in reversed(levels):
        key, digit = divmod(key, s)
        combo.append(digit)
    return tuple(reversed(combo)), int(counts[bad[0]]), expected


def verify_oa(a: Array, t: int) -> VerificationReport:
    """
    Check that every t columns show all level combinations equally often.

    Mixed levels are supported. Column subsets are visited in lexicographic
    order and the first violation becomes the witness.

    Args:
        a: Array to check
        t: Strength, 1 <= t <= m

    Returns:
        VerificationReport

    Raises:
        ParameterError: If t is out of range or some t-subset's level product
            does not divide n
    """
    if not 1 <= t <= a.m:
        raise ParameterError(f"strength t={t} must lie in 1..{a.m}")
    subsets = list(itertools.combinations(range(a.m), t))
    for subset in subsets:
        cells = prod(a.levels[j] for j in subset)
        if a.n % cells != 0:
            raise ParameterError(
                f"level product {cells} of columns {subset} does not divide n={a.n}; "
                f"no OA of strength {t} has these parameters"
            )
    for subset in subsets:
        found = _first_imbalance(
            [a.cells[:, j] for j in subset], [a.levels[j] for j in subset], a.n
        )
        if found is not None:
            combo, observed, expected = found
            return VerificationReport.fail(Witness(
                columns=list(subset),
                combination=list(combo),
                observed=observed,
                expected=expected,
            ))
    return VerificationReport.ok()


def oa_strength(a: Array) -> int:
    """
    Largest t in 0..m for which ``a`` is an orthogonal array of strength t.

    Strengths whose level products do not divide n count as failed.
    """
    best = 0
    for t in range(1, a.m + 1):
        try:
            if not verify_oa(a, t).passed:
                break
        except ParameterError:
            break
        best = t
    return best


# ============================================================================
# STRONG ORTHOGONAL ARRAYS
# ============================================================================

def collapse_column(col: Sequence[int], s: int, t: int, u: int) -> np.ndarray:
    """
    Collapse s^t levels to s^u levels by a -> floor(a / s^(t-u)).

    Raises:
        ParameterError: If u is outside 1..t or an entry is outside 0..s^t-1
    """
    if not 1 <= u <= t:
        raise ParameterError(f"collapse target u={u} must lie in 1..{t}")
    values = np.asarray(col, dtype=np.int64)
    if (values < 0).any() or (values >= s ** t).any():
        raise ParameterError(f"column entries must lie in 0..{s ** t - 1}")
    return values // s ** (t - u)


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered compositions of ``total`` into ``parts`` positive parts, lexicographic."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first, *rest)


def _check_soa_shape(a: Array, params: SoaParams) -> None:
    if any(level != params.levels for level in a.levels):
        raise ParameterError(
            f"every column must have s^t={params.levels} levels, got {a.levels}"
        )
    if a.n % params.levels != 0:
        raise ParameterError(f"s^t={params.levels} does not divide n={a.n}")


def verify_soa(a: Array, params: SoaParams) -> VerificationReport:
    """
    Check the strong orthogonal array property of strength t in base s.

    For g = 1..t, every g-subset of columns (lexicographic) and every ordered
    composition (u_1..u_g) of t (lexicographic), the sub-array collapsed by
    floor(a / s^(t-u_j)) must be an OA(n, g, s^u_1 x ... x s^u_g, g).

    Raises:
        ParameterError: If a column does not have s^t levels or s^t does not divide n
    """
    _check_soa_shape(a, params)
    s, t = params.s, params.t
    for g in range(1, min(t, a.m) + 1):
        for subset in itertools.combinations(range(a.m), g):
            for composition in compositions(t, g):
                columns = [
                    a.cells[:, j] // s ** (t - u) for j, u in zip(subset, composition)
                ]
                found = _first_imbalance(columns, [s ** u for u in composition], a.n)
                if found is not None:
                    combo, observed, expected = found
                    logger.debug(
                        f"SOA check failed on columns {subset} composition {composition}"
                    )
                    return VerificationReport.fail(Witness(
                        columns=list(subset),
                        composition=list(composition),
                        combination=list(combo),
                        observed=observed,
                        expected=expected,
                    ))
    return VerificationReport.ok()


# ============================================================================
# GENERALIZED ORTHOGONAL ARRAYS
# ============================================================================

def verify_goa(g: GroupedArray) -> VerificationReport:
    """
    Check the strength-three GOA conditions.

    Families are checked in order: (a_i, a_j, a_k) for i < j < k,
    (a_i, b_i, a_j) for every i != j, then (a_i, b_i, c_i).

    Raises:
        ParameterError: If s^3 does not divide n
    """
    s, n, m = g.s, g.n, g.m
    if n % s ** 3 != 0:
        raise ParameterError(f"s^3={s ** 3} does not divide n={n}")
    levels = [s, s, s]

    def check(
        label: str, columns: List[np.ndarray], groups: List[int]
    ) -> Optional[VerificationReport]:
        found = _first_imbalance(columns, levels, n)
        if found is None:
            return None
        combo, observed, expected = found
        return VerificationReport.fail(Witness(
            columns=groups,
            combination=list(combo),
            observed=observed,
            expected=expected,
            label=label,
        ))

    for i, j, k in itertools.combinations(range(m), 3):
        failed = check(f"(a_{i}, a_{j}, a_{k})", [g.a[:, i], g.a[:, j], g.a[:, k]], [i, j, k])
        if failed is not None:
            return failed
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            failed = check(f"(a_{i}, b_{i}, a_{j})", [g.a[:, i], g.b[:, i], g.a[:, j]], [i, j])
            if failed is not None:
                return failed
    for i in range(m):
        failed = check(f"(a_{i}, b_{i}, c_{i})", [g.a[:, i], g.b[:, i], g.c[:, i]], [i])
        if failed is not None:
            return failed
    return VerificationReport.ok()


# ============================================================================
# COINCIDENCES AND REPEATED RUNS
# ============================================================================

def coincidence_profile(a: Array, row: int) -> CoincidenceProfile:
    """
    Count the other rows agreeing with ``row`` in exactly i columns, i = 0..m.

    Raises:
        ParameterError: If row is out of range
    """
    if not 0 <= row < a.n:
        raise ParameterError(f"row {row} out of range for {a.n} runs")
    agreements = (a.cells == a.cells[row]).sum(axis=1)
    agreements = np.delete(agreements, row)
    counts = np.bincount(agreements, minlength=a.m + 1)
    return CoincidenceProfile(reference_row=row, counts=[int(c) for c in counts])


def coincidence_identity_check(a: Array, row: int, t: int) -> VerificationReport:
    """
    Check sum_{i>=j} C(i, j) n_i = C(m, j) (n / s^j - 1) for j = 0..t.

    The identity holds around every row of an OA(n, m, s, t); callers are
    responsible for that precondition.

    Raises:
        ParameterError: If levels are mixed or s^t does not divide n
    """
    s = a.s
    if t < 0 or t > a.m:
        raise ParameterError(f"strength t={t} must lie in 0..{a.m}")
    if a.n % s ** t != 0:
        raise ParameterError(f"s^t={s ** t} does not divide n={a.n}")
    counts = coincidence_profile(a, row).counts
    for j in range(t + 1):
        lhs = sum(comb(i, j) * counts[i] for i in range(j, a.m + 1))
        rhs = comb(a.m, j) * (a.n // s ** j - 1)
        if lhs != rhs:
            return VerificationReport.fail(Witness(
                label=f"coincidence identity j={j} at row {row}",
                observed=lhs,
                expected=rhs,
            ))
    return VerificationReport.ok()


def repeated_runs(a: Array) -> List[Tuple[Tuple[int, ...], int]]:
    """Distinct rows occurring at least twice, in lexicographic row order."""
    unique, counts = np.unique(a.cells, axis=0, return_counts=True)
    return [
        (tuple(int(x) for x in r), int(c))
        for r, c in zip(unique, counts)
        if c >= 2
    ]


def repeated_run_bound_check(n: int, m: int, s: int, t: int, has_repeated_run: bool) -> bool:
    """
    Check the column bound for index-two arrays with a repeated run.

    An OA(2 s^t, m, s, t) with a repeated run has m <= s + t - 1.

    Returns:
        False when the parameter set is forbidden

    Raises:
        ParameterError: If n != 2 s^t
    """
    if n != 2 * s ** t:
        raise ParameterError(
            f"the repeated-run bound requires index 2 (n = 2 s^t = {2 * s ** t}), got n={n}"
        )
    return not has_repeated_run or m <= s + t - 1


def forced_repeated_run_profile(m: int, s: int, t: int) -> Dict[int, int]:
    """
    Coincidence counts forced around a repeated run of an OA(2 s^t, m, s, t).

    Solving the coincidence identity for j = t, t-1, t-2 with n_m = 1 gives
    n_t = ... = n_{m-1} = 0, n_{t-1} = 2(s-1) C(m, t-1) and
    n_{t-2} = 2(s-1)(s+t-1-m) C(m, t-2). A negative n_{t-2} means no such
    array exists.

    Returns:
        Mapping i -> n_i for i in t-2..m (only i >= 0)

    Raises:
        ParameterError: If t < 1 or m < t
    """
    if t < 1 or m < t:
        raise ParameterError(f"need 1 <= t <= m, got t={t}, m={m}")
    profile = {i: 0 for i in range(t, m)}
    profile[m] = 1
    profile[t - 1] = 2 * (s - 1) * comb(m, t - 1)
    if t >= 2:
        profile[t - 2] = 2 * (s - 1) * (s + t - 1 - m) * comb(m, t - 2)
    return dict(sorted(profile.items()))


def extended_repeated_run_gap(s: int) -> int:
    """
    Surplus of forced coincidences when extending an OA(2s^2, s+1, s, 2) with a repeated run.

    Any added column forces n+_1 = 2s^2 - 5 and n+_2 = s + 1 around the
    repeated run, while only 2(s^2 - 1) rows are available to split between
    them. The returned surplus s - 2 is positive for s >= 3, so no such child
    is embeddable.
    """
    if s < 2:
        raise ParameterError(f"s={s} must be at least 2")
    forced = (2 * s ** 2 - 5) + (s + 1)
    available = 2 * (s ** 2 - 1)
    return forced - available
