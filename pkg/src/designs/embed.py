"""
Embedding - Branching, column-extension search and semi-embeddability

Branching fixes one column of an OA(n, m, s, t) at a level and deletes that
column, leaving a child OA(n/s, m-1, s, t-1). find_extension runs a complete
backtracking search for one more s-level column that keeps strength t, and
is_semi_embeddable asks that question of every child.

The search assigns rows in index order with values ascending, so the first
column it completes is the lexicographically least one. Pruning keeps the
search complete: per-group level quotas with forward checking, naked and
hidden single propagation, and value-symmetry breaking (a level may only
appear after every smaller level has appeared).
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np
from loguru import logger
from pydantic import ConfigDict, Field

from src.core.config import config
from src.core.errors import ParameterError
from src.core.models import (
    BoundsWitness,
    ChildEmbedding,
    EmbeddingReport,
    FrozenModel,
    SemiEmbedReport,
)
from src.designs.arrays import Array, repeated_runs, verify_oa


class ChildArray(FrozenModel):
    """One child of a branched array."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    parent_column: int = Field(..., ge=0, description="Branched parent column")
    branch_level: int = Field(..., ge=0, description="Level fixed on the parent column")
    rows: List[int] = Field(..., description="Parent rows holding branch_level, ascending")
    array: Array = Field(..., description="Parent rows with the branched column removed")


# ============================================================================
# EXTENSION SEARCH
# ============================================================================

class ExtensionSearch:
    """
    Complete search for an s-level column extending an array to strength t.

    Every (t-1)-subset of columns together with one of its level combinations
    forms a group of n / s^(t-1) rows; the new column must take each level
    exactly n / s^t times inside every group. For t = 1 there is a single
    group holding all rows.

    Attributes:
        n: Run count
        s: Level count of the new column
        quota: Required occurrences of each level per group
        nodes: Branching decisions made so far
    """

    def __init__(self, a: Array, t: int) -> None:
        self.n = a.n
        self.s = a.s
        self.quota = a.n // self.s ** t
        self.nodes = 0
        self._progress_every = config.search.progress_interval

        self.group_rows: List[List[int]] = []
        self.row_groups: List[List[int]] = [[] for _ in range(self.n)]
        cells = a.cells
        for subset in itertools.combinations(range(a.m), t - 1):
            keys = np.zeros(self.n, dtype=np.int64)
            for j in subset:
                keys = keys * self.s + cells[:, j]
            base = len(self.group_rows)
            width = self.s ** (t - 1)
            self.group_rows.extend([] for _ in range(width))
            for r, key in enumerate(keys.tolist()):
                self.group_rows[base + key].append(r)
                self.row_groups[r].append(base + key)

        self.counts = [0] * (len(self.group_rows) * self.s)
        self.value = [-1] * self.n
        self.domain = [(1 << self.s) - 1] * self.n
        # (row, previous domain, assigned?) records, undone in reverse
        self._trail: List[Tuple[int, int, bool]] = []

    # ------------------------------------------------------------------
    # Trail
    # ------------------------------------------------------------------

    def _undo(self, mark: int) -> None:
        trail, s = self._trail, self.s
        while len(trail) > mark:
            r, previous, assigned = trail.pop()
            if assigned:
                v = self.value[r]
                for g in self.row_groups[r]:
                    self.counts[g * s + v] -= 1
                self.value[r] = -1
            self.domain[r] = previous

    def _remove(self, r: int, v: int, forced: List[Tuple[int, int]], dirty: Set[int]) -> bool:
        """Drop level v from an unassigned row; False on a wipe-out."""
        old = self.domain[r]
        new = old & ~(1 << v)
        self._trail.append((r, old, False))
        self.domain[r] = new
        if new == 0:
            return False
        if new & (new - 1) == 0:
            forced.append((r, new.bit_length() - 1))
        dirty.update(self.row_groups[r])
        return True

    # ------------------------------------------------------------------
    # Propagation
    # ------------------------------------------------------------------

    def _propagate(self, forced: List[Tuple[int, int]]) -> bool:
        """
        Apply assignments and everything they force.

        Returns:
            False when a group quota can no longer be met
        """
        s, quota = self.s, self.quota
        value, domain, counts = self.value, self.domain, self.counts
        dirty: Set[int] = set()

        while forced or dirty:
            while forced:
                r, v = forced.pop()
                if value[r] != -1:
                    if value[r] != v:
                        return False
                    continue
                if not domain[r] >> v & 1:
                    return False

                self._trail.append((r, domain[r], True))
                value[r] = v
                domain[r] = 1 << v
                groups = self.row_groups[r]
                for g in groups:
                    counts[g * s + v] += 1

                for g in groups:
                    filled = counts[g * s + v]
                    if filled > quota:
                        return False
                    if filled == quota:
                        for r2 in self.group_rows[g]:
                            if value[r2] == -1 and domain[r2] >> v & 1:
                                if not self._remove(r2, v, forced, dirty):
                                    return False
                    dirty.add(g)

            # hidden singles: a level with exactly as many candidates as it still needs
            while dirty and not forced:
                g = dirty.pop()
                rows = self.group_rows[g]
                for v in range(s):
                    need = quota - counts[g * s + v]
                    if need == 0:
                        continue
                    bit = 1 << v
                    candidates = [r2 for r2 in rows if value[r2] == -1 and domain[r2] & bit]
                    if len(candidates) < need:
                        return False
                    if len(candidates) == need:
                        forced.extend((r2, v) for r2 in candidates)
        return True

    # ------------------------------------------------------------------
    # Backtracking
    # ------------------------------------------------------------------

    def _descend(self, r: int, top: int) -> bool:
        """
        Extend the assignment from row r onwards.

        Args:
            r: First row not yet visited in index order
            top: Largest level used by rows before r (-1 if none)
        """
        value = self.value
        while r < self.n and value[r] != -1:
            # rows settled by propagation must respect first-appearance order too
            if value[r] > top + 1:
                return False
            top = max(top, value[r])
            r += 1
        if r == self.n:
            return True

        for v in range(min(self.s - 1, top + 1) + 1):
            if not self.domain[r] >> v & 1:
                continue
            self.nodes += 1
            if self.nodes % self._progress_every == 0:
                logger.debug(f"extension search: {self.nodes} nodes, row {r}/{self.n}")
            mark = len(self._trail)
            if self._propagate([(r, v)]) and self._descend(r + 1, max(top, v)):
                return True
            self._undo(mark)
        return False

    def run(self) -> Optional[List[int]]:
        """
        Search the whole tree.

        Returns:
            The lexicographically least extension column, or None if none exists
        """
        if self._descend(0, -1):
            return list(self.value)
        return None


def _require_symmetric(a: Array) -> int:
    if not a.is_symmetric:
        raise ParameterError(f"branching and extension need symmetric levels, got {a.levels}")
    return a.s


def _require_oa(a: Array, t: int) -> None:
    report = verify_oa(a, t)
    if not report.passed:
        raise ParameterError(
            f"array is not an OA of strength {t}: {report.witness.describe()}"
        )


def find_extension(a: Array, t: int) -> EmbeddingReport:
    """
    Search for one more s-level column keeping strength t.

    Args:
        a: An OA(n, m, s, t)
        t: Strength, t >= 1

    Returns:
        EmbeddingReport with the lexicographically least extension, or
        embeddable=False once the search tree is exhausted

    Raises:
        ParameterError: On mixed levels, s^t not dividing n, t > m, or a not
            being an OA of strength t
    """
    s = _require_symmetric(a)
    if t < 1:
        raise ParameterError(f"strength t={t} must be at least 1")
    if a.n % s ** t != 0:
        raise ParameterError(f"s^t={s ** t} does not divide n={a.n}")
    _require_oa(a, t)

    search = ExtensionSearch(a, t)
    extension = search.run()
    logger.debug(
        f"find_extension n={a.n} m={a.m} s={s} t={t}: "
        f"{'found' if extension is not None else 'none'} after {search.nodes} nodes"
    )
    return EmbeddingReport(
        embeddable=extension is not None,
        extension=extension,
        search_nodes=search.nodes,
    )


# ============================================================================
# BRANCHING
# ============================================================================

def _branch_column(a: Array, column: int) -> List[ChildArray]:
    others = [j for j in range(a.m) if j != column]
    children = []
    for level in range(a.s):
        rows = np.flatnonzero(a.column(column) == level).tolist()
        children.append(ChildArray(
            parent_column=column,
            branch_level=level,
            rows=rows,
            array=a.take_rows(rows).select_columns(others),
        ))
    return children


def branch(a: Array, column: int, t: int) -> List[ChildArray]:
    """
    Split an OA(n, m, s, t) on one column into its s children.

    Args:
        a: Parent array
        column: Column to branch on
        t: Parent strength, t >= 2

    Returns:
        Children ordered by branch level ascending

    Raises:
        ParameterError: If t < 2, m < 2, the column is out of range, levels
            are mixed, or a is not an OA of strength t
    """
    _require_symmetric(a)
    if t < 2:
        raise ParameterError(f"branching needs strength t >= 2, got {t}")
    if a.m < 2:
        raise ParameterError("branching needs at least two columns")
    if not 0 <= column < a.m:
        raise ParameterError(f"column {column} out of range for {a.m} columns")
    _require_oa(a, t)
    return _branch_column(a, column)


def all_children(a: Array) -> List[ChildArray]:
    """
    The m*s children of a, column-major and level-minor.

    The caller is responsible for a being an OA of strength >= 2.
    """
    _require_symmetric(a)
    return [child for j in range(a.m) for child in _branch_column(a, j)]


def _child_report(child: Array, t: int) -> EmbeddingReport:
    return find_extension(child, t)


def search_children(
    children: Sequence[ChildArray], t: int, stop_on_failure: bool = True
) -> List[ChildEmbedding]:
    """
    Run find_extension at strength t on each child.

    Children are searched in a process pool when ``search.max_workers`` > 1;
    results always come back in the given order. With ``stop_on_failure`` the
    list ends at the first nonembeddable child.
    """
    results: List[ChildEmbedding] = []
    workers = config.search.max_workers

    def record(child: ChildArray, report: EmbeddingReport) -> bool:
        logger.debug(
            f"child (column {child.parent_column}, level {child.branch_level}): "
            f"{'embeddable' if report.embeddable else 'not embeddable'}"
        )
        results.append(ChildEmbedding(
            column=child.parent_column, level=child.branch_level, report=report
        ))
        return report.embeddable or not stop_on_failure

    if workers <= 1 or len(children) <= 1:
        for child in children:
            if not record(child, find_extension(child.array, t)):
                break
        return results

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_child_report, child.array, t) for child in children]
        for child, future in zip(children, futures):
            if not record(child, future.result()):
                for pending in futures:
                    pending.cancel()
                break
    return results


def has_repeated_run_shape(a: Array, t: int) -> bool:
    """Whether a is an index-two strength-3 array with s+2 columns, s >= 3, and a repeated run."""
    s = a.s
    return (
        t == 3
        and s >= 3
        and a.n == 2 * s ** 3
        and a.m == s + 2
        and bool(repeated_runs(a))
    )


def is_semi_embeddable(a: Array, t: int) -> SemiEmbedReport:
    """
    Decide whether every one of the m*s children of a is embeddable.

    Index-two strength-3 arrays with s+2 columns (s >= 3) and a repeated run
    are rejected without searching: one of their children is then an
    OA(2s^2, s+1, s, 2) with a repeated run, and such a child cannot take
    another column. Otherwise children are searched column-major, level-minor,
    stopping at the first nonembeddable one.

    Raises:
        ParameterError: As for branch
    """
    _require_symmetric(a)
    if has_repeated_run_shape(a, t):
        logger.info(
            f"n={a.n}, m={a.m}, s={a.s} with a repeated run: not semi-embeddable, no search needed"
        )
        return SemiEmbedReport(semi_embeddable=False, short_circuit="repeated_run_shape")

    if t < 2:
        raise ParameterError(f"branching needs strength t >= 2, got {t}")
    if a.m < 2:
        raise ParameterError("branching needs at least two columns")
    _require_oa(a, t)

    children = all_children(a)
    per_child = search_children(children, t - 1)
    verdict = len(per_child) == len(children) and all(c.report.embeddable for c in per_child)
    logger.info(
        f"semi-embeddability n={a.n} m={a.m} s={a.s} t={t}: "
        f"{verdict} ({len(per_child)}/{len(children)} children searched)"
    )
    return SemiEmbedReport(semi_embeddable=verdict, per_child=per_child)


# ============================================================================
# EXTENSION CHASE
# ============================================================================

def max_extension(a: Array, t: int, column_limit: int) -> Tuple[Array, BoundsWitness]:
    """
    Append extension columns until none exists or column_limit is reached.

    Returns:
        (extended array, BoundsWitness). ``exhaustive`` is True when the chase
        ended on a search that found no column.

    Raises:
        ParameterError: As for find_extension, or column_limit below m
    """
    if column_limit < a.m:
        raise ParameterError(f"column limit {column_limit} is below the starting m={a.m}")
    current = a
    exhaustive = False
    while current.m < column_limit:
        report = find_extension(current, t)
        if not report.embeddable:
            exhaustive = True
            break
        current = current.append_column(report.extension, current.s)
        logger.info(f"extended to {current.m} columns after {report.search_nodes} nodes")

    witness = BoundsWitness(
        n=a.n,
        s=a.s,
        t=t,
        start_columns=a.m,
        columns_reached=current.m,
        exhaustive=exhaustive,
    )
    return current, witness
