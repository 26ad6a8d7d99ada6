"""
Finite Fields - Exact GF(q) arithmetic tables for prime powers q

Elements are the integers 0..q-1; element e stands for the polynomial whose
coefficients are the base-p digits of e, lowest degree first. The defining
polynomial is the lexicographically least monic irreducible polynomial of
degree h over GF(p), comparing coefficients from the constant term upwards.
Tables are produced with ``galois`` and frozen into plain numpy lookups.
"""

import itertools
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import galois
import numpy as np
from loguru import logger

from src.core.config import config
from src.core.errors import ParameterError


def factor_prime_power(q: int) -> Optional[Tuple[int, int]]:
    """
    Split q into (p, h) with q = p^h, p prime, h >= 1.

    Trial division is enough for the tiny orders used here.

    Returns:
        (p, h), or None if q is not a prime power
    """
    if not isinstance(q, (int, np.integer)) or q < 2:
        return None
    q = int(q)
    p = next(d for d in itertools.count(2) if q % d == 0 or d * d > q)
    if q % p != 0:
        p = q
    h = 0
    rest = q
    while rest % p == 0:
        rest //= p
        h += 1
    if rest != 1:
        return None
    return p, h


def is_prime_power(q: int) -> bool:
    """Whether q = p^h for a prime p and h >= 1."""
    return factor_prime_power(q) is not None


def least_irreducible(p: int, h: int) -> Tuple[int, ...]:
    """
    Lexicographically least monic irreducible polynomial of degree h over GF(p).

    Candidates (c_0, ..., c_{h-1}) are scanned with c_0 most significant.

    Returns:
        Coefficients low-degree first, including the leading 1 (length h+1)
    """
    prime_field = galois.GF(p)
    for low in itertools.product(range(p), repeat=h):
        coeffs = (*low, 1)
        poly = galois.Poly(list(coeffs), field=prime_field, order="asc")
        if h == 1 or poly.is_irreducible():
            return coeffs
    raise AssertionError(f"no irreducible polynomial of degree {h} over GF({p})")


class FieldTable:
    """
    Arithmetic tables of GF(q).

    Attributes:
        q: Field order
        p: Characteristic
        h: Extension degree (q = p^h)
        add: q x q addition table
        mul: q x q multiplication table
        inv: Multiplicative inverses (entry 0 unused, stored as 0)
        poly: Defining polynomial, low-degree first

    Example:
        >>> f = field_new(4)
        >>> int(f.mul[2, 2])
        3
    """

    __slots__ = ("q", "p", "h", "add", "mul", "inv", "neg_table", "poly")

    def __init__(
        self,
        q: int,
        p: int,
        h: int,
        add: np.ndarray,
        mul: np.ndarray,
        inv: np.ndarray,
        poly: Tuple[int, ...],
    ) -> None:
        for table in (add, mul, inv):
            table.setflags(write=False)
        neg = np.argmin(add, axis=1).astype(np.int64)
        neg.setflags(write=False)
        self.q = q
        self.p = p
        self.h = h
        self.add = add
        self.mul = mul
        self.inv = inv
        self.neg_table = neg
        self.poly = poly

    def _check(self, *elements: int) -> None:
        for e in elements:
            if not 0 <= int(e) < self.q:
                raise ParameterError(f"element {e} out of range for GF({self.q})")

    def neg(self, a: int) -> int:
        self._check(a)
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.add[a, self.neg_table[b]])

    def power(self, a: int, k: int) -> int:
        """a^k for k >= 0 (0^0 = 1)."""
        self._check(a)
        result = 1
        for _ in range(k):
            result = int(self.mul[result, a])
        return result

    def eval_poly(self, coeffs: Sequence[int], x: int) -> int:
        """Evaluate a polynomial given low-degree first at x (Horner)."""
        return field_eval_poly(self, coeffs, x)

    def dot(self, vectors: np.ndarray, coeffs: Sequence[int]) -> np.ndarray:
        """
        Inner products of many vectors with one coefficient vector.

        Args:
            vectors: (N, k) array of field elements
            coeffs: length-k coefficient vector

        Returns:
            Length-N array of sum_i vectors[:, i] * coeffs[i] in GF(q)
        """
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.ndim != 2 or vectors.shape[1] != len(coeffs):
            raise ParameterError("dot needs an (N, k) array and k coefficients")
        self._check(*coeffs)
        acc = np.zeros(vectors.shape[0], dtype=np.int64)
        for i, c in enumerate(coeffs):
            acc = self.add[acc, self.mul[vectors[:, i], int(c)]]
        return acc

    def __repr__(self) -> str:
        return f"FieldTable(q={self.q}, poly={self.poly})"


def field_new(q: int) -> FieldTable:
    """
    Build the arithmetic tables of GF(q).

    Args:
        q: Field order, a prime power not above the configured maximum

    Returns:
        Immutable FieldTable (cached per q)

    Raises:
        ParameterError: If q is not a prime power or is too large
    """
    factored = factor_prime_power(q)
    if factored is None:
        raise ParameterError(f"q={q} is not a prime power")
    if q > config.construction.max_field_order:
        raise ParameterError(
            f"q={q} exceeds the largest supported field order "
            f"{config.construction.max_field_order}"
        )
    p, h = factored
    return _field_table(q, p, h)


@lru_cache(maxsize=None)
def _field_table(q: int, p: int, h: int) -> FieldTable:
    poly = least_irreducible(p, h)

    if h == 1:
        field = galois.GF(p)
    else:
        defining = galois.Poly(list(poly), field=galois.GF(p), order="asc")
        field = galois.GF(q, irreducible_poly=defining)

    elements = field.elements
    add = (elements[:, None] + elements[None, :]).view(np.ndarray).astype(np.int64)
    mul = (elements[:, None] * elements[None, :]).view(np.ndarray).astype(np.int64)
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = np.reciprocal(elements[1:]).view(np.ndarray)

    logger.debug(f"GF({q}) tables built with defining polynomial {poly}")
    return FieldTable(q=q, p=p, h=h, add=add, mul=mul, inv=inv, poly=poly)


def field_eval_poly(f: FieldTable, coeffs: Sequence[int], x: int) -> int:
    """
    Evaluate sum coeffs[i] * x^i in GF(q) by Horner's scheme.

    Raises:
        ParameterError: If a coefficient or x is not a field element
    """
    f._check(x, *coeffs)
    acc = 0
    for c in reversed(list(coeffs)):
        acc = int(f.add[f.mul[acc, x], c])
    return acc
