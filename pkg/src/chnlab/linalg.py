"""Exact linear algebra over Scalar and GaussRational coefficients.

Rows are sparse ``dict`` objects mapping a sortable column key to a nonzero
coefficient.  ``Echelon`` maintains a row-echelon basis incrementally and
is the workhorse of ideal membership.  Over Scalars it runs fraction-free:
rows are cleared to polynomial entries, reduced by cross-multiplication,
and kept primitive (content divided out) so coefficients stay small.
"""

from __future__ import annotations

import heapq
from typing import Hashable, Iterable, Mapping, Sequence

from .scalar import Scalar

Row = dict

__all__ = ["Echelon", "SingularSystemError", "inverse", "rank", "solve"]


class SingularSystemError(ArithmeticError):
    """A square system has no unique solution.

    ``nullity`` is the dimension of the homogeneous solution space and
    ``consistent`` tells whether any solution exists at all.
    """

    def __init__(self, message: str, nullity: int, consistent: bool):
        super().__init__(message)
        self.nullity = nullity
        self.consistent = consistent


# -- polynomial helpers for the fraction-free path -------------------------


def _poly_gcd(a: Scalar, b: Scalar) -> Scalar:
    from .scalar import _unify

    an, _, bn, _ = _unify(a, b)
    return Scalar._raw(an.gcd(bn), an.ring.one)


def _poly_lcm(a: Scalar, b: Scalar) -> Scalar:
    from .scalar import _unify

    an, _, bn, _ = _unify(a, b)
    return Scalar._raw(an.lcm(bn), an.ring.one)


def _clear_denominators(row: Row) -> Row:
    common = None
    for c in row.values():
        if not c.is_polynomial():
            den = Scalar._raw(c.denominator, c.denominator.ring.one)
            common = den if common is None else _poly_lcm(common, den)
    if common is None:
        return dict(row)
    return {k: c * common for k, c in row.items()}


def _primitive(row: Row, lead) -> Row:
    """Divide out the content of a polynomial row; normalize the leading coefficient."""
    values = iter(row.values())
    g = next(values)
    for c in values:
        if g.is_constant():
            break
        g = _poly_gcd(g, c)
    if not g.is_constant():
        row = {k: c.exquo(g) for k, c in row.items()}
    # fix the unit: leading coefficient's leading term becomes 1
    lc = row[lead].numerator.LC
    if lc != row[lead].numerator.ring.domain.one:
        unit = Scalar._raw(row[lead].numerator.ring.ground_new(lc), row[lead].numerator.ring.one)
        row = {k: c / unit for k, c in row.items()}
    return row


class Echelon:
    """Incremental row-echelon basis.

    >>> e = Echelon()
    >>> e.add({"a": Scalar(1), "b": Scalar(2)})
    True
    >>> e.contains({"a": Scalar(2), "b": Scalar(4)})
    True
    """

    def __init__(self, fraction_free: bool | None = None):
        self._pivots: dict[Hashable, Row] = {}
        self._fraction_free = fraction_free

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def rows(self) -> list[Row]:
        return [self._pivots[k] for k in sorted(self._pivots)]

    @property
    def pivot_columns(self) -> list:
        return sorted(self._pivots)

    def _mode(self, row: Row) -> bool:
        if self._fraction_free is None:
            sample = next(iter(row.values()))
            self._fraction_free = isinstance(sample, Scalar)
        return self._fraction_free

    def reduce(self, row: Mapping) -> Row:
        """Remainder of ``row`` after elimination against the basis."""
        r = {k: c for k, c in row.items() if c}
        if not r:
            return r
        ff = self._mode(r)
        if ff:
            r = _clear_denominators(r)
        heap = list(r)
        heapq.heapify(heap)
        seen = set()
        while heap:
            col = heapq.heappop(heap)
            if col in seen:
                continue
            seen.add(col)
            if col not in r or col not in self._pivots:
                continue
            pivot_row = self._pivots[col]
            factor = r[col]
            if ff:
                p = pivot_row[col]
                out = {k: c * p for k, c in r.items()}
                for k, c in pivot_row.items():
                    v = out.get(k)
                    v = -(factor * c) if v is None else v - factor * c
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
                r = out
            else:
                for k, c in pivot_row.items():
                    v = r.get(k)
                    v = -(factor * c) if v is None else v - factor * c
                    if v:
                        r[k] = v
                    else:
                        r.pop(k, None)
            for k in pivot_row:
                if k not in seen and k in r:
                    heapq.heappush(heap, k)
            if not r:
                break
        if ff and r:
            r = _primitive(r, min(r))
        return r

    def add(self, row: Mapping) -> bool:
        """Insert ``row``; returns True when it enlarged the span."""
        r = self.reduce(row)
        if not r:
            return False
        lead = min(r)
        if not self._fraction_free:
            inv = 1 / r[lead]
            r = {k: c * inv for k, c in r.items()}
        self._pivots[lead] = r
        return True

    def extend(self, rows: Iterable[Mapping]) -> int:
        return sum(1 for row in rows if self.add(row))

    def contains(self, row: Mapping) -> bool:
        return not self.reduce(row)


def rank(rows: Iterable[Mapping], fraction_free: bool | None = None) -> int:
    e = Echelon(fraction_free)
    e.extend(rows)
    return e.rank


def _gauss_jordan(matrix: list[list], rhs_cols: int):
    """In-place reduced row echelon on an augmented dense matrix; returns pivot list."""
    rows = len(matrix)
    cols = len(matrix[0]) - rhs_cols if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if matrix[i][c]), None)
        if p is None:
            continue
        matrix[r], matrix[p] = matrix[p], matrix[r]
        inv = 1 / matrix[r][c]
        matrix[r] = [x * inv if x else x for x in matrix[r]]
        for i in range(rows):
            if i != r and matrix[i][c]:
                f = matrix[i][c]
                matrix[i] = [x - f * y if y else x for x, y in zip(matrix[i], matrix[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list:
    """Unique solution x of matrix @ x = rhs over a field; raises SingularSystemError."""
    n = len(matrix)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    pivots = _gauss_jordan(aug, 1)
    cols = len(matrix[0])
    nullity = cols - len(pivots)
    consistent = all(not aug[i][-1] for i in range(len(pivots), n))
    if nullity or not consistent:
        raise SingularSystemError(
            f"system is {'underdetermined' if consistent else 'inconsistent'}"
            f" (solution-space dimension {nullity if consistent else 'n/a'})",
            nullity,
            consistent,
        )
    return [aug[i][-1] for i in range(cols)]


def inverse(matrix: Sequence[Sequence], one) -> list[list]:
    """Inverse of a square matrix; ``one`` is the field's unit element."""
    n = len(matrix)
    zero = one - one
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(matrix)]
    pivots = _gauss_jordan(aug, n)
    if len(pivots) < n:
        raise SingularSystemError("matrix is not invertible", n - len(pivots), False)
    return [row[n:] for row in aug]
