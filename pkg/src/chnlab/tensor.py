"""Sparse exact linear operators on tensor powers of V = C^n.

An operator of arity k acts on V^{(x)k}.  Multi-indices are flattened
row-major, so (i1, ..., ik) -> sum (i_j - 1) n^(k-j); the basis order of a
two-fold product is 11, 12, ..., 1n, 21, ...  Internally indices are
0-based flat integers; the public accessors use 1-based tuples.

Tensor factors are numbered from 1 as well: ``place(op, 2, 3)`` puts a
two-factor operator on factors 2 and 3 of V^{(x)3}.
"""

from __future__ import annotations

import os
from collections import defaultdict
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Mapping

from . import linalg
from .scalar import GaussRational, Scalar

__all__ = [
    "NotInvertibleError",
    "ShapeError",
    "TensorOp",
    "compose",
    "inverse",
    "multi_index",
    "partial_trace",
    "place",
    "quantum_partial_trace",
]

CHECK_SPARSITY = bool(os.environ.get("CHNLAB_DEBUG"))


class ShapeError(ValueError):
    pass


class NotInvertibleError(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def _digits(n: int, k: int) -> list[tuple[int, ...]]:
    return list(product(range(n), repeat=k))


def multi_index(flat: int, n: int, k: int) -> tuple[int, ...]:
    """1-based multi-index of a 0-based flat index."""
    return tuple(d + 1 for d in _digits(n, k)[flat])


def flat_index(multi: Iterable[int], n: int) -> int:
    idx = 0
    for i in multi:
        if not 1 <= i <= n:
            raise ShapeError(f"index {i} out of range 1..{n}")
        idx = idx * n + (i - 1)
    return idx


@lru_cache(maxsize=None)
def _trace_plan(n: int, k: int, traced: frozenset[int]):
    """Per flat index: (digits in traced slots, flat index over the kept slots)."""
    kept = [p for p in range(k) if p not in traced]
    tslots = sorted(traced)
    plan = []
    for dig in _digits(n, k):
        t = tuple(dig[p] for p in tslots)
        flat = 0
        for p in kept:
            flat = flat * n + dig[p]
        plan.append((t, flat))
    return plan


def _check_factors(factors: Iterable[int], arity: int) -> frozenset[int]:
    fs = frozenset(factors)
    bad = [p for p in fs if not 1 <= p <= arity]
    if bad:
        raise ShapeError(f"trace positions {sorted(bad)} outside 1..{arity}")
    return frozenset(p - 1 for p in fs)


def trace_entries(entries: Mapping, n: int, k: int, factors: Iterable[int], add, zero_test):
    """Shared partial-trace kernel for TensorOp and NCMatrix entry maps."""
    traced = _check_factors(factors, k)
    plan = _trace_plan(n, k, traced)
    out = {}
    for (r, c), v in entries.items():
        tr, kr = plan[r]
        tc, kc = plan[c]
        if tr != tc:
            continue
        key = (kr, kc)
        out[key] = add(out[key], v) if key in out else v
    return {key: v for key, v in out.items() if not zero_test(v)}


def place_entries(entries: Mapping, n: int, m: int, position: int, total: int) -> dict:
    if position < 1 or position + m - 1 > total:
        raise ShapeError(f"cannot place {m} factor(s) at position {position} of {total}")
    before = n ** (position - 1)
    after = n ** (total - position - m + 1)
    block = n**m * after
    out = {}
    for (r, c), v in entries.items():
        ra, ca = r * after, c * after
        for a in range(before):
            base = a * block
            for s in range(after):
                out[(base + ra + s, base + ca + s)] = v
    return out


class TensorOp:
    """Sparse operator on V^{(x)arity} with exact coefficients from ``field``.

    ``field`` is the coefficient class (Scalar, GaussRational or Fraction);
    it only matters for building constants such as identities.
    """

    __slots__ = ("n", "arity", "field", "_entries")

    def __init__(self, n: int, arity: int, entries: Mapping | None = None, field=Scalar):
        if n < 1 or arity < 0:
            raise ShapeError(f"bad shape n={n}, arity={arity}")
        self.n = n
        self.arity = arity
        self.field = field
        dim = n**arity
        data = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < dim and 0 <= c < dim):
                raise ShapeError(f"entry ({r}, {c}) outside {dim}x{dim}")
            if v:
                data[(r, c)] = v
        self._entries = data

    @classmethod
    def _wrap(cls, n, arity, entries, field) -> "TensorOp":
        op = cls.__new__(cls)
        op.n, op.arity, op.field, op._entries = n, arity, field, entries
        if CHECK_SPARSITY:
            assert all(entries.values()), "explicit zero stored in TensorOp"
        return op

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_multi(cls, n: int, arity: int, mapping: Mapping, field=Scalar) -> "TensorOp":
        """Build from {((i1..ik), (j1..jk)): value} with 1-based indices."""
        entries = {}
        for (row, col), v in mapping.items():
            if len(row) != arity or len(col) != arity:
                raise ShapeError(f"multi-index length must be {arity}")
            entries[(flat_index(row, n), flat_index(col, n))] = v
        return cls(n, arity, entries, field)

    @classmethod
    def from_dense(cls, n: int, arity: int, rows, field=Scalar) -> "TensorOp":
        return cls(
            n, arity, {(r, c): v for r, row in enumerate(rows) for c, v in enumerate(row)}, field
        )

    @classmethod
    def identity(cls, n: int, arity: int = 1, field=Scalar) -> "TensorOp":
        one = field(1)
        return cls._wrap(n, arity, {(i, i): one for i in range(n**arity)}, field)

    @classmethod
    def zero(cls, n: int, arity: int = 1, field=Scalar) -> "TensorOp":
        return cls._wrap(n, arity, {}, field)

    @classmethod
    def diagonal(cls, values, field=Scalar) -> "TensorOp":
        values = list(values)
        return cls(len(values), 1, {(i, i): field.coerce(v) if hasattr(field, "coerce") else field(v)
                                    for i, v in enumerate(values)}, field)

    @classmethod
    def permutation(cls, n: int, field=Scalar) -> "TensorOp":
        """The flip P(e_i (x) e_j) = e_j (x) e_i."""
        one = field(1)
        return cls._wrap(n, 2, {(j * n + i, i * n + j): one for i in range(n) for j in range(n)}, field)

    # -- inspection ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.n**self.arity

    @property
    def nnz(self) -> int:
        return len(self._entries)

    @property
    def raw(self) -> dict:
        """Flat 0-based entry map (do not mutate)."""
        return self._entries

    def entry(self, row: Iterable[int], col: Iterable[int]):
        key = (flat_index(row, self.n), flat_index(col, self.n))
        return self._entries.get(key, self.field(0))

    def __getitem__(self, key):
        row, col = key
        if isinstance(row, int):
            return self._entries.get((row, col), self.field(0))
        return self.entry(row, col)

    def entries(self) -> dict:
        """{(row multi-index, col multi-index): value}, 1-based."""
        n, k = self.n, self.arity
        return {
            (multi_index(r, n, k), multi_index(c, n, k)): v for (r, c), v in sorted(self._entries.items())
        }

    def scalar(self):
        """The single value held by an arity-0 operator."""
        if self.arity != 0:
            raise ShapeError("scalar() needs an arity-0 operator")
        return self._entries.get((0, 0), self.field(0))

    def to_dense(self) -> list[list]:
        zero = self.field(0)
        d = self.dim
        out = [[zero] * d for _ in range(d)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> list[dict]:
        rows: dict[int, dict] = defaultdict(dict)
        for (r, c), v in self._entries.items():
            rows[r][c] = v
        return [rows[r] for r in sorted(rows)]

    def rank(self) -> int:
        return linalg.rank(self.row_dicts())

    def is_zero(self) -> bool:
        return not self._entries

    def is_diagonal(self) -> bool:
        return all(r == c for r, c in self._entries)

    def variables(self) -> set[str]:
        names = set()
        for v in self._entries.values():
            if isinstance(v, Scalar):
                names.update(v.names)
        return names

    # -- algebra -------------------------------------------------------------

    def _same_shape(self, other: "TensorOp"):
        if self.n != other.n or self.arity != other.arity:
            raise ShapeError(
                f"shape mismatch: (n={self.n}, arity={self.arity}) vs (n={other.n}, arity={other.arity})"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorOp):
            return NotImplemented
        return self.n == other.n and self.arity == other.arity and self._entries == other._entries

    __hash__ = None

    def __add__(self, other: "TensorOp") -> "TensorOp":
        self._same_shape(other)
        out = dict(self._entries)
        for key, v in other._entries.items():
            w = out[key] + v if key in out else v
            if w:
                out[key] = w
            else:
                del out[key]
        return TensorOp._wrap(self.n, self.arity, out, self.field)

    def __neg__(self) -> "TensorOp":
        return TensorOp._wrap(self.n, self.arity, {k: -v for k, v in self._entries.items()}, self.field)

    def __sub__(self, other: "TensorOp") -> "TensorOp":
        return self + (-other)

    def scale(self, c) -> "TensorOp":
        if not c:
            return TensorOp._wrap(self.n, self.arity, {}, self.field)
        out = {}
        for k, v in self._entries.items():
            w = v * c
            if w:
                out[k] = w
        return TensorOp._wrap(self.n, self.arity, out, self.field)

    def __mul__(self, c) -> "TensorOp":
        if isinstance(c, TensorOp):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "TensorOp") -> "TensorOp":
        if not isinstance(other, TensorOp):
            return NotImplemented
        return compose(self, other)

    def map(self, fn: Callable, field=None) -> "TensorOp":
        return TensorOp(self.n, self.arity, {k: fn(v) for k, v in self._entries.items()}, field or self.field)

    def evaluate(self, point: Mapping) -> "TensorOp":
        """Specialize every Scalar entry at ``point``; result has GaussRational entries."""
        if self.field is not Scalar:
            return self
        return self.map(lambda v: v.evaluate(point), GaussRational)

    def substitute(self, mapping: Mapping) -> "TensorOp":
        return self.map(lambda v: v.substitute(mapping))

    def transpose(self) -> "TensorOp":
        return TensorOp._wrap(self.n, self.arity, {(c, r): v for (r, c), v in self._entries.items()}, self.field)

    def __repr__(self) -> str:
        return f"TensorOp(n={self.n}, arity={self.arity}, nnz={self.nnz})"

    def format(self) -> str:
        lines = [repr(self)]
        for (row, col), v in self.entries().items():
            lines.append(f"  {''.join(map(str, row))}|{''.join(map(str, col))}: {v}")
        return "\n".join(lines)


def place(op: TensorOp, position: int, total: int) -> TensorOp:
    """Embed ``op`` in V^{(x)total} acting on factors position .. position+arity-1."""
    entries = place_entries(op._entries, op.n, op.arity, position, total)
    return TensorOp._wrap(op.n, total, entries, op.field)


def compose(a: TensorOp, b: TensorOp) -> TensorOp:
    """Operator product a . b (b acts first)."""
    a._same_shape(b)
    brows: dict[int, list] = defaultdict(list)
    for (m, c), w in b._entries.items():
        brows[m].append((c, w))
    out = {}
    for (r, m), v in a._entries.items():
        for c, w in brows.get(m, ()):
            key = (r, c)
            x = v * w
            out[key] = out[key] + x if key in out else x
    return TensorOp._wrap(a.n, a.arity, {k: v for k, v in out.items() if v}, a.field)


def partial_trace(a: TensorOp, factors: Iterable[int]) -> TensorOp:
    """Trace over the given 1-based factors; tracing all of them leaves arity 0."""
    factors = frozenset(factors)
    out = trace_entries(a._entries, a.n, a.arity, factors, lambda x, y: x + y, lambda v: not v)
    return TensorOp._wrap(a.n, a.arity - len(factors), out, a.field)


def quantum_partial_trace(a: TensorOp, factors: Iterable[int], d: TensorOp) -> TensorOp:
    """Tr over ``factors`` of (prod_p d_p) . a, with d an arity-1 operator."""
    factors = frozenset(factors)
    if d.arity != 1 or d.n != a.n:
        raise ShapeError("quantum trace weight must be an arity-1 operator on the same V")
    _check_factors(factors, a.arity)
    weighted = a
    for p in sorted(factors):
        weighted = compose(place(d, p, a.arity), weighted)
    return partial_trace(weighted, factors)


def inverse(a: TensorOp) -> TensorOp:
    try:
        inv = linalg.inverse(a.to_dense(), a.field(1))
    except linalg.SingularSystemError as exc:
        raise NotInvertibleError(f"operator is singular (nullity {exc.nullity})") from exc
    return TensorOp.from_dense(a.n, a.arity, inv, a.field)


def kron(a: TensorOp, b: TensorOp) -> TensorOp:
    """a (x) b on V^{(x)(arity_a + arity_b)}."""
    if a.n != b.n:
        raise ShapeError("kron needs equal n")
    k = a.arity + b.arity
    return compose(place(a, 1, k), place(b, a.arity + 1, k)) if a.arity and b.arity else (
        a.scale(b.scalar()) if not b.arity else b.scale(a.scalar())
    )
