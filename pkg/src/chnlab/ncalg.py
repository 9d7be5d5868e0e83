"""Free algebra on matrix generators, quadratic relation sets, and ideal membership.

Generators are the n^2 entries M^i_j of a quantum matrix.  A word is a
tuple of generator labels; label ``g`` stands for M^i_j with
``g = (i-1) n + (j-1)``.  Polynomial coefficients commute with the
generators, so an ``NCMatrix`` can be multiplied by a ``TensorOp`` on
either side.

Membership of a homogeneous degree-d polynomial in the two-sided ideal of
the quadratic relations is decided by linear algebra on the degree-d
component: the ideal there is spanned by u r v for relations r and words
u, v with |u| + |v| = d - 2.  The spanning vectors split into blocks of
words that never share a spanning vector; each block is eliminated
separately.
"""

from __future__ import annotations

import os
import random
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from .linalg import Echelon
from .report import Stopwatch, SystemSize, VerificationReport
from .scalar import BadEvaluationPoint, GaussRational, Scalar, sample_point
from .tensor import ShapeError, TensorOp, place_entries, trace_entries
from .ybkit import CompatiblePair

__all__ = [
    "AlgebraSpec",
    "InhomogeneousError",
    "NCMatrix",
    "NCPoly",
    "NoAdmissiblePoint",
    "Randomized",
    "ideal_membership",
    "mbar",
    "relations_from",
]

MAX_RESAMPLES = 64


class InhomogeneousError(ValueError):
    pass


class NoAdmissiblePoint(RuntimeError):
    pass


# -- raw polynomial kernels (dict word -> coeff) -----------------------------


def _padd_into(acc: dict, p: Mapping, scale=None) -> None:
    for w, c in p.items():
        x = c if scale is None else scale * c
        if w in acc:
            y = acc[w] + x
            if y:
                acc[w] = y
            else:
                del acc[w]
        elif x:
            acc[w] = x


def _pmul_into(acc: dict, p: Mapping, r: Mapping) -> None:
    for w1, c1 in p.items():
        for w2, c2 in r.items():
            w = w1 + w2
            x = c1 * c2
            if w in acc:
                y = acc[w] + x
                if y:
                    acc[w] = y
                else:
                    del acc[w]
            elif x:
                acc[w] = x


def _padd(p: Mapping, r: Mapping) -> dict:
    out = dict(p)
    _padd_into(out, r)
    return out


def _pmul(p: Mapping, r: Mapping) -> dict:
    out: dict = {}
    _pmul_into(out, p, r)
    return out


def _pscale(p: Mapping, c) -> dict:
    if not c:
        return {}
    out = {}
    for w, x in p.items():
        y = x * c
        if y:
            out[w] = y
    return out


def _words(n: int, length: int) -> list[tuple[int, ...]]:
    return list(product(range(n * n), repeat=length))


def _label(g: int, n: int, symbol: str) -> str:
    i, j = divmod(g, n)
    return f"{symbol}{i + 1}{j + 1}"


def _format_poly(terms: Mapping, n: int, symbol: str = "M") -> str:
    if not terms:
        return "0"
    parts = []
    for w in sorted(terms, key=lambda w: (len(w), w)):
        c = terms[w]
        mono = "*".join(_label(g, n, symbol) for g in w)
        coeff = str(c)
        if not mono:
            parts.append(f"({coeff})")
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append(f"-{mono}")
        else:
            parts.append(f"({coeff})*{mono}")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


class NCPoly:
    """Noncommutative polynomial in the generators M^i_j (1 <= i, j <= n)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping | None = None):
        self.n = n
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def generator(cls, n: int, i: int, j: int, field=Scalar) -> "NCPoly":
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"generator ({i}, {j}) outside 1..{n}")
        return cls(n, {((i - 1) * n + (j - 1),): field(1)})

    @classmethod
    def constant(cls, n: int, c) -> "NCPoly":
        return cls(n, {(): c})

    @classmethod
    def from_words(cls, n: int, mapping: Mapping[Sequence[tuple[int, int]], object]) -> "NCPoly":
        """From {((i1, j1), (i2, j2), ...): coeff} with 1-based generator labels."""
        terms = {}
        for word, c in mapping.items():
            terms[tuple((i - 1) * n + (j - 1) for i, j in word)] = c
        return cls(n, terms)

    def word_labels(self) -> dict[tuple[tuple[int, int], ...], object]:
        n = self.n
        return {tuple((g // n + 1, g % n + 1) for g in w): c for w, c in self.terms.items()}

    @property
    def degrees(self) -> set[int]:
        return {len(w) for w in self.terms}

    @property
    def degree(self) -> int:
        return max(self.degrees, default=-1)

    def is_homogeneous(self) -> bool:
        return len(self.degrees) <= 1

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "NCPoly") -> "NCPoly":
        return NCPoly(self.n, _padd(self.terms, other.terms))

    def __neg__(self) -> "NCPoly":
        return NCPoly(self.n, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __mul__(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            return NCPoly(self.n, _pmul(self.terms, other.terms))
        return NCPoly(self.n, _pscale(self.terms, other))

    def __rmul__(self, c) -> "NCPoly":
        return NCPoly(self.n, _pscale(self.terms, c))

    def commutator(self, other: "NCPoly") -> "NCPoly":
        return self * other - other * self

    def map_coeffs(self, fn) -> "NCPoly":
        return NCPoly(self.n, {w: fn(c) for w, c in self.terms.items()})

    def evaluate(self, point) -> "NCPoly":
        return self.map_coeffs(lambda c: c.evaluate(point) if isinstance(c, Scalar) else c)

    def variables(self) -> set[str]:
        return {v for c in self.terms.values() if isinstance(c, Scalar) for v in c.names}

    def format(self, symbol: str = "M") -> str:
        return _format_poly(self.terms, self.n, symbol)

    def __repr__(self) -> str:
        return f"NCPoly({self.format()})"


class NCMatrix:
    """Operator on V^{(x)arity} with NCPoly entries (sparse, flat 0-based indices)."""

    __slots__ = ("n", "arity", "field", "_entries")

    def __init__(self, n: int, arity: int, entries: Mapping | None = None, field=Scalar):
        self.n = n
        self.arity = arity
        self.field = field
        data = {}
        for key, p in (entries or {}).items():
            terms = p.terms if isinstance(p, NCPoly) else p
            terms = {w: c for w, c in terms.items() if c}
            if terms:
                data[key] = terms
        self._entries = data

    @classmethod
    def _wrap(cls, n, arity, entries, field) -> "NCMatrix":
        m = cls.__new__(cls)
        m.n, m.arity, m.field, m._entries = n, arity, field, entries
        return m

    @classmethod
    def generators(cls, n: int, field=Scalar) -> "NCMatrix":
        """The n x n matrix whose (i, j) entry is the generator M^i_j."""
        one = field(1)
        return cls._wrap(n, 1, {(i, j): {(i * n + j,): one} for i in range(n) for j in range(n)}, field)

    @classmethod
    def from_tensor(cls, op: TensorOp) -> "NCMatrix":
        return cls._wrap(op.n, op.arity, {k: {(): v} for k, v in op.raw.items()}, op.field)

    @classmethod
    def scalar_poly(cls, p: NCPoly, field=Scalar) -> "NCMatrix":
        return cls._wrap(p.n, 0, {(0, 0): dict(p.terms)} if p.terms else {}, field)

    # -- inspection ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.n**self.arity

    @property
    def raw(self) -> dict:
        return self._entries

    def entry(self, row, col) -> NCPoly:
        if isinstance(row, int):
            key = (row, col)
        else:
            from .tensor import flat_index

            key = (flat_index(row, self.n), flat_index(col, self.n))
        return NCPoly(self.n, self._entries.get(key, {}))

    def __getitem__(self, key) -> NCPoly:
        return self.entry(*key)

    def entries(self) -> dict:
        from .tensor import multi_index

        n, k = self.n, self.arity
        return {
            (multi_index(r, n, k), multi_index(c, n, k)): NCPoly(n, p)
            for (r, c), p in sorted(self._entries.items())
        }

    def polys(self) -> list[NCPoly]:
        return [NCPoly(self.n, p) for _, p in sorted(self._entries.items())]

    def is_zero(self) -> bool:
        return not self._entries

    def degrees(self) -> set[int]:
        return {len(w) for p in self._entries.values() for w in p}

    def scalar(self) -> NCPoly:
        if self.arity != 0:
            raise ShapeError("scalar() needs an arity-0 matrix")
        return NCPoly(self.n, self._entries.get((0, 0), {}))

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCMatrix):
            return NotImplemented
        return self.n == other.n and self.arity == other.arity and self._entries == other._entries

    __hash__ = None

    def __repr__(self) -> str:
        return f"NCMatrix(n={self.n}, arity={self.arity}, nnz={len(self._entries)})"

    def format(self, symbol: str = "M") -> str:
        lines = [repr(self)]
        for (row, col), p in self.entries().items():
            lines.append(f"  {''.join(map(str, row))}|{''.join(map(str, col))}: {p.format(symbol)}")
        return "\n".join(lines)

    # -- algebra -------------------------------------------------------------

    def _check(self, other):
        if self.n != other.n or self.arity != other.arity:
            raise ShapeError("NCMatrix shape mismatch")

    def __add__(self, other: "NCMatrix") -> "NCMatrix":
        self._check(other)
        out = {k: dict(p) for k, p in self._entries.items()}
        for k, p in other._entries.items():
            acc = out.setdefault(k, {})
            _padd_into(acc, p)
            if not acc:
                del out[k]
        return NCMatrix._wrap(self.n, self.arity, out, self.field)

    def __neg__(self) -> "NCMatrix":
        return self.scale(-self.field(1))

    def __sub__(self, other: "NCMatrix") -> "NCMatrix":
        return self + (-other)

    def scale(self, c) -> "NCMatrix":
        out = {}
        for k, p in self._entries.items():
            sp = _pscale(p, c)
            if sp:
                out[k] = sp
        return NCMatrix._wrap(self.n, self.arity, out, self.field)

    def left_mul(self, p: NCPoly) -> "NCMatrix":
        """Entrywise p * M (p written to the left)."""
        out = {}
        for k, e in self._entries.items():
            x = _pmul(p.terms, e)
            if x:
                out[k] = x
        return NCMatrix._wrap(self.n, self.arity, out, self.field)

    def right_mul(self, p: NCPoly) -> "NCMatrix":
        """Entrywise M * p (p written to the right)."""
        out = {}
        for k, e in self._entries.items():
            x = _pmul(e, p.terms)
            if x:
                out[k] = x
        return NCMatrix._wrap(self.n, self.arity, out, self.field)

    def __matmul__(self, other) -> "NCMatrix":
        if isinstance(other, TensorOp):
            return _mat_op(self, other)
        if isinstance(other, NCMatrix):
            return _mat_mat(self, other)
        return NotImplemented

    def __rmatmul__(self, other) -> "NCMatrix":
        if isinstance(other, TensorOp):
            return _op_mat(other, self)
        return NotImplemented

    def place(self, position: int, total: int) -> "NCMatrix":
        return NCMatrix._wrap(
            self.n, total, place_entries(self._entries, self.n, self.arity, position, total), self.field
        )

    def partial_trace(self, factors: Iterable[int]) -> "NCMatrix":
        factors = frozenset(factors)
        out = trace_entries(self._entries, self.n, self.arity, factors, _padd, lambda p: not p)
        return NCMatrix._wrap(self.n, self.arity - len(factors), out, self.field)

    def quantum_partial_trace(self, factors: Iterable[int], d: TensorOp) -> "NCMatrix":
        factors = frozenset(factors)
        weighted = self
        for p in sorted(factors):
            weighted = _op_mat(d.__class__._wrap(d.n, self.arity, place_entries(d.raw, d.n, 1, p, self.arity), d.field), weighted)
        return weighted.partial_trace(factors)

    def trace(self, d: TensorOp | None = None) -> NCPoly:
        factors = range(1, self.arity + 1)
        m = self.partial_trace(factors) if d is None else self.quantum_partial_trace(factors, d)
        return m.scalar()

    def power(self, k: int) -> "NCMatrix":
        """Ordinary matrix power of an arity-1 matrix."""
        if self.arity != 1:
            raise ShapeError("power() needs an arity-1 matrix")
        if k == 0:
            return NCMatrix.from_tensor(TensorOp.identity(self.n, 1, self.field))
        out = self
        for _ in range(k - 1):
            out = out @ self
        return out

    def map_coeffs(self, fn, field=None) -> "NCMatrix":
        out = {}
        for k, p in self._entries.items():
            x = {w: fn(c) for w, c in p.items()}
            x = {w: c for w, c in x.items() if c}
            if x:
                out[k] = x
        return NCMatrix._wrap(self.n, self.arity, out, field or self.field)

    def evaluate(self, point) -> "NCMatrix":
        if self.field is not Scalar:
            return self
        return self.map_coeffs(lambda c: c.evaluate(point), GaussRational)

    def variables(self) -> set[str]:
        return {v for p in self._entries.values() for c in p.values() if isinstance(c, Scalar) for v in c.names}


def _rows_of(entries: Mapping) -> dict[int, list]:
    rows: dict[int, list] = defaultdict(list)
    for (m, c), v in entries.items():
        rows[m].append((c, v))
    return rows


def _prune(out: dict) -> dict:
    return {k: p for k, p in out.items() if p}


def _op_mat(s: TensorOp, m: NCMatrix) -> NCMatrix:
    if s.n != m.n or s.arity != m.arity:
        raise ShapeError("TensorOp/NCMatrix shape mismatch")
    mrows = _rows_of(m._entries)
    out: dict = {}
    for (r, k), c in s.raw.items():
        for col, p in mrows.get(k, ()):
            acc = out.setdefault((r, col), {})
            _padd_into(acc, p, c)
    return NCMatrix._wrap(m.n, m.arity, _prune(out), m.field)


def _mat_op(m: NCMatrix, s: TensorOp) -> NCMatrix:
    if s.n != m.n or s.arity != m.arity:
        raise ShapeError("NCMatrix/TensorOp shape mismatch")
    srows = _rows_of(s.raw)
    out: dict = {}
    for (r, k), p in m._entries.items():
        for col, c in srows.get(k, ()):
            acc = out.setdefault((r, col), {})
            _padd_into(acc, p, c)
    return NCMatrix._wrap(m.n, m.arity, _prune(out), m.field)


def _mat_mat(a: NCMatrix, b: NCMatrix) -> NCMatrix:
    a._check(b)
    brows = _rows_of(b._entries)
    out: dict = {}
    for (r, k), p in a._entries.items():
        for col, r2 in brows.get(k, ()):
            acc = out.setdefault((r, col), {})
            _pmul_into(acc, p, r2)
    return NCMatrix._wrap(a.n, a.arity, _prune(out), a.field)


# -- algebra data ------------------------------------------------------------


FLAVORS = ("rtt", "rlrl", "general")


def detect_flavor(pair: CompatiblePair) -> str:
    if pair.fhat == TensorOp.permutation(pair.n, pair.field):
        return "rtt"
    if pair.fhat == pair.rhat:
        return "rlrl"
    return "general"


@dataclass
class AlgebraSpec:
    """The quadratic algebra M(R, F): R Mbar1 Mbar2 = Mbar1 Mbar2 R^FF."""

    n: int
    pair: CompatiblePair
    relations: list[NCPoly]
    flavor: str
    q: object
    basis: list[dict] = field(default_factory=list, repr=False)
    _systems: dict = field(default_factory=dict, repr=False)
    _chains: dict = field(default_factory=dict, repr=False)

    @property
    def field(self):
        return self.pair.field

    def variables(self) -> set[str]:
        names = set()
        for op in (self.pair.rhat, self.pair.fhat):
            names |= op.variables()
        return names

    def evaluate(self, point) -> "AlgebraSpec":
        """The same algebra with every coefficient specialized at ``point``."""
        if self.field is not Scalar:
            return self
        q = self.q.evaluate(point) if isinstance(self.q, Scalar) else self.q
        return relations_from(self.pair.evaluate(point), flavor=self.flavor, q=q)

    def degree_system(self, d: int) -> "DegreeSystem":
        if d not in self._systems:
            self._systems[d] = DegreeSystem(self, d)
        return self._systems[d]


def relations_from(pair: CompatiblePair, flavor: str | None = None, q=None) -> AlgebraSpec:
    """All nonzero entries of R Mbar1 Mbar2 - Mbar1 Mbar2 R^FF, plus a basis of their span."""
    n = pair.n
    kind = pair.field
    if q is None:
        if kind is not Scalar:
            raise ValueError("q must be given for a specialized pair")
        q = Scalar.q()
    flavor = flavor or detect_flavor(pair)
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    m1 = NCMatrix.generators(n, kind).place(1, 2)
    m2 = pair.fhat @ m1 @ pair.fhat_inv
    prod = m1 @ m2
    residual = pair.rhat @ prod - prod @ pair.rhat_ff
    relations = residual.polys()
    echelon = Echelon()
    echelon.extend(r.terms for r in relations)
    spec = AlgebraSpec(n, pair, relations, flavor, q, basis=echelon.rows)
    spec._chains[2] = [m1, m2]
    return spec


def mbar(spec: AlgebraSpec, k: int, total: int) -> NCMatrix:
    """Mbar_1 = M_1, Mbar_{m+1} = F_m Mbar_m F_m^-1, on V^{(x)total}."""
    if not 1 <= k <= total:
        raise ShapeError(f"need 1 <= k <= total, got k={k}, total={total}")
    chain = spec._chains.get(total)
    if chain is None:
        n, kind = spec.n, spec.field
        chain = [NCMatrix.generators(n, kind).place(1, total)]
        for m in range(1, total):
            f = _placed(spec.pair.fhat, m, total)
            finv = _placed(spec.pair.fhat_inv, m, total)
            chain.append(f @ chain[-1] @ finv)
        spec._chains[total] = chain
    return chain[k - 1]


def _placed(op: TensorOp, position: int, total: int) -> TensorOp:
    from .tensor import place

    return place(op, position, total)


# -- ideal membership --------------------------------------------------------


def _threads() -> int:
    value = int(os.environ.get("CHNLAB_THREADS", "0") or 0)
    return value if value > 0 else 1


class DegreeSystem:
    """Echelon bases of the degree-d ideal component, one per block of words."""

    def __init__(self, spec: AlgebraSpec, d: int):
        n2 = spec.n * spec.n
        self.degree = d
        parent: dict = {}

        def find(w):
            root = w
            while parent[root] != root:
                root = parent[root]
            while parent[w] != root:
                parent[w], w = root, parent[w]
            return root

        spanning = []
        for r in spec.basis:
            for left in range(d - 1):
                right = d - 2 - left
                for u in product(range(n2), repeat=left):
                    for v in product(range(n2), repeat=right):
                        vec = {u + w + v: c for w, c in r.items()}
                        spanning.append(vec)
                        words = iter(vec)
                        first = next(words)
                        parent.setdefault(first, first)
                        a = find(first)
                        for w in words:
                            parent.setdefault(w, w)
                            b = find(w)
                            if a != b:
                                parent[b] = a
        self.block_of = {w: find(w) for w in parent}
        blocks: dict = defaultdict(lambda: Echelon())
        for vec in spanning:
            blocks[self.block_of[next(iter(vec))]].add(vec)
        self.blocks = dict(blocks)
        self.size = SystemSize(len(spanning), n2**d, sum(e.rank for e in self.blocks.values()))

    def contains(self, terms: Mapping) -> tuple[bool, dict]:
        """Membership of one homogeneous polynomial; returns the leftover on failure."""
        parts: dict = defaultdict(dict)
        leftover = {}
        for w, c in terms.items():
            block = self.block_of.get(w)
            if block is None:
                leftover[w] = c
            else:
                parts[block][w] = c
        for block, part in sorted(parts.items()):
            rest = self.blocks[block].reduce(part)
            leftover.update(rest)
        return not leftover, leftover


@dataclass(frozen=True)
class Randomized:
    seed: int = 0
    trials: int = 3


def _entries_of(p) -> list[tuple[str, NCPoly]]:
    if isinstance(p, NCPoly):
        return [("", p)]
    if isinstance(p, NCMatrix):
        return [
            ("".join(map(str, r)) + "|" + "".join(map(str, c)), poly) for (r, c), poly in p.entries().items()
        ]
    raise TypeError(f"cannot test membership of {type(p).__name__}")


def _homogeneous_degree(entries) -> int | None:
    degrees = set()
    for _, poly in entries:
        degrees |= poly.degrees
    if len(degrees) > 1:
        raise InhomogeneousError(f"residual mixes degrees {sorted(degrees)}")
    return degrees.pop() if degrees else None


def check_entries(entries, spec: AlgebraSpec) -> tuple[bool, SystemSize, list]:
    """Exact membership of every (label, NCPoly) in the ideal of ``spec``."""
    d = _homogeneous_degree(entries)
    if d is None:
        return True, SystemSize(), []
    if d < 2:
        failures = [(label, poly.format()) for label, poly in entries if poly]
        return not failures, SystemSize(0, (spec.n**2) ** d, 0), failures
    system = spec.degree_system(d)

    def test(item):
        label, poly = item
        ok, rest = system.contains(poly.terms)
        return label, ok, rest

    workers = _threads()
    if workers > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(test, entries))
    else:
        results = [test(item) for item in entries]
    failures = [(label, NCPoly(spec.n, rest).format()) for label, ok, rest in results if not ok]
    return not failures, system.size, failures


def _point_repr(point: Mapping) -> dict:
    return {k: str(v) for k, v in sorted(point.items())}


def admissible_points(names: Iterable[str], rng: random.Random, attempt):
    """Yield (point, attempt(point)) for fresh random points, skipping bad ones."""
    seen = set()
    failures = 0
    while True:
        point = sample_point(rng, names)
        key = tuple(sorted((k, str(v)) for k, v in point.items()))
        if key in seen:
            continue
        seen.add(key)
        try:
            value = attempt(point)
        except (BadEvaluationPoint, ZeroDivisionError):
            failures += 1
            if failures > MAX_RESAMPLES:
                raise NoAdmissiblePoint(f"no admissible evaluation point after {failures} tries")
            continue
        yield point, value


def ideal_membership(p, spec: AlgebraSpec, mode: str | Randomized = "exact", *, check: str = "ideal_membership") -> VerificationReport:
    """Decide whether every entry of ``p`` lies in the relation ideal of ``spec``.

    ``mode`` is ``"exact"`` (linear algebra over the Scalar field) or a
    ``Randomized(seed, trials)``: coefficients are specialized at ``trials``
    random admissible points and each specialization is decided exactly
    over the Gaussian rationals.  A randomized pass is a probabilistic
    certificate; a randomized failure at any point is a definite failure
    of the specialized identity.
    """
    watch = Stopwatch()
    entries = _entries_of(p)
    degree = _homogeneous_degree(entries)
    if isinstance(mode, str) and mode == "randomized":
        mode = Randomized()
    if isinstance(mode, Randomized) and spec.field is Scalar:
        rng = random.Random(mode.seed)
        names = set(spec.variables())
        for _, poly in entries:
            names |= poly.variables()
        passed, size, failures, points = True, SystemSize(), [], []

        def specialize(point):
            sub_spec = spec.evaluate(point)
            return sub_spec, [(label, poly.evaluate(point)) for label, poly in entries]

        trial_points = admissible_points(names, rng, specialize)
        for _ in range(mode.trials):
            point, (sub_spec, sub_entries) = next(trial_points)
            ok, sub_size, sub_failures = check_entries(sub_entries, sub_spec)
            points.append(_point_repr(point))
            size += sub_size
            passed = passed and ok
            failures.extend(sub_failures)
        return VerificationReport(
            check=check,
            passed=passed,
            mode="randomized",
            degree=degree or 0,
            system=size,
            seed=mode.seed,
            points=points,
            elapsed_ms=watch.ms,
            details=_failure_details(failures),
        )
    if mode != "exact" and not isinstance(mode, Randomized):
        raise ValueError(f"unknown mode {mode!r}")
    passed, size, failures = check_entries(entries, spec)
    return VerificationReport(
        check=check,
        passed=passed,
        mode="exact",
        degree=degree or 0,
        system=size,
        elapsed_ms=watch.ms,
        details=_failure_details(failures),
    )


def _failure_details(failures) -> dict:
    if not failures:
        return {}
    return {
        "failed_entries": len(failures),
        "sample": [f"{label}: {text}" for label, text in failures[:3]],
    }
