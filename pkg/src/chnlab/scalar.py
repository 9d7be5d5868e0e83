"""Exact coefficient arithmetic.

Two number types live here:

``GaussRational``
    An element of Q(i), stored as a pair of ``gmpy2.mpq``.  This is the
    value type produced by evaluating a Scalar at a point, and the
    coefficient type of every specialized (randomized-mode) computation.

``Scalar``
    A rational function in ``q`` and any declared parameters with
    Gaussian-rational coefficients.  Numerator and denominator are sparse
    polynomials (sympy ``PolyElement``) kept coprime, with the denominator
    monic under lex order.  That makes equality a syntactic comparison.

Both types support ``+ - * / **``, comparison with ints, and ``bool``
(nonzero test), so the tensor and algebra layers can run unchanged over
either one.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

from gmpy2 import mpq
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

__all__ = [
    "BadEvaluationPoint",
    "GaussRational",
    "I",
    "Scalar",
    "evaluate",
    "q_number",
    "q_number_at",
    "sample_point",
]

Q_NAME = "q"
IMAG_NAME = "i"


class BadEvaluationPoint(ZeroDivisionError):
    """A denominator vanished at the requested evaluation point."""


def _mpq(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class GaussRational:
    """Exact element a + b*i of the Gaussian rationals."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        self.real = _mpq(real)
        self.imag = _mpq(imag)

    @classmethod
    def coerce(cls, x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, Scalar):
            if not x.is_constant():
                raise TypeError(f"non-constant Scalar {x} is not a GaussRational")
            return x.constant_value()
        return cls(x)

    @property
    def is_real(self) -> bool:
        return not self.imag

    def __repr__(self) -> str:
        return f"GaussRational({self})"

    def __str__(self) -> str:
        return _format_coeff(self.real, self.imag)

    def __bool__(self) -> bool:
        return bool(self.real) or bool(self.imag)

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussRational):
            return self.real == other.real and self.imag == other.imag
        if isinstance(other, (int, Fraction, type(mpq()))):
            return not self.imag and self.real == other
        if isinstance(other, Scalar):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        if not self.imag:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.real, -self.imag)

    def __pos__(self) -> "GaussRational":
        return self

    def __add__(self, other) -> "GaussRational":
        if not isinstance(other, GaussRational):
            if isinstance(other, Scalar):
                return NotImplemented
            other = GaussRational(other)
        return GaussRational(self.real + other.real, self.imag + other.imag)

    __radd__ = __add__

    def __sub__(self, other) -> "GaussRational":
        if not isinstance(other, GaussRational):
            if isinstance(other, Scalar):
                return NotImplemented
            other = GaussRational(other)
        return GaussRational(self.real - other.real, self.imag - other.imag)

    def __rsub__(self, other) -> "GaussRational":
        return GaussRational(other) - self

    def __mul__(self, other) -> "GaussRational":
        if not isinstance(other, GaussRational):
            if isinstance(other, Scalar):
                return NotImplemented
            other = GaussRational(other)
        a, b, c, d = self.real, self.imag, other.real, other.imag
        if not b:
            if not d:
                return GaussRational(a * c)
            return GaussRational(a * c, a * d)
        if not d:
            return GaussRational(a * c, b * c)
        return GaussRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRational":
        a, b = self.real, self.imag
        if not b:
            if not a:
                raise ZeroDivisionError("GaussRational division by zero")
            return GaussRational(1 / a)
        norm = a * a + b * b
        return GaussRational(a / norm, -b / norm)

    def __truediv__(self, other) -> "GaussRational":
        if not isinstance(other, GaussRational):
            if isinstance(other, Scalar):
                return NotImplemented
            other = GaussRational(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "GaussRational":
        return GaussRational(other) * self.inverse()

    def __pow__(self, k: int) -> "GaussRational":
        if k < 0:
            return self.inverse() ** (-k)
        result = GaussRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.real, -self.imag)


I = GaussRational(0, 1)


# -- polynomial rings --------------------------------------------------------


def _order_names(names: Iterable[str]) -> tuple[str, ...]:
    rest = sorted(set(names) - {Q_NAME})
    return (Q_NAME, *rest)


@lru_cache(maxsize=None)
def _ring(names: tuple[str, ...], gaussian: bool) -> PolyRing:
    return PolyRing(names, QQ_I if gaussian else QQ, lex)


def _is_gaussian(ring: PolyRing) -> bool:
    return ring.domain is QQ_I


@lru_cache(maxsize=None)
def _union_ring(r1: PolyRing, r2: PolyRing) -> PolyRing:
    names = _order_names([str(s) for s in r1.symbols] + [str(s) for s in r2.symbols])
    return _ring(names, _is_gaussian(r1) or _is_gaussian(r2))


def _coeff_parts(c) -> tuple[mpq, mpq]:
    if hasattr(c, "y"):
        return _mpq(c.x), _mpq(c.y)
    return _mpq(c), mpq(0)


def _to_domain(value: GaussRational, gaussian: bool):
    if gaussian:
        return QQ_I(value.real, value.imag)
    return QQ(value.real)


def _normalize(num, den):
    """Cancel common factors and make ``den`` monic."""
    ring = num.ring
    if not num:
        return ring.zero, ring.one
    if len(den) == 1:
        ((dmon, dc),) = den.items()
        if any(dmon):
            common = list(dmon)
            for mon in num.itermonoms():
                common = [min(a, b) for a, b in zip(common, mon)]
                if not any(common):
                    break
            if any(common):
                num = ring.from_dict(
                    {tuple(a - b for a, b in zip(mon, common)): c for mon, c in num.items()}
                )
                dmon = tuple(a - b for a, b in zip(dmon, common))
            den = ring.from_dict({dmon: ring.domain.one})
        else:
            den = ring.one
        if dc != ring.domain.one:
            num = num.quo_ground(dc)
        return num, den
    _, num, den = num.cofactors(den)
    lc = den.LC
    if lc != ring.domain.one:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


ScalarLike = Union["Scalar", GaussRational, int, Fraction]


class Scalar:
    """Exact rational function in q and declared parameters over Q(i).

    >>> q = Scalar.q()
    >>> (q**2 - q**-2) / (q - q**-1)
    Scalar(q + q^-1)
    """

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, value: ScalarLike = 0):
        if isinstance(value, Scalar):
            self._num, self._den = value._num, value._den
        else:
            gv = GaussRational.coerce(value)
            ring = _ring((Q_NAME,), bool(gv.imag))
            self._num = ring.ground_new(_to_domain(gv, bool(gv.imag)))
            self._den = ring.one
        self._hash = None

    @classmethod
    def _raw(cls, num, den) -> "Scalar":
        obj = cls.__new__(cls)
        obj._num = num
        obj._den = den
        obj._hash = None
        return obj

    @classmethod
    def _from_parts(cls, num, den) -> "Scalar":
        num, den = _normalize(num, den)
        return cls._raw(num, den)

    # -- constructors --------------------------------------------------------

    @classmethod
    def q(cls) -> "Scalar":
        return cls.param(Q_NAME)

    @classmethod
    def param(cls, name: str) -> "Scalar":
        if name == IMAG_NAME:
            raise ValueError("'i' is reserved for the imaginary unit")
        names = _order_names([name])
        ring = _ring(names, False)
        return cls._raw(ring.gens[names.index(name)], ring.one)

    @classmethod
    def imaginary_unit(cls) -> "Scalar":
        return cls(I)

    @classmethod
    def zero(cls) -> "Scalar":
        return cls(0)

    @classmethod
    def one(cls) -> "Scalar":
        return cls(1)

    @classmethod
    def coerce(cls, x) -> "Scalar":
        return x if isinstance(x, Scalar) else cls(x)

    # -- inspection ----------------------------------------------------------

    @property
    def numerator(self):
        return self._num

    @property
    def denominator(self):
        return self._den

    @property
    def names(self) -> tuple[str, ...]:
        """Indeterminates that actually occur."""
        used = set()
        symbols = [str(s) for s in self._num.ring.symbols]
        for poly in (self._num, self._den):
            for mon in poly.itermonoms():
                used.update(symbols[k] for k, e in enumerate(mon) if e)
        return tuple(n for n in symbols if n in used)

    def is_zero(self) -> bool:
        return not self._num

    def is_constant(self) -> bool:
        return self._num.is_ground and self._den.is_ground

    def is_laurent(self) -> bool:
        """True when the denominator is a single monomial."""
        return len(self._den) == 1

    def is_polynomial(self) -> bool:
        return self._den.is_ground

    def constant_value(self) -> GaussRational:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        re, im = _coeff_parts(self._num.coeff(1) if self._num else self._num.ring.domain.zero)
        return GaussRational(re, im)

    def laurent_terms(self) -> dict[tuple[tuple[str, int], ...], GaussRational]:
        """Terms as {((name, exponent), ...): coefficient} with negative exponents allowed.

        Raises ValueError if the denominator is not a monomial.
        """
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        symbols = [str(s) for s in self._num.ring.symbols]
        ((dmon, _),) = self._den.items()
        out = {}
        for mon, c in self._num.items():
            key = tuple(
                (symbols[k], a - b) for k, (a, b) in enumerate(zip(mon, dmon)) if a != b
            )
            out[key] = GaussRational(*_coeff_parts(c))
        return out

    # -- equality ------------------------------------------------------------

    def _canonical_items(self):
        symbols = [str(s) for s in self._num.ring.symbols]

        def items(poly):
            return frozenset(
                (
                    tuple((symbols[k], e) for k, e in enumerate(mon) if e),
                    _coeff_parts(c),
                )
                for mon, c in poly.items()
            )

        return items(self._num), items(self._den)

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash(self._canonical_items())
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction, GaussRational, type(mpq()))):
                other = Scalar(other)
            else:
                return NotImplemented
        a_num, a_den, b_num, b_den = _unify(self, other)
        return a_num == b_num and a_den == b_den

    def __bool__(self) -> bool:
        return bool(self._num)

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self) -> "Scalar":
        return Scalar._raw(-self._num, self._den)

    def __pos__(self) -> "Scalar":
        return self

    def __add__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except TypeError:
                return NotImplemented
        an, ad, bn, bd = _unify(self, other)
        if not an:
            return Scalar._raw(bn, bd)
        if not bn:
            return Scalar._raw(an, ad)
        if ad == bd:
            if ad.is_ground:
                num = an + bn
                return Scalar._raw(num, ad) if num else Scalar._raw(num, num.ring.one)
            return Scalar._from_parts(an + bn, ad)
        return Scalar._from_parts(an * bd + bn * ad, ad * bd)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return Scalar(other) - self

    def __mul__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except TypeError:
                return NotImplemented
        an, ad, bn, bd = _unify(self, other)
        if not an or not bn:
            return Scalar._raw(an.ring.zero, an.ring.one)
        if ad.is_ground and bd.is_ground:
            return Scalar._raw(an * bn, ad)
        return Scalar._from_parts(an * bn, ad * bd)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self._num:
            raise ZeroDivisionError("Scalar division by zero")
        num, den = self._den, self._num
        lc = den.LC
        if lc != den.ring.domain.one:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        return Scalar._raw(num, den)

    def __truediv__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar(other) * self.inverse()

    def __pow__(self, k: int) -> "Scalar":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return Scalar._raw(self._num.ring.one, self._num.ring.one)
        # coprime stays coprime; a monic denominator stays monic
        return Scalar._raw(self._num**k, self._den**k)

    def exquo(self, other: "Scalar") -> "Scalar":
        """Exact quotient of polynomial Scalars; raises if not exact."""
        an, ad, bn, bd = _unify(self, Scalar.coerce(other))
        if not (ad.is_ground and bd.is_ground):
            raise ValueError("exquo needs polynomial operands")
        return Scalar._raw(an.exquo(bn).quo_ground(ad.LC).mul_ground(bd.LC), an.ring.one)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, point: Mapping[str, object]) -> GaussRational:
        return evaluate(self, point)

    def substitute(self, mapping: Mapping[str, ScalarLike]) -> "Scalar":
        """Replace named indeterminates by Scalars; others stay symbolic."""
        symbols = [str(s) for s in self._num.ring.symbols]
        values = [Scalar.coerce(mapping[s]) if s in mapping else Scalar.param(s) for s in symbols]
        return _poly_value(self._num, values, Scalar) / _poly_value(self._den, values, Scalar)

    # -- display -------------------------------------------------------------

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        symbols = [str(s) for s in self._num.ring.symbols]
        if self.is_laurent():
            terms = _sort_terms(self.laurent_terms(), symbols)
            return _format_sum(terms)
        num = _format_sum(_sort_terms(_poly_terms(self._num, symbols), symbols))
        den = _format_sum(_sort_terms(_poly_terms(self._den, symbols), symbols))
        return f"({num})/({den})"


def _unify(a: Scalar, b: Scalar):
    ra, rb = a._num.ring, b._num.ring
    if ra is rb:
        return a._num, a._den, b._num, b._den
    ring = _union_ring(ra, rb)
    an, ad, bn, bd = a._num, a._den, b._num, b._den
    if ra is not ring:
        an, ad = an.set_ring(ring), ad.set_ring(ring)
    if rb is not ring:
        bn, bd = bn.set_ring(ring), bd.set_ring(ring)
    return an, ad, bn, bd


def _poly_terms(poly, symbols):
    return {
        tuple((symbols[k], e) for k, e in enumerate(mon) if e): GaussRational(*_coeff_parts(c))
        for mon, c in poly.items()
    }


def _sort_terms(terms, symbols):
    rank = {s: k for k, s in enumerate(symbols)}

    def key(item):
        mon = dict(item[0])
        return tuple(-mon.get(s, 0) for s in sorted(rank, key=rank.get))

    return sorted(terms.items(), key=key)


def _format_coeff(re: mpq, im: mpq) -> str:
    if not im:
        return str(re)
    if not re:
        if im == 1:
            return IMAG_NAME
        if im == -1:
            return f"-{IMAG_NAME}"
        return f"{im}*{IMAG_NAME}"
    sign = "+" if im > 0 else "-"
    mag = abs(im)
    imag = IMAG_NAME if mag == 1 else f"{mag}*{IMAG_NAME}"
    return f"({re} {sign} {imag})"


def _format_monomial(mon) -> str:
    return "*".join(name if e == 1 else f"{name}^{e}" for name, e in mon)


def _format_sum(terms) -> str:
    if not terms:
        return "0"
    parts = []
    for mon, c in terms:
        negative = c.real < 0 or (not c.real and c.imag < 0)
        mag = -c if negative else c
        mono = _format_monomial(mon)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(parts)


# -- module-level operations ------------------------------------------------


def _poly_value(poly, values: Sequence, kind):
    """Evaluate a PolyElement with one value per ring generator."""
    gaussian = _is_gaussian(poly.ring)
    powers: list[dict[int, object]] = [{} for _ in values]
    total = kind(0)
    for mon, c in poly.items():
        re, im = _coeff_parts(c)
        if kind is GaussRational:
            term = GaussRational(re, im)
        else:
            term = kind(GaussRational(re, im)) if gaussian or kind is Scalar else kind(re)
        for k, e in enumerate(mon):
            if e:
                cache = powers[k]
                if e not in cache:
                    cache[e] = values[k] ** e
                term = term * cache[e]
        total = total + term
    return total


def evaluate(s: Scalar, point: Mapping[str, object]) -> GaussRational:
    """Exact value of ``s`` at ``point`` (name -> number).

    Raises KeyError for an unassigned indeterminate that occurs in ``s`` and
    BadEvaluationPoint when the denominator vanishes.
    """
    symbols = [str(x) for x in s._num.ring.symbols]
    used = set(s.names)
    values = []
    for name in symbols:
        if name in point:
            values.append(GaussRational.coerce(point[name]))
        elif name in used:
            raise KeyError(f"no value for indeterminate {name!r}")
        else:
            values.append(GaussRational(0))
    den = _poly_value(s._den, values, GaussRational)
    if not den:
        raise BadEvaluationPoint(f"denominator of {s} vanishes at {dict(point)}")
    return _poly_value(s._num, values, GaussRational) / den


def q_number(k: int) -> Scalar:
    """k_q = (q^k - q^-k)/(q - q^-1), as the Laurent polynomial q^(k-1) + ... + q^(1-k)."""
    if k < 1:
        raise ValueError("q_number needs k >= 1")
    return q_number_at(Scalar.q(), k)


def q_number_at(q, k: int):
    """k_q for a given value (or Scalar) of q; k = 0 gives 0."""
    if k < 0:
        raise ValueError("q_number needs k >= 0")
    total = type(q)(0)
    for m in range(k):
        total = total + q ** (k - 1 - 2 * m)
    return total


def sample_point(
    rng: random.Random, names: Iterable[str], low: int = 2, high: int = 10**4
) -> dict[str, GaussRational]:
    """Random rational point; numerators and denominators drawn from [low, high].

    q = 1 is never returned.
    """
    point = {}
    for name in sorted(set(names) | {Q_NAME}):
        while True:
            value = GaussRational(mpq(rng.randint(low, high), rng.randint(low, high)))
            if name != Q_NAME or value != 1:
                break
        point[name] = value
    return point
