from fractions import Fraction
import random

import pytest

from chnlab.linalg import Echelon, SingularSystemError, inverse, rank, solve
from chnlab.scalar import GaussRational, Scalar

q = Scalar.q()


def test_echelon_over_scalars_is_fraction_free():
    e = Echelon()
    assert e.add({"a": q, "b": q**2 - 1})
    assert not e.add({"a": 1 / q, "b": 1 - q**-2})
    assert e.add({"a": 1 / q, "b": q - 1 / q})
    assert e.rank == 2
    e = Echelon()
    e.add({"a": q, "b": q**2 - 1})
    row = e.rows[0]
    assert all(c.is_polynomial() for c in row.values())
    assert e.contains({"a": 2 * q, "b": 2 * q**2 - 2})
    assert not e.contains({"a": q, "b": q**2})


def test_echelon_over_gauss_rationals():
    e = Echelon()
    e.add({0: GaussRational(1), 1: GaussRational(0, 1)})
    e.add({1: GaussRational(2), 2: GaussRational(1)})
    assert e.rank == 2
    assert e.reduce({0: GaussRational(1), 2: GaussRational(0, -1) / 2}) == {}


def test_rank_matches_dense_elimination():
    rng = random.Random(2)
    for _ in range(20):
        rows = [{j: Fraction(rng.randint(-2, 2)) for j in range(5) if rng.random() < 0.6} for _ in range(6)]
        rows = [{k: v for k, v in r.items() if v} for r in rows]
        rows = [r for r in rows if r]
        dense = [[r.get(j, Fraction(0)) for j in range(5)] for r in rows]
        import sympy

        assert rank(rows) == (sympy.Matrix(dense).rank() if dense else 0)


def test_solve_and_inverse():
    m = [[q, Scalar(1)], [Scalar(1), q]]
    x = solve(m, [Scalar(1), Scalar(0)])
    assert m[0][0] * x[0] + m[0][1] * x[1] == 1
    assert m[1][0] * x[0] + m[1][1] * x[1] == 0
    inv = inverse(m, Scalar(1))
    assert inv[0][0] == q / (q**2 - 1)


def test_singular_system_reports_nullity():
    m = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    with pytest.raises(SingularSystemError) as info:
        solve(m, [Fraction(1), Fraction(2)])
    assert info.value.nullity == 1 and info.value.consistent
    with pytest.raises(SingularSystemError) as info:
        solve(m, [Fraction(1), Fraction(3)])
    assert not info.value.consistent
