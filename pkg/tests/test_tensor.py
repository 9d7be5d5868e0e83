from fractions import Fraction
import random

import pytest
from hypothesis import given, settings, strategies as st

from chnlab.scalar import GaussRational, Scalar
from chnlab.tensor import (
    NotInvertibleError,
    ShapeError,
    TensorOp,
    compose,
    flat_index,
    inverse,
    kron,
    multi_index,
    partial_trace,
    place,
    quantum_partial_trace,
)
from chnlab.ybkit import d_matrix, permutation, standard_r

from oracles import dense_identity, dense_mul, dense_partial_trace, dense_place

q = Scalar.q()


def no_explicit_zeros(op):
    return all(v for v in op.raw.values())


def random_op(rng, n, arity, density=0.5, field=Fraction):
    rows = [
        [field(rng.randint(-3, 3)) if rng.random() < density else field(0) for _ in range(n**arity)]
        for _ in range(n**arity)
    ]
    return TensorOp.from_dense(n, arity, rows, field)


class TestIndexing:
    def test_row_major(self):
        assert flat_index((1, 1), 3) == 0
        assert flat_index((1, 2), 3) == 1
        assert flat_index((2, 1), 3) == 3
        assert multi_index(5, 3, 2) == (2, 3)

    def test_round_trip(self):
        for flat in range(27):
            assert flat_index(multi_index(flat, 3, 3), 3) == flat


class TestPlace:
    def test_place_whole(self):
        p = permutation(2)
        assert place(p, 1, 2) == p

    def test_identity_stays_identity(self):
        assert place(TensorOp.identity(2, 1), 3, 5) == TensorOp.identity(2, 5)

    def test_braid_on_placed_standard_r_dense(self):
        r = standard_r(2)
        dense = r.to_dense()
        one, zero = Scalar(1), Scalar(0)
        r1 = dense_place(dense, 2, 2, 1, 3, one, zero)
        r2 = dense_place(dense, 2, 2, 2, 3, one, zero)
        assert place(r, 2, 3).to_dense() == r2
        lhs = dense_mul(dense_mul(r1, r2), r1)
        rhs = dense_mul(dense_mul(r2, r1), r2)
        assert lhs == rhs
        assert place(r, 1, 3) @ place(r, 2, 3) @ place(r, 1, 3) == TensorOp.from_dense(2, 3, lhs)

    def test_out_of_range(self):
        with pytest.raises(ShapeError):
            place(permutation(2), 3, 3)
        with pytest.raises(ShapeError):
            place(permutation(2), 0, 3)


class TestCompose:
    def test_projector(self):
        from chnlab.ybkit import antisymmetrizer, hecke_data

        a2 = antisymmetrizer(hecke_data(standard_r(2)), 2)
        assert a2 @ a2 == a2

    def test_identity_neutral(self):
        x = standard_r(3)
        assert x @ TensorOp.identity(3, 2) == x

    def test_permutation_involution(self):
        p = permutation(2)
        assert p @ p == TensorOp.identity(2, 2)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            compose(permutation(2), permutation(3))

    def test_against_dense(self):
        rng = random.Random(3)
        a, b = random_op(rng, 2, 2), random_op(rng, 2, 2)
        assert (a @ b).to_dense() == dense_mul(a.to_dense(), b.to_dense())
        assert no_explicit_zeros(a @ b)
        assert no_explicit_zeros(a - a) and (a - a).is_zero()


class TestTraces:
    def test_identity_trace(self):
        assert partial_trace(TensorOp.identity(3, 2), {2}) == TensorOp.identity(3, 1).scale(3)

    @pytest.mark.parametrize("n", [2, 3])
    def test_trace_of_permutation(self, n):
        assert partial_trace(permutation(n), {1}) == TensorOp.identity(n, 1)

    def test_standard_r_trace_against_summation(self):
        r = standard_r(2)
        traced = partial_trace(r, {1})
        assert traced.is_diagonal()
        assert traced.to_dense() == dense_partial_trace(r.to_dense(), 2, 2, {1})

    def test_full_trace_gives_scalar(self):
        t = partial_trace(TensorOp.identity(2, 2), {1, 2})
        assert t.arity == 0 and t.scalar() == 4

    def test_quantum_trace_with_identity_weight(self):
        r = standard_r(2)
        assert quantum_partial_trace(r, {2}, TensorOp.identity(2, 1)) == partial_trace(r, {2})

    def test_quantum_trace_of_identity_is_trace_of_d(self):
        d = d_matrix(standard_r(2))
        full = quantum_partial_trace(TensorOp.identity(2, 1), {1}, d).scalar()
        assert full == d[(1,), (1,)] + d[(2,), (2,)]
        assert full == q**-1 + q**-3

    def test_quantum_trace_definition(self):
        rng = random.Random(5)
        a = random_op(rng, 2, 3)
        d = TensorOp.diagonal([Fraction(2), Fraction(-3)], Fraction)
        weighted = compose(place(d, 1, 3), compose(place(d, 3, 3), a))
        assert quantum_partial_trace(a, {1, 3}, d) == partial_trace(weighted, {1, 3})

    def test_invalid_factor(self):
        with pytest.raises(ShapeError):
            partial_trace(permutation(2), {3})

    @pytest.mark.parametrize("seed", range(4))
    def test_against_dense_summation(self, seed):
        rng = random.Random(seed)
        a = random_op(rng, 2, 3)
        for factors in ({1}, {2}, {3}, {1, 3}, {2, 3}):
            assert partial_trace(a, factors).to_dense() == dense_partial_trace(a.to_dense(), 2, 3, factors)


class TestInverse:
    def test_inverse_of_standard_r(self):
        r = standard_r(2)
        assert r @ inverse(r) == TensorOp.identity(2, 2)

    def test_singular(self):
        with pytest.raises(NotInvertibleError):
            inverse(TensorOp.zero(2, 1))

    def test_kron(self):
        a = TensorOp.diagonal([Scalar(1), q])
        assert kron(a, a) == place(a, 1, 2) @ place(a, 2, 2)

    def test_evaluate(self):
        ev = standard_r(2).evaluate({"q": 3})
        assert ev.field is GaussRational
        assert ev[(1, 1), (1, 1)] == 3


# -- properties -------------------------------------------------------------


@st.composite
def small_op(draw, n=2, arity=1):
    dim = n**arity
    values = draw(st.lists(st.integers(-2, 2), min_size=dim * dim, max_size=dim * dim))
    rows = [[Fraction(values[i * dim + j]) for j in range(dim)] for i in range(dim)]
    return TensorOp.from_dense(n, arity, rows, Fraction)


@settings(max_examples=40, deadline=None)
@given(small_op(arity=2), small_op(arity=2), st.integers(1, 2))
def test_place_commutes_with_composition(a, b, p):
    assert place(a @ b, p, 3) == place(a, p, 3) @ place(b, p, 3)


@settings(max_examples=40, deadline=None)
@given(small_op(arity=3), small_op(arity=1), st.integers(1, 3))
def test_cyclicity_within_traced_factor(a, x, p):
    xp = place(x, p, 3)
    assert partial_trace(a @ xp, {p}) == partial_trace(xp @ a, {p})


@settings(max_examples=40, deadline=None)
@given(small_op(arity=3))
def test_disjoint_traces_commute(a):
    assert partial_trace(partial_trace(a, {2}), {1}) == partial_trace(a, {1, 2})
    assert partial_trace(partial_trace(a, {1}), {1}) == partial_trace(a, {1, 2})


@settings(max_examples=30, deadline=None)
@given(small_op(arity=2), small_op(arity=2))
def test_sparsity_honesty(a, b):
    for op in (a + b, a - b, a @ b, a - a, partial_trace(a, {1}), a.scale(0)):
        assert no_explicit_zeros(op)
