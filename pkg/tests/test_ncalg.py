from fractions import Fraction
import json
import random

import pytest

from chnlab.chn import ChnInstance, chn_residual
from chnlab.linalg import Echelon
from chnlab.ncalg import (
    InhomogeneousError,
    NCMatrix,
    NCPoly,
    Randomized,
    ideal_membership,
    mbar,
    relations_from,
)
from chnlab.scalar import Scalar
from chnlab.tensor import TensorOp, inverse
from chnlab.ybkit import (
    compatible_pair,
    cremmer_gervais_f,
    cremmer_gervais_r,
    d_matrix,
    permutation,
    standard_r,
)

q = Scalar.q()


def gen(n, i, j, field=Scalar):
    return NCPoly.generator(n, i, j, field)


@pytest.fixture(scope="module")
def rtt2():
    return relations_from(compatible_pair(standard_r(2), permutation(2)))


@pytest.fixture(scope="module")
def rlrl2():
    r = standard_r(2)
    return relations_from(compatible_pair(r, r))


@pytest.fixture(scope="module")
def classical2():
    p = permutation(2, Fraction)
    return relations_from(compatible_pair(p, p), q=Fraction(1))


def span(polys):
    e = Echelon()
    e.extend(p.terms for p in polys)
    return e


def same_span(a, b):
    ea, eb = span(a), span(b)
    return all(eb.contains(p.terms) for p in a) and all(ea.contains(p.terms) for p in b)


class TestNCPoly:
    def test_products_do_not_commute(self):
        a, b = gen(2, 1, 1), gen(2, 1, 2)
        assert a * b != b * a
        assert (a * b).degree == 2
        assert a.commutator(b).format() == "M11*M12 - M12*M11"

    def test_unit_and_scalars(self):
        one = NCPoly.constant(2, Scalar(1))
        a = gen(2, 2, 1)
        assert one * a == a and a * one == a
        assert (a * q - q * a).is_zero()
        assert not NCPoly(2, {(): Scalar(0)}).terms

    def test_word_labels(self):
        p = gen(2, 1, 2) * gen(2, 2, 1)
        assert p.word_labels() == {((1, 2), (2, 1)): Scalar(1)}
        assert NCPoly.from_words(2, {((1, 2), (2, 1)): Scalar(1)}) == p


class TestNCMatrix:
    def test_generator_matrix(self):
        m = NCMatrix.generators(2)
        assert m[(1,), (2,)] == gen(2, 1, 2)

    def test_scalars_commute_with_generators(self):
        r = standard_r(2)
        m1 = NCMatrix.generators(2).place(1, 2)
        lhs = (r @ m1) @ r
        rhs = r @ (m1 @ r)
        assert lhs == rhs

    def test_trace_of_placed_generators(self):
        m = NCMatrix.generators(2)
        m2 = m.place(2, 2)
        assert m2.partial_trace({2}) == NCMatrix.from_tensor(TensorOp.identity(2, 1)).right_mul(
            gen(2, 1, 1) + gen(2, 2, 2)
        )
        assert m.trace() == gen(2, 1, 1) + gen(2, 2, 2)

    def test_ordinary_square(self):
        m = NCMatrix.generators(2)
        sq = m.power(2)
        assert sq[(1,), (2,)] == gen(2, 1, 1) * gen(2, 1, 2) + gen(2, 1, 2) * gen(2, 2, 2)


class TestRelations:
    def test_flavors(self, rtt2, rlrl2, classical2):
        assert rtt2.flavor == "rtt" and rlrl2.flavor == "rlrl" and classical2.flavor == "rtt"
        cg = relations_from(compatible_pair(cremmer_gervais_r(), cremmer_gervais_f()))
        assert cg.flavor == "general"

    def test_rtt_matches_direct_construction(self, rtt2):
        r = standard_r(2)
        t1 = NCMatrix.generators(2).place(1, 2)
        t2 = NCMatrix.generators(2).place(2, 2)
        direct = r @ t1 @ t2 - t1 @ t2 @ r
        assert direct.polys() == rtt2.relations
        assert len(rtt2.basis) == 6

    def test_rlrl_matches_reflection_relations(self, rlrl2):
        r = standard_r(2)
        l1 = NCMatrix.generators(2).place(1, 2)
        direct = r @ l1 @ r @ l1 - l1 @ r @ l1 @ r
        assert same_span(direct.polys(), rlrl2.relations)
        # entrywise they differ by the invertible right factor R
        assert direct.polys() != rlrl2.relations

    def test_classical_relations_are_commutators(self, classical2):
        gens = [gen(2, i, j, Fraction) for i in (1, 2) for j in (1, 2)]
        commutators = [a.commutator(b) for x, a in enumerate(gens) for b in gens[x + 1 :]]
        assert same_span(commutators, classical2.relations)
        assert len(classical2.basis) == 6


class TestMbar:
    def test_first_is_placed_generators(self, rlrl2):
        assert mbar(rlrl2, 1, 3) == NCMatrix.generators(2).place(1, 3)

    def test_permutation_moves_factors(self):
        spec = relations_from(compatible_pair(standard_r(2), permutation(2)))
        assert mbar(spec, 3, 3) == NCMatrix.generators(2).place(3, 3)
        assert mbar(spec, 2, 3) == NCMatrix.generators(2).place(2, 3)

    def test_conjugation_by_r_against_index_sum(self, rlrl2):
        r = standard_r(2)
        rinv = inverse(r)
        rd, rid = r.to_dense(), rinv.to_dense()

        def m1(c, d):
            (c1, c2), (d1, d2) = divmod(c, 2), divmod(d, 2)
            return gen(2, c1 + 1, d1 + 1) * Scalar(1) if c2 == d2 else NCPoly(2)

        got = mbar(rlrl2, 2, 2)
        for a in range(4):
            for b in range(4):
                acc = NCPoly(2)
                for c in range(4):
                    for d in range(4):
                        if rd[a][c] and rid[d][b]:
                            acc = acc + m1(c, d) * (rd[a][c] * rid[d][b])
                assert got.entry(a, b) == acc


class TestMembership:
    def test_relations_are_members(self, rtt2, rlrl2):
        for spec in (rtt2, rlrl2):
            for rel in spec.relations:
                assert ideal_membership(rel, spec).passed

    def test_classical_commutator_and_anticommutator(self, classical2):
        a, b = gen(2, 1, 1, Fraction), gen(2, 2, 2, Fraction)
        assert ideal_membership(a * b - b * a, classical2).passed
        c = gen(2, 1, 2, Fraction)
        assert not ideal_membership(a * c + c * a, classical2).passed

    def test_degree_three_products(self, rtt2):
        rel = rtt2.relations[0]
        g = gen(2, 2, 1)
        assert ideal_membership(g * rel - rel * g * q, rtt2).passed
        assert not ideal_membership(g * g * g, rtt2).passed

    def test_low_degree(self, rtt2):
        assert not ideal_membership(gen(2, 1, 1), rtt2).passed
        assert ideal_membership(NCPoly(2), rtt2).passed

    def test_inhomogeneous(self, rtt2):
        with pytest.raises(InhomogeneousError):
            ideal_membership(gen(2, 1, 1) + gen(2, 1, 1) * gen(2, 1, 2), rtt2)

    def test_twisted_generators_satisfy_relations(self, rtt2):
        d = d_matrix(standard_r(2))
        tt = NCMatrix.from_tensor(d) @ NCMatrix.generators(2)
        t1, p = tt.place(1, 2), permutation(2)
        t2 = p @ t1 @ p
        r = standard_r(2)
        assert ideal_membership(r @ t1 @ t2 - t1 @ t2 @ r, rtt2).passed

    def test_exact_and_randomized_agree(self, rtt2, rlrl2):
        good = chn_residual(ChnInstance(rtt2, 3), 3, "rtt_overline")
        bad = chn_residual(ChnInstance(rlrl2, 3), 3, "rlrl")
        for p, spec in ((good, rtt2), (bad, rlrl2)):
            exact = ideal_membership(p, spec).passed
            rand = ideal_membership(p, spec, Randomized(seed=11, trials=2))
            assert rand.passed == exact
            assert rand.mode == "randomized" and rand.seed == 11 and len(rand.points) == 2

    def test_randomized_is_deterministic(self, rtt2):
        p = chn_residual(ChnInstance(rtt2, 3), 3, "rtt_underline")
        a = ideal_membership(p, rtt2, Randomized(seed=5)).to_dict()
        b = ideal_membership(p, rtt2, Randomized(seed=5)).to_dict()
        a.pop("elapsed_ms"), b.pop("elapsed_ms")
        assert a == b

    @pytest.mark.parametrize("seed", range(3))
    def test_invariant_under_scalar_operators(self, rtt2, seed):
        rng = random.Random(seed)

        def rand_op(arity):
            rows = [[Scalar(rng.randint(-2, 2)) + q * rng.randint(0, 1) for _ in range(2**arity)] for _ in range(2**arity)]
            return TensorOp.from_dense(2, arity, rows)

        m1 = NCMatrix.generators(2).place(1, 2)
        m2 = permutation(2) @ m1 @ permutation(2)
        r = standard_r(2)
        rel = r @ m1 @ m2 - m1 @ m2 @ r
        assert ideal_membership(rand_op(2) @ rel @ rand_op(2), rtt2).passed
        res = chn_residual(ChnInstance(rtt2, 3), 3, "rtt_overline")
        assert ideal_membership(rand_op(1) @ res @ rand_op(1), rtt2).passed

    def test_report_schema(self, rtt2):
        rep = ideal_membership(rtt2.relations[0] * gen(2, 1, 1), rtt2, Randomized(seed=1, trials=1))
        data = json.loads(rep.to_json())
        assert {"check", "mode", "pass", "degree", "system", "seed", "points", "elapsed_ms"} <= set(data)
        assert set(data["system"]) == {"rows", "cols", "rank"}
        assert data["degree"] == 3
