"""Acceptance suite: one test per criterion, each with its runtime budget.

Every test prints a single ``criterion N PASS|FAIL`` line (also collected
into the pytest terminal summary).  Run directly with
``python3 tests/test_acceptance.py`` for just these lines.
"""

from __future__ import annotations

import random
import sys
import time
from contextlib import contextmanager
from math import comb

import pytest

import conftest
from chnlab.chn import (
    ChnInstance,
    ClassicalMatrix,
    classical_chn_check,
    classical_newton_check,
    consistency_bridge,
    sigma,
    verify_chn,
)
from chnlab.ncalg import NCMatrix, NCPoly, Randomized, ideal_membership, relations_from
from chnlab.scalar import I, Scalar
from chnlab.tensor import TensorOp
from chnlab.ybkit import (
    antisymmetrizer,
    check_compatible,
    check_dd_conjugation,
    check_hecke,
    check_yang_baxter,
    compatible_pair,
    conjugate_by_dd,
    cremmer_gervais_f,
    cremmer_gervais_r,
    d_matrix,
    hecke_data,
    permutation,
    standard_r,
    trace_weight_commutes,
)

SEED = 2024
q = Scalar.q()


class Criterion:
    def __init__(self, number: int, title: str, budget_s: float):
        self.number, self.title, self.budget_s = number, title, budget_s
        self.parts: list[tuple[str, bool]] = []

    def part(self, label: str, ok: bool) -> bool:
        self.parts.append((label, bool(ok)))
        return ok

    def failed(self) -> list[str]:
        return [label for label, ok in self.parts if not ok]


@contextmanager
def criterion(number: int, title: str, budget_s: float):
    c = Criterion(number, title, budget_s)
    start = time.perf_counter()
    error = None
    try:
        yield c
    except Exception as exc:  # recorded, then re-raised below
        error = exc
    elapsed = time.perf_counter() - start
    bad = c.failed()
    if error is not None:
        bad.append(f"error: {type(error).__name__}: {error}")
    if elapsed > budget_s:
        bad.append(f"runtime {elapsed:.2f}s over budget {budget_s:g}s")
    status = "FAIL" if bad else "PASS"
    line = f"criterion {number} {status}  {title}  [{len(c.parts) - len(c.failed())}/{len(c.parts)} parts, {elapsed:.2f}s / {budget_s:g}s]"
    if bad:
        line += "  failed: " + "; ".join(bad)
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    if error is not None:
        raise error
    assert not bad, line


def test_criterion_1_standard_r_is_braided_hecke():
    with criterion(1, "standard R: Yang-Baxter, Hecke, spectral projectors (n=2,3)", 2.0) as c:
        for n in (2, 3):
            start = time.perf_counter()
            r = standard_r(n)
            c.part(f"n={n} yang-baxter", check_yang_baxter(r).passed)
            report, h = check_hecke(r)
            c.part(f"n={n} hecke", report.passed and h is not None)
            if h is not None:
                ident = TensorOp.identity(n, 2)
                c.part(f"n={n} S, A idempotent", h.S @ h.S == h.S and h.A @ h.A == h.A)
                c.part(f"n={n} S + A = I, SA = 0", h.S + h.A == ident and (h.S @ h.A).is_zero())
                c.part(f"n={n} R = qS - A/q", h.S.scale(q) - h.A.scale(1 / q) == r)
            c.part(f"n={n} under 1 s", time.perf_counter() - start < 1.0)


def test_criterion_2_antisymmetrizer_tower():
    with criterion(2, "antisymmetrizers: idempotent, rank C(n,k), A_(n+1) = 0", 10.0) as c:
        for n in (2, 3):
            h = hecke_data(standard_r(n))
            for k in range(1, n + 1):
                a = antisymmetrizer(h, k)
                c.part(f"n={n} k={k} idempotent", a @ a == a)
                c.part(f"n={n} k={k} rank", a.rank() == comb(n, k))
            c.part(f"n={n} A_{n + 1} = 0", antisymmetrizer(h, n + 1).is_zero())


def test_criterion_3_classical_identities():
    with criterion(3, "classical CHN, Cayley-Hamilton and Newton on random integer matrices", 5.0) as c:
        rng = random.Random(SEED)
        for n, count in ((4, 20), (5, 5)):
            ok_wedge = ok_sym = ok_ch = ok_newton = True
            for _ in range(count):
                x = ClassicalMatrix.random(n, rng)
                wedge = classical_chn_check(x, n + 1, "wedge")
                ok_wedge &= wedge.passed
                ok_ch &= bool(wedge.details.get("cayley_hamilton"))
                ok_sym &= classical_chn_check(x, n + 1, "symmetric").passed
                ok_newton &= classical_newton_check(x, n + 1).passed
            c.part(f"n={n} wedge residuals + traced Newton", ok_wedge)
            c.part(f"n={n} symmetric residuals + traced Newton", ok_sym)
            c.part(f"n={n} Cayley-Hamilton", ok_ch)
            c.part(f"n={n} Newton identities", ok_newton)


def test_criterion_4_rtt():
    with criterion(4, "RTT CHN: n=2 exact, n=3 randomized (k=2,3, both variants)", 120.0) as c:
        start = time.perf_counter()
        spec = relations_from(compatible_pair(standard_r(2), permutation(2)))
        for family in ("rtt_underline", "rtt_overline"):
            for k in (2, 3):
                report = verify_chn(spec, k, family, "exact")
                c.part(f"n=2 {family} k={k} exact", report.passed and report.mode == "exact")
        c.part("n=2 under 60 s", time.perf_counter() - start < 60)
        start = time.perf_counter()
        spec3 = relations_from(compatible_pair(standard_r(3), permutation(3)))
        for family in ("rtt_underline", "rtt_overline"):
            for k in (2, 3):
                report = verify_chn(spec3, k, family, Randomized(seed=SEED, trials=3))
                c.part(f"n=3 {family} k={k} randomized", report.passed and len(report.points) == 3)
        c.part("n=3 under 60 s", time.perf_counter() - start < 60)


def test_criterion_5_rlrl():
    with criterion(5, "RLRL CHN at n=2 (k=2,3 exact) and centrality of sigma_1", 60.0) as c:
        r = standard_r(2)
        spec = relations_from(compatible_pair(r, r))
        c.part("D solved from Tr_2(R D_2) = I", spec.pair.d_of_f == TensorOp.diagonal([q**-3, q**-1]))
        for k in (2, 3):
            c.part(f"k={k} residual in ideal", verify_chn(spec, k, "rlrl", "exact").passed)
        inst = ChnInstance(spec, 3)
        s1 = sigma(inst, 1)
        central = all(
            ideal_membership(s1 * g - g * s1, spec).passed
            for g in (NCPoly.generator(2, i, j) for i in (1, 2) for j in (1, 2))
        )
        c.part("sigma_1 central", central)


def test_criterion_6_cremmer_gervais():
    with criterion(6, "Cremmer-Gervais pair: compatibility, D(F), DD conjugation, y -> -y", 10.0) as c:
        rr, ff = cremmer_gervais_r(), cremmer_gervais_f()
        report, pair = check_compatible(rr, ff)
        c.part("compatible over q, b, y", report.passed)
        d = d_matrix(ff)
        c.part("D(F) = diag(1, -i, 1)", d == TensorOp.diagonal([Scalar(1), -I, Scalar(1)]))
        if pair is not None:
            c.part("R^FF = DD R (DD)^-1", check_dd_conjugation(pair).passed)
        y = Scalar.param("y")
        c.part("DD conjugation maps y to -y", conjugate_by_dd(rr, d) == cremmer_gervais_r(y=-y))


def test_criterion_7_general_cremmer_gervais():
    with criterion(7, "general CHN for the Cremmer-Gervais pair, k=2 randomized", 120.0) as c:
        spec = relations_from(compatible_pair(cremmer_gervais_r(), cremmer_gervais_f()))
        report = verify_chn(spec, 2, "general", Randomized(seed=SEED, trials=3))
        c.part("k=2 residual in ideal (3 trials)", report.passed and len(report.points) == 3)


def test_criterion_8_bridges():
    with criterion(8, "general family reduces to RTT (F=P) and RLRL (F=R), n=2, k<=3", 60.0) as c:
        r = standard_r(2)
        rtt = ChnInstance(relations_from(compatible_pair(r, permutation(2))), 3)
        report = consistency_bridge(rtt, 3)
        c.part("F=P syntactic match with q^j sigma rescaling", report.passed)
        rlrl = ChnInstance(relations_from(compatible_pair(r, r)), 3)
        report = consistency_bridge(rlrl, 3)
        for part in report.details["parts"]:
            c.part(f"F=R {part['check']} match modulo ideal", part["pass"])


def test_criterion_9_twisted_generators():
    with criterion(9, "R D1 D2 = D1 D2 R and relations of DT in the RTT algebra", 10.0) as c:
        for n in (2, 3):
            r = standard_r(n)
            c.part(f"n={n} R commutes with DD", trace_weight_commutes(r, d_matrix(r)).passed)
        r = standard_r(2)
        spec = relations_from(compatible_pair(r, permutation(2)))
        tt = NCMatrix.from_tensor(d_matrix(r)) @ NCMatrix.generators(2)
        t1 = tt.place(1, 2)
        t2 = permutation(2) @ t1 @ permutation(2)
        c.part("relations of DT in ideal", ideal_membership(r @ t1 @ t2 - t1 @ t2 @ r, spec).passed)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
