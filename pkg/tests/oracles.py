"""Independent reference computations used by the tests.

Everything here is deliberately naive: dense nested lists, explicit
Kronecker products, and sums over permutations.  None of it shares code
with the sparse kernels under test.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product
from math import factorial, prod


def dense_zero(dim, zero=0):
    return [[zero for _ in range(dim)] for _ in range(dim)]


def dense_identity(dim, one=1, zero=0):
    return [[one if i == j else zero for j in range(dim)] for i in range(dim)]


def dense_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = a[i][0] * b[0][j]
            for k in range(1, m):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def dense_kron(a, b):
    ra, rb = len(a), len(b)
    return [
        [a[i // rb][j // rb] * b[i % rb][j % rb] for j in range(ra * rb)]
        for i in range(ra * rb)
    ]


def dense_place(op, n, m, position, total, one=1, zero=0):
    """I^(position-1) (x) op (x) I^(rest) built by Kronecker products."""
    left = dense_identity(n ** (position - 1), one, zero)
    right = dense_identity(n ** (total - position - m + 1), one, zero)
    return dense_kron(dense_kron(left, op), right)


def dense_partial_trace(a, n, k, traced):
    """Trace the (1-based) factors in ``traced`` by explicit index summation."""
    kept = [p for p in range(1, k + 1) if p not in traced]
    dim = n ** len(kept)
    zero = a[0][0] - a[0][0]
    out = [[zero for _ in range(dim)] for _ in range(dim)]
    for row in product(range(n), repeat=len(kept)):
        for col in product(range(n), repeat=len(kept)):
            acc = zero
            for t in product(range(n), repeat=len(traced)):
                full_r, full_c = [0] * k, [0] * k
                for pos, v in zip(kept, row):
                    full_r[pos - 1] = v
                for pos, v in zip(kept, col):
                    full_c[pos - 1] = v
                for pos, v in zip(sorted(traced), t):
                    full_r[pos - 1] = v
                    full_c[pos - 1] = v
                r = sum(d * n ** (k - 1 - i) for i, d in enumerate(full_r))
                c = sum(d * n ** (k - 1 - i) for i, d in enumerate(full_c))
                acc = acc + a[r][c]
            out[_flat(row, n)][_flat(col, n)] = acc
    return out


def _flat(idx, n):
    return sum(d * n ** (len(idx) - 1 - i) for i, d in enumerate(idx))


def perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def classical_projector(n, k, signed):
    """(1/k!) sum_pi sgn(pi)^signed P_pi on V^(x)k as a dense Fraction matrix."""
    dim = n**k
    out = dense_zero(dim, Fraction(0))
    for perm in permutations(range(k)):
        s = perm_sign(perm) if signed else 1
        for idx in product(range(n), repeat=k):
            moved = tuple(idx[perm[m]] for m in range(k))
            out[_flat(idx, n)][_flat(moved, n)] += Fraction(s, factorial(k))
    return out


def kron_power(x, k):
    out = [[Fraction(1)]]
    for _ in range(k):
        out = dense_kron(out, x)
    return out


def brute_projected_partial(x, k, signed):
    """Tr_{1..k-1}(projector X (x) ... (x) X) by dense computation."""
    n = len(x)
    body = dense_mul(classical_projector(n, k, signed), kron_power(x, k))
    return dense_partial_trace(body, n, k, set(range(1, k)))


def det(m):
    m = [list(map(Fraction, row)) for row in m]
    n = len(m)
    sign, result = 1, Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        result *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return sign * result


def principal_minor_sum(x, k):
    if k == 0:
        return Fraction(1)
    return sum(det([[x[i][j] for j in s] for i in s]) for s in combinations(range(len(x)), k))


def elementary(values, k):
    return sum((prod(c) for c in combinations(values, k)), Fraction(0)) if k else Fraction(1)


def complete(values, k):
    return sum((prod(c) for c in combinations_with_replacement(values, k)), Fraction(0)) if k else Fraction(1)


def power_sum(values, k):
    return sum(Fraction(v) ** k for v in values)


def commutative_normal(terms):
    """Collapse noncommutative words to sorted monomials (classical limit)."""
    out = {}
    for w, c in terms.items():
        key = tuple(sorted(w))
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}
