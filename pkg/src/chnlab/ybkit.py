"""Yang-Baxter structure kit.

Braid and Hecke checks, spectral projectors, the antisymmetrizer tower,
the trace-weight matrix D, twists, compatibility of pairs, and the builtin
example matrices (Drinfeld-Jimbo, Cremmer-Gervais and its twist).

All relations are in braid form: R acts on adjacent factors and the
Yang-Baxter equation reads R1 R2 R1 = R2 R1 R2 on V^{(x)3}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import linalg
from .expr import parse_scalar
from .report import Stopwatch, SystemSize, VerificationReport
from .scalar import I, Scalar, q_number_at
from .tensor import (
    NotInvertibleError,
    ShapeError,
    TensorOp,
    compose,
    inverse,
    kron,
    place,
)

__all__ = [
    "BUILTIN_NAMES",
    "CompatiblePair",
    "DMatrixError",
    "HeckeData",
    "NotHeckeError",
    "compatible_pair",
    "conjugate_by_dd",
    "residual_report",
    "trace_weight_commutes",
    "antisymmetrizer",
    "builtin",
    "check_compatible",
    "check_dd_conjugation",
    "check_hecke",
    "check_yang_baxter",
    "cremmer_gervais_f",
    "cremmer_gervais_r",
    "d_matrix",
    "diagonal_twist",
    "hecke_data",
    "permutation",
    "standard_r",
    "twist",
]


class DMatrixError(ArithmeticError):
    """Tr_2(F D_2) = I has no unique solution."""

    def __init__(self, message: str, nullity: int, consistent: bool):
        super().__init__(message)
        self.nullity = nullity
        self.consistent = consistent


class NotHeckeError(ValueError):
    pass


def _default_q(op: TensorOp):
    if op.field is Scalar:
        return Scalar.q()
    raise ValueError("a value for q is required for specialized operators")


def residual_report(check: str, residual: TensorOp, watch: Stopwatch, **details) -> VerificationReport:
    """Report for an operator identity whose residual should vanish."""
    passed = residual.is_zero()
    rank = 0 if passed else residual.rank()
    if not passed:
        shown = list(residual.entries().items())[:5]
        details = {
            **details,
            "nonzero_entries": residual.nnz,
            "sample": [f"{''.join(map(str, r))}|{''.join(map(str, c))}: {v}" for (r, c), v in shown],
        }
    if residual.field is not Scalar:
        details = {"coefficients": "specialized", **details}
    return VerificationReport(
        check=check,
        passed=passed,
        system=SystemSize(residual.dim, residual.dim, rank),
        elapsed_ms=watch.ms,
        details=details,
    )


# -- builtin matrices --------------------------------------------------------


def standard_r(n: int, q=None) -> TensorOp:
    """Drinfeld-Jimbo R: R^{ij}_{kl} = q^{d_ij} d^i_l d^j_k + (q - 1/q) theta(l - k) d^i_k d^j_l.

    theta(x) = 1 for x > 0 and 0 otherwise.
    """
    if n < 1:
        raise ValueError("n must be positive")
    q = Scalar.q() if q is None else q
    kind = type(q)
    lam = q - 1 / q
    entries = {}
    for i in range(n):
        for j in range(n):
            # flip term: row (i, j), column (k, l) = (j, i)
            entries[(i * n + j, j * n + i)] = q if i == j else kind(1)
            if j > i:
                key = (i * n + j, i * n + j)
                entries[key] = entries.get(key, kind(0)) + lam
    return TensorOp(n, 2, entries, kind)


def permutation(n: int, kind=Scalar) -> TensorOp:
    return TensorOp.permutation(n, kind)


def _from_rows(n: int, rows: Mapping[int, Mapping[int, Scalar]]) -> TensorOp:
    """1-based row/column numbers of the n^2 x n^2 display."""
    return TensorOp(n, 2, {(r - 1, c - 1): v for r, cols in rows.items() for c, v in cols.items()})


def cremmer_gervais_r(b=None, y=None) -> TensorOp:
    """The 9x9 Cremmer-Gervais R(b, y) for n = 3 (b and y default to parameters)."""
    q = Scalar.q()
    b = Scalar.param("b") if b is None else Scalar.coerce(b)
    y = Scalar.param("y") if y is None else Scalar.coerce(y)
    lam = q - 1 / q
    return _from_rows(
        3,
        {
            1: {1: q},
            2: {4: b},
            3: {7: b**2 / q},
            4: {2: 1 / b, 4: lam},
            5: {3: y, 5: q, 7: -(b**2) * y / q**2},
            6: {8: b},
            7: {3: q / b**2, 7: lam},
            8: {6: 1 / b, 8: lam},
            9: {9: q},
        },
    )


def cremmer_gervais_f(alpha=I, beta=I, gamma=I) -> TensorOp:
    """The 9x9 twist F paired with Cremmer-Gervais R; alpha^2 = beta^2 = gamma^2 = -1."""
    a, b, g = (Scalar.coerce(x) for x in (alpha, beta, gamma))
    one = Scalar(1)
    return _from_rows(
        3,
        {
            1: {1: one},
            2: {4: b},
            3: {7: -one},
            4: {2: a},
            5: {5: g},
            6: {8: a},
            7: {3: -one},
            8: {6: b},
            9: {9: one},
        },
    )


def diagonal_twist(delta: Sequence, n: int | None = None) -> TensorOp:
    """F = Delta P with Delta = diag(delta) on V (x) V (n^2 diagonal entries, row-major)."""
    values = [Scalar.coerce(v) for v in delta]
    if n is None:
        n = round(len(values) ** 0.5)
    if len(values) != n * n:
        raise ShapeError(f"diagonal twist needs {n * n} entries, got {len(values)}")
    if any(not v for v in values):
        raise ValueError("Delta must be invertible")
    diag = TensorOp(n, 2, {(k, k): v for k, v in enumerate(values)})
    return compose(diag, TensorOp.permutation(n))


def builtin(name: str, params: Sequence[str] = ()) -> TensorOp:
    """Resolve a builtin by name.

    Names: ``standard:N``, ``permutation:N``, ``cremmer_gervais_r``,
    ``cremmer_gervais_f``, ``diagonal_twist:N:e1,e2,...`` (n^2 expressions).
    ``standard_r``/``perm`` are accepted as aliases.
    """
    head, _, rest = name.partition(":")
    head = head.strip().lower()
    try:
        if head in ("standard", "standard_r", "drinfeld_jimbo"):
            return standard_r(int(rest))
        if head in ("permutation", "perm", "p"):
            return permutation(int(rest))
        if head in ("cremmer_gervais_r", "cg_r"):
            return cremmer_gervais_r()
        if head in ("cremmer_gervais_f", "cg_f"):
            return cremmer_gervais_f()
        if head in ("diagonal_twist", "delta_p"):
            n_text, _, values = rest.partition(":")
            n = int(n_text)
            exprs = [parse_scalar(v, params) for v in values.split(",")] if values else None
            if exprs is None:
                exprs = [Scalar.param(f"d{i}{j}") for i in range(1, n + 1) for j in range(1, n + 1)]
            return diagonal_twist(exprs, n)
    except ValueError as exc:
        raise ValueError(f"bad builtin spec {name!r}: {exc}") from exc
    raise KeyError(f"unknown builtin {name!r}")


BUILTIN_NAMES = (
    "standard:N",
    "permutation:N",
    "cremmer_gervais_r",
    "cremmer_gervais_f",
    "diagonal_twist:N[:e1,...,e(N^2)]",
)


# -- checks --------------------------------------------------------------------


def _require_arity2(r: TensorOp):
    if r.arity != 2:
        raise ShapeError(f"expected an operator on V (x) V, got arity {r.arity}")


def check_yang_baxter(r: TensorOp) -> VerificationReport:
    """Braid relation R1 R2 R1 = R2 R1 R2 on V^{(x)3}."""
    _require_arity2(r)
    watch = Stopwatch()
    r1, r2 = place(r, 1, 3), place(r, 2, 3)
    residual = r1 @ r2 @ r1 - r2 @ r1 @ r2
    return residual_report("yang_baxter", residual, watch, n=r.n)


@dataclass
class HeckeData:
    """A Hecke-type R with its spectral projectors: R = q S - q^-1 A."""

    rhat: TensorOp
    q: object
    S: TensorOp
    A: TensorOp
    _tower: list = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return self.rhat.n


def check_hecke(r: TensorOp, q=None) -> tuple[VerificationReport, HeckeData | None]:
    """Verify (R - q)(R + 1/q) = 0 and return the projectors on success."""
    _require_arity2(r)
    watch = Stopwatch()
    q = _default_q(r) if q is None else q
    kind = r.field
    if kind is not Scalar and isinstance(q, Scalar):
        q = q.constant_value()
    ident = TensorOp.identity(r.n, 2, kind)
    qinv = 1 / q
    residual = compose(r - ident.scale(q), r + ident.scale(qinv))
    report = residual_report("hecke", residual, watch, n=r.n, q=str(q))
    if not report.passed:
        return report, None
    norm = q + qinv
    if not norm:
        report.passed = False
        report.details["error"] = "q + 1/q vanishes; projectors undefined"
        return report, None
    S = (r + ident.scale(qinv)).scale(1 / norm)
    A = (ident.scale(q) - r).scale(1 / norm)
    eigen = []
    if not S.is_zero():
        eigen.append(str(q))
    if not A.is_zero():
        eigen.append(str(-qinv))
    report.details.update(rank_S=S.rank(), rank_A=A.rank(), eigenvalues=eigen)
    report.elapsed_ms = watch.ms
    return report, HeckeData(r, q, S, A)


def hecke_data(r: TensorOp, q=None) -> HeckeData:
    report, data = check_hecke(r, q)
    if data is None:
        raise NotHeckeError(f"operator is not of Hecke type: {report.details}")
    return data


def antisymmetrizer(h: HeckeData, k: int) -> TensorOp:
    """A_1 = I, A_k = (1/k_q) A_{k-1} (q^{k-1} - (k-1)_q R_{k-1}) A_{k-1}."""
    if k < 1:
        raise ValueError("antisymmetrizer needs k >= 1")
    tower = h._tower
    if not tower:
        tower.append(TensorOp.identity(h.n, 1, h.rhat.field))
    q = h.q
    while len(tower) < k:
        m = len(tower) + 1
        km = q_number_at(q, m)
        if not km:
            raise ZeroDivisionError(f"{m}_q vanishes; q is a root of unity")
        prev = place(tower[-1], 1, m)
        middle = TensorOp.identity(h.n, m, h.rhat.field).scale(q ** (m - 1)) - place(
            h.rhat, m - 1, m
        ).scale(q_number_at(q, m - 1))
        tower.append((prev @ middle @ prev).scale(1 / km))
    return tower[k - 1]


def d_matrix(f: TensorOp) -> TensorOp:
    """The unique D with Tr_2(F D_2) = I."""
    _require_arity2(f)
    n = f.n
    kind = f.field
    zero = kind(0)
    # unknown D[l][j] sits at l*n + j; equation (i, k) at i*n + k
    system = [[zero] * (n * n) for _ in range(n * n)]
    for (row, col), v in f.raw.items():
        i, j = divmod(row, n)
        k, l = divmod(col, n)
        system[i * n + k][l * n + j] = system[i * n + k][l * n + j] + v
    rhs = [kind(1) if i == k else zero for i in range(n) for k in range(n)]
    try:
        sol = linalg.solve(system, rhs)
    except linalg.SingularSystemError as exc:
        kind_msg = "non-unique" if exc.consistent else "inconsistent"
        raise DMatrixError(
            f"Tr_2(F D_2) = I is {kind_msg} (solution-space dimension {exc.nullity})",
            exc.nullity,
            exc.consistent,
        ) from exc
    return TensorOp(n, 1, {(u // n, u % n): v for u, v in enumerate(sol)}, kind)


def twist(r: TensorOp, f: TensorOp) -> TensorOp:
    """F R F^-1."""
    return compose(compose(f, r), inverse(f))


@dataclass
class CompatiblePair:
    rhat: TensorOp
    fhat: TensorOp
    rhat_f: TensorOp
    rhat_ff: TensorOp
    d_of_f: TensorOp
    fhat_inv: TensorOp

    @property
    def n(self) -> int:
        return self.rhat.n

    @property
    def field(self):
        return self.rhat.field

    def evaluate(self, point) -> "CompatiblePair":
        return CompatiblePair(*(op.evaluate(point) for op in (
            self.rhat, self.fhat, self.rhat_f, self.rhat_ff, self.d_of_f, self.fhat_inv)))


def check_compatible(r: TensorOp, f: TensorOp) -> tuple[VerificationReport, CompatiblePair | None]:
    """R1 F2 F1 = F2 F1 R2 and R2 F1 F2 = F1 F2 R1, plus the derived twist data."""
    _require_arity2(r)
    _require_arity2(f)
    if r.n != f.n:
        raise ShapeError("R and F act on different spaces")
    watch = Stopwatch()
    yb_r, yb_f = check_yang_baxter(r), check_yang_baxter(f)
    r1, r2 = place(r, 1, 3), place(r, 2, 3)
    f1, f2 = place(f, 1, 3), place(f, 2, 3)
    first = r1 @ f2 @ f1 - f2 @ f1 @ r2
    second = r2 @ f1 @ f2 - f1 @ f2 @ r1
    parts = {
        "yang_baxter_r": yb_r.passed,
        "yang_baxter_f": yb_f.passed,
        "compat_1": first.is_zero(),
        "compat_2": second.is_zero(),
    }
    rank = sum(x.rank() for x in (first, second) if not x.is_zero())
    report = VerificationReport(
        check="compatible",
        passed=all(parts.values()),
        system=SystemSize(2 * first.dim, first.dim, rank + yb_r.system.rank + yb_f.system.rank),
        details=dict(parts),
    )
    pair = None
    if report.passed:
        try:
            f_inv = inverse(f)
        except NotInvertibleError as exc:
            report.passed = False
            report.details["error"] = str(exc)
        else:
            rhat_f = f @ r @ f_inv
            rhat_ff = f @ rhat_f @ f_inv
            try:
                d = d_matrix(f)
            except DMatrixError as exc:
                report.details["d_matrix_error"] = str(exc)
            else:
                pair = CompatiblePair(r, f, rhat_f, rhat_ff, d, f_inv)
                report.details["d_of_f"] = [str(d[i, i]) for i in range(d.n)] if d.is_diagonal() else "non-diagonal"
    report.elapsed_ms = watch.ms
    return report, pair


def compatible_pair(r: TensorOp, f: TensorOp) -> CompatiblePair:
    report, pair = check_compatible(r, f)
    if pair is None:
        raise ValueError(f"not a usable compatible pair: {report.details}")
    return pair


def check_dd_conjugation(pair: CompatiblePair) -> VerificationReport:
    """R^FF = (D(F)_1 D(F)_2) R (D(F)_1 D(F)_2)^-1."""
    watch = Stopwatch()
    dd = kron(pair.d_of_f, pair.d_of_f)
    residual = pair.rhat_ff - dd @ pair.rhat @ inverse(dd)
    return residual_report("dd_conjugation", residual, watch, n=pair.n)


def conjugate_by_dd(r: TensorOp, d: TensorOp) -> TensorOp:
    dd = kron(d, d)
    return dd @ r @ inverse(dd)


def trace_weight_commutes(r: TensorOp, d: TensorOp) -> VerificationReport:
    """R D1 D2 = D1 D2 R."""
    watch = Stopwatch()
    dd = kron(d, d)
    return residual_report("rdd_commute", r @ dd - dd @ r, watch, n=r.n)
