"""Exact rational linear algebra and graded ideal computations.

Everything reduces to row reduction over Q: annihilating Euler fields from
support exponents, degree-matched ideal membership, bounded-degree syzygies,
and the Koszul homotopy that trivializes 1-cycles against a weighted Euler
derivation.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as int_gcd
from typing import Sequence

from .poly import (
    Context,
    Poly,
    PolyError,
    deg_shift_inverse,
    grevlex_key,
)

Vec = list[Fraction]


# ---------------------------------------------------------------------------
# rational row reduction
# ---------------------------------------------------------------------------


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form and pivot column indices (columns scanned left to right)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def _normalize_integer_vector(v: Vec) -> Vec:
    """Clear denominators, divide by content, make the first nonzero entry positive."""
    den = 1
    for x in v:
        den = den * x.denominator // int_gcd(den, x.denominator)
    ints = [x * den for x in v]
    g = 0
    for x in ints:
        g = int_gcd(g, int(x))
    if g:
        ints = [x / g for x in ints]
    lead = next((x for x in ints if x != 0), None)
    if lead is not None and lead < 0:
        ints = [-x for x in ints]
    return [Fraction(x) for x in ints]


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> list[Vec]:
    """Deterministic basis of the right kernel.

    One basis vector per free column (in column order), normalized to integer
    entries with content 1 and positive first nonzero entry.
    """
    rows = list(rows)
    if ncols is None:
        if not rows:
            raise ValueError("nullspace of an empty system needs ncols")
        ncols = len(rows[0])
    if not rows:
        rows = [[Fraction(0)] * ncols]
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    basis: list[Vec] = []
    for c in range(ncols):
        if c in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[c] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][c]
        basis.append(_normalize_integer_vector(v))
    return basis


def solve_linear(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vec | None:
    """One exact solution of A x = b (free variables set to zero), or None."""
    rows = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not rows:
        return []
    ncols = len(rows[0]) - 1
    red, pivots = rref(rows)
    if ncols in pivots:
        return None  # pivot in the augmented column: inconsistent
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


# ---------------------------------------------------------------------------
# annihilating Euler fields from the support
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnihilatorSpace:
    """Weight vectors a with E_a(f) = 0, plus solvability of E_a(f) = f."""

    basis: tuple[tuple[Fraction, ...], ...]
    unit_degree_field: tuple[Fraction, ...] | None

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def admits_nonzero_degree(self) -> bool:
        return self.unit_degree_field is not None


def euler_annihilators(f: Poly) -> AnnihilatorSpace:
    """All weight vectors a with sum_i a_i e_i = 0 across supp(f), and a witness
    for the affine system sum_i a_i e_i = 1 when solvable (then E_a(f) = f)."""
    if f.is_zero():
        raise PolyError("the zero polynomial spans no support")
    support = f.support()
    rows = [[Fraction(e[i]) for i in range(f.ctx.nvars)] for e in support]
    basis = tuple(tuple(v) for v in nullspace(rows, f.ctx.nvars))
    unit = solve_linear(rows, [Fraction(1)] * len(rows))
    return AnnihilatorSpace(basis, tuple(unit) if unit is not None else None)


def two_weight_annihilator(f: Poly, v: Sequence, w: Sequence) -> tuple[Fraction, ...]:
    """The field deg_v(f) * w - deg_w(f) * v, which annihilates any (v,w)-bihomogeneous f."""
    dv = f.weighted_degree(v)
    dw = f.weighted_degree(w)
    e = tuple(dv * Fraction(wi) - dw * Fraction(vi) for vi, wi in zip(v, w))
    assert f.euler_apply(e).is_zero(), "bihomogeneity check passed yet the field fails"
    return e


# ---------------------------------------------------------------------------
# linear solving with polynomial columns
# ---------------------------------------------------------------------------


def vector_linear_solve(columns: Sequence[Sequence[Poly]], target: Sequence[Poly]) -> Vec | None:
    """Rational c with sum_i c_i * columns[i] = target (vectors of polynomials)."""
    coords = len(target)
    index: dict[tuple[int, tuple], int] = {}
    for vec in list(columns) + [list(target)]:
        if len(vec) != coords:
            raise PolyError("vector length mismatch in linear solve")
        for k, p in enumerate(vec):
            for e in p.terms:
                index.setdefault((k, e), len(index))
    nrows = len(index)
    rows = [[Fraction(0)] * len(columns) for _ in range(nrows)]
    for j, vec in enumerate(columns):
        for k, p in enumerate(vec):
            for e, c in p.terms.items():
                rows[index[(k, e)]][j] = c
    rhs = [Fraction(0)] * nrows
    for k, p in enumerate(target):
        for e, c in p.terms.items():
            rhs[index[(k, e)]] = c
    return solve_linear(rows, rhs)


def poly_linear_solve(columns: Sequence[Poly], target: Poly) -> Vec | None:
    return vector_linear_solve([[p] for p in columns], [target])


# ---------------------------------------------------------------------------
# graded membership and bounded syzygies
# ---------------------------------------------------------------------------


def monomials_of_degree(ctx: Context, d: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree exactly d, ascending grevlex."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], remaining: int, pos: int):
        if pos == ctx.nvars - 1:
            out.append(tuple(prefix + [remaining]))
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, pos + 1)

    if ctx.nvars == 0:
        return [()] if d == 0 else []
    rec([], d, 0)
    out.sort(key=grevlex_key)
    return out


def monomials_up_to_degree(ctx: Context, bound: int) -> list[tuple[int, ...]]:
    out = []
    for d in range(bound + 1):
        out.extend(monomials_of_degree(ctx, d))
    return out


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    multipliers: tuple[Poly, ...] | None


def graded_membership(target: Poly, gens: Sequence[Poly]) -> MembershipResult:
    """Is a homogeneous target in the ideal of homogeneous gens?

    Degree-matched exact solve: multiplier i ranges over monomials of degree
    deg(target) - deg(gen_i); the coefficient-matching system is solved over Q.
    """
    if target.is_zero():
        return MembershipResult(True, tuple(g.ctx.zero() for g in gens))
    if not gens:
        return MembershipResult(False, None)
    ctx = gens[0].ctx
    d = target.total_degree()
    if not target.is_homogeneous():
        raise PolyError("graded membership needs a homogeneous target")
    columns: list[Poly] = []
    owners: list[tuple[int, tuple[int, ...]]] = []
    for i, g in enumerate(gens):
        if g.is_zero():
            continue
        if not g.is_homogeneous():
            raise PolyError("graded membership needs homogeneous generators")
        dg = g.total_degree()
        if dg > d:
            continue
        for e in monomials_of_degree(ctx, d - dg):
            columns.append(g * ctx.monomial(e))
            owners.append((i, e))
    sol = poly_linear_solve(columns, target)
    if sol is None:
        return MembershipResult(False, None)
    mults = [ctx.zero() for _ in gens]
    for c, (i, e) in zip(sol, owners):
        if c:
            mults[i] = mults[i] + ctx.monomial(e, c)
    return MembershipResult(True, tuple(mults))


DEFAULT_SYZYGY_BOUND_ENV = "FREEDIV_SYZYGY_BOUND"


def default_syzygy_bound(f: Poly) -> int:
    """deg f + number of variables, overridable via FREEDIV_SYZYGY_BOUND."""
    env = os.environ.get(DEFAULT_SYZYGY_BOUND_ENV)
    if env is not None:
        return int(env)
    return f.total_degree() + f.ctx.nvars


@dataclass(frozen=True)
class SyzygyResult:
    """Solutions h (one tuple of multipliers per gen) of sum h_i gen_i = target."""

    particular: tuple[Poly, ...] | None
    basis: tuple[tuple[Poly, ...], ...]  # syzygies of the gens within the bound


def bounded_syzygy_solve(gens: Sequence[Sequence[Poly] | Poly], target, bound: int) -> SyzygyResult:
    """Multipliers of total degree <= bound with sum_i h_i gen_i = target.

    Generators and target may be single polynomials or vectors of polynomials
    (solved coordinate-wise).  target = 0 yields the syzygy basis alone.
    """
    gvecs: list[list[Poly]] = [[g] if isinstance(g, Poly) else list(g) for g in gens]
    if not gvecs:
        raise PolyError("no generators")
    ctx = gvecs[0][0].ctx
    coords = len(gvecs[0])
    tvec: list[Poly] = [target] if isinstance(target, Poly) else list(target)
    if len(tvec) != coords or any(len(g) != coords for g in gvecs):
        raise PolyError("generator/target vector lengths disagree")
    monos = monomials_up_to_degree(ctx, bound)
    columns: list[list[Poly]] = []
    owners: list[tuple[int, tuple[int, ...]]] = []
    for i, g in enumerate(gvecs):
        for e in monos:
            m = ctx.monomial(e)
            columns.append([m * p for p in g])
            owners.append((i, e))

    index: dict[tuple[int, tuple], int] = {}
    for vec in columns + [tvec]:
        for k, p in enumerate(vec):
            for e in p.terms:
                index.setdefault((k, e), len(index))
    rows = [[Fraction(0)] * len(columns) for _ in range(len(index))]
    for j, vec in enumerate(columns):
        for k, p in enumerate(vec):
            for e, c in p.terms.items():
                rows[index[(k, e)]][j] = c
    rhs = [Fraction(0)] * len(index)
    for k, p in enumerate(tvec):
        for e, c in p.terms.items():
            rhs[index[(k, e)]] = c

    def assemble(coeffs: Sequence[Fraction]) -> tuple[Poly, ...]:
        hs = [ctx.zero() for _ in gvecs]
        for c, (i, e) in zip(coeffs, owners):
            if c:
                hs[i] = hs[i] + ctx.monomial(e, c)
        return tuple(hs)

    particular = solve_linear(rows, rhs)
    kernel = nullspace(rows, len(columns))
    return SyzygyResult(
        assemble(particular) if particular is not None else None,
        tuple(assemble(v) for v in kernel),
    )


# ---------------------------------------------------------------------------
# Koszul homotopy for 1-cycles against a weighted Euler derivation
# ---------------------------------------------------------------------------


def koszul_contract_1form(omega: Sequence[Poly], a: Sequence) -> Poly:
    """The contraction sum_i a_i x_i omega_i (zero iff omega is a cycle)."""
    ctx = omega[0].ctx
    s = ctx.zero()
    for i, (p, ai) in enumerate(zip(omega, a)):
        ai = Fraction(ai)
        if ai and not p.is_zero():
            s = s + ctx.var(ctx.names[i]) * p.scale(ai)
    return s


def koszul_contract_2form(m, a: Sequence) -> list[Poly]:
    """Contraction of an antisymmetric matrix 2-form: component k is sum_j a_j x_j M[j][k]."""
    ctx = m.ctx
    n = m.nrows
    out = []
    for k in range(n):
        s = ctx.zero()
        for j in range(n):
            aj = Fraction(a[j])
            if aj and not m.entry(j, k).is_zero():
                s = s + ctx.var(ctx.names[j]) * m.entry(j, k).scale(aj)
        out.append(s)
    return out


def koszul_homotopy_1cycle(omega: Sequence[Poly], a: Sequence, d=1):
    """A 2-form with boundary omega, for a 1-cycle against the weights a.

    Returns the antisymmetric coefficient matrix (entry [j][i] multiplies the
    basis 2-vector e_j ^ e_i), or None when the construction does not apply:
    some component outside the support of `a` fails to vanish modulo the
    supported variables, or the verified boundary disagrees with omega.
    Raises if omega is not a cycle.
    """
    from .matrices import PolyMatrix  # local import to avoid a cycle

    omega = list(omega)
    if not omega:
        raise PolyError("empty 1-form")
    ctx = omega[0].ctx
    n = ctx.nvars
    if len(omega) != n:
        raise PolyError("1-form length must match the variable count")
    a = [Fraction(x) for x in a]
    if len(a) != n:
        raise PolyError("weight length must match the variable count")
    if not koszul_contract_1form(omega, a).is_zero():
        raise PolyError("not a cycle: the contraction against the weights is nonzero")
    w_idx = [i for i in range(n) if a[i] != 0]
    w_set = set(w_idx)
    # applicability: components outside the weighted variables must vanish
    # modulo the ideal of the weighted variables
    for i in range(n):
        if i in w_set:
            continue
        for e in omega[i].terms:
            if not any(e[j] for j in w_idx):
                return None
    # shift: weighted components carry the form-degree contribution d, while
    # components outside the weighted set carry none (their basis vector is
    # inert for the weighted Euler grading); every affected term has weighted
    # degree >= 1 (cycles force it on weighted components, the applicability
    # check above forces it on the rest), so d = 1 is invertible throughout
    d = Fraction(d)
    try:
        shifted = [
            deg_shift_inverse(p, d if i in w_set else 0, w_idx)
            for i, p in enumerate(omega)
        ]
    except PolyError:
        return None
    zero = ctx.zero()
    mat = [[zero for _ in range(n)] for _ in range(n)]
    for j in w_idx:
        inv = 1 / a[j]
        for i in range(n):
            if i == j:
                continue
            dji = shifted[i].derivative(j)
            if not dji.is_zero():
                mat[j][i] = mat[j][i] + dji.scale(inv)
                mat[i][j] = mat[i][j] - dji.scale(inv)
    result = PolyMatrix(ctx, mat)
    if koszul_contract_2form(result, a) != omega:
        return None
    return result
