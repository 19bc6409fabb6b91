"""Saito's criterion and framed free divisors.

A square matrix A over R = Q[x_1..x_n] certifies that a reduced f is a free
divisor when (i) f is squarefree, (ii) det A = c * f for a nonzero rational c,
and (iii) every column D of A is logarithmic: D(f) = (grad f) . D lies in (f).
verify_saito checks all three exactly and returns a SaitoCertificate, or
raises VerificationError pinpointing the first violated condition.

A FramedDivisor couples a factored divisor with a verified Saito matrix plus
the exact per-column, per-factor logarithmic multipliers.  euler_frame
normalizes any Saito matrix of a weighted-homogeneous divisor into the strict
shape [E_w/d | annihilators], from which hilbert_burch_from_framed extracts
the (n)x(n-1) block whose signed maximal minors reproduce the gradient.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .linalg import bounded_syzygy_solve, default_syzygy_bound
from .matrices import PolyMatrix, hstack, matrix_to_json
from .poly import (
    Context,
    Poly,
    PolyError,
    divide_exact,
    poly_to_str,
    product_squarefree,
    squarefree_gcd,
)


class PreconditionError(Exception):
    """Inputs violate a documented hypothesis (caller error, not a refutation)."""


class VerificationError(Exception):
    """A certificate check failed.  `kind` names the first violated condition."""

    def __init__(self, kind: str, message: str, column: int | None = None,
                 witness: Poly | None = None):
        self.kind = kind
        self.column = column
        self.witness = witness
        super().__init__(message)


class FramingError(VerificationError):
    """No strict Euler frame could be produced from the given Saito matrix."""

    def __init__(self, message: str):
        super().__init__("framing", message)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SaitoCertificate:
    divisor: Poly
    matrix: PolyMatrix
    det_scalar: Fraction                 # det(matrix) = det_scalar * divisor
    log_quotients: tuple[Poly, ...]      # (grad f) . col_j = log_quotients[j] * f
    squarefree_witness: Poly             # constant gcd(f, partials)


def verify_saito(f: Poly, matrix: PolyMatrix) -> SaitoCertificate:
    """Check Saito's criterion exactly; raise VerificationError on failure."""
    if f.is_zero() or f.is_constant():
        raise PreconditionError("the divisor must be nonzero and nonconstant")
    n = f.ctx.nvars
    if matrix.ctx != f.ctx:
        raise PreconditionError("matrix and divisor contexts differ")
    if matrix.nrows != n or matrix.ncols != n:
        raise PreconditionError(f"matrix must be {n}x{n}, got {matrix.nrows}x{matrix.ncols}")
    witness = squarefree_gcd(f)
    if not witness.is_constant():
        raise VerificationError(
            "not_squarefree",
            f"divisor has the repeated factor witness {poly_to_str(witness)}",
            witness=witness,
        )
    det = matrix.det()
    scalar = divide_exact(det, f)
    if scalar is None or not scalar.is_constant() or scalar.is_zero():
        raise VerificationError(
            "det_mismatch",
            f"determinant {poly_to_str(det)} is not a nonzero rational multiple of the divisor",
        )
    grad = f.gradient()
    quotients = []
    for j in range(n):
        applied = f.ctx.zero()
        for i in range(n):
            g, a = grad[i], matrix.entry(i, j)
            if not g.is_zero() and not a.is_zero():
                applied = applied + g * a
        q = divide_exact(applied, f)
        if q is None:
            raise VerificationError(
                "not_logarithmic",
                f"column {j} applied to the divisor gives {poly_to_str(applied)}, "
                f"not a multiple of the divisor",
                column=j,
            )
        quotients.append(q)
    return SaitoCertificate(f, matrix, scalar.constant_value(), tuple(quotients), witness)


def certificate_to_json(cert: SaitoCertificate) -> dict:
    return {
        "status": "verified",
        "vars": list(cert.divisor.ctx.names),
        "f": poly_to_str(cert.divisor),
        "matrix": matrix_to_json(cert.matrix),
        "det_scalar": str(cert.det_scalar),
        "log_quotients": [poly_to_str(q) for q in cert.log_quotients],
    }


# ---------------------------------------------------------------------------
# framed divisors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FramedDivisor:
    """A factored free divisor with a verified Saito matrix and the exact
    multiplier table: multipliers[j][i] * factors[i] = (column j)(factors[i])."""

    factors: tuple[Poly, ...]
    product: Poly
    matrix: PolyMatrix
    certificate: SaitoCertificate
    multipliers: tuple[tuple[Poly, ...], ...]
    weight: tuple[Fraction, ...] | None = None

    @property
    def ctx(self) -> Context:
        return self.product.ctx


def _apply_column(col: Sequence[Poly], g: Poly) -> Poly:
    out = g.ctx.zero()
    for i, c in enumerate(col):
        if not c.is_zero():
            d = g.derivative(i)
            if not d.is_zero():
                out = out + c * d
    return out


def frame_divisor(factors: Sequence[Poly], matrix: PolyMatrix,
                  weight: Sequence | None = None) -> FramedDivisor:
    """Verify a Saito matrix against a factored divisor, recording all multipliers."""
    factors = tuple(factors)
    if not factors:
        raise PreconditionError("at least one factor required")
    ok, offender = product_squarefree(factors)
    if not ok:
        raise VerificationError(
            "not_squarefree",
            f"factor list is not squarefree/coprime; witness {poly_to_str(offender)}",
            witness=offender,
        )
    product = factors[0]
    for g in factors[1:]:
        product = product * g
    cert = verify_saito(product, matrix)
    table = []
    for j in range(matrix.ncols):
        col = matrix.col(j)
        row = []
        for i, g in enumerate(factors):
            q = divide_exact(_apply_column(col, g), g)
            if q is None:
                raise VerificationError(
                    "factor_not_logarithmic",
                    f"column {j} is not logarithmic for factor {i}",
                    column=j,
                )
            row.append(q)
        table.append(tuple(row))
    w = None
    if weight is not None:
        w = tuple(Fraction(x) for x in weight)
        product.weighted_degree(w)  # raises NotHomogeneousError when it fails
    return FramedDivisor(factors, product, matrix, cert, tuple(table), w)


def column_roles(fd: FramedDivisor) -> list[str]:
    """Classify each column: "euler:<i>" (scalar delta pattern on factor i),
    "annihilator" (kills every factor), or "mixed"."""
    roles = []
    for j in range(fd.matrix.ncols):
        row = fd.multipliers[j]
        if all(q.is_zero() for q in row):
            roles.append("annihilator")
            continue
        hot = [i for i, q in enumerate(row) if not q.is_zero()]
        if len(hot) == 1 and row[hot[0]].is_constant():
            roles.append(f"euler:{hot[0]}")
        else:
            roles.append("mixed")
    return roles


def verify_frame(fd: FramedDivisor) -> dict:
    """Re-check everything a FramedDivisor asserts; report column roles."""
    rebuilt = frame_divisor(fd.factors, fd.matrix, fd.weight)
    assert rebuilt.multipliers == fd.multipliers, "stored multiplier table is stale"
    return {
        "factors": [poly_to_str(g) for g in fd.factors],
        "product": poly_to_str(fd.product),
        "det_scalar": str(fd.certificate.det_scalar),
        "column_roles": column_roles(fd),
        "weight": [str(w) for w in fd.weight] if fd.weight is not None else None,
    }


# ---------------------------------------------------------------------------
# strict Euler frames and Hilbert-Burch extraction
# ---------------------------------------------------------------------------


def euler_frame(f: Poly, weight: Sequence, matrix: PolyMatrix) -> FramedDivisor:
    """Normalize a Saito matrix of a w-homogeneous divisor to [E_w/d | annihilators].

    Candidate columns with scalar logarithmic quotient are swapped out for the
    normalized Euler column E_w/d; the remaining columns are corrected to
    annihilators by subtracting their quotient times E_w/d.  Each candidate is
    accepted only if the determinant stays a unit multiple of f.  When no
    single column works, E_w/d is expanded over the columns by a bounded
    syzygy solve and the pivot is chosen from that expansion.
    """
    w = tuple(Fraction(x) for x in weight)
    d = f.weighted_degree(w)  # raises NotHomogeneousError if inapplicable
    if d == 0:
        raise PreconditionError("weighted degree is zero; no Euler column can be normalized")
    cert = verify_saito(f, matrix)
    ctx = f.ctx
    n = ctx.nvars
    euler_col = [ctx.var(ctx.names[i]).scale(w[i] / d) for i in range(n)]
    quotients = cert.log_quotients

    def attempt(j0: int) -> FramedDivisor | None:
        cols = [euler_col]
        for j in range(n):
            if j == j0:
                continue
            q = quotients[j]
            col = [matrix.entry(i, j) - q * euler_col[i] for i in range(n)]
            cols.append(col)
        candidate = PolyMatrix(ctx, [[cols[c][r] for c in range(n)] for r in range(n)])
        det = candidate.det()
        scalar = divide_exact(det, f)
        if scalar is None or not scalar.is_constant() or scalar.is_zero():
            return None
        return frame_divisor([f], candidate, weight=w)

    for j0 in range(n):
        if quotients[j0].is_constant() and not quotients[j0].is_zero():
            got = attempt(j0)
            if got is not None:
                return got
    # fallback: expand E_w/d over the columns with bounded-degree multipliers
    sol = bounded_syzygy_solve(matrix.cols(), euler_col, default_syzygy_bound(f))
    if sol.particular is not None:
        for j0, h in enumerate(sol.particular):
            if h.is_constant() and not h.is_zero():
                got = attempt(j0)
                if got is not None:
                    return got
    raise FramingError(
        "no column admits a scalar exchange with the Euler field within the bound"
    )


@dataclass(frozen=True)
class HilbertBurch:
    """An n x (n-1) matrix whose signed maximal minors equal scalar * grad(f)."""

    divisor: Poly
    matrix: PolyMatrix
    scalar: Fraction


def hilbert_burch_from_framed(fd: FramedDivisor) -> HilbertBurch:
    """Drop the Euler column of a strict single-factor frame and normalize the
    annihilator block so its signed maximal minors equal the gradient exactly.

    With two or more variables a column is rescaled to make the scalar 1; with
    one variable the matrix has no columns and the scalar is reported as is.
    """
    if len(fd.factors) != 1:
        raise PreconditionError("Hilbert-Burch extraction needs a single-factor frame")
    roles = column_roles(fd)
    if roles[0] != "euler:0" or any(r != "annihilator" for r in roles[1:]):
        raise PreconditionError(
            f"frame is not strict (column roles {roles}); euler_frame produces strict frames"
        )
    f = fd.product
    n = f.ctx.nvars
    b = fd.matrix.submatrix(range(n), range(1, n))
    minors = b.signed_maximal_minors()
    grad = f.gradient()
    lam: Fraction | None = None
    for m, g in zip(minors, grad):
        if g.is_zero():
            continue
        q = divide_exact(m, g)
        if q is None or not q.is_constant():
            raise VerificationError(
                "hilbert_burch_mismatch",
                "signed maximal minors are not a scalar multiple of the gradient",
            )
        lam = q.constant_value()
        break
    if lam is None or lam == 0:
        raise VerificationError("hilbert_burch_mismatch", "degenerate minors")
    for m, g in zip(minors, grad):
        if m != g.scale(lam):
            raise VerificationError(
                "hilbert_burch_mismatch",
                "signed maximal minors are not a uniform scalar multiple of the gradient",
            )
    if lam != 1:
        if b.ncols == 0:
            # one variable: the only minor is the empty determinant 1, and no
            # column exists to absorb the ratio, so report the scalar as is
            return HilbertBurch(f, b, lam)
        b = b.scale_column(0, 1 / lam)
        minors = b.signed_maximal_minors()
    assert list(minors) == list(grad), "normalization failed to reproduce the gradient"
    return HilbertBurch(f, b, Fraction(1))


# ---------------------------------------------------------------------------
# free multiples x_1...x_n * f from syzygies of (x_i f_i)
# ---------------------------------------------------------------------------


def xifi_generators(f: Poly) -> list[Poly]:
    """The scaled Jacobian generators x_i * df/dx_i."""
    ctx = f.ctx
    return [ctx.var(nm) * f.derivative(i) for i, nm in enumerate(ctx.names)]


def saito_from_xifi(f: Poly, syzygies: PolyMatrix) -> SaitoCertificate:
    """Certify g = x_1...x_n * f from an n x (n-1) matrix of syzygies of (x_i f_i).

    Row i of the syzygy matrix is scaled by x_i and the Euler column
    (x_1,...,x_n) is appended: every column is then logarithmic for g, and the
    construction succeeds exactly when the determinant is a unit multiple of g.
    """
    ctx = f.ctx
    n = ctx.nvars
    if syzygies.ctx != ctx or syzygies.nrows != n or syzygies.ncols != n - 1:
        raise PreconditionError(f"need an {n}x{n - 1} syzygy matrix over the divisor context")
    gens = xifi_generators(f)
    for j in range(n - 1):
        s = ctx.zero()
        for i in range(n):
            s = s + syzygies.entry(i, j) * gens[i]
        if not s.is_zero():
            raise PreconditionError(f"column {j} is not a syzygy of (x_i f_i)")
    xs = [ctx.var(nm) for nm in ctx.names]
    scaled = PolyMatrix(ctx, [[xs[i] * syzygies.entry(i, j) for j in range(n - 1)]
                              for i in range(n)])
    full = scaled.with_column(xs)
    g = f
    for x in xs:
        g = g * x
    return verify_saito(g, full)


def free_multiple_via_xifi(f: Poly, bound: int = 1) -> SaitoCertificate:
    """Search bounded-degree syzygies of (x_i f_i) for a Saito matrix of x_1...x_n f.

    All (n-1)-subsets of the syzygy basis are tried in deterministic order;
    the first verified certificate wins.  Raises VerificationError when no
    subset passes (larger bounds may still succeed).
    """
    gens = xifi_generators(f)
    n = f.ctx.nvars
    if n < 2:
        raise PreconditionError("need at least two variables")
    basis = bounded_syzygy_solve(gens, f.ctx.zero(), bound).basis
    if len(basis) < n - 1:
        raise VerificationError(
            "xifi_search",
            f"only {len(basis)} syzygies of degree <= {bound}; {n - 1} needed",
        )
    last_error: VerificationError | None = None
    for subset in combinations(range(len(basis)), n - 1):
        cols = [basis[k] for k in subset]
        mat = PolyMatrix(f.ctx, [[cols[j][i] for j in range(n - 1)] for i in range(n)])
        try:
            return saito_from_xifi(f, mat)
        except VerificationError as e:
            last_error = e
    raise VerificationError(
        "xifi_search",
        f"no {n - 1}-subset of {len(basis)} bounded syzygies yields a Saito matrix"
        + (f" (last failure: {last_error})" if last_error else ""),
    )
