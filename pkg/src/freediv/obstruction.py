"""Linear-algebra obstructions to freeness of coordinate-hyperplane multiples.

For a homogeneous form f of degree k in n variables, the product
g = x_1 * ... * x_n * f is free exactly when the ideal generated by the
scaled Jacobian entries x_i * df/dx_i is perfect of codimension two, and
that forces strong membership properties on small coordinate monomials.
Two exact checks refute those properties for smooth forms of degree k > 2
in n > 2 variables:

* the coordinate monomial x_1 ... x_min(k,n) fails a degree-forced scalar
  membership test against the x_i * df/dx_i, and
* the n support exponents x_i^(k-1) x_j(i) guaranteed by smoothness are
  linearly independent, which pins the failure on the ideal rather than on
  a degenerate support.

Smoothness itself is an input assertion, never computed; when a cheap
support-based necessary condition fails, the assertion is refuted and
reported instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import Poly, poly_to_str, substitute
from .linalg import graded_membership, rref, solve_linear
from .saito import (
    PreconditionError,
    xifi_generators,
)
from .matrices import InternalCheckError

__all__ = [
    "ObstructionCheck",
    "ObstructionReport",
    "Membership",
    "ExponentIndependence",
    "SmoothnessRefutedError",
    "homogeneous_degree",
    "xifi_generators",
    "hat_generators",
    "hat_ideal_agrees",
    "scalar_membership_obstruction",
    "exponent_independence",
    "monomial_graded_membership",
    "smooth_times_nc_verdict",
    "obstruction_report_to_json",
]


CONCLUSIONS = ("NotFree", "FreeCertificate", "Inconclusive")


@dataclass(frozen=True)
class ObstructionCheck:
    """One named check inside an :class:`ObstructionReport`.

    witness carries the exact mathematical payload: a scalar vector, a
    determinant value, a polynomial, or a short explanatory string.
    """

    name: str
    verdict: str
    witness: object = None


@dataclass(frozen=True)
class ObstructionReport:
    candidate: Poly
    checks: tuple[ObstructionCheck, ...]
    conclusion: str

    def __post_init__(self):
        if self.conclusion not in CONCLUSIONS:
            raise InternalCheckError(f"unknown conclusion {self.conclusion!r}")
        if self.conclusion == "NotFree" and not any(
            c.verdict == "violated" for c in self.checks
        ):
            raise InternalCheckError(
                "a NotFree conclusion needs at least one violated obstruction check"
            )


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: tuple[Fraction, ...] | None
    reason: str


@dataclass(frozen=True)
class ExponentIndependence:
    independent: bool
    j_map: tuple[int, ...]
    det_value: Fraction


class SmoothnessRefutedError(PreconditionError):
    """A support condition implied by smoothness fails; the assertion that the
    form is smooth is therefore wrong.  Carries the offending axis index."""

    def __init__(self, axis: int, name: str, degree: int):
        self.axis = axis
        super().__init__(
            f"smoothness assertion refuted at the {name}-axis: no monomial "
            f"{name}^{degree - 1}*x_j appears in the support, so every partial "
            f"derivative vanishes at that axis point"
        )


# ---------------------------------------------------------------------------
# scalar matrix helpers
# ---------------------------------------------------------------------------


def _fraction_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        det *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                factor = m[i][c] * inv
                m[i] = [a - factor * b for a, b in zip(m[i], m[c])]
    return det


def _fraction_inverse(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]] | None:
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if m[i][c] != 0), None)
        if pr is None:
            return None
        m[r], m[pr] = m[pr], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [a * inv for a in m[r]]
        for i in range(n):
            if i != r and m[i][c]:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        r += 1
    return [row[n:] for row in m]


def homogeneous_degree(f: Poly) -> int:
    """Total degree of a homogeneous nonzero polynomial; PreconditionError otherwise."""
    if f.is_zero():
        raise PreconditionError("the zero polynomial has no degree")
    if not f.is_homogeneous():
        raise PreconditionError("the form must be homogeneous in total degree")
    return f.total_degree()


# ---------------------------------------------------------------------------
# the ideal (x_i f_i) and its shifted generators
# ---------------------------------------------------------------------------


def hat_generators(f: Poly) -> list[Poly]:
    """The shifted generators x_i * df/dx_i + f of the same ideal.

    For homogeneous f of degree k >= 1 the Euler relation
    k*f = sum_i x_i * df/dx_i places f in the span of the x_i * df/dx_i,
    so adding f to each generator does not change the ideal (and conversely
    the sum of the shifted generators is (k + n) * f).
    """
    k = homogeneous_degree(f)
    if k < 1:
        raise PreconditionError("the form must have degree at least 1")
    return [g + f for g in xifi_generators(f)]


def hat_ideal_agrees(f: Poly) -> bool:
    """Check that (x_i f_i) and the shifted generators cut the same ideal.

    Both inclusions are established degree by degree at the generators' own
    degree via exact membership solves.
    """
    plain = xifi_generators(f)
    shifted = hat_generators(f)
    for g in shifted:
        if not graded_membership(g, plain).member:
            return False
    for g in plain:
        if not graded_membership(g, shifted).member:
            return False
    return True


# ---------------------------------------------------------------------------
# scalar membership of the coordinate monomial
# ---------------------------------------------------------------------------


def scalar_membership_obstruction(f: Poly) -> Membership:
    """Decide x_1 * ... * x_min(k,n) against the span of the x_i * df/dx_i.

    For k <= n the target has degree k, equal to the generators' degree, so
    ideal membership at that degree reduces to a scalar linear solve; the
    witness is the exact coefficient vector when it exists.  For k > n the
    target x_1...x_n has degree n below every generator: no membership.
    """
    ctx = f.ctx
    n = ctx.nvars
    k = homogeneous_degree(f)
    if k < 1:
        raise PreconditionError("the form must have degree at least 1")
    if k > n:
        return Membership(
            False,
            None,
            f"degree count: the target x_1...x_{n} has degree {n} below the "
            f"generator degree {k}, and the ideal has no elements there",
        )
    gens = xifi_generators(f)
    target = ctx.monomial(tuple(1 if i < k else 0 for i in range(n)))
    monomials = sorted({e for g in gens for e in g.terms} | set(target.terms))
    rows = [[g.terms.get(e, Fraction(0)) for g in gens] for e in monomials]
    rhs = [target.terms.get(e, Fraction(0)) for e in monomials]
    sol = solve_linear(rows, rhs)
    if sol is None:
        return Membership(
            False,
            None,
            f"the scalar system over the degree-{k} monomials is inconsistent: "
            f"{poly_to_str(target)} is outside the span of the x_i * df/dx_i",
        )
    return Membership(
        True,
        tuple(sol),
        f"{poly_to_str(target)} equals the displayed scalar combination of "
        "the x_i * df/dx_i",
    )


# ---------------------------------------------------------------------------
# independence of the smoothness-forced support exponents
# ---------------------------------------------------------------------------


def exponent_independence(f: Poly) -> ExponentIndependence:
    """Independence of the exponents x_i^(k-1) x_j(i) found in the support.

    Smoothness of f forces, for every i, some monomial x_i^(k-1) x_j in the
    support (else every partial vanishes at the x_i-axis point); j(i) is the
    smallest such j.  The exponent vectors (k-1) e_i + e_j(i) are the columns
    of (k-1) I + h for the 0/1 transition matrix h, whose eigenvalues are
    zeros and roots of unity, so the determinant is nonzero whenever
    k - 1 > 1.  The determinant is evaluated exactly and cross-checked
    against a direct rank computation.
    """
    ctx = f.ctx
    n = ctx.nvars
    k = homogeneous_degree(f)
    if k < 2:
        raise PreconditionError("the support argument needs degree at least 2")
    support = set(f.support())
    j_map = []
    for i in range(n):
        found = None
        for j in range(n):
            e = tuple(
                (k - 1) * (idx == i) + (idx == j) for idx in range(n)
            )
            if e in support:
                found = j
                break
        if found is None:
            raise SmoothnessRefutedError(i, ctx.names[i], k)
        j_map.append(found)
    matrix = [
        [Fraction((k - 1) * (r == i) + (r == j_map[i])) for i in range(n)]
        for r in range(n)
    ]
    det = _fraction_det(matrix)
    _, pivots = rref(matrix)
    if (det != 0) != (len(pivots) == n):
        raise InternalCheckError(
            "determinant and rank computations disagree on independence"
        )
    return ExponentIndependence(det != 0, tuple(j_map), det)


# ---------------------------------------------------------------------------
# graded membership of squarefree coordinate monomials
# ---------------------------------------------------------------------------


def monomial_graded_membership(A: Sequence, f: Poly) -> bool:
    """Decide x_A = prod_{i in A} x_i against the ideal (x_i * df/dx_i).

    A lists variable names or indices.  Below the generator degree the ideal
    is empty; otherwise the degree-|A| graded piece is searched exactly.
    """
    ctx = f.ctx
    idxs = set()
    for a in A:
        if isinstance(a, str):
            if a not in ctx.names:
                raise PreconditionError(f"unknown variable {a!r}")
            idxs.add(ctx.names.index(a))
        else:
            i = int(a)
            if not 0 <= i < ctx.nvars:
                raise PreconditionError(f"variable index {i} out of range")
            idxs.add(i)
    if not idxs:
        raise PreconditionError("the variable subset must be nonempty")
    k = homogeneous_degree(f)
    if len(idxs) < k:
        return False
    target = ctx.monomial(tuple(1 if i in idxs else 0 for i in range(ctx.nvars)))
    return graded_membership(target, xifi_generators(f)).member


# ---------------------------------------------------------------------------
# the full verdict for products of hyperplanes with a smooth form
# ---------------------------------------------------------------------------


def _linear_form_coefficients(ell: Poly) -> list[Fraction]:
    ctx = ell.ctx
    if ell.is_zero() or not ell.is_homogeneous() or ell.total_degree() != 1:
        raise PreconditionError(
            f"{poly_to_str(ell)} is not a homogeneous linear form"
        )
    coeffs = [Fraction(0)] * ctx.nvars
    for e, c in ell.terms.items():
        coeffs[e.index(1)] = c
    return coeffs


def smooth_times_nc_verdict(
    f: Poly, ells: Sequence[Poly], smooth_asserted: bool
) -> ObstructionReport:
    """Obstruction report for g = ell_1 * ... * ell_n * f with f a smooth form.

    The linear forms are sent to the coordinates by an exact change of
    variables; the two obstructions then run on the transformed form.  The
    conclusion is NotFree only when smoothness is asserted, the degree and
    dimension hypotheses k > 2 and n > 2 hold, the coordinate monomial
    membership is violated, and the support exponents are independent;
    anything less yields Inconclusive with the partial findings attached.
    The forms must be linearly independent.
    """
    ctx = f.ctx
    n = ctx.nvars
    k = homogeneous_degree(f)
    ells = list(ells)
    if len(ells) != n:
        raise PreconditionError(f"need {n} linear forms, got {len(ells)}")
    for ell in ells:
        if ell.ctx != ctx:
            raise PreconditionError("the linear forms must share the form's context")
    coeff_rows = [_linear_form_coefficients(ell) for ell in ells]
    det_l = _fraction_det(coeff_rows)
    if det_l == 0:
        raise PreconditionError("the linear forms are linearly dependent")
    candidate = f
    for ell in ells:
        candidate = candidate * ell

    checks: list[ObstructionCheck] = [
        ObstructionCheck("linear_independence", "satisfied", det_l),
        ObstructionCheck(
            "smoothness_assertion",
            "asserted" if smooth_asserted else "not_asserted",
        ),
    ]
    if k <= 2 or n <= 2:
        checks.append(
            ObstructionCheck(
                "degree_and_dimension",
                "failed",
                f"need degree > 2 and more than 2 variables, got degree {k} "
                f"in {n} variables",
            )
        )
        checks.append(ObstructionCheck("coordinate_monomial_membership", "skipped"))
        checks.append(ObstructionCheck("exponent_independence", "skipped"))
        return ObstructionReport(candidate, tuple(checks), "Inconclusive")
    checks.append(ObstructionCheck("degree_and_dimension", "satisfied", f"{k} > 2, {n} > 2"))

    inverse = _fraction_inverse(coeff_rows)
    assert inverse is not None
    new_coords = [
        sum(
            (ctx.var(ctx.names[j]).scale(inverse[i][j]) for j in range(n)),
            ctx.zero(),
        )
        for i in range(n)
    ]
    for i, ell in enumerate(ells):
        if substitute(ell, new_coords) != ctx.var(ctx.names[i]):
            raise InternalCheckError(
                "the coordinate change does not straighten the linear forms"
            )
    f_t = substitute(f, new_coords)

    membership = scalar_membership_obstruction(f_t)
    if membership.member:
        checks.append(
            ObstructionCheck(
                "coordinate_monomial_membership", "satisfied", membership.witness
            )
        )
    else:
        checks.append(
            ObstructionCheck(
                "coordinate_monomial_membership", "violated", membership.reason
            )
        )

    refuted = False
    independence = None
    try:
        independence = exponent_independence(f_t)
    except SmoothnessRefutedError as err:
        refuted = True
        checks.append(ObstructionCheck("exponent_independence", "refuted", str(err)))
    if independence is not None:
        checks.append(
            ObstructionCheck(
                "exponent_independence",
                "satisfied" if independence.independent else "failed",
                independence.det_value,
            )
        )

    not_free = (
        smooth_asserted
        and not refuted
        and not membership.member
        and independence is not None
        and independence.independent
    )
    return ObstructionReport(
        candidate, tuple(checks), "NotFree" if not_free else "Inconclusive"
    )


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _witness_json(w):
    if w is None:
        return None
    if isinstance(w, Poly):
        return poly_to_str(w)
    if isinstance(w, Fraction):
        return str(w)
    if isinstance(w, (tuple, list)):
        return [_witness_json(x) for x in w]
    return str(w)


def obstruction_report_to_json(report: ObstructionReport) -> dict:
    return {
        "candidate": poly_to_str(report.candidate),
        "vars": list(report.candidate.ctx.names),
        "conclusion": report.conclusion,
        "checks": [
            {"name": c.name, "verdict": c.verdict, "witness": _witness_json(c.witness)}
            for c in report.checks
        ],
    }
