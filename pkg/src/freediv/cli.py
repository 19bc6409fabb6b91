"""Command-line front end: build, verify, and refute free-divisor certificates.

Every subcommand prints a single JSON document (keys sorted, stable across
runs) on stdout and reserves stderr for warnings and error messages.  Exit
codes: 0 success, 2 parse errors, 3 violated preconditions, 4 verification
failures, 5 internal cross-check mismatches.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import resources
from typing import Sequence

from .families import (
    BinomialSpec,
    CommonFactorError,
    FamilyVerdict,
    TriangularStep,
    binomial_divisor,
    brieskorn_chain,
    brieskorn_seed,
    compose_factors,
    cone_family,
    euler3_divisor,
    is_free_binomial,
    iterate_tangent,
    multi_jet_extend,
    normal_crossing_matrix,
    sum_compose,
    tangent_extend,
    triangular_extend,
)
from .linalg import euler_annihilators
from .matrices import InternalCheckError, PolyMatrix
from .obstruction import obstruction_report_to_json, smooth_times_nc_verdict
from .poly import Context, Poly, PolyError, parse_poly, poly_to_str
from .saito import (
    FramedDivisor,
    PreconditionError,
    SaitoCertificate,
    VerificationError,
    certificate_to_json,
    column_roles,
    euler_frame,
    frame_divisor,
    free_multiple_via_xifi,
    hilbert_burch_from_framed,
    matrix_to_json,
    verify_saito,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFICATION = 4
EXIT_INTERNAL = 5

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _infer_names(texts: Sequence[str]) -> tuple[str, ...]:
    """Variable names in order of first occurrence across the given sources."""
    seen: list[str] = []
    for text in texts:
        for m in _IDENT.finditer(text):
            name = m.group(0)
            if name not in seen:
                seen.append(name)
    if not seen:
        raise PolyError("no variable names found; pass --vars explicitly")
    return tuple(seen)


def _make_context(vars_opt: str | None, texts: Sequence[str]) -> Context:
    if vars_opt:
        names = tuple(s.strip() for s in vars_opt.split(",") if s.strip())
        if not names:
            raise PolyError("--vars must list at least one name")
        return Context(names)
    names = _infer_names(texts)
    print(
        "warning: variable order inferred from first occurrence: "
        + ",".join(names)
        + " (pass --vars to fix it)",
        file=sys.stderr,
    )
    return Context(names)


def _fractions(text: str, what: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(tok.strip()) for tok in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise PolyError(f"cannot parse {what} {text!r}: {exc}") from None


def _ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok.strip()) for tok in text.split(","))
    except ValueError as exc:
        raise PolyError(f"cannot parse {what} {text!r}: {exc}") from None


def _split_names(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _read_maybe_file(text: str) -> str:
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return fh.read()
    return text


def _matrix_rows(text: str) -> list[list[str]]:
    """Decode a matrix argument: inline JSON or @file, entries as strings."""
    raw = _read_maybe_file(text)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise PolyError(f"matrix is not valid JSON: {exc}") from None
    if isinstance(data, dict):
        data = data.get("entries")
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise PolyError("matrix JSON must be a list of rows (or {\"entries\": [...]})")
    rows = []
    for row in data:
        out = []
        for cell in row:
            if not isinstance(cell, str):
                raise PolyError(f"matrix entries must be strings, got {cell!r}")
            out.append(cell)
        rows.append(out)
    return rows


def _parse_matrix(rows: list[list[str]], ctx: Context) -> PolyMatrix:
    return PolyMatrix(ctx, [[parse_poly(cell, ctx) for cell in row] for row in rows])


def _matrix_texts(text: str | None) -> list[str]:
    """Entry strings of a matrix argument, for variable inference."""
    if text is None:
        return []
    return [cell for row in _matrix_rows(text) for cell in row]


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _framed_payload(fd: FramedDivisor) -> dict:
    payload = certificate_to_json(fd.certificate)
    payload["factors"] = [poly_to_str(g) for g in fd.factors]
    payload["column_roles"] = column_roles(fd)
    payload["weight"] = None if fd.weight is None else [str(w) for w in fd.weight]
    return payload


def _verdict_payload(verdict: FamilyVerdict) -> dict:
    payload: dict = {"status": verdict.status, "reason": verdict.reason}
    payload["certificate"] = (
        None if verdict.certificate is None else certificate_to_json(verdict.certificate)
    )
    payload["witness"] = None if verdict.witness is None else poly_to_str(verdict.witness)
    if verdict.normal_form is not None:
        nf = verdict.normal_form
        payload["normal_form"] = {
            "n": nf.n,
            "a": list(nf.a),
            "b": list(nf.b),
            "alpha": str(nf.alpha),
            "beta": str(nf.beta),
            "u": nf.u,
            "t": nf.t,
        }
    else:
        payload["normal_form"] = None
    return payload


def _hilbert_burch(f: Poly, w: Sequence[Fraction], matrix: PolyMatrix | None):
    if matrix is None:
        matrix = normal_crossing_matrix(f)
        if matrix is None:
            raise PreconditionError(
                "the divisor is not a scaled squarefree monomial; supply --matrix"
            )
    return hilbert_burch_from_framed(euler_frame(f, w, matrix))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_parse(args) -> int:
    ctx = _make_context(args.vars, [args.f])
    p = parse_poly(args.f, ctx)
    canonical = poly_to_str(p)
    if parse_poly(canonical, ctx) != p:
        raise InternalCheckError("canonical form failed to round-trip through the parser")
    degrees = sorted({sum(e) for e in p.terms})
    _emit(
        {
            "f": canonical,
            "vars": list(ctx.names),
            "num_terms": p.num_terms(),
            "degrees": degrees,
            "homogeneous": len(degrees) == 1,
        }
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    ctx = _make_context(args.vars, [args.f] + _matrix_texts(args.matrix))
    f = parse_poly(args.f, ctx)
    matrix = _parse_matrix(_matrix_rows(args.matrix), ctx)
    cert = verify_saito(f, matrix)
    _emit(certificate_to_json(cert))
    return EXIT_OK


def _cmd_analyze(args) -> int:
    ctx = _make_context(args.vars, [args.f])
    p = parse_poly(args.f, ctx)
    if p.is_zero():
        raise PreconditionError("cannot analyze the zero polynomial")
    degrees = sorted({sum(e) for e in p.terms})
    ann = euler_annihilators(p)
    payload: dict = {
        "f": poly_to_str(p),
        "vars": list(ctx.names),
        "num_terms": p.num_terms(),
        "degrees": degrees,
        "homogeneous": len(degrees) == 1,
        "annihilator_basis": [[str(c) for c in vec] for vec in ann.basis],
        "unit_degree_field": (
            None
            if ann.unit_degree_field is None
            else [str(c) for c in ann.unit_degree_field]
        ),
    }
    if p.num_terms() == 2:
        try:
            payload["binomial"] = _verdict_payload(is_free_binomial(p))
        except PreconditionError as exc:
            payload["binomial"] = {"status": "inapplicable", "reason": str(exc)}
    else:
        payload["binomial"] = None
    _emit(payload)
    return EXIT_OK


def _cmd_obstruct(args) -> int:
    form_texts = (
        [s.strip() for s in args.linear_forms.split(";") if s.strip()]
        if args.linear_forms
        else []
    )
    ctx = _make_context(args.vars, [args.f] + form_texts)
    f = parse_poly(args.f, ctx)
    if not form_texts:
        form_texts = list(ctx.names)
    ells = [parse_poly(t, ctx) for t in form_texts]
    report = smooth_times_nc_verdict(f, ells, smooth_asserted=args.assert_smooth)
    _emit(obstruction_report_to_json(report))
    return EXIT_OK


def _cmd_construct_binomial(args) -> int:
    n = args.n
    a = _ints(args.a, "--a") if args.a else (0,) * n
    b = _ints(args.b, "--b") if args.b else (0,) * n
    kwargs = {}
    if args.x_names:
        kwargs["x_names"] = _split_names(args.x_names)
    if args.y_name:
        kwargs["y_name"] = args.y_name
    if args.z_name:
        kwargs["z_name"] = args.z_name
    spec = BinomialSpec(
        n=n,
        a=a,
        b=b,
        alpha=args.alpha,
        beta=args.beta,
        u=args.u,
        t=args.t,
        **kwargs,
    )
    cert = binomial_divisor(spec)
    payload = certificate_to_json(cert)
    payload["family"] = "binomial"
    _emit(payload)
    return EXIT_OK


def _cmd_construct_brieskorn(args) -> int:
    t = _ints(args.t, "--t")
    names = _split_names(args.names) if args.names else None
    fd = brieskorn_chain(*t, names=names)
    payload = _framed_payload(fd)
    payload["family"] = "brieskorn"
    _emit(payload)
    return EXIT_OK


def _cmd_construct_triangular(args) -> int:
    t1, t2 = _ints(args.t, "--t")
    names = _split_names(args.names) if args.names else ("x1", "x2")
    fd = brieskorn_seed(t1, t2, names=names)
    for step_text in args.step or []:
        parts = [s.strip() for s in step_text.split(",")]
        if len(parts) != 5:
            raise PolyError(
                f"--step wants 'a,b,alpha,beta,new_var', got {step_text!r}"
            )
        try:
            step = TriangularStep(
                a=int(parts[0]),
                b=int(parts[1]),
                alpha=Fraction(parts[2]),
                beta=Fraction(parts[3]),
                new_var=parts[4],
            )
        except ValueError as exc:
            raise PolyError(f"cannot parse --step {step_text!r}: {exc}") from None
        fd = triangular_extend(fd, step)
    payload = _framed_payload(fd)
    payload["family"] = "triangular"
    _emit(payload)
    return EXIT_OK


def _cmd_construct_compose(args) -> int:
    factor_texts = [s.strip() for s in args.factors.split(";") if s.strip()]
    ctx = _make_context(args.vars, factor_texts + _matrix_texts(args.matrix))
    factors = [parse_poly(t, ctx) for t in factor_texts]
    frame = None
    if args.matrix:
        frame = frame_divisor(factors, _parse_matrix(_matrix_rows(args.matrix), ctx))
    outer_texts = [s.strip() for s in args.outer_factors.split(";") if s.strip()]
    outer_ctx = _make_context(
        args.outer_vars, outer_texts + _matrix_texts(args.outer_matrix)
    )
    outer = frame_divisor(
        [parse_poly(t, outer_ctx) for t in outer_texts],
        _parse_matrix(_matrix_rows(args.outer_matrix), outer_ctx),
    )
    fd = compose_factors(factors, outer, frame=frame)
    payload = _framed_payload(fd)
    payload["family"] = "compose"
    _emit(payload)
    return EXIT_OK


def _framed_side(f_text, vars_opt, weights_text, matrix_text, label) -> FramedDivisor:
    ctx = _make_context(vars_opt, [f_text] + _matrix_texts(matrix_text))
    f = parse_poly(f_text, ctx)
    w = _fractions(weights_text, f"--{label}weights")
    if matrix_text:
        matrix = _parse_matrix(_matrix_rows(matrix_text), ctx)
    else:
        matrix = normal_crossing_matrix(f)
        if matrix is None:
            raise PreconditionError(
                f"the {label or 'first'} divisor is not a scaled squarefree "
                f"monomial; supply --{label}matrix"
            )
    return frame_divisor([f], matrix, weight=w)


def _cmd_construct_sum_compose(args) -> int:
    fd_f = _framed_side(args.f, args.vars, args.weights, args.matrix, "")
    fd_g = _framed_side(args.g, args.g_vars, args.g_weights, args.g_matrix, "g-")
    fd = sum_compose(fd_f, fd_g)
    payload = _framed_payload(fd)
    payload["family"] = "sum-compose"
    _emit(payload)
    return EXIT_OK


def _cmd_construct_tangent(args) -> int:
    ctx = _make_context(args.vars, [args.f] + _matrix_texts(args.matrix))
    f = parse_poly(args.f, ctx)
    w = _fractions(args.weights, "--weights")
    matrix = _parse_matrix(_matrix_rows(args.matrix), ctx) if args.matrix else None
    hb = _hilbert_burch(f, w, matrix)
    fresh = _split_names(args.fresh) if args.fresh else None
    cert = tangent_extend(f, hb, w, fresh)
    payload = certificate_to_json(cert)
    payload["family"] = "tangent"
    _emit(payload)
    return EXIT_OK


def _cmd_construct_jets(args) -> int:
    ctx = _make_context(args.vars, [args.f] + _matrix_texts(args.matrix))
    f = parse_poly(args.f, ctx)
    w = _fractions(args.weights, "--weights")
    matrix = _parse_matrix(_matrix_rows(args.matrix), ctx) if args.matrix else None
    hb = _hilbert_burch(f, w, matrix)
    fresh = None
    if args.fresh:
        fresh = [list(_split_names(group)) for group in args.fresh.split(";")]
    cert = multi_jet_extend(f, hb, w, args.m, fresh)
    payload = certificate_to_json(cert)
    payload["family"] = "jets"
    payload["levels"] = args.m
    _emit(payload)
    return EXIT_OK


def _cmd_construct_iterate(args) -> int:
    ctx = _make_context(args.vars, [args.f] + _matrix_texts(args.matrix))
    f = parse_poly(args.f, ctx)
    w = _fractions(args.weights, "--weights")
    matrix = _parse_matrix(_matrix_rows(args.matrix), ctx) if args.matrix else None
    certs = iterate_tangent(f, w, args.steps, matrix)
    final = certs[-1]
    payload = certificate_to_json(final)
    payload["family"] = "iterate"
    payload["steps"] = [certificate_to_json(c) for c in certs]
    _emit(payload)
    return EXIT_OK


def _cmd_construct_cone(args) -> int:
    verdict = cone_family(
        args.k,
        _ints(args.gammas, "--gammas"),
        args.a,
        args.b,
        args.c,
        _fractions(args.alphas, "--alphas"),
    )
    payload = _verdict_payload(verdict)
    payload["family"] = "cone"
    _emit(payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# corpus runner
# ---------------------------------------------------------------------------

_STATUS_MAP = {
    "free": "free",
    "not_free": "not_free",
    "unknown": "inconclusive",
    "suspension": "inconclusive",
}

_CONCLUSION_MAP = {
    "FreeCertificate": "free",
    "NotFree": "not_free",
    "Inconclusive": "inconclusive",
}


class _EntryOutcome:
    """What one corpus entry produced: the observed classification plus the
    certified / refuted divisor strings it contributes to the consistency map."""

    def __init__(self, actual: str, certified=(), refuted=(), detail: str = ""):
        self.actual = actual
        self.certified = list(certified)
        self.refuted = list(refuted)
        self.detail = detail


def _corpus_ctx(entry: dict) -> Context:
    return Context(tuple(entry["vars"]))


def _rows_of(data) -> list[list[str]]:
    return data["entries"] if isinstance(data, dict) else data


def _entry_matrix(entry: dict, ctx: Context, key: str = "matrix") -> PolyMatrix:
    data = entry.get(key)
    if data is None:
        raise PreconditionError(f"entry {entry['id']!r} needs a {key!r} field")
    return _parse_matrix(_rows_of(data), ctx)


def _verdict_outcome(verdict: FamilyVerdict, f: Poly) -> _EntryOutcome:
    actual = _STATUS_MAP[verdict.status]
    certified = []
    refuted = []
    if verdict.status == "free" and verdict.certificate is not None:
        certified.append(poly_to_str(verdict.certificate.divisor))
    if verdict.status == "not_free":
        refuted.append(poly_to_str(f))
    return _EntryOutcome(actual, certified, refuted, verdict.reason)


def _check_divisor_matches(constructed: Poly, expected: Poly, what: str) -> None:
    if constructed != expected:
        raise VerificationError(
            "corpus_golden",
            f"{what} does not reproduce the entry's divisor: "
            f"got {poly_to_str(constructed)}",
        )


def _run_entry_checked(entry: dict) -> _EntryOutcome:
    check = entry.get("check", "verify")
    ctx = _corpus_ctx(entry)
    f = parse_poly(entry["f"], ctx)
    fstr = poly_to_str(f)

    if check == "verify":
        cert = verify_saito(f, _entry_matrix(entry, ctx))
        return _EntryOutcome("free", certified=[fstr])

    if check == "binomial":
        return _verdict_outcome(is_free_binomial(f), f)

    if check == "euler3":
        field = tuple(Fraction(c) for c in entry["field"])
        return _verdict_outcome(euler3_divisor(f, field), f)

    if check == "cone":
        p = entry["params"]
        verdict = cone_family(
            p["k"],
            p["gammas"],
            p["a"],
            p["b"],
            p["c"],
            [Fraction(x) for x in p["alphas"]],
        )
        if verdict.certificate is not None:
            _check_divisor_matches(verdict.certificate.divisor, f, "the cone construction")
        return _verdict_outcome(verdict, f)

    if check == "brieskorn":
        fd = brieskorn_chain(*entry["params"]["t"], names=tuple(entry["vars"]))
        _check_divisor_matches(fd.product, f, "the chain construction")
        if entry.get("matrix") is not None and fd.matrix != _entry_matrix(entry, ctx):
            raise VerificationError(
                "corpus_golden", "the chain's matrix differs from the frozen one"
            )
        return _EntryOutcome("free", certified=[fstr])

    if check == "sum_compose":
        sides = []
        for side in (entry["params"]["f"], entry["params"]["g"]):
            sctx = Context(tuple(side["vars"]))
            sf = parse_poly(side["f"], sctx)
            sm = (
                _parse_matrix(_rows_of(side["matrix"]), sctx)
                if side.get("matrix")
                else normal_crossing_matrix(sf)
            )
            if sm is None:
                raise PreconditionError("side divisor needs an explicit matrix")
            sides.append(
                frame_divisor([sf], sm, weight=[Fraction(x) for x in side["weights"]])
            )
        fd = sum_compose(sides[0], sides[1])
        _check_divisor_matches(fd.product.reordered(ctx.names), f, "the sum composition")
        return _EntryOutcome("free", certified=[fstr])

    if check == "substitution_reduced":
        p = entry["params"]
        factors = [parse_poly(t, ctx) for t in p["factors"]]
        octx = Context(tuple(p["outer"]["vars"]))
        overdict = is_free_binomial(parse_poly(p["outer"]["f"], octx))
        if not overdict.is_free:
            raise PreconditionError("the outer divisor of this entry must be free")
        outer = frame_divisor(
            [parse_poly(t, octx) for t in p["outer"]["factors"]],
            overdict.certificate.matrix,
        )
        try:
            compose_factors(factors, outer, frame=None)
        except CommonFactorError as err:
            witness = parse_poly(p["witness"], ctx)
            if err.witness != witness:
                raise VerificationError(
                    "corpus_golden",
                    f"unexpected gcd witness {poly_to_str(err.witness)}",
                )
            _check_divisor_matches(err.substituted, f, "the substituted product")
            return _EntryOutcome(
                "not_free",
                refuted=[fstr],
                detail="non-reduced substitution detected",
            )
        raise VerificationError(
            "corpus_golden", "expected a common-factor rejection, none was raised"
        )

    if check == "obstruct":
        p = entry.get("params", {})
        form_texts = p.get("linear_forms") or list(ctx.names)
        ells = [parse_poly(t, ctx) for t in form_texts]
        report = smooth_times_nc_verdict(
            f, ells, smooth_asserted=p.get("assert_smooth", True)
        )
        actual = _CONCLUSION_MAP[report.conclusion]
        refuted = [poly_to_str(report.candidate)] if actual == "not_free" else []
        return _EntryOutcome(actual, refuted=refuted, detail=report.conclusion)

    if check == "xifi_free":
        cert = free_multiple_via_xifi(f)
        return _EntryOutcome("free", certified=[poly_to_str(cert.divisor)])

    if check == "jets":
        p = entry["params"]
        sctx = Context(tuple(p["vars"]))
        seed = parse_poly(p["f"], sctx)
        w = [Fraction(x) for x in p["weights"]]
        matrix = _parse_matrix(_rows_of(p["matrix"]), sctx) if p.get("matrix") else None
        hb = _hilbert_burch(seed, w, matrix)
        cert = multi_jet_extend(seed, hb, w, p["m"])
        constructed = cert.divisor
        if tuple(constructed.ctx.names) != tuple(ctx.names):
            raise VerificationError(
                "corpus_golden",
                f"jet variables {constructed.ctx.names} differ from the entry's",
            )
        _check_divisor_matches(constructed, f, "the jet construction")
        return _EntryOutcome("free", certified=[fstr])

    if check == "iterate":
        p = entry["params"]
        sctx = Context(tuple(p["vars"]))
        seed = parse_poly(p["f"], sctx)
        w = [Fraction(x) for x in p["weights"]]
        certs = iterate_tangent(seed, w, p["steps"])
        constructed = certs[-1].divisor
        if tuple(constructed.ctx.names) != tuple(ctx.names):
            raise VerificationError(
                "corpus_golden",
                f"iterated variables {constructed.ctx.names} differ from the entry's",
            )
        _check_divisor_matches(constructed, f, "the iterated construction")
        return _EntryOutcome("free", certified=[fstr])

    raise PreconditionError(f"entry {entry['id']!r} has unknown check {check!r}")


def _run_entry(entry: dict) -> dict:
    expect = entry.get("expect")
    try:
        outcome = _run_entry_checked(entry)
    except (PolyError, PreconditionError, VerificationError, InternalCheckError) as exc:
        return {
            "id": entry.get("id", "?"),
            "ok": False,
            "expect": expect,
            "actual": f"error: {exc}",
            "certified": [],
            "refuted": [],
        }
    return {
        "id": entry.get("id", "?"),
        "ok": outcome.actual == expect,
        "expect": expect,
        "actual": outcome.actual if not outcome.detail else
            f"{outcome.actual} ({outcome.detail})",
        "certified": outcome.certified,
        "refuted": outcome.refuted,
    }


def _load_corpus(path: str | None) -> list[dict]:
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    else:
        raw = resources.files("freediv").joinpath("corpus.json").read_text("utf-8")
    try:
        entries = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise PolyError(f"corpus is not valid JSON: {exc}") from None
    if not isinstance(entries, list):
        raise PolyError("corpus must be a JSON array of entries")
    ids = [e.get("id") for e in entries]
    if len(set(ids)) != len(ids):
        raise PreconditionError("corpus entry ids must be unique")
    return entries


def _cmd_corpus_run(args) -> int:
    entries = _load_corpus(args.path)
    jobs = args.jobs or min(8, len(entries)) or 1
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_run_entry, entries))
    results.sort(key=lambda r: r["id"])

    certified: dict[str, list[str]] = {}
    refuted: dict[str, list[str]] = {}
    for r in results:
        status = "PASS" if r["ok"] else "FAIL"
        print(f"{r['id']}: {status} expect={r['expect']} actual={r['actual']}")
        for d in r["certified"]:
            certified.setdefault(d, []).append(r["id"])
        for d in r["refuted"]:
            refuted.setdefault(d, []).append(r["id"])

    conflicts = sorted(set(certified) & set(refuted))
    for d in conflicts:
        print(
            "CONFLICT: divisor certified by "
            f"{certified[d]} and refuted by {refuted[d]}: {d}"
        )
    failed = [r["id"] for r in results if not r["ok"]]
    print(
        f"{len(results) - len(failed)} passed, {len(failed)} failed, "
        f"{len(results)} total; cross-consistency: "
        + ("CONFLICT" if conflicts else "ok")
    )
    if conflicts:
        return EXIT_INTERNAL
    if failed:
        return EXIT_VERIFICATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freediv",
        description="Construct, verify, and refute free-divisor certificates "
        "with exact rational arithmetic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a polynomial and print its canonical form")
    p.add_argument("--f", required=True, help="polynomial expression")
    p.add_argument("--vars", help="comma-separated variable order (else inferred)")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("verify", help="check a Saito matrix against a divisor")
    p.add_argument("--f", required=True, help="the divisor")
    p.add_argument("--matrix", required=True, help="square matrix: JSON or @file")
    p.add_argument("--vars", help="comma-separated variable order (else inferred)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser(
        "analyze",
        help="annihilator fields, homogeneity, and binomial classification",
    )
    p.add_argument("--f", required=True)
    p.add_argument("--vars")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser(
        "obstruct",
        help="linear-algebra obstructions against f * (product of linear forms)",
    )
    p.add_argument("--f", required=True, help="homogeneous candidate")
    p.add_argument(
        "--linear-forms",
        help="semicolon-separated linear forms (default: the coordinates)",
    )
    p.add_argument(
        "--assert-smooth",
        action="store_true",
        help="assert that the candidate's zero set is smooth",
    )
    p.add_argument("--vars")
    p.set_defaults(func=_cmd_obstruct)

    con = sub.add_parser("construct", help="build a divisor from a family")
    consub = con.add_subparsers(dest="family", required=True)

    p = consub.add_parser("binomial", help="monomial-times-binomial divisor")
    p.add_argument("--n", type=int, required=True, help="number of x-variables")
    p.add_argument("--a", help="comma-separated x-exponents of the first term")
    p.add_argument("--b", help="comma-separated x-exponents of the second term")
    p.add_argument("--alpha", type=int, required=True, help="y-exponent of the first term")
    p.add_argument("--beta", type=int, required=True, help="z-exponent of the second term")
    p.add_argument("--u", type=int, required=True, help="y-exponent of the second term")
    p.add_argument("--t", type=int, required=True, help="z-exponent of the first term")
    p.add_argument("--x-names")
    p.add_argument("--y-name")
    p.add_argument("--z-name")
    p.set_defaults(func=_cmd_construct_binomial)

    p = consub.add_parser("brieskorn", help="chain of two-variable binomials")
    p.add_argument("--t", required=True, help="comma-separated exponents t1,t2,...")
    p.add_argument("--names", help="comma-separated variable names")
    p.set_defaults(func=_cmd_construct_brieskorn)

    p = consub.add_parser(
        "triangular", help="two-variable seed extended one variable at a time"
    )
    p.add_argument("--t", required=True, help="seed exponents t1,t2")
    p.add_argument("--names", help="seed variable names (default x1,x2)")
    p.add_argument(
        "--step",
        action="append",
        help="extension step 'a,b,alpha,beta,new_var'; repeatable",
    )
    p.set_defaults(func=_cmd_construct_triangular)

    p = consub.add_parser("compose", help="substitute factors into an outer divisor")
    p.add_argument("--factors", required=True, help="semicolon-separated substituents")
    p.add_argument("--matrix", help="strict frame for the substituents (JSON or @file)")
    p.add_argument("--vars")
    p.add_argument(
        "--outer-factors", required=True, help="semicolon-separated outer factors"
    )
    p.add_argument("--outer-matrix", required=True, help="outer Saito matrix")
    p.add_argument("--outer-vars")
    p.set_defaults(func=_cmd_construct_compose)

    p = consub.add_parser("sum-compose", help="f*g*(f+g) on disjoint variables")
    p.add_argument("--f", required=True)
    p.add_argument("--vars")
    p.add_argument("--weights", required=True, help="weights making f homogeneous")
    p.add_argument("--matrix", help="Saito matrix for f (default: normal crossing)")
    p.add_argument("--g", required=True)
    p.add_argument("--g-vars")
    p.add_argument("--g-weights", required=True)
    p.add_argument("--g-matrix")
    p.set_defaults(func=_cmd_construct_sum_compose)

    p = consub.add_parser("tangent", help="f times its first polar form")
    p.add_argument("--f", required=True)
    p.add_argument("--vars")
    p.add_argument("--weights", required=True)
    p.add_argument("--matrix", help="Saito matrix for f (default: normal crossing)")
    p.add_argument("--fresh", help="comma-separated fresh variable names")
    p.set_defaults(func=_cmd_construct_tangent)

    p = consub.add_parser("jets", help="f times its first m polar forms")
    p.add_argument("--f", required=True)
    p.add_argument("--vars")
    p.add_argument("--weights", required=True)
    p.add_argument("--m", type=int, required=True, help="number of jet levels")
    p.add_argument("--matrix")
    p.add_argument("--fresh", help="semicolon-separated groups of comma-separated names")
    p.set_defaults(func=_cmd_construct_jets)

    p = consub.add_parser("iterate", help="iterated tangent extension")
    p.add_argument("--f", required=True)
    p.add_argument("--vars")
    p.add_argument("--weights", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--matrix")
    p.set_defaults(func=_cmd_construct_iterate)

    p = consub.add_parser("cone", help="products of cones through coordinate axes")
    p.add_argument("--k", type=int, required=True, help="number of cone factors")
    p.add_argument("--gammas", required=True, help="axis exponents g1,g2,g3 in {0,1}")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--alphas", required=True, help="comma-separated distinct scalars")
    p.set_defaults(func=_cmd_construct_cone)

    cor = sub.add_parser("corpus", help="run the bundled example corpus")
    corsub = cor.add_subparsers(dest="corpus_command", required=True)
    p = corsub.add_parser("run", help="run every entry and compare expectations")
    p.add_argument("--path", help="corpus JSON file (default: the bundled corpus)")
    p.add_argument("--jobs", type=int, help="worker threads (default: min(8, entries))")
    p.set_defaults(func=_cmd_corpus_run)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PolyError as exc:
        print(f"error (parse): {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"error (precondition): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except CommonFactorError as exc:
        print(f"error (verification): {exc}", file=sys.stderr)
        print(f"gcd witness: {poly_to_str(exc.witness)}", file=sys.stderr)
        print(
            f"substituted polynomial has {exc.substituted.num_terms()} terms",
            file=sys.stderr,
        )
        return EXIT_VERIFICATION
    except VerificationError as exc:
        print(f"error (verification, {exc.kind}): {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except InternalCheckError as exc:
        print(f"error (internal cross-check): {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
