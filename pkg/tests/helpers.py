"""Shared helpers for the test suite: seeded random polynomial generators.

The seed and case count are overridable via FREEDIV_TEST_SEED / FREEDIV_TEST_CASES
so failures reproduce exactly.
"""
from __future__ import annotations

import os
import random
from fractions import Fraction

from freediv.poly import Context, Poly

SEED = int(os.environ.get("FREEDIV_TEST_SEED", "20260819"))
CASES = int(os.environ.get("FREEDIV_TEST_CASES", "1000"))


def make_rng(salt: int = 0) -> random.Random:
    return random.Random(SEED + salt)


def rand_poly(rng: random.Random, ctx: Context, max_terms: int = 4, max_deg: int = 3,
              coeff_bound: int = 6, allow_zero: bool = True) -> Poly:
    k = rng.randint(0 if allow_zero else 1, max_terms)
    p = ctx.zero()
    for _ in range(k):
        e = [0] * ctx.nvars
        budget = rng.randint(0, max_deg)
        for _ in range(budget):
            e[rng.randrange(ctx.nvars)] += 1
        num = rng.randint(-coeff_bound, coeff_bound)
        den = rng.randint(1, 3)
        p = p + ctx.monomial(e, Fraction(num, den))
    return p


def rand_nonzero(rng: random.Random, ctx: Context, **kw) -> Poly:
    kw.setdefault("allow_zero", False)
    while True:
        p = rand_poly(rng, ctx, **kw)
        if not p.is_zero():
            return p
