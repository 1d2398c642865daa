"""Counting association classes of unit sums in real quadratic fields.

With S the two archimedean places, N(alpha) = |Norm(alpha)| and the unit
group is {+-eta^a}.  Every sum of n units is associated to one whose first
term is 1, so enumeration fixes eps_1 = 1 and takes the other n - 1 terms as
a multiset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

import mpmath

from .errors import DomainError, Unverifiable
from .polytope import closed_form
from .quadratic import QuadraticElt, QuadraticOrder, canonical_associate, fundamental_unit, torsion_units, unit_group


@dataclass(frozen=True)
class CountingContext:
    order: QuadraticOrder
    omega_k: int
    regulator: mpmath.mpf
    s: int = 1

    @classmethod
    def for_d(cls, d: int) -> CountingContext:
        order = QuadraticOrder(d)
        if not order.is_real:
            raise DomainError("counting needs a real quadratic field (d > 1)")
        return cls(order, len(torsion_units(order)), fundamental_unit(order).regulator)


@dataclass(frozen=True)
class ClassCount:
    count: int
    classes: tuple[QuadraticElt, ...]
    exp_bound: int
    n: int
    x: float

    def to_json(self, with_list: bool = False) -> dict:
        out = {"n": self.n, "x": self.x, "count": self.count, "exp_bound": self.exp_bound}
        if with_list:
            out["classes"] = [{**c.to_json(), "text": str(c), "norm": abs(c.norm())} for c in self.classes]
        return out


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if value <= 0:
            raise DomainError(f"{name} must be positive")


def class_exp_bound(ctx: CountingContext, n: int, x: float) -> int:
    # N(1 + eta^a) grows like eta^|a|, so exponents up to log(x) / Reg occur
    # already for n = 2; the B + 2 re-check guards the additive slack.
    return math.ceil(math.log(x) / float(ctx.regulator)) + n + 3


def _raw_units(order: QuadraticOrder, bound: int) -> list[tuple[int, int]]:
    return [(w.u, w.v) for _, _, w in unit_group(order, bound)]


def _has_vanishing_subsum(terms: tuple, include_full: bool) -> bool:
    top = len(terms) + 1 if include_full else len(terms)
    for size in range(2, top):
        for sub in combinations(terms, size):
            if sum(t[0] for t in sub) == 0 and sum(t[1] for t in sub) == 0:
                return True
    return False


def _classes(ctx: CountingContext, n: int, x: float, bound: int, proper_only: bool) -> set[QuadraticElt]:
    order = ctx.order
    d = order.d
    units = _raw_units(order, bound)
    one = (2, 0)
    found: set[QuadraticElt] = set()
    for rest in combinations_with_replacement(units, n - 1):
        terms = (one,) + rest
        u = sum(t[0] for t in terms)
        v = sum(t[1] for t in terms)
        if u == 0 and v == 0 and not proper_only:
            continue
        if abs(u * u - d * v * v) > 4 * x:
            continue
        if _has_vanishing_subsum(terms, include_full=False):
            continue
        if u == 0 and v == 0:
            found.add(order.from_int(0))
        else:
            found.add(canonical_associate(order.elt(u, v)))
    return found


def count_unit_sum_classes(ctx: CountingContext, n: int, x: float, proper_only: bool = False) -> ClassCount:
    """u(n, x): classes [alpha] with alpha = eps_1 + ... + eps_n, N(alpha) <= x.

    Representations with a vanishing proper subsum are excluded and alpha = 0
    is dropped.  With ``proper_only`` the full sum is not treated as a
    subsum, so alpha = 0 counts as one class when it arises without a
    vanishing proper subsum.  The exponent bound is re-checked at B + 2 and
    an unstable count raises.
    """
    _check_positive(n=n, x=x)
    if x < 1:
        raise DomainError("x must be at least 1")
    bound = class_exp_bound(ctx, n, x)
    classes = _classes(ctx, n, x, bound, proper_only)
    wider = _classes(ctx, n, x, bound + 2, proper_only)
    if classes != wider:
        raise Unverifiable(
            f"class count not stable under exponent bound {bound} -> {bound + 2}",
            {"count": len(classes), "wider": len(wider)},
        )
    ordered = tuple(sorted(classes, key=lambda c: (abs(c.norm()), c.u, c.v)))
    return ClassCount(len(ordered), ordered, bound, n, x)


def asymptotic_main_term(ctx: CountingContext, n: int, x: float) -> mpmath.mpf:
    """(c_{n-1,s} / n!) * (omega_K (log x)^s / Reg)^{n-1} with s = 1."""
    if n < 2:
        raise DomainError("main term needs n >= 2")
    if x < 1:
        raise DomainError("x must be at least 1")
    c = closed_form(n - 1, ctx.s)
    base = ctx.omega_k * mpmath.log(mpmath.mpf(x)) ** ctx.s / ctx.regulator
    return mpmath.mpf(c.numerator) / c.denominator / math.factorial(n) * base ** (n - 1)


@dataclass(frozen=True)
class CompareRow:
    x: float
    empirical: int
    main_term: float

    @property
    def ratio(self) -> float:
        return self.empirical / self.main_term if self.main_term else math.nan

    def to_json(self) -> dict:
        return {"x": self.x, "empirical": self.empirical, "main_term": self.main_term, "ratio": self.ratio}


def compare(ctx: CountingContext, n: int, xs) -> list[CompareRow]:
    return [
        CompareRow(x, count_unit_sum_classes(ctx, n, x).count, float(asymptotic_main_term(ctx, n, x)))
        for x in xs
    ]


def rational_exp_bound(ctx: CountingContext, k: int, x: float) -> int:
    return math.ceil(math.log(x) / float(ctx.regulator)) + k + 3


def _rational_values(ctx: CountingContext, k: int, x: float, bound: int) -> set[int]:
    units = _raw_units(ctx.order, bound)
    values = set()
    for size in range(1, k + 1):
        for terms in combinations_with_replacement(units, size):
            if sum(t[1] for t in terms) != 0:
                continue
            val = sum(t[0] for t in terms) // 2
            if 0 < val <= x:
                values.add(val)
    return values


def rational_k_sums(ctx: CountingContext, k: int, x: float) -> list[int]:
    """Positive integers <= x that are sums of at most k units, sorted.

    Stability under exponent bound B -> B + 2 is checked as for the class
    count.
    """
    _check_positive(k=k, x=x)
    if x < 1:
        raise DomainError("x must be at least 1")
    bound = rational_exp_bound(ctx, k, x)
    values = _rational_values(ctx, k, x, bound)
    if values != _rational_values(ctx, k, x, bound + 2):
        raise Unverifiable(f"rational sums not stable under exponent bound {bound} -> {bound + 2}")
    return sorted(values)


def count_rational_k_sums(ctx: CountingContext, k: int, x: float) -> int:
    """N_k(x), the number of positive integers n <= x that are sums of at most k units."""
    return len(rational_k_sums(ctx, k, x))


def density(ctx: CountingContext, k: int, x: float) -> Fraction:
    return Fraction(count_rational_k_sums(ctx, k, x)) / Fraction(x)
