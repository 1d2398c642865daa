"""Representations of quadratic integers as sums of units.

Real fields only offer the units +-eta^a with |a| <= exp_bound, so a
failed search certifies nothing beyond that bound; imaginary fields have
finitely many units and their searches are exhaustive.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass

import mpmath

from .errors import DomainError
from .quadratic import QuadraticElt, QuadraticOrder, fundamental_unit, unit_group


@dataclass(frozen=True)
class UnitSumRepr:
    terms: tuple[QuadraticElt, ...]
    target: QuadraticElt
    distinct: bool = False

    def __post_init__(self):
        if not self.terms:
            raise DomainError("empty sums are not representations")
        if not self.verify():
            raise AssertionError("representation does not check out")

    @property
    def k(self) -> int:
        return len(self.terms)

    def verify(self) -> bool:
        total = self.target.order.from_int(0)
        for t in self.terms:
            if not t.is_unit():
                return False
            total = total + t
        if total != self.target:
            return False
        return not self.distinct or len(set(self.terms)) == len(self.terms)

    def __bool__(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {
            "target": self.target.to_json(),
            "terms": [t.to_json() for t in self.terms],
            "text": " + ".join(f"({t})" for t in self.terms),
            "k": self.k,
            "distinct": self.distinct,
        }


@dataclass(frozen=True)
class NoRepresentation:
    """Negative search outcome; falsy.

    ``certified`` is True only when the unit group was searched exhaustively.
    """

    target: QuadraticElt
    k: int | None
    exp_bound: int | None
    certified: bool

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {
            "target": self.target.to_json(),
            "found": False,
            "k": self.k,
            "exp_bound": self.exp_bound,
            "certified": self.certified,
        }


def _search_order(order: QuadraticOrder, exp_bound: int) -> list[QuadraticElt]:
    """Units ordered 1, -1, eta, -eta, eta^-1, -eta^-1, eta^2, ...

    Searches report the first witness in this order, so small exponents win.
    """
    group = unit_group(order, exp_bound)
    if not order.is_real:
        return [w for _, _, w in group]
    return [w for _, _, w in sorted(group, key=lambda t: (abs(t[0]), t[0] < 0, t[1] < 0))]


def _raw_units(order: QuadraticOrder, exp_bound: int) -> list[tuple[int, int]]:
    return [(w.u, w.v) for w in _search_order(order, exp_bound)]


def find_k_units(alpha: QuadraticElt, k: int, exp_bound: int) -> UnitSumRepr | NoRepresentation:
    """Write alpha as a sum of exactly k units (repetition allowed).

    Meet in the middle: sums of k//2 units are hashed, then each multiset of
    the remaining units is looked up.  Units are indexed by increasing
    |exponent| (see ``_search_order``) and the first hit is returned.
    """
    if k <= 0:
        raise DomainError("k must be positive")
    if exp_bound < 0:
        raise DomainError("exp_bound must be non-negative")
    order = alpha.order
    units = _raw_units(order, exp_bound)
    k1 = k // 2
    k2 = k - k1
    left: dict[tuple[int, int], tuple[int, ...]] = {}
    for combo in itertools.combinations_with_replacement(range(len(units)), k1):
        key = (sum(units[i][0] for i in combo), sum(units[i][1] for i in combo))
        left.setdefault(key, combo)
    for combo in itertools.combinations_with_replacement(range(len(units)), k2):
        need = (alpha.u - sum(units[i][0] for i in combo), alpha.v - sum(units[i][1] for i in combo))
        hit = left.get(need)
        if hit is not None:
            idx = sorted(hit + combo)
            return UnitSumRepr(tuple(order.elt(*units[i]) for i in idx), alpha)
    return NoRepresentation(alpha, k, exp_bound if order.is_real else None, not order.is_real)


def _unit_of_one_sums(order: QuadraticOrder, max_terms: int, exp_bound: int) -> dict[int, UnitSumRepr]:
    one = order.from_int(1)
    found = {}
    for t in range(2, max_terms + 1):
        rep = find_k_units(one, t, exp_bound)
        if rep:
            found[t] = rep
    return found


def _max_exponent(terms) -> int:
    order = terms[0].order
    if not order.is_real:
        return 0
    reg = fundamental_unit(order).regulator
    with mpmath.workprec(64):
        return max(int(mpmath.nint(abs(mpmath.log(abs(t.sigma())) / reg))) for t in terms)


def pad_representation(rep: UnitSumRepr, l: int, exp_bound: int | None = None) -> UnitSumRepr:
    """Extend a k-term representation to exactly l > k terms.

    Tried in turn: (1) represent target - (l-k) with k units and append
    l-k ones; (2) replace terms u by u * (a representation of 1 with
    t >= 2 units), adding t-1 terms each time; (3) search l terms directly.
    """
    k = rep.k
    if l <= k:
        raise DomainError(f"need l > k = {k}")
    order = rep.target.order
    bound = exp_bound if exp_bound is not None else _max_exponent(rep.terms) + 2
    extra = l - k
    one = order.from_int(1)

    shifted = find_k_units(rep.target - extra, k, bound)
    if shifted:
        return UnitSumRepr(shifted.terms + (one,) * extra, rep.target)

    ones = _unit_of_one_sums(order, extra + 1, bound)
    # coin change over increments t - 1
    plan: dict[int, list[int]] = {0: []}
    for total in range(1, extra + 1):
        for t, _ in sorted(ones.items()):
            step = t - 1
            if step <= total and total - step in plan:
                plan[total] = plan[total - step] + [t]
                break
    if extra in plan:
        terms = list(rep.terms)
        for i, t in enumerate(plan[extra]):
            u = terms.pop(i % len(terms))
            terms.extend(u * w for w in ones[t].terms)
        return UnitSumRepr(tuple(terms), rep.target)

    direct = find_k_units(rep.target, l, bound)
    if direct:
        return direct
    raise DomainError(f"no {l}-term representation found within exponent bound {bound}")


def _mul_raw(d: int, a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return ((a[0] * b[0] + d * a[1] * b[1]) // 2, (a[0] * b[1] + a[1] * b[0]) // 2)


def _distinct_real(alpha: QuadraticElt, window: int, max_terms: int):
    """Signed digits c_a in {-1, 0, 1} with alpha = sum c_a eta^a, |a| <= window.

    Digits are chosen from the lowest exponent up.  The remainder after
    fixing digits below a is R_a = sum_{j >= 0} c_{a+j} eta^j, whose two
    embeddings are bounded by geometric sums; states outside the bounds are
    dropped, and each state keeps its fewest-digit history.
    """
    order = alpha.order
    d = order.d
    eta = fundamental_unit(order).unit
    eta_inv = eta.inverse()
    inv = (eta_inv.u, eta_inv.v)
    root = math.sqrt(d)
    e1 = float(eta.sigma())
    e2 = abs(1 / e1)  # |conjugate of eta|

    start = alpha * eta**window
    layer: dict[tuple[int, int], tuple[int, tuple | None, int]] = {(start.u, start.v): (0, None, 0)}
    history = []
    span = 2 * window + 1
    for step in range(span):
        remaining = span - step  # digits still to choose, including this one
        nxt: dict = {}
        for state, (count, _, _) in layer.items():
            for c in (0, 1, -1):
                ncount = count + (c != 0)
                if ncount > max_terms:
                    continue
                r = _mul_raw(d, (state[0] - 2 * c, state[1]), inv)
                if remaining == 1:
                    if r != (0, 0):
                        continue
                else:
                    s1 = abs(r[0] + r[1] * root) / 2
                    s2 = abs(r[0] - r[1] * root) / 2
                    lim1 = sum(e1**j for j in range(remaining - 1)) * (1 + 1e-9) + 1e-9
                    lim2 = sum(e2**j for j in range(remaining - 1)) * (1 + 1e-9) + 1e-9
                    if s1 > lim1 or s2 > lim2:
                        continue
                old = nxt.get(r)
                if old is None or ncount < old[0]:
                    nxt[r] = (ncount, state, c)
        history.append(nxt)
        layer = nxt
        if not layer:
            return None
    final = layer.get((0, 0))
    if final is None or final[0] == 0:
        return None
    # walk back through the layers
    digits = []
    state = (0, 0)
    for step in range(span - 1, -1, -1):
        count, prev, c = history[step][state]
        digits.append(c)
        state = prev
    digits.reverse()
    terms = []
    for pos, c in enumerate(digits):
        if c:
            terms.append(eta ** (pos - window) * c)
    return terms


def find_distinct_units(alpha: QuadraticElt, exp_bound: int, max_terms: int) -> UnitSumRepr | NoRepresentation:
    """Write alpha as a sum of pairwise distinct units.

    Real fields: iterative deepening over the exponent window, smallest
    window first.  Imaginary fields: all subsets of the torsion units.
    """
    if max_terms <= 0:
        raise DomainError("max_terms must be positive")
    order = alpha.order
    one = order.from_int(1)
    if alpha.is_zero():
        if max_terms < 2:
            return NoRepresentation(alpha, None, exp_bound, True)
        return UnitSumRepr((one, -one), alpha, distinct=True)
    if not order.is_real:
        units = [w for _, _, w in unit_group(order, 0)]
        for size in range(1, min(max_terms, len(units)) + 1):
            for combo in itertools.combinations(units, size):
                if sum(combo, order.from_int(0)) == alpha:
                    return UnitSumRepr(combo, alpha, distinct=True)
        return NoRepresentation(alpha, None, None, True)
    for window in range(exp_bound + 1):
        terms = _distinct_real(alpha, window, max_terms)
        if terms:
            return UnitSumRepr(tuple(terms), alpha, distinct=True)
    return NoRepresentation(alpha, None, exp_bound, False)


def unit_sum_reach(order: QuadraticOrder, max_terms: int, exp_bound: int, box: int) -> dict[QuadraticElt, int]:
    """Fewest units summing to each element, by breadth-first search.

    The search walks the graph whose edges add one unit, staying inside the
    box |x|, |y| <= ``box`` of integral-basis coordinates.  The counts are
    upper bounds on the true minimum (paths leaving the box are not seen).
    """
    units = [w for _, _, w in unit_group(order, exp_bound)]
    zero = order.from_int(0)
    dist = {zero: 0}
    queue = deque([zero])
    while queue:
        cur = queue.popleft()
        if dist[cur] >= max_terms:
            continue
        for w in units:
            nxt = cur + w
            if nxt in dist or nxt.height() > box:
                continue
            dist[nxt] = dist[cur] + 1
            queue.append(nxt)
    return dist
