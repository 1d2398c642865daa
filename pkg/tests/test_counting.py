import itertools
import math
from fractions import Fraction

import mpmath
import pytest

from unitsum.counting import (
    CountingContext,
    asymptotic_main_term,
    class_exp_bound,
    compare,
    count_rational_k_sums,
    count_unit_sum_classes,
    density,
    rational_k_sums,
)
from unitsum.errors import DomainError
from unitsum.quadratic import canonical_associate, unit_group

CTX2 = CountingContext.for_d(2)


def brute_classes(ctx, n, x, exp_bound, proper_only=False):
    """Ordered tuples of n units with the full exponent range, no normalisation."""
    order = ctx.order
    units = [w for _, _, w in unit_group(order, exp_bound)]
    zero = order.from_int(0)
    found = set()
    for terms in itertools.product(units, repeat=n):
        total = sum(terms, zero)
        if abs(total.norm()) > x:
            continue
        if total.is_zero() and not proper_only:
            continue
        bad = any(
            sum(sub, zero).is_zero()
            for size in range(2, n)
            for sub in itertools.combinations(terms, size)
        )
        if bad:
            continue
        found.add(zero if total.is_zero() else canonical_associate(total))
    return found


def test_context():
    assert CTX2.omega_k == 2 and CTX2.s == 1
    with mpmath.workprec(128):
        assert abs(CTX2.regulator - mpmath.log(1 + mpmath.sqrt(2))) < mpmath.mpf(2) ** -120
    with pytest.raises(DomainError):
        CountingContext.for_d(-5)


def test_small_values():
    res = count_unit_sum_classes(CTX2, 2, 10)
    assert res.count == 3
    order = CTX2.order
    assert set(res.classes) == {canonical_associate(order.from_int(2)),
                                canonical_associate(order.from_basis(0, 1)),
                                canonical_associate(order.from_basis(0, 2))}
    assert count_unit_sum_classes(CTX2, 2, 1).count == 0
    assert count_unit_sum_classes(CTX2, 1, 5).count == 1


@pytest.mark.parametrize("d, n, x", [(2, 2, 50), (2, 3, 30), (5, 2, 40), (3, 3, 20), (5, 3, 15)])
def test_matches_brute_force(d, n, x):
    ctx = CountingContext.for_d(d)
    bound = class_exp_bound(ctx, n, x)
    fast = count_unit_sum_classes(ctx, n, x)
    assert set(fast.classes) == brute_classes(ctx, n, x, bound)


def test_proper_only_adds_zero():
    loose = count_unit_sum_classes(CTX2, 2, 10, proper_only=True)
    strict = count_unit_sum_classes(CTX2, 2, 10)
    assert loose.count == strict.count + 1
    assert CTX2.order.from_int(0) in loose.classes
    # three units summing to zero need not contain a vanishing pair; the
    # oracle decides whether any such triple exists in this range
    three = count_unit_sum_classes(CTX2, 3, 10, proper_only=True)
    assert set(three.classes) == brute_classes(CTX2, 3, 10, class_exp_bound(CTX2, 3, 10), proper_only=True)


def test_rejects():
    with pytest.raises(DomainError):
        count_unit_sum_classes(CTX2, 0, 10)
    with pytest.raises(DomainError):
        count_unit_sum_classes(CTX2, 2, 0)
    with pytest.raises(DomainError):
        asymptotic_main_term(CTX2, 1, 10)
    with pytest.raises(DomainError):
        count_rational_k_sums(CTX2, 0, 10)


def test_monotone_in_x():
    xs = [1, 3, 10, 30, 100, 1000, 10**4]
    counts = [count_unit_sum_classes(CTX2, 2, x).count for x in xs]
    assert counts == sorted(counts)
    counts3 = [count_unit_sum_classes(CTX2, 3, x).count for x in xs[:5]]
    assert counts3 == sorted(counts3)


def test_main_term_examples():
    assert float(asymptotic_main_term(CTX2, 2, 10**6)) == pytest.approx(31.35, abs=0.01)
    assert asymptotic_main_term(CTX2, 2, 1) == 0
    assert float(asymptotic_main_term(CTX2, 3, 10**3)) == pytest.approx(122.9, abs=0.1)
    # general n: c_{n-1,1} = n
    for n in range(2, 6):
        base = 2 * math.log(100) / float(CTX2.regulator)
        assert float(asymptotic_main_term(CTX2, n, 100)) == pytest.approx(n / math.factorial(n) * base ** (n - 1))


def test_convergence_ratio():
    rows = compare(CTX2, 2, [10**6, 10**8])
    assert 0.8 <= rows[0].ratio <= 1.2
    assert 0.85 <= rows[1].ratio <= 1.15
    assert rows[1].to_json()["empirical"] == rows[1].empirical


def test_rational_examples():
    assert rational_k_sums(CTX2, 2, 10) == [1, 2, 6]
    assert count_rational_k_sums(CTX2, 1, 10) == 1
    assert count_rational_k_sums(CTX2, 2, 1) == 1


def test_rational_brute_force():
    order = CTX2.order
    units = [w for _, _, w in unit_group(order, 8)]
    zero = order.from_int(0)
    values = set()
    for k in (1, 2, 3):
        for terms in itertools.combinations_with_replacement(units, k):
            t = sum(terms, zero)
            if t.is_rational() and 0 < t.u // 2 <= 60:
                values.add(t.u // 2)
    assert rational_k_sums(CTX2, 3, 60) == sorted(values)


def test_rational_monotone():
    for x in (10, 100, 1000):
        counts = [count_rational_k_sums(CTX2, k, x) for k in (1, 2, 3)]
        assert counts == sorted(counts)
    for k in (2, 3):
        counts = [count_rational_k_sums(CTX2, k, x) for x in (10, 100, 1000)]
        assert counts == sorted(counts)


def test_density_decreasing():
    dens = [density(CTX2, 3, 10**e) for e in range(2, 6)]
    assert all(a > b for a, b in zip(dens, dens[1:]))
    assert isinstance(dens[0], Fraction)


def test_class_count_json():
    out = count_unit_sum_classes(CTX2, 2, 10).to_json(with_list=True)
    assert out["count"] == 3 and len(out["classes"]) == 3
    assert sorted(c["norm"] for c in out["classes"]) == [2, 4, 8]
