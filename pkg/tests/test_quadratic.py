from math import isqrt

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unitsum.arith import is_squarefree
from unitsum.errors import DomainError, Unverifiable
from unitsum.quadratic import (
    QuadraticOrder,
    associated,
    canonical_associate,
    class_number,
    elt_from_json,
    fundamental_unit,
    torsion_units,
    unit_group,
)

REAL_D = [d for d in range(2, 101) if is_squarefree(d)]


def brute_force_unit(d):
    """Smallest unit > 1 with positive coordinates, by scanning v upwards."""
    order = QuadraticOrder(d)
    v = 1
    while True:
        for target in (-4, 4):
            u2 = d * v * v + target
            if u2 > 0 and isqrt(u2) ** 2 == u2:
                u = isqrt(u2)
                try:
                    return order.elt(u, v)
                except DomainError:
                    pass
        v += 1


def test_small_fundamental_units():
    fu = fundamental_unit(QuadraticOrder(2))
    assert (fu.unit.u, fu.unit.v) == (2, 2)
    assert abs(fu.regulator - mpmath.mpf("0.881373587019543025")) < 1e-15
    assert fu.norm_sign == -1
    assert fundamental_unit(QuadraticOrder(5)).unit == QuadraticOrder(5).elt(1, 1)
    three = fundamental_unit(QuadraticOrder(3))
    assert three.unit == QuadraticOrder(3).from_basis(2, 1) and three.norm_sign == 1


def test_large_coefficient_unit():
    # d = 94 has a long period
    fu = fundamental_unit(QuadraticOrder(94))
    assert fu.unit == QuadraticOrder(94).from_basis(2143295, 221064)


@pytest.mark.parametrize("d", REAL_D)
def test_fundamental_unit_minimal(d):
    fu = fundamental_unit(QuadraticOrder(d))
    eta = fu.unit
    assert abs(eta.norm()) == 1 and eta.real_sign() > 0 and eta.v > 0
    assert eta == brute_force_unit(d)
    # units with |u| <= eta.u, |v| <= eta.v solve u^2 = d v^2 +- 4, so
    # scanning v is exhaustive; none may lie strictly between 1 and eta
    order = eta.order
    top = eta.sigma()
    for v in range(-eta.v, eta.v + 1):
        for t in (4, -4):
            u2 = d * v * v + t
            if u2 < 0 or isqrt(u2) ** 2 != u2:
                continue
            for u in {isqrt(u2), -isqrt(u2)}:
                try:
                    w = order.elt(u, v)
                except DomainError:
                    continue
                assert not (1 < w.sigma() < top)


def test_imaginary_has_no_fundamental_unit():
    with pytest.raises(DomainError, match="unit rank 0"):
        fundamental_unit(QuadraticOrder(-7))


@pytest.mark.parametrize("d", [4, 0, 1, 12, -8])
def test_bad_d_rejected(d):
    with pytest.raises(DomainError):
        QuadraticOrder(d)


def test_huge_d_unverifiable():
    with pytest.raises(Unverifiable):
        QuadraticOrder(1000003 * 1000033 * 1000037)


def test_parity_invariant():
    with pytest.raises(DomainError):
        QuadraticOrder(2).elt(1, 1)
    assert QuadraticOrder(5).elt(1, 1).norm() == -1


@pytest.mark.parametrize("d,size", [(2, 2), (-1, 4), (-3, 6), (-5, 2), (-7, 2)])
def test_torsion(d, size):
    units = torsion_units(QuadraticOrder(d))
    assert len(units) == size
    for w in units:
        assert w.norm() == 1
        assert w ** len(units) == QuadraticOrder(d).from_int(1)


def test_unit_group_lists_powers():
    order = QuadraticOrder(2)
    group = unit_group(order, 3)
    assert len(group) == 14
    eta = fundamental_unit(order).unit
    for a, sign, w in group:
        assert w == eta**a * sign


def test_text_form():
    assert str(QuadraticOrder(2).elt(2, 2)) == "1 + 1*sqrt(2)"
    assert str(QuadraticOrder(5).elt(1, 1)) == "1/2 + 1/2*sqrt(5)"
    assert str(QuadraticOrder(-5).elt(0, -2)) == "-1*sqrt(-5)"


def elements(d):
    order = QuadraticOrder(d)
    return st.tuples(st.integers(-50, 50), st.integers(-50, 50)).map(lambda t: order.from_basis(*t))


@given(elements(13), elements(13))
def test_norm_multiplicative(a, b):
    assert (a * b).norm() == a.norm() * b.norm()


@given(elements(7), elements(7))
def test_exact_quotient(a, b):
    if b.is_zero():
        return
    assert (a * b).exact_quotient(b) == a


def test_canonical_examples():
    order = QuadraticOrder(2)
    r2 = order.elt(0, 2)
    assert canonical_associate(r2) == canonical_associate(order.elt(4, 2))
    assert canonical_associate(r2) == canonical_associate(-r2)
    eta = fundamental_unit(order).unit
    assert canonical_associate(order.from_int(1)) == canonical_associate(eta**5)
    with pytest.raises(DomainError):
        canonical_associate(order.from_int(0))


@pytest.mark.parametrize("d", [2, 3, 5, 13, 46])
@given(data=st.data())
def test_canonical_constant_on_orbits(d, data):
    order = QuadraticOrder(d)
    alpha = data.draw(elements(d))
    if alpha.is_zero():
        return
    k = data.draw(st.integers(-6, 6))
    sign = data.draw(st.sampled_from([1, -1]))
    w = fundamental_unit(order).unit ** k * sign
    c = canonical_associate(alpha)
    assert canonical_associate(alpha * w) == c
    assert canonical_associate(c) == c
    assert associated(alpha, alpha * w)


def test_canonical_separates_classes():
    order = QuadraticOrder(2)
    # 3 and 1 + 2*sqrt(2)... have different norms; sqrt(2) and 2 do too
    assert not associated(order.from_int(2), order.elt(0, 2))
    # same norm, not associated: 3 + sqrt(2) and 3 - sqrt(2) (norm 7 splits)
    assert not associated(order.elt(6, 2), order.elt(6, -2))


def test_class_numbers():
    ones = [d for d in range(-200, 0) if is_squarefree(d) and class_number(d) == 1]
    assert ones == [-163, -67, -43, -19, -11, -7, -3, -2, -1]
    assert class_number(-5) == 2 and class_number(-23) == 3 and class_number(-6) == 2


def test_json_roundtrip():
    a = QuadraticOrder(5).elt(3, -1)
    assert elt_from_json(a.to_json()) == a
