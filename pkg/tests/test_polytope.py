import itertools
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.spatial import ConvexHull, HalfspaceIntersection

from unitsum.errors import DomainError
from unitsum.polytope import (
    PRINTED_TABLE,
    SIGN_CASES,
    PolytopeSpec,
    _g_batch,
    assembled_cn2,
    c_n2_identity_report,
    closed_form,
    expected_hit_rate,
    g_value,
    i112,
    i112_parts,
    i123,
    i123_parts,
    mc_volume,
    polytope_table,
    region_exact,
    region_volume_mc,
    suggested_samples,
)


def qhull_volume(n, s):
    """Exact-up-to-rounding volume of {g <= 1} from its half-space description.

    g is a sum of maxima of linear forms, hence the maximum over all
    (n + 1)^(s + 1) selections of one term per max; each selection gives a
    half-space a . x <= 1.
    """
    rows = []
    for choice in itertools.product(range(n + 1), repeat=s + 1):
        a = np.zeros((n, s))
        for col, j in enumerate(choice[:s]):
            if j:
                a[j - 1, col] += 1
        if choice[s]:
            a[choice[s] - 1, :] -= 1
        rows.append(np.append(a.ravel(), -1.0))
    hs = HalfspaceIntersection(np.array(rows), np.zeros(n * s))
    return ConvexHull(hs.intersections).volume


def test_g_examples():
    assert g_value([[0.5]]) == 0.5
    assert g_value([[-0.5]]) == 0.5
    assert g_value(np.zeros((3, 2))) == 0
    assert g_value([[0.2, 0.3], [-0.5, 0.1]]) == pytest.approx(0.9)


def test_g_rejects_vectors():
    with pytest.raises(DomainError):
        g_value([1.0, 2.0])


def test_g_is_max_of_linear_forms():
    rng = np.random.default_rng(3)
    for n, s in [(2, 2), (3, 2), (2, 3)]:
        for _ in range(50):
            x = rng.normal(size=(n, s))
            best = -math.inf
            for choice in itertools.product(range(n + 1), repeat=s + 1):
                val = sum(x[j - 1, col] for col, j in enumerate(choice[:s]) if j)
                if choice[s]:
                    val -= x[choice[s] - 1].sum()
                best = max(best, val)
            assert g_value(x) == pytest.approx(best)


matrices = arrays(np.float64, (3, 2), elements=st.floats(-5, 5, allow_nan=False, allow_infinity=False))


@given(matrices, st.floats(0.01, 100))
def test_g_homogeneous(x, lam):
    assert g_value(lam * x) == pytest.approx(lam * g_value(x), rel=1e-9, abs=1e-9)


@given(matrices, matrices)
def test_g_convex(x, y):
    assert g_value((x + y) / 2) <= (g_value(x) + g_value(y)) / 2 + 1e-9


@given(matrices)
def test_g_nonnegative(x):
    assert g_value(x) >= 0


def test_accepted_points_in_box():
    rng = np.random.default_rng(11)
    for n, s in [(2, 2), (2, 3), (1, 4)]:
        pts = rng.uniform(-s - 1, 2, size=(10**6, n, s))
        inside = pts[_g_batch(pts) < 1]
        assert inside.size and inside.min() >= -s and inside.max() <= 1


@pytest.mark.parametrize(
    "n, s, value",
    [(7, 1, Fraction(8)), (1, 5, Fraction(21, 10)), (6, 2, Fraction(91, 64)), (3, 3, Fraction(55, 54)),
     (2, 4, Fraction(55, 64))],
)
def test_closed_form_examples(n, s, value):
    assert closed_form(n, s) == value


def test_closed_form_absent():
    assert closed_form(4, 3) is None
    with pytest.raises(DomainError):
        closed_form(0, 2)


def test_closed_forms_match_reference_table():
    for (n, s), printed in PRINTED_TABLE.items():
        if (n, s) == (2, 4):
            continue
        assert closed_form(n, s) == printed
    for n in (2, 3, 4):
        assert closed_form(n, 2) == PRINTED_TABLE[(n, 2)]
    for s in range(1, 6):
        assert closed_form(1, s) == PRINTED_TABLE[(1, s)]


def test_reference_2_4_is_off_by_ten():
    assert PRINTED_TABLE[(2, 4)] == 10 * closed_form(2, 4)


@pytest.mark.parametrize("n, s", [(n, s) for (n, s) in PRINTED_TABLE if n * s >= 2 and (n, s) != (3, 3)])
def test_qhull_oracle(n, s):
    assert qhull_volume(n, s) == pytest.approx(float(closed_form(n, s)), rel=1e-9)


@pytest.mark.slow
def test_qhull_oracle_3_3():
    assert qhull_volume(3, 3) == pytest.approx(float(closed_form(3, 3)), rel=1e-9)


def test_qhull_oracle_off_table():
    assert (1, 6) not in PRINTED_TABLE
    assert qhull_volume(1, 6) == pytest.approx(float(closed_form(1, 6)), rel=1e-9)


def test_identity_exact():
    for n in range(2, 13):
        assert assembled_cn2(n) == closed_form(n, 2)
        assert sum(i123_parts(max(n, 3)).values()) == i123(max(n, 3))
        assert sum(i112_parts(n).values()) == i112(n)


def test_identity_examples():
    assert 3 * 2 * 1 * i112(2) == Fraction(15, 4)
    assert i112(2) == Fraction(5, 8)
    assert 4 * 3 * 2 * i123(4) + 36 * i112(4) == Fraction(45, 16)


def test_region_exact():
    assert region_exact(3, 1, 2, 3, 7) == Fraction(1, 12)
    assert region_exact(2, 1, 1, 2) == Fraction(5, 8)
    assert region_exact(2, 1, 1, 1) == 0
    with pytest.raises(DomainError):
        region_exact(3, 1, 2, 1)
    with pytest.raises(DomainError):
        region_exact(2, 1, 2, 3)
    with pytest.raises(DomainError):
        region_exact(3, 1, 2, 3, 8)


def test_mc_box_small():
    est = mc_volume(PolytopeSpec(1, 1), 10**6, seed=7)
    assert est.agrees(2) and est.seed == 7 and est.method == "box"
    est = mc_volume(PolytopeSpec(2, 2), 10**6, seed=1)
    assert est.agrees(Fraction(15, 4))


def test_mc_std_error_formula():
    spec = PolytopeSpec(2, 2)
    est = mc_volume(spec, 10**5, seed=2)
    p = est.hits / est.samples
    assert est.std_error == pytest.approx(math.sqrt(p * (1 - p) / est.samples) * spec.box_volume)


@pytest.mark.parametrize("n, s", [(1, 3), (3, 2), (2, 3)])
def test_mc_radial_agrees(n, s):
    exact = closed_form(n, s)
    est = mc_volume(PolytopeSpec(n, s), 4 * 10**5, seed=5, method="radial")
    assert est.agrees(exact)


def test_mc_reproducible_and_thread_independent():
    spec = PolytopeSpec(2, 2)
    a = mc_volume(spec, 600_000, seed=42)
    b = mc_volume(spec, 600_000, seed=42, threads=3)
    assert a == b
    r1 = mc_volume(spec, 600_000, seed=42, method="radial")
    r2 = mc_volume(spec, 600_000, seed=42, threads=2, method="radial")
    assert r1 == r2
    assert mc_volume(spec, 600_000, seed=43) != a


def test_mc_rejects():
    with pytest.raises(DomainError):
        mc_volume(PolytopeSpec(1, 1), 0, seed=0)
    with pytest.raises(DomainError):
        mc_volume(PolytopeSpec(1, 1), 10, seed=0, method="grid")
    with pytest.raises(DomainError):
        PolytopeSpec(0, 1)


def test_hit_rate_helpers():
    rate = expected_hit_rate(PolytopeSpec(2, 4))
    assert rate == pytest.approx(55 / 64 / 5**8)
    assert suggested_samples(rate) > 10**8
    with pytest.raises(DomainError):
        suggested_samples(0)


def test_region_examples_mc():
    r7 = region_volume_mc(3, 1, 2, 3, 7, samples=4 * 10**5, seed=3)
    assert r7.agrees(Fraction(1, 12)) and r7.region_tag == (1, 2, 3, 7)
    total = region_volume_mc(2, 1, 1, 2, None, samples=4 * 10**5, seed=4)
    assert total.agrees(Fraction(5, 8))
    zero = region_volume_mc(2, 1, 1, 1, None, samples=10**5, seed=5)
    assert zero.mean == 0


def test_region_unsymmetrized_agrees():
    est = region_volume_mc(3, 2, 3, 1, 4, samples=10**6, seed=8, symmetrize=False)
    assert est.agrees(i123_parts(3)[4])


@pytest.mark.parametrize("case", sorted(SIGN_CASES))
def test_region_cases_n3(case):
    est = region_volume_mc(3, 1, 2, 3, case, samples=4 * 10**5, seed=20 + case)
    assert est.agrees(i123_parts(3)[case])


def test_identity_report_n3():
    rep = c_n2_identity_report(3, samples=2 * 10**5, seed=9)
    assert rep.exact_agrees and rep.mc_agrees
    assert all(rep.group_agreement().values())
    out = rep.to_json()
    assert out["closed_form"] == "7/2" and set(out["parts_123"]) == {str(r) for r in range(1, 8)}


def test_identity_report_rejects():
    with pytest.raises(DomainError):
        c_n2_identity_report(1)


def test_table_small_run():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = polytope_table(samples=10**5, big_samples=10**5, seed=3)
    assert len(rows) == len(PRINTED_TABLE) == 15
    by_key = {(r.n, r.s): r for r in rows}
    assert by_key[(2, 2)].source == "closed" and by_key[(2, 2)].matches_printed
    assert by_key[(2, 3)].source == "mc"
    assert by_key[(2, 4)].exact == Fraction(55, 64)
    assert rows[0].to_json()["printed"] == "2"


def test_table_warns_on_low_hit_rate():
    with pytest.warns(UserWarning, match="hit rate"):
        polytope_table(samples=10**4, big_samples=10**6, seed=0, big_entries=())
