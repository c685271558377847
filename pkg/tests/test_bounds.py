import math
from fractions import Fraction

import mpmath
import pytest

from addbound import bounds as bd
from addbound.bounds import (
    BoundError,
    Global,
    IllFormedTypeVector,
    Local,
    TowerOverflow,
    abstract_rational_bound,
    amd_global_A,
    amd_local_B,
    borodin_cook_tower,
    lenstra_global,
    lenstra_local,
    risler_real,
    roots_of_unity_bound,
    tau_trivial_bound,
    thm1_bound,
    thm1_sharpened,
    thm2_bound,
    thm3_global,
    thm3_local,
)
from addbound.numeric import up_eval

mpmath.mp.dps = 50
c = mpmath.e / (mpmath.e - 1)


def mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


# independent high-precision transcriptions of the closed forms


def ref_thm1(p, d, sigma):
    q1 = p**d - 1
    lg = lambda x: mpmath.log(x, p)
    a = 1 + d * lg(2 * d / mpmath.log(p))
    b = 1 + d * lg(d / mpmath.log(p))
    parts = [mpmath.mpf(1), mpmath.mpf(d * p * q1) / (p - 1), 4 * c * d * p * q1**2 / mpmath.mpf(p - 1) * a]
    total = sum(parts[: min(sigma, 2) + 1])
    for j in range(3, sigma + 1):
        total += mpmath.mpf(1) / 3 * j * (6 * c) ** j * q1**j * b * a ** (j - 1) * math.factorial(j)
    return total


def ref_thm2(d, delta, sigma):
    dd = d * delta
    l1 = mpmath.log(dd / mpmath.log(2), 2)
    l2 = mpmath.log(2 * dd / mpmath.log(2), 2)
    parts = [mpmath.mpf(1), c * (dd + 10) * 2 ** (dd + 1) * l1, c**2 * (dd + 10) ** 2 * 4 ** (dd + 2) * l1 * l2]
    total = sum(parts[: min(sigma, 2) + 1])
    d2 = dd * dd
    A = 1 + 2 * d2 * mpmath.log(d2 / mpmath.log(2), 2)
    B = 1 + 2 * d2 * mpmath.log(2 * d2 / mpmath.log(2), 2)
    for j in range(3, sigma + 1):
        total += mpmath.mpf(2) / 3 * j * (6 * c) ** j * 2 ** (dd * j) * A * B ** (j - 1) * math.factorial(j)
    return total


def ref_amd_local(p, e, q, m, N):
    if 1 in m:
        return mpmath.mpf(0)
    out = c ** len(m) * mpmath.mpf(q) ** len(m)
    for mi, ni in zip(m, N):
        out *= mi * (mi - 1) * ni * (1 + e * mpmath.log(e * (mi - 1) / mpmath.log(p), p))
    return out


def ref_amd_global(d, delta, m, N):
    if 1 in m:
        return mpmath.mpf(0)
    dd = d * d * delta * delta
    out = 2 * c ** len(m) * mpmath.mpf(2) ** (d * delta * len(m))
    for mi, ni in zip(m, N):
        out *= mi * (mi - 1) * ni * (1 + 2 * dd * mpmath.log(dd * (mi - 1) / mpmath.log(2), 2))
    return out


def ref_lenstra_local(p, e, q, m):
    if m == 1:
        return mpmath.mpf(0)
    return c * (q - 1) * (m - 1) ** 2 * (1 + e * mpmath.log(e * (m - 1) / mpmath.log(p), p))


def ref_lenstra_global(d, delta, m):
    if m == 1:
        return mpmath.mpf(0)
    dd = d * delta
    return c * (m - 1) ** 2 * (dd + 10) * 2 ** (dd + 1) * mpmath.log(dd * (m - 1) / mpmath.log(2), 2)


def assert_upper(report, ref):
    got = mp(report.real_value.value)
    assert got >= ref
    assert got - ref <= abs(ref) * mpmath.mpf(2) ** -64 + mpmath.mpf(10) ** -40
    assert report.integer_value == int(mpmath.floor(got))
    if ref < mpmath.mpf(2) ** 60:
        assert report.integer_value == int(mpmath.floor(ref))


@pytest.mark.parametrize("p, d", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (7, 3)])
@pytest.mark.parametrize("sigma", range(0, 6))
def test_thm1_against_mpmath(p, d, sigma):
    assert_upper(thm1_bound(p, d, sigma), ref_thm1(p, d, sigma))


def test_thm1_known_floors():
    assert [thm1_bound(2, 1, s).integer_value for s in range(5)] == [1, 3, 35, 50195, 6471489]


@pytest.mark.parametrize("d, delta", [(1, 1), (1, 2), (2, 1), (3, 2)])
@pytest.mark.parametrize("sigma", range(0, 6))
def test_thm2_against_mpmath(d, delta, sigma):
    assert_upper(thm2_bound(d, delta, sigma), ref_thm2(d, delta, sigma))


def test_thm2_small_values():
    assert thm2_bound(1, 1, 0).integer_value == 1
    assert thm2_bound(1, 1, 1).integer_value == 37
    assert thm2_bound(1, 1, 2).real_value > thm2_bound(1, 1, 1).real_value


@pytest.mark.parametrize(
    "spec, m, N",
    [
        (Local(2), [2], [1]),
        (Local(2), [3], [1]),
        (Local(3), [2, 3], [2, 2]),
        (Local(5, 2, 1), [4], [3]),
        (Local(2, 1, 3), [3, 3, 2], [1, 2, 3]),
    ],
)
def test_amd_local_against_mpmath(spec, m, N):
    assert_upper(amd_local_B(spec, m, N), ref_amd_local(spec.p, spec.e, spec.q, m, N))


def test_amd_local_values():
    assert amd_local_B(Local(2), [1], [1]).integer_value == 0
    assert abs(float(amd_local_B(Local(2), [2], [1]).real_value) - 9.674) < 1e-3
    # c * 2 * 6 * (1 + log2(2/log 2)); see the decisions ledger on the printed 29.03
    b3 = amd_local_B(Local(2), [3], [1])
    assert abs(float(b3.real_value) - 48.005) < 1e-3
    assert b3.integer_value >= 6


@pytest.mark.parametrize("spec, m, N", [(Global(1, 1), [2], [1]), (Global(1, 1), [2, 2], [1, 1]), (Global(2, 3), [3, 4], [1, 2])])
def test_amd_global_against_mpmath(spec, m, N):
    assert_upper(amd_global_A(spec, m, N), ref_amd_global(spec.d, spec.delta, m, N))


def test_amd_global_values():
    assert amd_global_A(Global(1, 1), [1], [1]).integer_value == 0
    assert abs(float(amd_global_A(Global(1, 1), [2], [1]).real_value) - 26.04) < 0.01
    one = amd_global_A(Global(1, 1), [2], [1]).real_value.value
    two = amd_global_A(Global(1, 1), [2, 2], [1, 1]).real_value.value
    # two factors of the bracket, one leading factor of 2
    assert abs(float(two) - float(one) ** 2 / 2) < 1e-9 * float(two)


def test_type_vector_errors():
    with pytest.raises(BoundError):
        amd_local_B(Local(2), [2, 2], [1])
    with pytest.raises(BoundError):
        amd_local_B(Local(2), [], [])
    with pytest.raises(BoundError):
        amd_global_A(Local(2), [2], [1])


@pytest.mark.parametrize("spec", [Local(2), Local(3), Local(2, 2, 1), Local(3, 1, 2)])
@pytest.mark.parametrize("m", [1, 2, 3, 7, 20])
def test_lenstra_local_against_mpmath(spec, m):
    assert_upper(lenstra_local(spec, m), ref_lenstra_local(spec.p, spec.e, spec.q, m))


@pytest.mark.parametrize("spec", [Global(1, 1), Global(2, 1), Global(2, 3)])
@pytest.mark.parametrize("m", [1, 2, 3, 9])
def test_lenstra_global_against_mpmath(spec, m):
    assert_upper(lenstra_global(spec, m), ref_lenstra_global(spec.d, spec.delta, m))


def test_lenstra_values():
    assert lenstra_local(Local(2), 1).integer_value == 0
    assert lenstra_local(Local(2), 3).integer_value == 16
    assert abs(float(lenstra_global(Global(1, 1), 2).real_value) - 36.8) < 0.05


def test_roots_of_unity():
    assert [roots_of_unity_bound(Local(p)).integer_value for p in (2, 3, 5)] == [2, 3, 5]
    assert roots_of_unity_bound(Local(2, 2, 1)).exact == 4


def test_sharpened():
    assert thm1_sharpened(Local(2), 0).integer_value == 1
    assert thm1_sharpened(Local(2), 1).integer_value == 3
    assert thm1_sharpened(Local(2), 2, b3=6).integer_value == 15
    assert thm1_sharpened(Local(2), 2, b3="exact").integer_value == 15
    # default uses the sparse-system estimate for B(L,3,1)
    ref = 1 + 2 + 2 * ref_amd_local(2, 1, 2, [3], [1])
    assert_upper(thm1_sharpened(Local(2), 2), ref)


@pytest.mark.parametrize("sigma", range(0, 6))
def test_sharpened_never_exceeds_main_bound_on_q2(sigma):
    assert thm1_sharpened(Local(2), sigma, b3="exact").real_value <= thm1_bound(2, 1, sigma).real_value


def test_sharpened_tail_matches_main_bound():
    for sigma in (3, 4, 5):
        diff = thm1_bound(2, 1, sigma).real_value.value - thm1_sharpened(Local(2), sigma, b3=6).real_value.value
        head = ref_thm1(2, 1, 2) - 15
        assert abs(mp(diff) - head) < mpmath.mpf(10) ** -20


@pytest.mark.parametrize("sigma", range(0, 6))
@pytest.mark.parametrize("spec", [Local(2), Local(3), Local(5), Local(2, 2, 1)])
def test_thm3_univariate_path_equals_thm1(sigma, spec):
    rep = thm3_local(1, sigma, spec, variant="proof", terms="sharp")
    ref = ref_thm1(spec.p, spec.d, sigma) if spec.e == 1 and spec.f == 1 else None
    if ref is not None:
        assert_upper(rep, ref)
    uni = up_eval(bd.univariate_assembly(sigma, bd.sharp_local_terms(spec.p, spec.e, spec.q), r=0))
    assert rep.real_value.value == uni.value


@pytest.mark.parametrize("sigma", range(0, 6))
def test_thm3_global_univariate_path_equals_thm2(sigma):
    rep = thm3_global(1, sigma, Global(1, 1), variant="proof", terms="sharp")
    assert_upper(rep, ref_thm2(1, 1, sigma))


def test_thm3_statement_variant_adds_one():
    for sigma in (2, 3):
        a = thm3_local(1, sigma, Local(2), variant="statement", terms="sharp").real_value.value
        b = thm3_local(1, sigma, Local(2), variant="proof", terms="sharp").real_value.value
        assert abs(a - b - 1) < Fraction(1, 10**20)


def test_thm3_small_cases():
    assert thm3_local(1, 0, Local(2)).integer_value == 1
    B = ref_amd_local(2, 1, 2, [2], [1])
    B3 = ref_amd_local(2, 1, 2, [3], [1])
    assert_upper(thm3_local(2, 2, Local(2)), 1 + B + (1 + B * B3))
    # plain sparse-system terms at n = 1, sigma = 3
    tail = ref_amd_local(2, 1, 2, [2, 3, 3], [2, 3, 3])
    assert_upper(thm3_local(1, 3, Local(2)), 1 + B + (1 + B * B3) + tail)


def test_thm3_overrides_use_exact_trinomial():
    a = thm3_local(1, 2, Local(2), overrides=True).real_value.value
    B = ref_amd_local(2, 1, 2, [2], [1])
    assert abs(mp(a) - (1 + B + 1 + 6 * B)) < mpmath.mpf(10) ** -20


def test_thm3_type_vector_guard():
    with pytest.raises(IllFormedTypeVector):
        thm3_local(4, 3, Local(2))
    assert bd.system_tail_type(2, 3) == ((2, 2, 3), (3, 4, 4))


def test_thm3_binomial_weights():
    spec = Local(3)
    terms = bd.amd_local_terms(spec.p, spec.e, spec.q)
    t = bd.system_assembly(2, 4, terms, "statement")
    ref = 1 + ref_amd_local(3, 1, 3, [2], [1]) + 1 + ref_amd_local(3, 1, 3, [2], [1]) * ref_amd_local(3, 1, 3, [3], [1])
    ref += math.comb(4, 1) * ref_amd_local(3, 1, 3, [2, 2, 3], [3, 4, 4])
    ref += math.comb(5, 1) * ref_amd_local(3, 1, 3, [2, 2, 3, 3], [3, 4, 5, 5])
    assert abs(mp(up_eval(t).value) - ref) < ref * mpmath.mpf(2) ** -60


def test_risler_values():
    assert [risler_real(s) for s in range(5)] == [
        4,
        20736,
        274877906944,
        5497558138880000000000,
        126315281744229461505151771531542528,
    ]


def test_abstract_bound():
    assert abstract_rational_bound(0) == 15
    assert abstract_rational_bound(1) == 15 + Fraction(2401, 100)
    rep = bd.abstract_report(2)
    assert rep.inputs["ceiling"] == math.ceil(abstract_rational_bound(2))
    assert rep.integer_value == math.floor(abstract_rational_bound(2))


def test_tau_and_tower():
    assert tau_trivial_bound(3) == 8
    assert borodin_cook_tower(1, 1).value == 2
    assert borodin_cook_tower(2, 1).value == 2**4
    assert borodin_cook_tower(3, 1).value == 2**256
    big = borodin_cook_tower(5, 1)
    assert big.value is None
    with pytest.raises(TowerOverflow):
        bd.tower_or_raise(5, 1)
    with pytest.raises(BoundError):
        borodin_cook_tower(0, 1)


def test_report_json():
    j = thm1_bound(2, 1, 2).to_json()
    assert j["name"] == "thm1" and j["floor"] == 35
    assert Fraction(j["real_upper"]) >= Fraction("35.003")


@pytest.mark.parametrize("sigma", [2, 4])
def test_more_precision_never_raises_bound(sigma):
    a = thm1_bound(3, 2, sigma, precision=96).real_value
    b = thm1_bound(3, 2, sigma, precision=256).real_value
    assert b.value <= a.value
