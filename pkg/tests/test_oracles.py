import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from addbound.bounds import Local, lenstra_local, roots_of_unity_bound
from addbound.expansion import BudgetExceeded, SparsePoly
from addbound import oracles as orc
from addbound.oracles import (
    OracleError,
    count_integer_roots,
    count_padic_roots,
    count_rational_roots,
    count_real_roots,
    squarefree_part,
)

X = sympy.Symbol("x")


def dense(expr):
    return [int(c) for c in reversed(sympy.Poly(sympy.expand(expr), X).all_coeffs())]


def sp(expr):
    return SparsePoly.from_dense(dense(expr))


# --- squarefree part -------------------------------------------------------


def test_squarefree_examples():
    assert squarefree_part(sp((X - 1) ** 2 * (X + 2))).dense() == dense((X - 1) * (X + 2))
    assert squarefree_part(sp(X**3 - X)).dense() == dense(X**3 - X)
    assert squarefree_part(sp(X**4)).dense() == [0, 1]
    with pytest.raises(OracleError):
        squarefree_part(SparsePoly({}))


def test_squarefree_ledger():
    led = orc.squarefree_ledger(sp((X - 1) ** 2 * (X + 2) * X**3))
    assert sorted((tuple(p.dense()), m) for p, m in led) == sorted([((0, 1), 3), ((2, 1), 1), ((-1, 1), 2)])


# --- real roots ------------------------------------------------------------


def test_real_examples():
    assert count_real_roots(sp(X**2 - 2)).distinct == 2
    assert count_real_roots(sp(X**2 + 1)).distinct == 0
    r = count_real_roots(sp(sympy.prod([X - i for i in range(1, 7)])))
    assert r.distinct == 6


def test_zero_polynomial_rejected():
    for fn in (count_real_roots, count_rational_roots, count_integer_roots):
        with pytest.raises(OracleError):
            fn(SparsePoly({}))
    with pytest.raises(OracleError):
        count_padic_roots(SparsePoly({}), 2)


int_polys = st.lists(st.integers(-30, 30), min_size=2, max_size=9).filter(lambda c: c[-1] != 0)


@settings(max_examples=300, deadline=None)
@given(int_polys)
def test_real_count_matches_sympy(coeffs):
    f = SparsePoly.from_dense(coeffs)
    ref = sympy.Poly(list(reversed(coeffs)), X)
    roots = sympy.real_roots(ref)
    res = count_real_roots(f)
    assert res.distinct == len(set(roots))
    assert res.with_multiplicity == len(roots)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=9), min_size=1, max_size=7, unique=True))
def test_real_count_of_distinct_linear_factors(roots):
    f = SparsePoly.constant(1)
    for r in roots:
        f = f * SparsePoly.from_dense([-r, 1])
    assert count_real_roots(f).distinct == len(roots)


# --- rational and integer roots -------------------------------------------


def test_rational_examples():
    r = count_rational_roots(sp(X**3 - X))
    assert r.distinct == 3 and list(r.witnesses) == [-1, 0, 1]
    r = count_rational_roots(sp((2 * X - 1) * (3 * X + 2)))
    assert r.distinct == 2 and set(r.witnesses) == {Fraction(1, 2), Fraction(-2, 3)}
    assert count_integer_roots(sp((2 * X - 1) * (3 * X + 2))).distinct == 0
    assert count_rational_roots(sp(X**2 - 2)).distinct == 0


def _sympy_rational_roots(coeffs):
    out = {}
    _, facs = sympy.factor_list(sympy.Poly(list(reversed(coeffs)), X))
    for fac, mult in facs:
        if fac.degree() == 1:
            a, b = fac.all_coeffs()
            out[Fraction(-int(b), int(a))] = mult
    return out


@settings(max_examples=300, deadline=None)
@given(int_polys)
def test_rational_count_matches_sympy(coeffs):
    f = SparsePoly.from_dense(coeffs)
    ref = _sympy_rational_roots(coeffs)
    res = count_rational_roots(f)
    assert res.distinct == len(ref)
    assert res.with_multiplicity == sum(ref.values())
    assert set(res.witnesses) == set(ref)
    for w in res.witnesses:
        assert f.evaluate([w]) == 0
    ints = count_integer_roots(f)
    assert ints.distinct == sum(1 for r in ref if r.denominator == 1)


def test_rational_roots_with_rational_coefficients():
    f = SparsePoly.from_dense([Fraction(-1, 6), Fraction(1, 6), 1])  # (x + 1/2)(x - 1/3)
    assert set(count_rational_roots(f).witnesses) == {Fraction(-1, 2), Fraction(1, 3)}


def test_large_coefficients_factor_with_rho():
    p, q = 1000003, 1000033
    f = sp((X - p) * (q * X - 1) * (X**2 + 1))
    res = count_rational_roots(f)
    assert set(res.witnesses) == {Fraction(p), Fraction(1, q)}


def test_factor_budget():
    big = sympy.nextprime(10**30) * sympy.nextprime(10**31)
    orc.factorize.cache_clear()
    old = orc.RHO_STEPS, orc.RHO_RETRIES
    try:
        orc.RHO_STEPS, orc.RHO_RETRIES = 50, 1
        with pytest.raises(BudgetExceeded):
            count_rational_roots(SparsePoly.from_dense([int(big), 0, 0, 1]))
    finally:
        orc.RHO_STEPS, orc.RHO_RETRIES = old
        orc.factorize.cache_clear()


# --- p-adic roots ----------------------------------------------------------


def _vp(n, p):
    if n == 0:
        return 10**9
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _ev(c, x):
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _zp_roots(c, p, K, sep):
    """Residues mod p^sep of the roots in Z_p of a squarefree integer polynomial.

    A residue a mod p^K with v(f(a)) > 2 v(f'(a)) lies near a unique root
    (Hensel); Newton steps in Z/p^(3K) pin that root down.
    """
    dc = [i * a for i, a in enumerate(c)][1:]
    mod = p ** (3 * K)
    found = set()
    for a in range(p**K):
        fa, da = _ev(c, a), _ev(dc, a)
        if _vp(fa, p) <= 2 * _vp(da, p):
            continue
        r = a
        for _ in range(3 * K):
            fr, dr = _ev(c, r), _ev(dc, r)
            if fr % mod == 0:
                break
            k = _vp(dr, p)
            r = (r - (fr // p**k) * pow(dr // p**k, -1, mod)) % mod
        found.add(r % p**sep)
    return found


def _brute_padic(c, p):
    """Independent count of distinct roots in Q_p (squarefree integer input, c[0] != 0).

    Roots outside Z_p are reciprocals of roots in pZ_p of the reversed polynomial.
    """
    f = sympy.Poly(list(reversed(c)), X)
    vd = _vp(int(f.discriminant()), p) + _vp(c[-1], p) + _vp(c[0], p)
    K = 2 * vd + 3
    if p**K > 20000:
        return None
    inside = _zp_roots(c, p, K, vd + 1)
    outside = {r for r in _zp_roots(list(reversed(c)), p, K, vd + 1) if r % p == 0}
    return len(inside) + len(outside)


def test_padic_examples():
    assert count_padic_roots(sp(3 * X**10 + X**2 - 4), 2).distinct == 6
    assert count_padic_roots(sp(X**2 - 2), 2).distinct == 0
    assert count_padic_roots(sp(X**2 - 17), 2).distinct == 2
    assert count_padic_roots(sp(X**2 - 7), 2).distinct == 0  # 7 is not 1 mod 8
    assert count_padic_roots(sp(X**2 + 7), 2).distinct == 2  # -7 is 1 mod 8


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_roots_of_unity(p):
    res = count_padic_roots(sp(X ** (p - 1) - 1), p)
    assert res.distinct == p - 1
    assert res.distinct <= roots_of_unity_bound(Local(p)).integer_value


def test_padic_negative_valuation():
    f = SparsePoly.from_dense([Fraction(1, 4), 0, -1])
    res = count_padic_roots(f, 2)
    assert res.distinct == 2
    assert all(w.valuation == -1 for w in res.witnesses)


def test_padic_multiplicities_and_zero():
    res = count_padic_roots(sp(X**3 * (X - 1) ** 2 * (X**2 - 2)), 2)
    assert (res.distinct, res.with_multiplicity, res.zero_multiplicity) == (2, 5, 3)
    assert res.nonzero_with_multiplicity == 2


def test_trinomial_within_lenstra():
    res = count_padic_roots(sp(3 * X**10 + X**2 - 4), 2)
    assert res.nonzero_with_multiplicity <= lenstra_local(Local(2), 3).integer_value


def test_newton_polygon():
    segs = orc.newton_polygon([4, 0, 1], 2)
    assert segs == [(Fraction(-1), 2)]
    segs = orc.newton_polygon([2, 0, 1], 2)
    assert segs == [(Fraction(-1, 2), 2)]


def _random_squarefree(rng, deg, bound):
    while True:
        c = [rng.randint(-bound, bound) for _ in range(deg)] + [rng.choice([1, -1, 2, 3, 4, 6, 8, 9]) * rng.choice([1, -1])]
        f = sympy.Poly(list(reversed(c)), X)
        if c[0] != 0 and sympy.gcd(f, f.diff(X)).degree() == 0:
            return c


@pytest.mark.parametrize("p", [2, 3, 5])
def test_padic_matches_brute_force(p):
    rng = random.Random(1000 + p)
    checked = 0
    for _ in range(2000):
        c = _random_squarefree(rng, rng.randint(1, 4), 12)
        ref = _brute_padic(c, p)
        if ref is None:
            continue
        assert count_padic_roots(SparsePoly.from_dense(c), p).distinct == ref, c
        checked += 1
        if checked == 40:
            break
    assert checked == 40


@pytest.mark.parametrize("p", [2, 3, 5])
def test_padic_constructed_roots(p):
    # products of linear factors with rational roots have all of them in Q_p
    rng = random.Random(7 * p)
    for _ in range(30):
        roots = {Fraction(rng.randint(-40, 40), rng.choice([1, 2, 3, 4, 5, 9, 25])) for _ in range(rng.randint(1, 5))}
        f = SparsePoly.constant(1)
        for r in roots:
            f = f * SparsePoly.from_dense([-r, 1])
        assert count_padic_roots(f, p).distinct == len(roots)


@pytest.mark.parametrize("p", [2, 3])
def test_hensel_classes_hold_exactly_one_root(p):
    f = sp((X**2 - 17) * (X - 4) * (3 * X**10 + X**2 - 4))
    res = count_padic_roots(f, p)
    for w in res.witnesses:
        assert orc.count_roots_in_class(f, p, w) == 1


def test_depth_guard_on_non_squarefree_input():
    counter = orc._UnitRootCounter([1, -2, 1], 2)  # (x-1)^2 has zero discriminant
    with pytest.raises(orc.DepthExceeded):
        counter.count(range(1, 2))


@settings(max_examples=150, deadline=None)
@given(int_polys, st.sampled_from([2, 3, 5]))
def test_field_chain(coeffs, p):
    f = SparsePoly.from_dense(coeffs)
    z = count_integer_roots(f).distinct
    q = count_rational_roots(f).distinct
    qp = count_padic_roots(f, p).distinct
    assert z <= q <= qp
