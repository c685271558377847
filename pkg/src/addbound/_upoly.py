"""Dense univariate integer polynomials as coefficient lists, lowest degree first."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import List, Sequence, Tuple

IntPoly = List[int]


def strip(f: Sequence[int]) -> IntPoly:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: Sequence[int]) -> int:
    return len(f) - 1


def content(f: Sequence[int]) -> int:
    return reduce(math.gcd, f, 0)


def primitive(f: Sequence[int]) -> IntPoly:
    """Divide by the positive content (signs preserved)."""
    f = strip(f)
    g = content(f)
    if g <= 1:
        return f
    return [a // g for a in f]


def from_rationals(coeffs: Sequence[Fraction]) -> IntPoly:
    """Primitive integer multiple of a rational polynomial (positive scaling)."""
    coeffs = [Fraction(c) for c in coeffs]
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in coeffs), 1)
    return primitive([int(c * den) for c in coeffs])


def derivative(f: Sequence[int]) -> IntPoly:
    return strip([i * f[i] for i in range(1, len(f))])


def evaluate(f: Sequence[int], x: int) -> int:
    acc = 0
    for a in reversed(f):
        acc = acc * x + a
    return acc


def evaluate_mod(f: Sequence[int], x: int, m: int) -> int:
    acc = 0
    for a in reversed(f):
        acc = (acc * x + a) % m
    return acc


def eval_fraction_scaled(f: Sequence[int], u: int, v: int) -> int:
    """v^deg(f) * f(u/v), computed in integers."""
    n = len(f) - 1
    acc = 0
    vp = 1
    # sum a_i u^i v^(n-i), Horner in u with running powers of v
    for a in reversed(f):
        acc = acc * u + a * vp
        vp *= v
    return acc


def prem_sign_preserving(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    """A positive multiple of the remainder of ``a`` modulo ``b``."""
    a = strip(a)
    b = strip(b)
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    delta = len(a) - 1 - db
    if delta < 0:
        return r
    steps = 0
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [lb * c for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        r = strip(r)
        steps += 1
    # r = lb^steps * a - q*b; make the multiplier positive
    if lb < 0 and steps % 2 == 1:
        r = [-c for c in r]
    return primitive(r)


def gcd(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    """Primitive gcd up to sign."""
    a, b = primitive(a), primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        a, b = b, prem_sign_preserving(a, b)
    if not a:
        return a
    if len(a) == 1:
        return [1]
    a = primitive(a)
    return a if a[-1] > 0 else [-c for c in a]


def divexact(a: Sequence[int], b: Sequence[int]) -> IntPoly:
    """Primitive form of a/b where b divides a over Q."""
    a = [Fraction(c) for c in strip(a)]
    b = strip(b)
    db = len(b) - 1
    q = [Fraction(0)] * (len(a) - db)
    lb = b[-1]
    for k in range(len(a) - 1 - db, -1, -1):
        coef = a[k + db] / lb
        q[k] = coef
        if coef:
            for i, c in enumerate(b):
                a[k + i] -= coef * c
    if any(a[:db]):
        raise ArithmeticError("inexact polynomial division")
    return from_rationals(q)


def squarefree_decomposition(f: Sequence[int]) -> List[Tuple[IntPoly, int]]:
    """Pairs ``(a_k, k)`` with f = const * prod a_k^k, a_k squarefree and coprime.

    Uses the gcd chain A_0 = f, A_k = gcd(A_{k-1}, A_{k-1}'); every step is
    defined up to a scalar, so primitive integer forms suffice.
    """
    f = primitive(f)
    if len(f) <= 1:
        return []
    chain = [f]
    while len(chain[-1]) > 1:
        a = chain[-1]
        chain.append(gcd(a, derivative(a)))
    # B_k = A_{k-1} / A_k collects the factors of multiplicity >= k
    bs = [divexact(chain[k - 1], chain[k]) for k in range(1, len(chain))]
    bs.append([1])
    out = []
    for k in range(1, len(bs)):
        ak = divexact(bs[k - 1], bs[k])
        if len(ak) > 1:
            out.append((ak if ak[-1] > 0 else [-c for c in ak], k))
    return out


def squarefree_part(f: Sequence[int]) -> IntPoly:
    f = primitive(f)
    if len(f) <= 1:
        return f
    g = gcd(f, derivative(f))
    return divexact(f, g) if len(g) > 1 else f


def taylor_scale(f: Sequence[int], r: int, p: int) -> IntPoly:
    """Coefficients of f(r + p*y)."""
    g = list(f)
    n = len(g)
    # shift by r (repeated synthetic division)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            g[j] += r * g[j + 1]
    pk = 1
    for i in range(n):
        g[i] *= pk
        pk *= p
    return g


def resultant(a: Sequence[int], b: Sequence[int]) -> Fraction:
    """Resultant over Q by Euclid's algorithm."""
    a = [Fraction(c) for c in strip(a)]
    b = [Fraction(c) for c in strip(b)]
    if not a or not b:
        return Fraction(0)
    res = Fraction(1)
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            return res * b[0] ** da
        r = list(a)
        while len(r) - 1 >= db and r:
            coef = r[-1] / b[-1]
            shift = len(r) - 1 - db
            for i, c in enumerate(b):
                r[i + shift] -= coef * c
            while r and r[-1] == 0:
                r.pop()
        if not r:
            return Fraction(0)
        dr = len(r) - 1
        if (da * db) % 2:
            res = -res
        res *= b[-1] ** (da - dr)
        a, b = b, r


def discriminant(f: Sequence[int]) -> Fraction:
    f = strip(f)
    n = len(f) - 1
    r = resultant(f, derivative(f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * r / f[-1]
