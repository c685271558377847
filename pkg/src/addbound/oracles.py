"""Exact root counting over R, Q, Z and Q_p for univariate rational polynomials.

All counters work on the primitive integer multiple of the input and split it
into squarefree, pairwise coprime factors first; distinct counts come from the
factors, counts with multiplicity from the factor exponents.  The root 0 is
stripped up front and reported through ``zero_multiplicity``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import isprime
from sympy.ntheory import pollard_rho

from . import _upoly as up
from .expansion import BudgetExceeded, SparsePoly
from .numeric import check_prime, vp_int

TRIAL_DIVISION_LIMIT = 10**6
RHO_STEPS = 20000
RHO_RETRIES = 8
MAX_CANDIDATES = 2 * 10**5


class OracleError(ValueError):
    pass


class DepthExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PadicWitness:
    """A root x = p^valuation * u with u a unit, u = residue mod p^level."""

    valuation: int
    residue: int
    level: int
    certified_level: int

    def as_dict(self) -> dict:
        return {
            "valuation": self.valuation,
            "residue": self.residue,
            "modulus_exponent": self.level,
            "hensel_level": self.certified_level,
        }


@dataclass(frozen=True)
class RootCountResult:
    field: str
    distinct: int
    with_multiplicity: int
    zero_multiplicity: int = 0
    witnesses: Optional[Tuple] = None

    def __post_init__(self):
        if self.with_multiplicity < self.distinct:
            raise OracleError("multiplicity count below distinct count")

    @property
    def nonzero_distinct(self) -> int:
        return self.distinct - (1 if self.zero_multiplicity else 0)

    @property
    def nonzero_with_multiplicity(self) -> int:
        return self.with_multiplicity - self.zero_multiplicity

    def to_json(self) -> dict:
        out = {
            "field": self.field,
            "distinct": self.distinct,
            "with_multiplicity": self.with_multiplicity,
            "zero_multiplicity": self.zero_multiplicity,
        }
        if self.witnesses is not None:
            out["witnesses"] = [
                w.as_dict() if isinstance(w, PadicWitness) else str(w) for w in self.witnesses
            ]
        return out


# ---------------------------------------------------------------------------
# preprocessing


def _coefficients(poly) -> List[Fraction]:
    if isinstance(poly, SparsePoly):
        if poly.n_vars != 1:
            raise OracleError("root counting needs a univariate polynomial")
        return poly.dense()
    return [Fraction(c) for c in poly]


@dataclass(frozen=True)
class _Prepared:
    zero_mult: int
    factors: Tuple[Tuple[Tuple[int, ...], int], ...]  # squarefree factor, multiplicity


@lru_cache(maxsize=4096)
def _prepare_cached(coeffs: Tuple[Fraction, ...]) -> _Prepared:
    f = up.from_rationals(coeffs)
    if not f:
        raise OracleError("the zero polynomial has infinitely many roots")
    k = 0
    while f[k] == 0:
        k += 1
    f = f[k:]
    factors = tuple((tuple(a), mult) for a, mult in up.squarefree_decomposition(f))
    return _Prepared(k, factors)


def _prepare(poly) -> _Prepared:
    return _prepare_cached(tuple(_coefficients(poly)))


def squarefree_part(poly) -> SparsePoly:
    """Same roots as ``poly``, each with multiplicity one (primitive integer form)."""
    coeffs = _coefficients(poly)
    f = up.from_rationals(coeffs)
    if not f:
        raise OracleError("the zero polynomial has no squarefree part")
    return SparsePoly.from_dense(up.squarefree_part(f))


def squarefree_ledger(poly) -> List[Tuple[SparsePoly, int]]:
    """Squarefree factors with their multiplicities (including x for the root 0)."""
    prep = _prepare(poly)
    out = [(SparsePoly.from_dense(a), m) for a, m in prep.factors]
    if prep.zero_mult:
        out.append((SparsePoly.from_dense([0, 1]), prep.zero_mult))
    return sorted(out, key=lambda t: t[1])


def _tally(field_name: str, prep: _Prepared, counter, witnesses=None) -> RootCountResult:
    distinct = 1 if prep.zero_mult else 0
    mult = prep.zero_mult
    wits = [] if witnesses is not None else None
    for a, k in prep.factors:
        res = counter(list(a))
        n, w = res if isinstance(res, tuple) else (res, None)
        distinct += n
        mult += n * k
        if wits is not None and w:
            wits.extend(w)
    if wits is not None and prep.zero_mult and witnesses == "rational":
        wits.append(Fraction(0))
    return RootCountResult(field_name, distinct, mult, prep.zero_mult, tuple(sorted(wits, key=_wkey)) if wits is not None else None)


def _wkey(w):
    if isinstance(w, PadicWitness):
        return (w.valuation, w.residue)
    return w


# ---------------------------------------------------------------------------
# real roots


def sturm_sequence(f: Sequence[int]) -> List[List[int]]:
    seq = [up.primitive(f), up.primitive(up.derivative(f))]
    while seq[-1] and len(seq[-1]) > 1:
        r = up.prem_sign_preserving(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(signs: Sequence[int]) -> int:
    s = [x for x in signs if x]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _real_count_squarefree(f: List[int]) -> int:
    if len(f) <= 1:
        return 0
    seq = sturm_sequence(f)
    at_pos = [1 if s[-1] > 0 else -1 for s in seq]
    at_neg = [(1 if s[-1] > 0 else -1) * (-1 if (len(s) - 1) % 2 else 1) for s in seq]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def count_real_roots(poly) -> RootCountResult:
    return _tally("R", _prepare(poly), _real_count_squarefree)


# ---------------------------------------------------------------------------
# integer factoring for the rational root test


@lru_cache(maxsize=1)
def _small_primes() -> List[int]:
    n = TRIAL_DIVISION_LIMIT
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i in range(n + 1) if sieve[i]]


@lru_cache(maxsize=8192)
def factorize(n: int) -> Tuple[Tuple[int, int], ...]:
    """Prime factorization of |n| by trial division, then Pollard rho."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    found: Dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            found[p] = k
            if n > 1 and isprime(n):
                break
        elif p > 1000 and p % 97 == 0 and isprime(n):
            break
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if isprime(m):
            found[m] = found.get(m, 0) + 1
            continue
        d = None
        for seed in range(RHO_RETRIES):
            d = pollard_rho(m, s=2 + seed, a=1 + seed, max_steps=RHO_STEPS)
            if d:
                break
        if not d:
            raise BudgetExceeded(f"could not factor {m} within the rho budget")
        stack.extend((d, m // d))
    return tuple(sorted(found.items()))


def divisors(n: int) -> List[int]:
    divs = [1]
    for p, k in factorize(n):
        divs = [d * p**i for d in divs for i in range(k + 1)]
    return sorted(divs)


def _rational_roots_squarefree(f: List[int]) -> Tuple[int, List[Fraction]]:
    if len(f) <= 1:
        return 0, []
    a0, an = f[0], f[-1]
    if len(f) == 2:
        r = Fraction(-a0, an)
        return 1, [r]
    us = divisors(a0)
    vs = divisors(an)
    if 2 * len(us) * len(vs) > MAX_CANDIDATES:
        raise BudgetExceeded("too many rational root candidates")
    f1 = up.evaluate(f, 1)
    fm1 = up.evaluate(f, -1)
    bound = 1 + max(Fraction(abs(c), abs(an)) for c in f[:-1])
    roots = []
    for v in vs:
        for u in us:
            if math.gcd(u, v) != 1 or Fraction(u, v) > bound:
                continue
            for s in (u, -u):
                # f(1) and f(-1) are divisible by (v - s) and (v + s) for a root s/v
                if f1 and (v - s) and f1 % (v - s):
                    continue
                if fm1 and (v + s) and fm1 % (v + s):
                    continue
                if up.eval_fraction_scaled(f, s, v) == 0:
                    roots.append(Fraction(s, v))
    return len(roots), roots


def count_rational_roots(poly) -> RootCountResult:
    return _tally("Q", _prepare(poly), _rational_roots_squarefree, witnesses="rational")


def count_integer_roots(poly) -> RootCountResult:
    def integer_only(f):
        n, roots = _rational_roots_squarefree(f)
        ints = [r for r in roots if r.denominator == 1]
        return len(ints), ints

    return _tally("Z", _prepare(poly), integer_only, witnesses="rational")


# ---------------------------------------------------------------------------
# p-adic roots


def newton_polygon(f: Sequence[int], p: int) -> List[Tuple[Fraction, int]]:
    """Segments of the lower convex hull as (slope, horizontal length)."""
    pts = [(i, vp_int(a, p)) for i, a in enumerate(f) if a]
    hull: List[Tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] unless it lies strictly below the chord to pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return [(Fraction(y2 - y1, x2 - x1), x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:])]


def _p_primitive(f: List[int], p: int) -> List[int]:
    k = min(vp_int(a, p) for a in f if a)
    if k:
        pk = p**k
        f = [a // pk for a in f]
    return f


def _scaled_for_valuation(f: List[int], p: int, v: int) -> List[int]:
    """f(p^v y) made p-primitive, for v >= 0."""
    pv = p**v
    g = []
    scale = 1
    for a in f:
        g.append(a * scale)
        scale *= pv
    return _p_primitive(g, p)


class _UnitRootCounter:
    """Counts roots of a p-primitive squarefree integer polynomial in Z_p by
    branching on residues; simple roots mod p are certified by Hensel's lemma."""

    SOFT_DEPTH = 8

    def __init__(self, f: List[int], p: int, refine: int = 2):
        self.f = f
        self.p = p
        self.refine = refine
        self.cap: Optional[int] = None

    def _depth_cap(self) -> int:
        if self.cap is None:
            disc = up.discriminant(self.f)
            if disc == 0:
                raise DepthExceeded("input is not squarefree")
            self.cap = max(self.SOFT_DEPTH, vp_int(disc.numerator, self.p) + 2)
        return self.cap

    def count(self, residues) -> Tuple[int, List[Tuple[int, int, int]]]:
        """Returns (count, [(unit residue, modulus exponent, certification level)])."""
        out: List[Tuple[int, int, int]] = []
        self._branch(self.f, residues, 0, 0, out)
        return len(out), out

    def _branch(self, h, residues, depth, prefix, out):
        p = self.p
        if depth > self.SOFT_DEPTH and depth > self._depth_cap():
            raise DepthExceeded(f"residue branching exceeded depth {self.cap}")
        hm = [a % p for a in h]
        if not any(hm[1:]):
            # nonzero constant mod p: no roots in this disc
            return
        dh = [(i * a) % p for i, a in enumerate(hm)][1:]
        pd = p**depth
        for r in residues:
            if up.evaluate_mod(hm, r, p):
                continue
            if up.evaluate_mod(dh, r, p):
                lifted = _hensel_lift(h, r, p, 1 + self.refine)
                level = depth + 1 + self.refine
                out.append(((prefix + pd * lifted) % p**level, level, depth + 1))
                continue
            g = _p_primitive(up.taylor_scale(h, r, p), p)
            self._branch(g, range(p), depth + 1, prefix + pd * r, out)


def _hensel_lift(h: List[int], r: int, p: int, k: int) -> int:
    """Lift a simple root r of h mod p to a root mod p^k."""
    dh = up.derivative(h)
    mod = p
    for _ in range(k.bit_length() + 1):
        if mod >= p**k:
            break
        mod = min(mod * mod, p**k)
        inv = pow(up.evaluate_mod(dh, r, mod), -1, mod)
        r = (r - up.evaluate_mod(h, r, mod) * inv) % mod
    return r % p**k


def _padic_count_squarefree(f: List[int], p: int, refine: int = 2) -> Tuple[int, List[PadicWitness]]:
    total = 0
    wits: List[PadicWitness] = []
    for slope, length in newton_polygon(f, p):
        if slope.denominator != 1:
            continue  # no roots of this valuation lie in Q_p
        v = -int(slope)
        if v >= 0:
            g = _scaled_for_valuation(f, p, v)
            sign = 1
        else:
            # roots of valuation v < 0 are reciprocals of roots of the reversed polynomial
            g = _scaled_for_valuation(list(reversed(f)), p, -v)
            sign = -1
        n, found = _UnitRootCounter(g, p, refine).count(range(1, p))
        if n > length:
            raise AssertionError("more roots than the Newton polygon allows")
        total += n
        for residue, level, cert in found:
            u = residue if sign > 0 else pow(residue, -1, p**level)
            wits.append(PadicWitness(v, u, level, cert))
    return total, wits


def count_padic_roots(poly, p: int) -> RootCountResult:
    check_prime(p)
    prep = _prepare(poly)
    res = _tally(f"Qp({p})", prep, lambda f: _padic_count_squarefree(f, p), witnesses="padic")
    return res


def count_roots_in_class(poly, p: int, witness: PadicWitness) -> int:
    """Number of roots x of ``poly`` with x = p^v * u, u = residue mod p^level."""
    prep = _prepare(poly)
    total = 0
    v, level = witness.valuation, witness.level
    for a, _ in prep.factors:
        f = list(a)
        if v >= 0:
            g = _scaled_for_valuation(f, p, v)
            res = witness.residue
        else:
            g = _scaled_for_valuation(list(reversed(f)), p, -v)
            res = pow(witness.residue, -1, p**level)
        # roots of g in the disc res + p^level * Z_p
        h = _p_primitive(up.taylor_scale(g, res, p**level), p)
        total += _UnitRootCounter(h, p, 0).count(range(p))[0]
    return total


FIELD_COUNTERS = {
    "R": count_real_roots,
    "Q": count_rational_roots,
    "Z": count_integer_roots,
}


def count_in_field(poly, field_name: str) -> RootCountResult:
    """``field_name`` is "R", "Q", "Z" or "Qp(p)"."""
    if field_name in FIELD_COUNTERS:
        return FIELD_COUNTERS[field_name](poly)
    if field_name.startswith("Qp(") and field_name.endswith(")"):
        return count_padic_roots(poly, int(field_name[3:-1]))
    raise OracleError(f"unknown field {field_name!r}")
