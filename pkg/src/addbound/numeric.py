"""Exact rational arithmetic, p-adic valuations and upward-validated real evaluation.

Bound formulas are written as small :class:`Term` trees and evaluated with
:func:`up_eval`.  Internally every term is enclosed in a rational interval whose
endpoints are rounded outward to a working precision; the logarithm and the
constant ``e`` come from series with an explicit remainder, so the upper endpoint
is a guaranteed upper bound for the exact value.  Only that upper endpoint is
exposed, as an :class:`UpperReal`.

    >>> c = E / (E - 1)
    >>> 1.581976 <= float(up_eval(c)) <= 1.581978
    True
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from sympy import isprime

Rational = Fraction
Number = Union[int, Fraction]

DEFAULT_PRECISION = 96
GUARD_BITS = 32


class NumericError(ValueError):
    pass


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 2 or not isprime(p):
        raise NumericError(f"{p!r} is not a prime")
    return p


# ---------------------------------------------------------------------------
# p-adic valuation


@dataclass(frozen=True)
class Valuation:
    """``order`` is an int, or ``math.inf`` for the valuation of zero."""

    prime: int
    order: Union[int, float]

    @property
    def is_infinite(self) -> bool:
        return self.order == math.inf

    def __int__(self) -> int:
        if self.is_infinite:
            raise OverflowError("valuation of zero is infinite")
        return int(self.order)


def vp_int(n: int, p: int) -> int:
    """Multiplicity of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise ValueError("vp_int(0) is infinite")
    n = abs(n)
    k = 0
    # chunked stripping keeps huge powers of p cheap
    pk, step = p, 1
    while n % p == 0:
        if n % pk == 0:
            n //= pk
            k += step
            pk, step = pk * pk, step * 2
        else:
            pk, step = p, 1
    return k


def val_p(x: Number, p: int) -> Valuation:
    check_prime(p)
    x = as_rational(x)
    if x == 0:
        return Valuation(p, math.inf)
    order = vp_int(x.numerator, p) - (vp_int(x.denominator, p) if x.denominator > 1 else 0)
    return Valuation(p, order)


# ---------------------------------------------------------------------------
# dyadic rounding helpers


def _floor_log2(x: Fraction) -> int:
    """floor(log2(x)) for x > 0."""
    n, d = x.numerator, x.denominator
    e = n.bit_length() - d.bit_length()
    # now 2^(e-1) < n/d < 2^(e+1)
    if e >= 0:
        if n < d << e:
            e -= 1
    elif n << -e < d:
        e -= 1
    return e


def round_up(x: Fraction, bits: int) -> Fraction:
    """Smallest dyadic with ``bits`` significant bits that is >= x."""
    if x == 0:
        return x
    if x < 0:
        return -round_down(-x, bits)
    shift = bits - 1 - _floor_log2(x)
    if shift >= 0:
        m = -((-x.numerator << shift) // x.denominator)
        return Fraction(m, 1 << shift)
    y = x / (1 << -shift)
    m = -((-y.numerator) // y.denominator)
    return Fraction(m << -shift)


def round_down(x: Fraction, bits: int) -> Fraction:
    if x == 0:
        return x
    if x < 0:
        return -round_up(-x, bits)
    shift = bits - 1 - _floor_log2(x)
    if shift >= 0:
        return Fraction((x.numerator << shift) // x.denominator, 1 << shift)
    y = x / (1 << -shift)
    return Fraction((y.numerator // y.denominator) << -shift)


# ---------------------------------------------------------------------------
# enclosures


@dataclass(frozen=True)
class _Iv:
    lo: Fraction
    hi: Fraction

    def widen(self, bits: int) -> "_Iv":
        return _Iv(round_down(self.lo, bits), round_up(self.hi, bits))


def _iv_mul(a: _Iv, b: _Iv) -> _Iv:
    ps = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return _Iv(min(ps), max(ps))


def _iv_div(a: _Iv, b: _Iv) -> _Iv:
    if b.lo <= 0 <= b.hi:
        raise NumericError("division by an enclosure containing zero")
    return _iv_mul(a, _Iv(1 / b.hi, 1 / b.lo))


def _iv_pow(a: _Iv, k: int) -> _Iv:
    if k < 0:
        return _iv_div(_Iv(Fraction(1), Fraction(1)), _iv_pow(a, -k))
    if k == 0:
        return _Iv(Fraction(1), Fraction(1))
    lo, hi = a.lo**k, a.hi**k
    if k % 2 == 1 or a.lo >= 0:
        return _Iv(min(lo, hi), max(lo, hi))
    if a.hi <= 0:
        return _Iv(hi, lo)
    return _Iv(Fraction(0), max(lo, hi))


def _atanh_series(z: Fraction, bits: int) -> _Iv:
    """Enclosure of atanh(z) = sum z^(2i+1)/(2i+1) for |z| <= 1/2."""
    if z == 0:
        return _Iv(z, z)
    z2 = z * z
    term = z
    total = Fraction(0)
    tol = Fraction(1, 1 << (bits + 8))
    i = 0
    while True:
        total += term / (2 * i + 1)
        term *= z2
        i += 1
        if abs(term) < tol:
            break
        # keep the running power from growing without bound
        term = round_up(term, bits + 16) if term > 0 else round_down(term, bits + 16)
    # remaining tail: |sum_{k>=i} z^(2k+1)/(2k+1)| <= |term| / ((2i+1)(1-z^2))
    rem = abs(term) / ((2 * i + 1) * (1 - z2))
    # k successive roundings perturb the k-th power by < k * 2^-(bits+15) relative
    slack = abs(z) * i * i * Fraction(1, 1 << (bits + 14))
    return _Iv(total - rem - slack, total + rem + slack).widen(bits)


@lru_cache(maxsize=None)
def _ln2(bits: int) -> _Iv:
    a = _atanh_series(Fraction(1, 3), bits)
    return _Iv(2 * a.lo, 2 * a.hi)


@lru_cache(maxsize=None)
def _e_const(bits: int) -> _Iv:
    total = Fraction(0)
    term = Fraction(1)
    k = 0
    tol = Fraction(1, 1 << (bits + 8))
    while True:
        total += term
        k += 1
        term /= k
        if term < tol:
            break
    # tail sum_{j>=k} 1/j! <= 2/k!
    return _Iv(total, total + 2 * term).widen(bits)


def _ln_point(x: Fraction, bits: int) -> _Iv:
    if x <= 0:
        raise NumericError(f"logarithm of non-positive value {x}")
    if x == 1:
        return _Iv(Fraction(0), Fraction(0))
    k = _floor_log2(x)
    y = x / (Fraction(2) ** k)
    if y > Fraction(4, 3):
        y /= 2
        k += 1
    a = _atanh_series((y - 1) / (y + 1), bits + 8)
    ln2 = _ln2(bits + 8)
    klo, khi = (k * ln2.lo, k * ln2.hi) if k >= 0 else (k * ln2.hi, k * ln2.lo)
    return _Iv(2 * a.lo + klo, 2 * a.hi + khi).widen(bits)


def _ln_iv(a: _Iv, bits: int) -> _Iv:
    if a.lo <= 0:
        raise NumericError("logarithm argument not certified positive")
    return _Iv(_ln_point(a.lo, bits).lo, _ln_point(a.hi, bits).hi)


# ---------------------------------------------------------------------------
# term language


class Term:
    """Arithmetic term over exact rationals, ``e``, logarithms and integer powers.

    Python ints/Fractions coerce automatically, so ``2 * ln(2)`` is a Term.
    """

    __slots__ = ("op", "args")

    def __init__(self, op: str, *args):
        self.op = op
        self.args = args

    # construction -----------------------------------------------------
    @staticmethod
    def lift(x) -> "Term":
        if isinstance(x, Term):
            return x
        return Term("const", as_rational(x))

    def __add__(self, o):
        return Term("add", self, Term.lift(o))

    def __radd__(self, o):
        return Term("add", Term.lift(o), self)

    def __sub__(self, o):
        return Term("sub", self, Term.lift(o))

    def __rsub__(self, o):
        return Term("sub", Term.lift(o), self)

    def __mul__(self, o):
        return Term("mul", self, Term.lift(o))

    def __rmul__(self, o):
        return Term("mul", Term.lift(o), self)

    def __truediv__(self, o):
        return Term("div", self, Term.lift(o))

    def __rtruediv__(self, o):
        return Term("div", Term.lift(o), self)

    def __neg__(self):
        return Term("sub", Term.lift(0), self)

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        return Term("pow", self, k)

    # evaluation -------------------------------------------------------
    def enclose(self, bits: int) -> _Iv:
        op, args = self.op, self.args
        if op == "const":
            v = args[0]
            return _Iv(v, v)
        if op == "e":
            return _e_const(bits)
        if op == "add":
            a, b = args[0].enclose(bits), args[1].enclose(bits)
            return _Iv(a.lo + b.lo, a.hi + b.hi).widen(bits)
        if op == "sub":
            a, b = args[0].enclose(bits), args[1].enclose(bits)
            return _Iv(a.lo - b.hi, a.hi - b.lo).widen(bits)
        if op == "mul":
            return _iv_mul(args[0].enclose(bits), args[1].enclose(bits)).widen(bits)
        if op == "div":
            return _iv_div(args[0].enclose(bits), args[1].enclose(bits)).widen(bits)
        if op == "pow":
            return _iv_pow(args[0].enclose(bits), args[1]).widen(bits)
        if op == "ln":
            return _ln_iv(args[0].enclose(bits), bits)
        if op == "log":
            num = _ln_iv(args[0].enclose(bits), bits)
            base = args[1].enclose(bits)
            if base.lo <= 1 <= base.hi:
                raise NumericError("logarithm base must be certified != 1")
            return _iv_div(num, _ln_iv(base, bits)).widen(bits)
        raise AssertionError(op)

    def __repr__(self) -> str:
        op, a = self.op, self.args
        if op == "const":
            return str(a[0])
        if op == "e":
            return "e"
        if op == "ln":
            return f"log({a[0]!r})"
        if op == "log":
            return f"log_{a[1]!r}({a[0]!r})"
        if op == "pow":
            return f"({a[0]!r})^{a[1]}"
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[op]
        return f"({a[0]!r} {sym} {a[1]!r})"


E = Term("e")


def const(x) -> Term:
    return Term.lift(x)


def ln(x) -> Term:
    """Natural logarithm."""
    return Term("ln", Term.lift(x))


def log(x, base) -> Term:
    return Term("log", Term.lift(x), Term.lift(base))


def factorial(n: int) -> Term:
    return const(math.factorial(n))


def binomial(n: int, k: int) -> Term:
    return const(math.comb(n, k))


# ---------------------------------------------------------------------------
# upper reals


@dataclass(frozen=True, order=False)
class UpperReal:
    """A dyadic number ``mantissa * 2**exponent`` known to be >= some exact value."""

    mantissa: int
    exponent: int
    precision: int = DEFAULT_PRECISION

    @classmethod
    def from_fraction(cls, x: Fraction, precision: int = DEFAULT_PRECISION) -> "UpperReal":
        v = round_up(as_rational(x), precision)
        if v == 0:
            return cls(0, 0, precision)
        # v is dyadic: denominator is a power of two
        d = v.denominator
        exp = -(d.bit_length() - 1)
        m = v.numerator
        if exp == 0:
            tz = (m & -m).bit_length() - 1
            m >>= tz
            exp = tz
        return cls(m, exp, precision)

    @property
    def value(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def ulp(self) -> Fraction:
        v = self.value
        if v == 0:
            return Fraction(0)
        return Fraction(2) ** (_floor_log2(abs(v)) - self.precision + 1)

    def __float__(self) -> float:
        return float(self.value)

    def floor(self) -> int:
        return math.floor(self.value)

    def decimal(self, digits: int = 30) -> str:
        """Decimal string rounded upward, with ``digits`` significant digits."""
        v = self.value
        if v == 0:
            return "0"
        neg = v < 0
        a = -v if neg else v
        k = len(str(a.numerator // a.denominator)) if a >= 1 else 0
        if a < 1:
            # count leading zeros after the point
            t = a
            while t < Fraction(1, 10):
                t *= 10
                k -= 1
        scale = digits - k
        scaled = a * Fraction(10) ** scale
        if neg:
            q = scaled.numerator // scaled.denominator  # toward zero is upward for negatives
        else:
            q = -((-scaled.numerator) // scaled.denominator)
        s = str(q)
        if scale > 0:
            s = s.rjust(scale + 1, "0")
            s = s[:-scale] + "." + s[-scale:]
            s = s.rstrip("0").rstrip(".")
        else:
            s = s + "0" * (-scale)
        return ("-" if neg else "") + s

    def __str__(self) -> str:
        return self.decimal()

    def _cmp_value(self, other):
        if isinstance(other, UpperReal):
            return other.value
        return as_rational(other)

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)


def up_eval(term, precision: int = DEFAULT_PRECISION) -> UpperReal:
    """Evaluate ``term`` to an :class:`UpperReal` that is never below the exact value."""
    if precision < 64:
        raise NumericError("precision must be at least 64 bits")
    iv = Term.lift(term).enclose(precision + GUARD_BITS)
    return UpperReal.from_fraction(iv.hi, precision)


def floor_bound(b: UpperReal) -> int:
    if not isinstance(b, UpperReal):
        raise TypeError("floor_bound expects an UpperReal")
    if b.value < 0:
        raise NumericError("bound must be nonnegative")
    return b.floor()
