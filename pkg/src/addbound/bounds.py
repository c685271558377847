"""Closed-form root-count upper bounds.

Every real-valued bound is built as a :class:`~addbound.numeric.Term` and
evaluated upward, so ``BoundReport.integer_value`` (the floor) is a valid bound
on any integer root count.  The constant ``c = e/(e-1)`` is always evaluated
exactly, never as a decimal approximation.

The additive-complexity bounds are assembled from bounds ``B(L, m, N)`` for
sparse systems.  Two families of such bounds are available:

* ``"amd"`` uses the general multivariate term bound for every ``B``;
* ``"sharp"`` uses the roots-of-unity bound for ``B(L,2,1)``, the univariate
  trinomial bound for ``B(L,3,1)`` and the multivariate bound with ``q - 1``
  residue units; these are the terms behind the closed-form univariate
  formulas in :func:`thm1_bound` and :func:`thm2_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

from .numeric import (
    DEFAULT_PRECISION,
    E,
    Term,
    UpperReal,
    check_prime,
    const,
    floor_bound,
    ln,
    log,
    up_eval,
)

SCHEMA = "addbound/1"

C = E / (E - 1)


class BoundError(ValueError):
    pass


class IllFormedTypeVector(BoundError):
    pass


class TowerOverflow(OverflowError):
    pass


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class Local:
    """Degree ``e*f`` extension of Q_p with ramification ``e`` and residue degree ``f``."""

    p: int
    e: int = 1
    f: int = 1

    def __post_init__(self):
        check_prime(self.p)
        if self.e < 1 or self.f < 1:
            raise BoundError("ramification index and residue degree must be >= 1")

    @property
    def d(self) -> int:
        return self.e * self.f

    @property
    def q(self) -> int:
        return self.p**self.f

    def describe(self) -> str:
        return f"Qp(p={self.p},e={self.e},f={self.f})"

    def as_dict(self) -> dict:
        return {"kind": "local", "p": self.p, "e": self.e, "f": self.f, "d": self.d, "q": self.q}


@dataclass(frozen=True)
class Global:
    """Degree ``d`` number field, counting roots of degree <= ``delta`` over it."""

    d: int = 1
    delta: int = 1

    def __post_init__(self):
        if self.d < 1 or self.delta < 1:
            raise BoundError("field degree and delta must be >= 1")

    def describe(self) -> str:
        return f"NF(d={self.d},delta={self.delta})"

    def as_dict(self) -> dict:
        return {"kind": "global", "d": self.d, "delta": self.delta}


FieldSpec = Union[Local, Global]


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict
    real_value: Optional[UpperReal]
    integer_value: int
    citation: str
    exact: Optional[Fraction] = None

    def __post_init__(self):
        if self.integer_value < 0:
            raise BoundError("bounds are nonnegative")

    def real_upper(self) -> str:
        if self.exact is not None:
            x = self.exact
            return str(x.numerator) if x.denominator == 1 else _decimal_up(x)
        assert self.real_value is not None
        return self.real_value.decimal()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "real_upper": self.real_upper(),
            "floor": self.integer_value,
            "citation": self.citation,
        }


def _decimal_up(x: Fraction, digits: int = 30) -> str:
    return UpperReal.from_fraction(x, max(64, int(digits * 3.33) + 8)).decimal(digits)


def _report(name: str, inputs: dict, term: Term, citation: str, precision: int) -> BoundReport:
    value = up_eval(term, precision)
    return BoundReport(name, inputs, value, floor_bound(value), citation)


def _exact_report(name: str, inputs: dict, value, citation: str) -> BoundReport:
    value = Fraction(value)
    return BoundReport(name, inputs, None, math.floor(value), citation, exact=value)


# ---------------------------------------------------------------------------
# sparse-system bounds as terms


def _check_types(m: Sequence[int], N: Sequence[int]) -> None:
    if len(m) != len(N) or not m:
        raise BoundError("m and N must be nonempty and of equal length")
    if any(k < 1 for k in m) or any(k < 1 for k in N):
        raise BoundError("entries of m and N must be >= 1")


def amd_local_term(p: int, e: int, q: int, m: Sequence[int], N: Sequence[int], unit_residues=False) -> Term:
    _check_types(m, N)
    if any(k == 1 for k in m):
        return const(0)
    n = len(m)
    qq = q - 1 if unit_residues else q
    t = C**n * const(qq) ** n
    for mi, ni in zip(m, N):
        t = t * (mi * (mi - 1) * ni) * (1 + e * log(e * (mi - 1) / ln(p), p))
    return t


def amd_global_term(d: int, delta: int, m: Sequence[int], N: Sequence[int]) -> Term:
    _check_types(m, N)
    if any(k == 1 for k in m):
        return const(0)
    n = len(m)
    dd = d * d * delta * delta
    t = 2 * C**n * const(2) ** (d * delta * n)
    for mi, ni in zip(m, N):
        t = t * (mi * (mi - 1) * ni) * (1 + 2 * dd * log(dd * (mi - 1) / ln(2), 2))
    return t


def lenstra_local_term(p: int, e: int, q: int, m: int) -> Term:
    if m < 1:
        raise BoundError("term count must be >= 1")
    if m == 1:
        return const(0)
    return C * (q - 1) * (m - 1) ** 2 * (1 + e * log(e * (m - 1) / ln(p), p))


def lenstra_global_term(d: int, delta: int, m: int) -> Term:
    if m < 1:
        raise BoundError("term count must be >= 1")
    if m == 1:
        return const(0)
    dd = d * delta
    return C * (m - 1) ** 2 * (dd + 10) * 2 ** (dd + 1) * log(dd * (m - 1) / ln(2), 2)


def roots_of_unity_term(p: int, e: int, q: int) -> Term:
    return const(Fraction(e * p * (q - 1), p - 1))


# exact values of B(L, m, N), keyed by ((p, e, f), m, N)
EXACT_B: Dict[Tuple[Tuple[int, int, int], Tuple[int, ...], Tuple[int, ...]], int] = {
    ((2, 1, 1), (3,), (1,)): 6,
}


def exact_b(spec: Local, m: Sequence[int], N: Sequence[int]) -> Optional[int]:
    return EXACT_B.get(((spec.p, spec.e, spec.f), tuple(m), tuple(N)))


# ---------------------------------------------------------------------------
# public sparse bounds

_AMD_CITE = "arithmetic multivariate Descartes bound, local case"
_AMD_G_CITE = "arithmetic multivariate Descartes bound, global case"
_LEN_L_CITE = "Lenstra's bound for m-nomials over a p-adic field (roots in L*, with multiplicity)"
_LEN_G_CITE = "Lenstra's bound for m-nomials over a number field (roots in C* of degree <= delta)"


def amd_local_B(spec: Local, m: Sequence[int], N: Sequence[int], precision: int = DEFAULT_PRECISION) -> BoundReport:
    if not isinstance(spec, Local):
        raise BoundError("amd_local_B needs a local field")
    term = amd_local_term(spec.p, spec.e, spec.q, m, N)
    inputs = {"field": spec.as_dict(), "m": list(m), "N": list(N)}
    return _report("amd_local_B", inputs, term, _AMD_CITE, precision)


def amd_global_A(spec: Global, m: Sequence[int], N: Sequence[int], precision: int = DEFAULT_PRECISION) -> BoundReport:
    if not isinstance(spec, Global):
        raise BoundError("amd_global_A needs a number field")
    term = amd_global_term(spec.d, spec.delta, m, N)
    inputs = {"field": spec.as_dict(), "m": list(m), "N": list(N)}
    return _report("amd_global_A", inputs, term, _AMD_G_CITE, precision)


def lenstra_local(spec: Local, m: int, precision: int = DEFAULT_PRECISION) -> BoundReport:
    if not isinstance(spec, Local):
        raise BoundError("lenstra_local needs a local field")
    term = lenstra_local_term(spec.p, spec.e, spec.q, m)
    return _report("lenstra_local", {"field": spec.as_dict(), "m": m}, term, _LEN_L_CITE, precision)


def lenstra_global(spec: Global, m: int, precision: int = DEFAULT_PRECISION) -> BoundReport:
    if not isinstance(spec, Global):
        raise BoundError("lenstra_global needs a number field")
    term = lenstra_global_term(spec.d, spec.delta, m)
    return _report("lenstra_global", {"field": spec.as_dict(), "m": m}, term, _LEN_G_CITE, precision)


def roots_of_unity_bound(spec: Local) -> BoundReport:
    value = Fraction(spec.e * spec.p * (spec.q - 1), spec.p - 1)
    return _exact_report(
        "roots_of_unity_bound", {"field": spec.as_dict()}, value, "roots-of-unity count bound, equal to B(L,2,1)"
    )


# ---------------------------------------------------------------------------
# closed-form univariate additive-complexity bounds


def _check_sigma(sigma: int) -> None:
    if not isinstance(sigma, int) or sigma < 0:
        raise BoundError("sigma must be a nonnegative integer")


def thm1_tail_term(p: int, d: int, j: int) -> Term:
    q1 = p**d - 1
    a = 1 + d * log(2 * d / ln(p), p)
    b = 1 + d * log(d / ln(p), p)
    return Fraction(1, 3) * j * (6 * C) ** j * const(q1) ** j * b * a ** (j - 1) * math.factorial(j)


def thm1_term(p: int, d: int, sigma: int) -> Term:
    _check_sigma(sigma)
    check_prime(p)
    if d < 1:
        raise BoundError("d must be >= 1")
    q1 = p**d - 1
    summands = [
        const(1),
        const(Fraction(d * p * q1, p - 1)),
        4 * C * Fraction(d * p * q1 * q1, p - 1) * (1 + d * log(2 * d / ln(p), p)),
    ]
    total = summands[0]
    for s in summands[1 : min(sigma, 2) + 1]:
        total = total + s
    for j in range(3, sigma + 1):
        total = total + thm1_tail_term(p, d, j)
    return total


def thm1_bound(p: int, d: int, sigma: int, precision: int = DEFAULT_PRECISION) -> BoundReport:
    """Bound on the number of roots in any degree-``d`` extension of Q_p."""
    term = thm1_term(p, d, sigma)
    return _report(
        "thm1",
        {"p": p, "d": d, "sigma": sigma},
        term,
        "additive-complexity root bound over degree-d extensions of Q_p",
        precision,
    )


def thm2_tail_term(d: int, delta: int, j: int) -> Term:
    dd = d * delta
    d2 = dd * dd
    a = 1 + 2 * d2 * log(d2 / ln(2), 2)
    b = 1 + 2 * d2 * log(2 * d2 / ln(2), 2)
    return Fraction(2, 3) * j * (6 * C) ** j * const(2) ** (dd * j) * a * b ** (j - 1) * math.factorial(j)


def thm2_term(d: int, delta: int, sigma: int) -> Term:
    _check_sigma(sigma)
    if d < 1 or delta < 1:
        raise BoundError("d and delta must be >= 1")
    dd = d * delta
    l1 = log(dd / ln(2), 2)
    l2 = log(2 * dd / ln(2), 2)
    summands = [
        const(1),
        C * (dd + 10) * 2 ** (dd + 1) * l1,
        C**2 * (dd + 10) ** 2 * 4 ** (dd + 2) * l1 * l2,
    ]
    total = summands[0]
    for s in summands[1 : min(sigma, 2) + 1]:
        total = total + s
    for j in range(3, sigma + 1):
        total = total + thm2_tail_term(d, delta, j)
    return total


def thm2_bound(d: int, delta: int, sigma: int, precision: int = DEFAULT_PRECISION) -> BoundReport:
    """Bound on roots of degree <= ``delta`` over a degree-``d`` number field."""
    term = thm2_term(d, delta, sigma)
    return _report(
        "thm2",
        {"d": d, "delta": delta, "sigma": sigma},
        term,
        "additive-complexity root bound over number fields, roots of degree <= delta",
        precision,
    )


# ---------------------------------------------------------------------------
# assembling bounds from B-terms


@dataclass(frozen=True)
class BTerms:
    """The three ingredients of an additive-complexity bound.

    ``b2`` and ``b3`` stand for B(L,2,1) and B(L,3,1); ``tail(m, N)`` bounds the
    isolated roots of a sparse system of type ``m`` with variable counts ``N``.
    """

    b2: Term
    b3: Term
    tail: Callable[[Tuple[int, ...], Tuple[int, ...]], Term]
    label: str = ""


def amd_local_terms(p: int, e: int, q: int, f: Optional[int] = None, overrides: bool = False) -> BTerms:
    spec_key = (p, e, f) if f is not None else None

    def b(m, N) -> Term:
        if overrides and spec_key is not None:
            hit = EXACT_B.get((spec_key, tuple(m), tuple(N)))
            if hit is not None:
                return const(hit)
        return amd_local_term(p, e, q, m, N)

    return BTerms(b((2,), (1,)), b((3,), (1,)), b, "amd")


def sharp_local_terms(p: int, e: int, q: int) -> BTerms:
    return BTerms(
        roots_of_unity_term(p, e, q),
        lenstra_local_term(p, e, q, 3),
        lambda m, N: amd_local_term(p, e, q, m, N, unit_residues=True),
        "sharp",
    )


def amd_global_terms(d: int, delta: int) -> BTerms:
    def b(m, N) -> Term:
        return amd_global_term(d, delta, m, N)

    return BTerms(b((2,), (1,)), b((3,), (1,)), b, "amd")


def sharp_global_terms(d: int, delta: int) -> BTerms:
    return BTerms(
        lenstra_global_term(d, delta, 2),
        lenstra_global_term(d, delta, 3),
        lambda m, N: amd_global_term(d, delta, m, N),
        "sharp",
    )


def univariate_tail_type(j: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Type and variable counts of the j-th subsystem when there is one input."""
    return (2,) + (3,) * (j - 1), tuple(range(2, j + 1)) + (j,)


def univariate_assembly(sigma: int, terms: BTerms, r: int = 0) -> Term:
    """1, 1 + B2, 1 + B2 + (r + B2*B3), then one tail term per extra gate."""
    _check_sigma(sigma)
    total = const(1)
    if sigma >= 1:
        total = total + terms.b2
    if sigma >= 2:
        total = total + (r + terms.b2 * terms.b3)
    for j in range(3, sigma + 1):
        total = total + terms.tail(*univariate_tail_type(j))
    return total


def system_tail_type(n: int, ell: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    if ell < n:
        raise IllFormedTypeVector(f"type vector needs ell >= n (ell={ell}, n={n})")
    m = (2,) * n + (3,) * (ell - n)
    N = tuple(range(n + 1, n + ell)) + (n + ell - 1,)
    return m, N


def system_assembly(n: int, sigma: int, terms: BTerms, variant: str = "statement") -> Term:
    _check_sigma(sigma)
    if n < 1:
        raise BoundError("n must be >= 1")
    if variant == "statement":
        r = 1
    elif variant == "proof":
        r = 0 if n == 1 else 1
    else:
        raise BoundError(f"unknown variant {variant!r}")
    total = const(1)
    if sigma >= 1:
        total = total + terms.b2
    if sigma >= 2:
        total = total + (r + terms.b2 * terms.b3)
    for ell in range(3, sigma + 1):
        m, N = system_tail_type(n, ell)
        total = total + math.comb(n + ell - 1, n - 1) * terms.tail(m, N)
    return total


def _local_terms(spec: Local, family: str, overrides: bool) -> BTerms:
    if family == "amd":
        return amd_local_terms(spec.p, spec.e, spec.q, spec.f, overrides)
    if family == "sharp":
        return sharp_local_terms(spec.p, spec.e, spec.q)
    raise BoundError(f"unknown B-term family {family!r}")


def thm3_local(
    n: int,
    sigma: int,
    spec: Local,
    variant: str = "statement",
    terms: Union[str, BTerms] = "amd",
    overrides: bool = False,
    precision: int = DEFAULT_PRECISION,
) -> BoundReport:
    """Bound on geometrically isolated roots in L^n of a system with additive complexity sigma."""
    bt = terms if isinstance(terms, BTerms) else _local_terms(spec, terms, overrides)
    term = system_assembly(n, sigma, bt, variant)
    inputs = {"n": n, "sigma": sigma, "field": spec.as_dict(), "variant": variant, "terms": bt.label}
    return _report("thm3_local", inputs, term, "isolated-root bound for systems, local case", precision)


def thm3_global(
    n: int,
    sigma: int,
    spec: Global,
    variant: str = "statement",
    terms: Union[str, BTerms] = "amd",
    precision: int = DEFAULT_PRECISION,
) -> BoundReport:
    if isinstance(terms, BTerms):
        bt = terms
    elif terms == "amd":
        bt = amd_global_terms(spec.d, spec.delta)
    elif terms == "sharp":
        bt = sharp_global_terms(spec.d, spec.delta)
    else:
        raise BoundError(f"unknown B-term family {terms!r}")
    term = system_assembly(n, sigma, bt, variant)
    inputs = {"n": n, "sigma": sigma, "field": spec.as_dict(), "variant": variant, "terms": bt.label}
    return _report("thm3_global", inputs, term, "isolated-root bound for systems, global case", precision)


def thm1_sharpened(
    spec: Local,
    sigma: int,
    b3: Union[None, int, Fraction, str] = None,
    precision: int = DEFAULT_PRECISION,
) -> BoundReport:
    """Main local bound with its first summands replaced by roots-of-unity terms.

    ``b3`` is the value used for B(L,3,1): ``None`` evaluates the general
    sparse-system bound, ``"exact"`` takes the built-in exact table (falling
    back to the general bound), and a number is used as given.
    """
    if b3 is None or b3 == "exact":
        hit = exact_b(spec, (3,), (1,)) if b3 == "exact" else None
        b3_term = const(hit) if hit is not None else amd_local_term(spec.p, spec.e, spec.q, (3,), (1,))
        b3_label = "exact" if hit is not None else "amd"
    else:
        b3_term = const(Fraction(b3))
        b3_label = str(b3)
    # the tail keeps the worst-case degree-d terms of the main local bound
    worst = sharp_local_terms(spec.p, spec.d, spec.p**spec.d)
    terms = BTerms(roots_of_unity_term(spec.p, spec.e, spec.q), b3_term, worst.tail, "sharpened")
    total = univariate_assembly(sigma, terms, r=0)
    inputs = {"field": spec.as_dict(), "sigma": sigma, "b3": b3_label}
    return _report(
        "thm1_sharpened", inputs, total, "local bound with roots-of-unity and trinomial summands", precision
    )


# ---------------------------------------------------------------------------
# exact bounds


def risler_real(sigma: int) -> int:
    _check_sigma(sigma)
    e2 = 9 * sigma * sigma + 5 * sigma + 2
    assert e2 % 2 == 0
    return (sigma + 2) ** (3 * sigma + 1) * 2 ** (e2 // 2)


def abstract_rational_bound(sigma: int) -> Fraction:
    _check_sigma(sigma)
    return 15 + sigma * sigma * Fraction(2401, 100) ** sigma * math.factorial(sigma)


def tau_trivial_bound(tau: int) -> int:
    if not isinstance(tau, int) or tau < 0:
        raise BoundError("tau must be a nonnegative integer")
    return 2**tau


@dataclass(frozen=True)
class TowerResult:
    """``value`` when it fits in ``max_digits`` decimal digits, else ``None``.

    ``digits`` is the exact decimal digit count when known; ``symbolic`` always
    describes the tower as nested powers of two.
    """

    sigma: int
    top_exponent: int
    value: Optional[int] = field(repr=False)
    digits: Optional[int]
    symbolic: str


MAX_TOWER_DIGITS = 10**6
_LOG10_2 = math.log10(2)


def borodin_cook_tower(sigma: int, K, max_digits: int = MAX_TOWER_DIGITS) -> TowerResult:
    """Iterated power of two: ``t = 2^ceil(K*sigma)``, then ``t <- 2^t`` (sigma - 1) times.

    Association is right to left, so sigma = 3 with K = 1 gives 2^(2^(2^3)).
    """
    if not isinstance(sigma, int) or sigma < 1:
        raise BoundError("sigma must be >= 1")
    K = Fraction(K)
    if K <= 0:
        raise BoundError("K must be positive")
    top = math.ceil(K * sigma)
    symbolic = "2^(" * (sigma - 1) + f"2^{top}" + ")" * (sigma - 1)
    t = top  # current exponent
    for level in range(sigma):
        # next value is 2^t, which has floor(t*log10(2)) + 1 digits
        digits = _digits_of_pow2(t)
        if digits > max_digits:
            remaining = sigma - level - 1
            known = remaining == 0 and digits < 10**30
            return TowerResult(sigma, top, None, digits if known else None, symbolic)
        t = 1 << t
    return TowerResult(sigma, top, t, digits, symbolic)


def _digits_of_pow2(t: int) -> int:
    """Decimal digit count of 2^t (an estimate that may be off by one for huge t)."""
    if t < 1 << 50:
        return int(t * _LOG10_2) + 1
    return t * 301029995663981195 // 10**18 + 1


def tower_or_raise(sigma: int, K) -> int:
    res = borodin_cook_tower(sigma, K)
    if res.value is None:
        raise TowerOverflow(f"tower {res.symbolic} exceeds {MAX_TOWER_DIGITS} digits")
    return res.value


# ---------------------------------------------------------------------------
# reports for the exact bounds


def risler_report(sigma: int) -> BoundReport:
    return _exact_report("risler_real", {"sigma": sigma}, risler_real(sigma), "Risler's real-root bound")


def abstract_report(sigma: int) -> BoundReport:
    v = abstract_rational_bound(sigma)
    rep = _exact_report("abstract_rational", {"sigma": sigma, "ceiling": math.ceil(v)}, v, "rational-root bound 15 + s^2 (24.01)^s s!")
    return rep


def tau_report(tau: int) -> BoundReport:
    return _exact_report("tau_trivial", {"tau": tau}, tau_trivial_bound(tau), "integer roots <= 2^tau")
