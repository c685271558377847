"""Sparse monomial expansion of expressions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .expr import ADD, CONST, MUL, POW, VAR, Expression

DEFAULT_MAX_TERMS = 10**6
DEFAULT_MAX_DEGREE = 10**9

Exponent = Tuple[int, ...]


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Budget:
    max_terms: int = DEFAULT_MAX_TERMS
    max_degree: int = DEFAULT_MAX_DEGREE

    def __post_init__(self):
        if self.max_terms <= 0 or self.max_degree <= 0:
            raise ValueError("budget caps must be positive")


@dataclass(frozen=True)
class SparsePoly:
    """Map from exponent vectors to nonzero rational coefficients."""

    terms: Mapping[Exponent, Fraction]
    n_vars: int = 1

    def __post_init__(self):
        clean = {}
        for exp, c in self.terms.items():
            if len(exp) != self.n_vars:
                raise ValueError("exponent vector length does not match n_vars")
            if any(k < 0 for k in exp):
                raise ValueError("negative exponent")
            c = Fraction(c)
            if c:
                clean[tuple(exp)] = c
        object.__setattr__(self, "terms", clean)

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, c, n_vars: int = 1) -> "SparsePoly":
        return cls({(0,) * n_vars: Fraction(c)}, n_vars)

    @classmethod
    def variable(cls, i: int, n_vars: int = 1) -> "SparsePoly":
        exp = [0] * n_vars
        exp[i - 1] = 1
        return cls({tuple(exp): Fraction(1)}, n_vars)

    @classmethod
    def from_dense(cls, coeffs: Sequence) -> "SparsePoly":
        """Univariate polynomial from coefficients listed low degree first."""
        return cls({(k,): Fraction(c) for k, c in enumerate(coeffs) if c}, 1)

    @classmethod
    def monomial(cls, coeff, exp: Sequence[int]) -> "SparsePoly":
        return cls({tuple(exp): Fraction(coeff)}, len(exp))

    # queries -------------------------------------------------------------
    def term_count(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_univariate(self) -> bool:
        return self.n_vars == 1

    def dense(self) -> List[Fraction]:
        if self.n_vars != 1:
            raise ValueError("dense form needs a univariate polynomial")
        if not self.terms:
            return []
        out = [Fraction(0)] * (self.degree() + 1)
        for (k,), c in self.terms.items():
            out[k] = c
        return out

    def evaluate(self, point: Sequence) -> Fraction:
        pt = [Fraction(v) for v in point]
        total = Fraction(0)
        for exp, c in self.terms.items():
            v = c
            for x, k in zip(pt, exp):
                if k:
                    v *= x**k
            total += v
        return total

    # arithmetic ----------------------------------------------------------
    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, 0) + c
        return SparsePoly(out, self.n_vars)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly({e: -c for e, c in self.terms.items()}, self.n_vars)

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def mul(self, other: "SparsePoly", budget: Optional[Budget] = None) -> "SparsePoly":
        if budget and self.terms and other.terms:
            if self.degree() + other.degree() > budget.max_degree:
                raise BudgetExceeded("degree cap exceeded")
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
            if budget and len(out) > budget.max_terms * 4:
                raise BudgetExceeded("term cap exceeded")
        res = SparsePoly(out, self.n_vars)
        if budget and res.term_count() > budget.max_terms:
            raise BudgetExceeded("term cap exceeded")
        return res

    __mul__ = mul

    def pow(self, k: int, budget: Optional[Budget] = None) -> "SparsePoly":
        if k < 0:
            raise ValueError("negative exponent")
        if budget and self.terms and self.degree() * k > budget.max_degree:
            raise BudgetExceeded("degree cap exceeded")
        if len(self.terms) == 1:
            (exp, c), = self.terms.items()
            return SparsePoly({tuple(a * k for a in exp): c**k}, self.n_vars)
        result = SparsePoly.constant(1, self.n_vars)
        base = self
        while k:
            if k & 1:
                result = result.mul(base, budget)
            k >>= 1
            if k:
                base = base.mul(base, budget)
        return result

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, reverse=True):
            c = self.terms[exp]
            mono = "*".join(
                (f"x{i + 1}" if self.n_vars > 1 else "x") + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(exp)
                if k
            )
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def expand(e: Expression, budget: Optional[Budget] = None, root: Optional[int] = None) -> SparsePoly:
    """Expand one output of ``e`` into monomial form, within ``budget``."""
    budget = budget or Budget()
    n = e.n_vars
    target = e.root if root is None else root
    vals: Dict[int, SparsePoly] = {}
    needed = _reachable(e, target)
    for i, nd in enumerate(e.nodes):
        if i not in needed:
            continue
        kind = nd[0]
        if kind == CONST:
            vals[i] = SparsePoly.constant(nd[1], n)
        elif kind == VAR:
            vals[i] = SparsePoly.variable(nd[1], n)
        elif kind == ADD:
            s = vals[nd[1]] + vals[nd[2]]
            if s.term_count() > budget.max_terms:
                raise BudgetExceeded("term cap exceeded")
            vals[i] = s
        elif kind == MUL:
            vals[i] = vals[nd[1]].mul(vals[nd[2]], budget)
        else:
            vals[i] = vals[nd[1]].pow(nd[2], budget)
    return vals[target]


def expand_all(e: Expression, budget: Optional[Budget] = None) -> List[SparsePoly]:
    return [expand(e, budget, r) for r in e.roots]


def term_count(p: SparsePoly) -> int:
    return p.term_count()


def degree(p: SparsePoly) -> int:
    return p.degree()


def _reachable(e: Expression, root: int) -> set:
    seen = set()
    stack = [root]
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        nd = e.nodes[i]
        if nd[0] in (ADD, MUL):
            stack.extend((nd[1], nd[2]))
        elif nd[0] == POW:
            stack.append(nd[1])
    return seen
