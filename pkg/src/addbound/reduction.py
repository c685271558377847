"""Triangular gate systems and their zero-pattern cases.

Every distinct Add node of an expression becomes one gate variable
X_{n+j} = c*M + d*M', where M and M' are monomials in the inputs and earlier
gates.  Outputs become single monomial equations.  A root of the expression
lifts to a root of the system by evaluating the gates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .bounds import SCHEMA
from .expansion import SparsePoly
from .expr import ADD, CONST, MUL, POW, VAR, Expression, render

MONOMIAL_OUTPUT = "MonomialOutput"
GATE_BINOMIAL = "GateBinomial"

# scaled coefficients beyond this many bits are refused rather than built
MAX_COEFF_BITS = 1 << 16


class ReductionError(ValueError):
    def __init__(self, message: str, node: Optional[int] = None):
        super().__init__(message if node is None else f"{message} (node {node})")
        self.node = node


# a monomial: coefficient and sparse exponent map {variable index: exponent}
Mono = Tuple[Fraction, Dict[int, int]]


@dataclass(frozen=True)
class PolySystem:
    n_inputs: int
    s: int
    k: int
    equations: Tuple[SparsePoly, ...]
    kinds: Tuple[str, ...]
    gate_nodes: Tuple[int, ...] = ()

    @property
    def n_total(self) -> int:
        return self.n_inputs + self.s

    def outputs(self) -> List[SparsePoly]:
        return [q for q, kd in zip(self.equations, self.kinds) if kd == MONOMIAL_OUTPUT]

    def gates(self) -> List[SparsePoly]:
        return [q for q, kd in zip(self.equations, self.kinds) if kd == GATE_BINOMIAL]

    def satisfied_by(self, point: Sequence) -> bool:
        return all(q.evaluate(point) == 0 for q in self.equations)

    def to_json(self, e: Optional[Expression] = None) -> dict:
        legend = {f"X{i}": f"x{i}" for i in range(1, self.n_inputs + 1)}
        for j, node in enumerate(self.gate_nodes, start=1):
            legend[f"X{self.n_inputs + j}"] = f"gate {j}" + (f": {render(e, node)}" if e is not None else "")
        eqs = []
        for q, kind in zip(self.equations, self.kinds):
            eqs.append(
                {
                    "kind": kind,
                    "terms": [
                        {"coeff": str(c), "exponents": list(exp)}
                        for exp, c in sorted(q.terms.items(), reverse=True)
                    ],
                }
            )
        return {
            "schema": SCHEMA,
            "n_inputs": self.n_inputs,
            "gates": self.s,
            "outputs": self.k,
            "variables": legend,
            "equations": eqs,
        }


@dataclass(frozen=True)
class ZeroPattern:
    """Variables in ``zero_set`` (1-based) vanish; X_{n+ell} is the last of them.

    ``epsilon[j-1]`` is 0 when gate j (j <= ell) is among the zeros, else 1.
    """

    zero_set: frozenset
    ell: int
    epsilon: Tuple[int, ...]

    def as_dict(self) -> dict:
        return {"zero_set": sorted(self.zero_set), "ell": self.ell, "epsilon": list(self.epsilon)}


def _mono_of(e: Expression, i: int, gate_of: Dict[int, int], cache: Dict[int, Mono]) -> Mono:
    """Write node ``i`` as c * prod X^k, treating Add nodes as gate variables."""
    if i in cache:
        return cache[i]
    nd = e.nodes[i]
    kind = nd[0]
    if kind == CONST:
        out: Mono = (nd[1], {})
    elif kind == VAR:
        out = (Fraction(1), {nd[1]: 1})
    elif kind == ADD:
        out = (Fraction(1), {gate_of[i]: 1})
    elif kind == MUL:
        c1, m1 = _mono_of(e, nd[1], gate_of, cache)
        c2, m2 = _mono_of(e, nd[2], gate_of, cache)
        m = dict(m1)
        for v, k in m2.items():
            m[v] = m.get(v, 0) + k
        out = (c1 * c2, m)
    elif kind == POW:
        c, m = _mono_of(e, nd[1], gate_of, cache)
        k = nd[2]
        bits = max(c.numerator.bit_length(), c.denominator.bit_length())
        if bits * k > MAX_COEFF_BITS:
            raise ReductionError("constant power too large for gate form", i)
        out = (c**k, {v: a * k for v, a in m.items()})
    else:
        raise ReductionError(f"unknown node kind {kind!r}", i)
    cache[i] = out
    return out


def _as_poly(mono: Mono, n_total: int) -> SparsePoly:
    c, m = mono
    exp = [0] * n_total
    for v, k in m.items():
        exp[v - 1] = k
    return SparsePoly({tuple(exp): c}, n_total)


def _gate_map(e: Expression) -> Tuple[int, Dict[int, int]]:
    n = e.n_vars
    reach = _reachable_all(e)
    adds = [i for i in e.add_nodes() if i in reach]
    return n, {node: n + j for j, node in enumerate(adds, start=1)}


def _reachable_all(e: Expression) -> set:
    seen = set()
    stack = list(e.roots)
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


def build_system(e: Expression) -> PolySystem:
    """The gate system G of ``e``: k output monomials, then s gate equations."""
    n, gate_of = _gate_map(e)
    s = len(gate_of)
    total = n + s
    cache: Dict[int, Mono] = {}
    equations: List[SparsePoly] = []
    kinds: List[str] = []
    for r in e.roots:
        # a bare gate output is wrapped as the degree-one monomial in that gate
        equations.append(_as_poly(_mono_of(e, r, gate_of, cache), total))
        kinds.append(MONOMIAL_OUTPUT)
    for node, var in gate_of.items():
        _, a, b = e.nodes[node]
        lhs = _as_poly((Fraction(1), {var: 1}), total)
        rhs = _as_poly(_mono_of(e, a, gate_of, cache), total) + _as_poly(_mono_of(e, b, gate_of, cache), total)
        if any(exp[var - 1 :] != (0,) * (total - var + 1) for exp in rhs.terms):
            raise ReductionError("gate depends on itself or a later gate", node)
        equations.append(lhs - rhs)
        kinds.append(GATE_BINOMIAL)
    return PolySystem(n, s, len(e.roots), tuple(equations), tuple(kinds), tuple(gate_of))


def lift_root(e: Expression, x: Sequence) -> Tuple[Fraction, ...]:
    """Extend a root ``x`` of every output of ``e`` by the gate values."""
    pt = [Fraction(v) for v in x]
    if len(pt) != e.n_vars:
        raise ReductionError(f"expected {e.n_vars} coordinates, got {len(pt)}")
    vals = e.node_values(pt)
    if any(vals[r] != 0 for r in e.roots):
        raise ReductionError("point is not a root of the expression")
    _, gate_of = _gate_map(e)
    return tuple(pt) + tuple(vals[node] for node in gate_of)


def back_solve(g: PolySystem, prefix: Sequence) -> Tuple[Fraction, ...]:
    """Complete X_1..X_j to a full point using gate equations j+1.. in order.

    Each gate equation reads X_v - rhs(X_1..X_{v-1}) = 0, so the remaining
    coordinates are determined one at a time.
    """
    pt = [Fraction(v) for v in prefix]
    n = g.n_inputs
    if len(pt) < n:
        raise ReductionError("prefix must contain every input coordinate")
    gates = g.gates()
    total = g.n_total
    while len(pt) < total:
        v = len(pt) + 1
        eq = gates[v - n - 1]
        trial = pt + [Fraction(0)] * (total - len(pt))
        # eq = X_v - rhs; at X_v = 0 it evaluates to -rhs
        pt.append(-eq.evaluate(trial))
    return tuple(pt)


def admissible_levels(g: PolySystem) -> range:
    """ell = 0 is the case where all inputs vanish; ell >= 1 ends at gate ell."""
    return range(0, g.s + 1)


def patterns_at_level(n: int, ell: int) -> Iterator[ZeroPattern]:
    last = n + ell
    for earlier in combinations(range(1, last), n - 1):
        zs = frozenset(earlier) | {last}
        eps = tuple(0 if n + j in zs else 1 for j in range(1, ell + 1))
        yield ZeroPattern(zs, ell, eps)


def enumerate_zero_patterns(g: PolySystem) -> Iterator[ZeroPattern]:
    for ell in admissible_levels(g):
        yield from patterns_at_level(g.n_inputs, ell)


def pattern_count(n: int, ell: int) -> int:
    return comb(n + ell - 1, n - 1)


def classify_point(g: PolySystem, point: Sequence) -> Optional[ZeroPattern]:
    """The pattern whose n-th zero coordinate (in index order) closes the prefix.

    ``None`` when fewer than n coordinates vanish.
    """
    n = g.n_inputs
    zeros = [i for i, v in enumerate(point, start=1) if v == 0]
    if len(zeros) < n:
        return None
    last = zeros[n - 1]
    ell = max(0, last - n)
    zs = frozenset(zeros[:n])
    eps = tuple(0 if n + j in zs else 1 for j in range(1, ell + 1))
    return ZeroPattern(zs, ell, eps)


def reduce_json(e: Expression) -> dict:
    g = build_system(e)
    out = g.to_json(e)
    out["patterns_per_level"] = {str(ell): pattern_count(g.n_inputs, ell) for ell in admissible_levels(g)}
    return out
