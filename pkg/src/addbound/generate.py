"""Seeded generator of gate-form expressions.

Each gate is a sum of two distinct signed monomials in the inputs and earlier
gates; the output is one monomial that uses every gate not consumed later, so
the requested gate count is the expression's σ̂ unless hash-consing merges two
gates (the generator redraws in that case).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .expansion import Budget, BudgetExceeded, expand
from .expr import Expression, parse, sigma_upper

MAX_REDRAWS = 64


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    sigma_target: int = 2
    max_exponent: int = 3
    coeff_bound: int = 5
    n_vars: int = 1
    max_degree: int = 12  # per gate, in the inputs
    output_degree: int = 36

    def __post_init__(self):
        if self.sigma_target < 0:
            raise ValueError("sigma_target must be nonnegative")
        for name in ("max_exponent", "coeff_bound", "n_vars", "max_degree", "output_degree"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class GeneratedCase:
    text: str
    expression: Expression
    sigma_hat: int
    collapsed: Optional[Tuple[int, ...]]  # gates whose expansion is a monomial; None if not checked


Mono = Dict[int, int]  # variable slot -> exponent; slots 1..n are inputs, n+j is gate j


class _Drawer:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng

    def coeff(self) -> int:
        b = self.cfg.coeff_bound
        c = self.rng.randint(1, b)
        return c if self.rng.random() < 0.5 else -c

    def monomial(self, slots: List[int], degs: Dict[int, int], cap: int) -> Mono:
        m: Mono = {}
        budget = cap
        for v in slots:
            if self.rng.random() < 0.5:
                continue
            top = min(self.cfg.max_exponent, budget // max(degs[v], 1))
            if top < 1:
                continue
            k = self.rng.randint(1, top)
            m[v] = k
            budget -= k * degs[v]
        return m


def _degree(m: Mono, degs: Dict[int, int]) -> int:
    return sum(k * degs[v] for v, k in m.items())


def _render_mono(c: int, m: Mono, names: Dict[int, str]) -> str:
    parts = [str(c)]
    for v in sorted(m):
        k = m[v]
        parts.append(names[v] + (f"^{k}" if k > 1 else ""))
    return "*".join(parts)


def _draw_one(cfg: GenConfig, rng: random.Random) -> str:
    n = cfg.n_vars
    names: Dict[int, str] = {i: ("x" if n == 1 else f"x{i}") for i in range(1, n + 1)}
    degs: Dict[int, int] = {i: 1 for i in range(1, n + 1)}
    draw = _Drawer(cfg, rng)
    unused: List[int] = []
    seen = set()
    for j in range(1, cfg.sigma_target + 1):
        slot = n + j
        slots = list(range(1, slot))
        for _ in range(MAX_REDRAWS):
            m1 = draw.monomial(slots, degs, cfg.max_degree)
            m2 = draw.monomial(slots, degs, cfg.max_degree)
            # prefer consuming a pending gate so the output stays small
            if unused and not any(v in unused for v in list(m1) + list(m2)):
                g = rng.choice(unused)
                if degs[g] + _degree(m1, degs) <= cfg.max_degree:
                    m1[g] = 1
            if m1 == m2 or (not m1 and not m2):
                continue
            c, d = draw.coeff(), draw.coeff()
            key = (tuple(sorted(m1.items())), c, tuple(sorted(m2.items())), d)
            if key in seen:
                continue
            seen.add(key)
            break
        else:
            # deterministic fallback: x + const keeps the gate well formed
            m1, m2, c, d = {1: 1}, {}, 1, j
        body = f"({_render_mono(c, m1, names)} + {_render_mono(d, m2, names)})"
        names[slot] = body
        degs[slot] = max(_degree(m1, degs), _degree(m2, degs), 1)
        unused = [u for u in unused if u not in m1 and u not in m2]
        unused.append(slot)
    # output monomial: every pending gate, plus random input powers
    out: Mono = {g: 1 for g in unused}
    room = cfg.output_degree - _degree(out, degs)
    for v in range(1, n + 1):
        if room > 0 and rng.random() < 0.6:
            k = rng.randint(1, min(cfg.max_exponent, room))
            out[v] = k
            room -= k
    for g in unused:
        if room >= degs[g] and rng.random() < 0.3:
            out[g] += 1
            room -= degs[g]
    return _render_mono(draw.coeff(), out, names)


def collapsed_gates(e: Expression, budget: Optional[Budget] = None) -> Optional[Tuple[int, ...]]:
    try:
        return tuple(
            j
            for j, node in enumerate(e.add_nodes(), start=1)
            if expand(e, budget, root=node).term_count() <= 1
        )
    except BudgetExceeded:
        return None


def generate(cfg: GenConfig, count: int, budget: Optional[Budget] = None) -> Iterator[GeneratedCase]:
    """``count`` expressions; identical configs give identical sequences."""
    rng = random.Random(cfg.seed)
    budget = budget or Budget(max_terms=20000, max_degree=10**4)
    produced = 0
    while produced < count:
        for _ in range(MAX_REDRAWS):
            text = _draw_one(cfg, rng)
            e = parse(text)
            if sigma_upper(e) == cfg.sigma_target:
                break
        produced += 1
        yield GeneratedCase(text, e, sigma_upper(e), collapsed_gates(e, budget))


def write_corpus(cases, path: str, header: str = "") -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for case in cases:
            fh.write(case.text + "\n")
            n += 1
    return n


def read_corpus(path: str) -> List[str]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(line)
    return out
