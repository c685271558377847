"""Expression DSL, shared-subexpression graphs, and complexity measures.

An :class:`Expression` is a hash-consed DAG: structurally identical
subexpressions get one node id, so additions inside repeated subexpressions are
counted once by :func:`sigma_upper`.  Subtraction ``a - b`` is stored as
``Add(a, -1*b)`` with the sign folded into a constant factor where possible, and
constant-only subtrees are folded.

Grammar::

    expr     := term { ("+"|"-") term }
    term     := factor { "*" factor }
    factor   := base [ "^" nat ]
    base     := "(" expr ")" | var | rational
    var      := "x" [ nat ]          # "x" is "x1"
    rational := [ "-" ] nat [ "/" nat ]
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

# node kinds
CONST, VAR, ADD, MUL, POW = "const", "var", "add", "mul", "pow"

# constant powers are only folded while the result stays this small
_FOLD_BITS = 4096


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position
        self.text = text


class SLPError(ValueError):
    pass


Node = Tuple  # (CONST, Fraction) | (VAR, i) | (ADD, a, b) | (MUL, a, b) | (POW, a, k)


@dataclass(frozen=True)
class Expression:
    nodes: Tuple[Node, ...]
    roots: Tuple[int, ...]

    @property
    def n_vars(self) -> int:
        return max([nd[1] for nd in self.nodes if nd[0] == VAR], default=1)

    @property
    def root(self) -> int:
        if len(self.roots) != 1:
            raise ValueError("expression system has more than one output")
        return self.roots[0]

    def add_nodes(self) -> List[int]:
        return [i for i, nd in enumerate(self.nodes) if nd[0] == ADD]

    def has_integer_constants(self) -> bool:
        return all(nd[1].denominator == 1 for nd in self.nodes if nd[0] == CONST)

    def evaluate(self, point: Sequence) -> List[Fraction]:
        """Exact values of every root at ``point`` (one coordinate per variable)."""
        vals = self.node_values(point)
        return [vals[r] for r in self.roots]

    def node_values(self, point: Sequence) -> List[Fraction]:
        pt = [Fraction(v) for v in point]
        vals: List[Fraction] = []
        for nd in self.nodes:
            kind = nd[0]
            if kind == CONST:
                vals.append(nd[1])
            elif kind == VAR:
                vals.append(pt[nd[1] - 1])
            elif kind == ADD:
                vals.append(vals[nd[1]] + vals[nd[2]])
            elif kind == MUL:
                vals.append(vals[nd[1]] * vals[nd[2]])
            else:
                vals.append(vals[nd[1]] ** nd[2])
        return vals

    def render(self, root: Optional[int] = None) -> str:
        return render(self, root)

    def __str__(self) -> str:
        return "; ".join(render(self, r) for r in self.roots)


class Builder:
    """Hash-consing table for one parse session."""

    def __init__(self) -> None:
        self.nodes: List[Node] = []
        self.index: Dict[Node, int] = {}

    def _intern(self, node: Node) -> int:
        i = self.index.get(node)
        if i is None:
            i = len(self.nodes)
            self.nodes.append(node)
            self.index[node] = i
        return i

    def const(self, c) -> int:
        return self._intern((CONST, Fraction(c)))

    def var(self, i: int) -> int:
        if i < 1:
            raise ValueError("variable index must be >= 1")
        return self._intern((VAR, i))

    def _const_of(self, i: int) -> Optional[Fraction]:
        nd = self.nodes[i]
        return nd[1] if nd[0] == CONST else None

    def add(self, a: int, b: int) -> int:
        ca, cb = self._const_of(a), self._const_of(b)
        if ca is not None and cb is not None:
            return self.const(ca + cb)
        return self._intern((ADD, a, b))

    def mul(self, a: int, b: int) -> int:
        ca, cb = self._const_of(a), self._const_of(b)
        if ca is not None and cb is not None:
            return self.const(ca * cb)
        return self._intern((MUL, a, b))

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            raise ValueError("negative exponent")
        ca = self._const_of(a)
        if ca is not None and _small_power(ca, k):
            return self.const(ca**k)
        return self._intern((POW, a, k))

    def neg(self, a: int) -> int:
        nd = self.nodes[a]
        if nd[0] == CONST:
            return self.const(-nd[1])
        if nd[0] == MUL and self._leading_const(nd[1]):
            return self.mul(self.neg(nd[1]), nd[2])
        return self.mul(self.const(-1), a)

    def _leading_const(self, i: int) -> bool:
        nd = self.nodes[i]
        while nd[0] == MUL:
            nd = self.nodes[nd[1]]
        return nd[0] == CONST

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def finish(self, roots: Sequence[int]) -> Expression:
        """Keep reachable nodes only, numbered in left-to-right post-order.

        The numbering depends on structure alone, so equal graphs compare equal
        regardless of the order in which the session interned them.
        """
        remap: Dict[int, int] = {}
        out: List[Node] = []
        for r in roots:
            stack = [(r, False)]
            while stack:
                i, expanded = stack.pop()
                if i in remap:
                    continue
                nd = self.nodes[i]
                kids = (nd[1], nd[2]) if nd[0] in (ADD, MUL) else (nd[1],) if nd[0] == POW else ()
                if not expanded and any(k not in remap for k in kids):
                    stack.append((i, True))
                    stack.extend((k, False) for k in reversed(kids))
                    continue
                if nd[0] in (ADD, MUL):
                    nd = (nd[0], remap[nd[1]], remap[nd[2]])
                elif nd[0] == POW:
                    nd = (POW, remap[nd[1]], nd[2])
                remap[i] = len(out)
                out.append(nd)
        return Expression(tuple(out), tuple(remap[r] for r in roots))


def _small_power(c: Fraction, k: int) -> bool:
    if c in (0, 1, -1):
        return True
    bits = max(abs(c.numerator).bit_length(), c.denominator.bit_length())
    return bits * k <= _FOLD_BITS


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?)|(x)|([-+*/^()]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            j = pos
            while j < n and (text[j].isalnum() or text[j] in "_."):
                j += 1
            word = text[pos:j] or text[pos]
            if word[0].isalpha():
                raise ParseError(f"unknown identifier {word!r}", pos, text)
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            lit = m.group(1)
            if "." in lit:
                tokens.append(("dec", lit, start))
            else:
                tokens.append(("nat", int(lit), start))
        elif m.group(2) is not None:
            tokens.append(("x", None, start))
        else:
            tokens.append((m.group(3), None, start))
        pos = m.end()
    tokens.append(("eof", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str, builder: Builder):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.b = builder

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def expect(self, kind: str):
        t = self.peek()
        if t[0] != kind:
            self.fail(f"expected {kind!r}, found {t[0]!r}")
        return self.take()

    def parse(self) -> int:
        node = self.expr()
        if self.peek()[0] != "eof":
            self.fail(f"unexpected token {self.peek()[0]!r}")
        return node

    def expr(self) -> int:
        node = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            node = self.b.add(node, rhs) if op == "+" else self.b.sub(node, rhs)
        return node

    def term(self) -> int:
        node = self.factor()
        while self.peek()[0] == "*":
            self.take()
            node = self.b.mul(node, self.factor())
        return node

    def factor(self) -> int:
        base = self.base()
        if self.peek()[0] == "^":
            self.take()
            t = self.peek()
            if t[0] == "-":
                self.fail("negative exponent")
            if t[0] != "nat" or self.peek(1)[0] == "/":
                self.fail("exponent must be a nonnegative integer")
            self.take()
            return self.b.pow(base, t[1])
        return base

    def base(self) -> int:
        t = self.peek()
        if t[0] == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if t[0] == "x":
            self.take()
            nxt = self.peek()
            # "x12" is one token pair x,12 only when adjacent
            if nxt[0] == "nat" and nxt[2] == t[2] + 1:
                self.take()
                if nxt[1] < 1:
                    self.fail("variable index must be >= 1", nxt)
                return self.b.var(nxt[1])
            return self.b.var(1)
        if t[0] == "-" or t[0] == "nat":
            neg = False
            if t[0] == "-":
                self.take()
                neg = True
                if self.peek()[0] != "nat":
                    self.fail("expected a number after unary '-'")
            num = self.take()[1]
            den = 1
            if self.peek()[0] == "/":
                self.take()
                d = self.expect("nat")
                den = d[1]
                if den == 0:
                    self.fail("zero denominator", d)
            value = Fraction(num, den)
            return self.b.const(-value if neg else value)
        if t[0] == "dec":
            self.fail("decimal literals are not supported, write a fraction p/q")
        if t[0] == "eof":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {t[0]!r}")


def parse(text: str) -> Expression:
    b = Builder()
    root = _Parser(text, b).parse()
    return b.finish([root])


def parse_system(texts: Sequence[str]) -> Expression:
    """Parse several polynomials into one shared graph (a k-polynomial system)."""
    b = Builder()
    roots = [_Parser(t, b).parse() for t in texts]
    return b.finish(roots)


# ---------------------------------------------------------------------------
# rendering


def _render_const(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render(e: Expression, root: Optional[int] = None) -> str:
    """Faithful text for ``e``: reparsing yields the identical graph."""
    cache: Dict[int, str] = {}
    nodes = e.nodes

    def r(i: int) -> str:
        if i in cache:
            return cache[i]
        nd = nodes[i]
        kind = nd[0]
        if kind == CONST:
            s = _render_const(nd[1])
        elif kind == VAR:
            s = "x" if nd[1] == 1 and e.n_vars == 1 else f"x{nd[1]}"
        elif kind == ADD:
            # a right operand that is itself a sum must keep its grouping
            rhs = r(nd[2])
            if nodes[nd[2]][0] == ADD:
                rhs = f"({rhs})"
            s = f"{r(nd[1])} + {rhs}"
        elif kind == MUL:
            s = f"{_mul_operand(nd[1], False)}*{_mul_operand(nd[2], True)}"
        else:
            b = nodes[nd[1]]
            base = r(nd[1])
            if b[0] in (ADD, MUL, POW) or (b[0] == CONST and (b[1] < 0 or b[1].denominator != 1)):
                base = f"({base})"
            s = f"{base}^{nd[2]}"
        cache[i] = s
        return s

    def _mul_operand(i: int, right: bool) -> str:
        nd = nodes[i]
        s = r(i)
        if nd[0] == ADD or (right and nd[0] == MUL):
            return f"({s})"
        if nd[0] == CONST and nd[1].denominator != 1 and right:
            return f"({s})"
        return s

    return r(e.root if root is None else root)


# ---------------------------------------------------------------------------
# complexity


@dataclass(frozen=True)
class ComplexityReport:
    sigma_hat: int
    tau_hat: Optional[int]
    n_vars: int
    k_polys: int


def sigma_upper(e: Expression) -> int:
    """Number of distinct addition nodes in the shared graph."""
    return sum(1 for nd in e.nodes if nd[0] == ADD)


@dataclass(frozen=True)
class SLP:
    """``instructions[0]`` is 1, ``instructions[1]`` is x, later entries are
    ``("add"|"sub"|"mul", i, j)`` with ``i, j`` earlier indices."""

    instructions: Tuple[Tuple, ...]
    result: int

    @property
    def length(self) -> int:
        return len(self.instructions) - 2

    def evaluate(self, x) -> Fraction:
        vals: List[Fraction] = [Fraction(1), Fraction(x)]
        for op, i, j in self.instructions[2:]:
            a, b = vals[i], vals[j]
            vals.append(a + b if op == "add" else a - b if op == "sub" else a * b)
        return vals[self.result]


def to_slp(e: Expression) -> SLP:
    """Compile a univariate integer-constant expression into a straight-line program.

    Values are tracked as ``(index, sign)`` so that negated constants never cost
    an instruction unless the final result is negative.  Integer constants are
    built by doubling from the initial 1; powers by square-and-multiply.
    """
    if e.n_vars > 1:
        raise SLPError("straight-line programs are only built for univariate expressions")
    if not e.has_integer_constants():
        raise SLPError("straight-line programs need integer constants")
    prog: List[Tuple] = [("one",), ("var", 1)]

    # no instruction sharing beyond the node memo: every Add node owns exactly one
    # add/sub instruction, which keeps tau_hat >= sigma_hat
    def emit(op: str, i: int, j: int) -> int:
        prog.append((op, i, j))
        return len(prog) - 1

    const_idx: Dict[int, int] = {1: 0}
    zero: List[int] = []

    def nat(k: int) -> int:
        if k in const_idx:
            return const_idx[k]
        bits = bin(k)[3:]
        cur, val = 0, 1
        for bit in bits:
            val *= 2
            if val in const_idx:
                cur = const_idx[val]
            else:
                cur = emit("add", cur, cur)
                const_idx[val] = cur
            if bit == "1":
                val += 1
                if val in const_idx:
                    cur = const_idx[val]
                else:
                    cur = emit("add", cur, 0)
                    const_idx[val] = cur
        return cur

    def zero_idx() -> int:
        if not zero:
            zero.append(emit("sub", 0, 0))
        return zero[0]

    memo: Dict[int, Tuple[int, int]] = {}

    def comp(i: int) -> Tuple[int, int]:
        if i in memo:
            return memo[i]
        nd = e.nodes[i]
        kind = nd[0]
        if kind == CONST:
            c = int(nd[1])
            res = (zero_idx(), 1) if c == 0 else (nat(abs(c)), 1 if c > 0 else -1)
        elif kind == VAR:
            res = (1, 1)
        elif kind == MUL:
            a, b = nd[1], nd[2]
            ia, sa = comp(a)
            ib, sb = comp(b)
            if ia == 0:
                res = (ib, sa * sb)
            elif ib == 0:
                res = (ia, sa * sb)
            else:
                res = (emit("mul", ia, ib), sa * sb)
        elif kind == ADD:
            ia, sa = comp(nd[1])
            ib, sb = comp(nd[2])
            if sa == sb:
                res = (emit("add", ia, ib), sa)
            elif sa > 0:
                res = (emit("sub", ia, ib), 1)
            else:
                res = (emit("sub", ib, ia), 1)
        else:
            ia, sa = comp(nd[1])
            k = nd[2]
            if k == 0:
                res = (0, 1)
            else:
                cur = ia
                for bit in bin(k)[3:]:
                    cur = emit("mul", cur, cur)
                    if bit == "1":
                        cur = emit("mul", cur, ia)
                res = (cur, sa if k % 2 else 1)
        memo[i] = res
        return res

    idx, sign = comp(e.root)
    if sign < 0:
        idx = emit("sub", zero_idx(), idx)
    return SLP(tuple(prog), idx)


def tau_upper(e: Expression) -> int:
    return to_slp(e).length


def complexity(e: Expression) -> ComplexityReport:
    try:
        tau: Optional[int] = tau_upper(e) if len(e.roots) == 1 else None
    except SLPError:
        tau = None
    return ComplexityReport(sigma_upper(e), tau, e.n_vars, len(e.roots))
