"""End-to-end check of every univariate bound against the exact root counters."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import bounds as bd
from .bounds import Global, Local
from .expansion import Budget, BudgetExceeded, expand
from .expr import Expression, ParseError, complexity, parse
from .generate import collapsed_gates
from .numeric import DEFAULT_PRECISION
from .oracles import (
    RootCountResult,
    count_integer_roots,
    count_padic_roots,
    count_rational_roots,
    count_real_roots,
)

PASS, FAIL = "PASS", "FAIL"


def skipped(reason: str) -> str:
    return f"SKIPPED({reason})"


@dataclass(frozen=True)
class Check:
    bound: str
    oracle: str
    count: Optional[int]
    floor: Optional[int]
    verdict: str

    def as_dict(self) -> dict:
        out = {"bound": self.bound, "oracle": self.oracle, "count": self.count, "floor": self.floor, "verdict": self.verdict}
        if self.verdict == PASS and self.count == self.floor:
            out["attained"] = True
        return out


@dataclass
class VerifyRecord:
    expression: str
    sigma_hat: Optional[int] = None
    tau_hat: Optional[int] = None
    m: Optional[int] = None
    counts: Dict[str, dict] = field(default_factory=dict)
    floors: Dict[str, int] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    note: Optional[str] = None
    collapsed: Tuple[int, ...] = ()  # gates whose expansion is a single monomial

    @property
    def verdict(self) -> str:
        vs = [c.verdict for c in self.checks]
        if FAIL in vs:
            return FAIL
        if PASS in vs:
            return PASS
        return skipped(self.note or "no checks")

    def failures(self) -> List[Check]:
        return [c for c in self.checks if c.verdict == FAIL]

    def to_json(self) -> dict:
        out = {
            "expression": self.expression,
            "sigma_hat": self.sigma_hat,
            "tau_hat": self.tau_hat,
            "m": self.m,
            "counts": self.counts,
            "floors": self.floors,
            "checks": [c.as_dict() for c in self.checks],
            "verdict": self.verdict,
        }
        if self.collapsed:
            out["collapsed_gates"] = list(self.collapsed)
        if self.note:
            out["note"] = self.note
        return out


# cached floors ------------------------------------------------------------


@lru_cache(maxsize=None)
def _thm1(p: int, d: int, sigma: int, precision: int) -> int:
    return bd.thm1_bound(p, d, sigma, precision).integer_value


@lru_cache(maxsize=None)
def _sharpened(spec: Local, sigma: int, precision: int) -> int:
    # the exact trinomial value is used where it is known (Q_2)
    return bd.thm1_sharpened(spec, sigma, b3="exact", precision=precision).integer_value


@lru_cache(maxsize=None)
def _thm2(d: int, delta: int, sigma: int, precision: int) -> int:
    return bd.thm2_bound(d, delta, sigma, precision).integer_value


@lru_cache(maxsize=None)
def _lenstra_local(spec: Local, m: int, precision: int) -> int:
    return bd.lenstra_local(spec, m, precision).integer_value


@lru_cache(maxsize=None)
def _lenstra_global(spec: Global, m: int, precision: int) -> int:
    return bd.lenstra_global(spec, m, precision).integer_value


@lru_cache(maxsize=None)
def _abstract(sigma: int) -> int:
    return bd.abstract_report(sigma).integer_value


# ---------------------------------------------------------------------------


Field = Union[Local, Global]


def _oracle_name(spec: Field) -> Optional[str]:
    if isinstance(spec, Local):
        return f"Qp({spec.p})" if spec.d == 1 else None
    return "Q" if spec.d == 1 and spec.delta == 1 else None


def _check(bound: str, oracle: str, count: Optional[int], floor: int, reason: Optional[str] = None) -> Check:
    if count is None:
        return Check(bound, oracle, None, floor, skipped(reason or "no count"))
    return Check(bound, oracle, count, floor, PASS if count <= floor else FAIL)


def verify_expression(
    text: str,
    fields: Sequence[Field] = (Local(2),),
    precision: int = DEFAULT_PRECISION,
    budget: Optional[Budget] = None,
) -> VerifyRecord:
    rec = VerifyRecord(text)
    try:
        e = parse(text)
    except ParseError as exc:
        rec.note = f"parse error: {exc}"
        return rec
    return verify_parsed(e, text, fields, precision, budget, rec)


def verify_parsed(
    e: Expression,
    text: str,
    fields: Sequence[Field],
    precision: int = DEFAULT_PRECISION,
    budget: Optional[Budget] = None,
    rec: Optional[VerifyRecord] = None,
) -> VerifyRecord:
    rec = rec or VerifyRecord(text)
    cx = complexity(e)
    sigma = rec.sigma_hat = cx.sigma_hat
    rec.tau_hat = cx.tau_hat
    if cx.n_vars != 1 or cx.k_polys != 1:
        rec.note = "multivariate"
        return rec
    reason = ""
    try:
        f = expand(e, budget)
    except BudgetExceeded:
        f = None
        reason = "budget"
    if f is not None and f.is_zero():
        f, reason = None, "zero polynomial"
    if f is not None:
        rec.m = f.term_count()
        rec.collapsed = collapsed_gates(e, budget) or ()

    counts: Dict[str, Optional[RootCountResult]] = {}

    def count(name: str, fn, *args) -> Tuple[Optional[RootCountResult], str]:
        if f is None:
            return None, reason
        if name not in counts:
            try:
                counts[name] = fn(f, *args)
            except BudgetExceeded:
                counts[name] = None
        res = counts[name]
        return res, "budget"

    def distinct(res):
        return None if res is None else res.distinct

    def nonzero_mult(res):
        return None if res is None else res.nonzero_with_multiplicity

    for spec in fields:
        oname = _oracle_name(spec)
        if isinstance(spec, Local):
            tag = spec.describe()
            fl = rec.floors[f"thm1@{tag}"] = _thm1(spec.p, spec.d, sigma, precision)
            sh = rec.floors[f"thm1_sharpened@{tag}"] = _sharpened(spec, sigma, precision)
            if oname is None:
                for b, v in ((f"thm1@{tag}", fl), (f"thm1_sharpened@{tag}", sh)):
                    rec.checks.append(Check(b, tag, None, v, skipped("no oracle for extensions")))
                continue
            res, why = count(oname, count_padic_roots, spec.p)
            rec.checks.append(_check(f"thm1@{tag}", oname, distinct(res), fl, why))
            rec.checks.append(_check(f"thm1_sharpened@{tag}", oname, distinct(res), sh, why))
            if rec.m is not None:
                ll = rec.floors[f"lenstra_local@{tag}"] = _lenstra_local(spec, rec.m, precision)
                rec.checks.append(_check(f"lenstra_local@{tag}", oname + "*", nonzero_mult(res), ll, why))
        else:
            tag = spec.describe()
            t2 = rec.floors[f"thm2@{tag}"] = _thm2(spec.d, spec.delta, sigma, precision)
            if oname is None:
                rec.checks.append(Check(f"thm2@{tag}", tag, None, t2, skipped("no oracle for degree > 1")))
                continue
            res, why = count("Q", count_rational_roots)
            rec.checks.append(_check(f"thm2@{tag}", "Q", distinct(res), t2, why))
            if rec.m is not None:
                lg = rec.floors[f"lenstra_global@{tag}"] = _lenstra_global(spec, rec.m, precision)
                rec.checks.append(_check(f"lenstra_global@{tag}", "Q*", nonzero_mult(res), lg, why))

    res, why = count("Q", count_rational_roots)
    ab = rec.floors["abstract"] = _abstract(sigma)
    rec.checks.append(_check("abstract", "Q", distinct(res), ab, why))
    res, why = count("R", count_real_roots)
    ri = rec.floors["risler"] = bd.risler_real(sigma)
    rec.checks.append(_check("risler", "R", distinct(res), ri, why))
    if rec.tau_hat is not None:
        tb = rec.floors["tau"] = bd.tau_trivial_bound(rec.tau_hat)
        res, why = count("Z", count_integer_roots)
        rec.checks.append(_check("tau", "Z", distinct(res), tb, why))
    else:
        rec.checks.append(Check("tau", "Z", None, None, skipped("tau undefined")))

    rec.counts = {k: (v.to_json() if v is not None else None) for k, v in sorted(counts.items())}
    if f is None:
        rec.note = reason
    return rec


def _worker(args):
    text, fields, precision, budget = args
    return verify_expression(text, fields, precision, budget)


def verify_corpus(
    texts: Sequence[str],
    fields: Sequence[Field] = (Local(2),),
    precision: int = DEFAULT_PRECISION,
    budget: Optional[Budget] = None,
    jobs: int = 1,
) -> List[VerifyRecord]:
    """Records in input order; ``jobs > 1`` spreads the work over processes."""
    if jobs <= 1:
        return [verify_expression(t, fields, precision, budget) for t in texts]
    work = [(t, tuple(fields), precision, budget) for t in texts]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_worker, work, chunksize=max(1, len(work) // (4 * jobs))))


def summarize(records: Sequence[VerifyRecord]) -> dict:
    tally = {"records": len(records), "PASS": 0, "FAIL": 0, "SKIPPED": 0}
    checks = {"PASS": 0, "FAIL": 0, "SKIPPED": 0}
    for r in records:
        v = r.verdict
        tally["SKIPPED" if v.startswith("SKIPPED") else v] += 1
        for c in r.checks:
            checks["SKIPPED" if c.verdict.startswith("SKIPPED") else c.verdict] += 1
    tally["checks"] = checks
    return tally
