"""Command-line interface: analyze, bounds, count, reduce, gen, verify.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from . import bounds as bd
from .bounds import SCHEMA, BoundError, Global, Local
from .expansion import Budget, BudgetExceeded, expand
from .expr import ParseError, SLPError, complexity, parse, parse_system
from .generate import GenConfig, generate, read_corpus
from .numeric import DEFAULT_PRECISION, NumericError
from .oracles import DepthExceeded, OracleError, count_in_field
from .reduction import ReductionError, reduce_json
from .verify import FAIL, summarize, verify_corpus, verify_parsed

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

INPUT_ERRORS = (
    ParseError,
    SLPError,
    BoundError,
    NumericError,
    OracleError,
    ReductionError,
    BudgetExceeded,
    DepthExceeded,
    OverflowError,
    ValueError,
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def parse_kv(items: Sequence[str]) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for item in items:
        for part in item.split(","):
            if not part:
                continue
            if "=" not in part:
                raise UsageError(f"expected key=value, got {part!r}")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _int(kv: Dict[str, str], key: str, default: Optional[int] = None) -> int:
    if key not in kv:
        if default is None:
            raise UsageError(f"missing parameter {key}=")
        return default
    try:
        return int(kv[key])
    except ValueError:
        raise UsageError(f"parameter {key} must be an integer, got {kv[key]!r}") from None


def _int_list(kv: Dict[str, str], key: str) -> List[int]:
    if key not in kv:
        raise UsageError(f"missing parameter {key}=")
    try:
        return [int(t) for t in kv[key].replace(";", ":").split(":") if t]
    except ValueError:
        raise UsageError(f"parameter {key} must be a ':'-separated integer list") from None


def parse_field(text: str):
    """``qp:p=2[,e=1,f=1]``, ``nf:d=1,delta=1``, or one of R, Q, Z."""
    t = text.strip()
    if t.upper() in ("R", "Q", "Z"):
        return t.upper()
    kind, _, rest = t.partition(":")
    kv = parse_kv([rest])
    kind = kind.lower()
    if kind == "qp":
        unknown = set(kv) - {"p", "e", "f"}
        if unknown:
            raise UsageError(f"unknown local-field parameters {sorted(unknown)}")
        return Local(_int(kv, "p"), _int(kv, "e", 1), _int(kv, "f", 1))
    if kind == "nf":
        unknown = set(kv) - {"d", "delta"}
        if unknown:
            raise UsageError(f"unknown number-field parameters {sorted(unknown)}")
        return Global(_int(kv, "d", 1), _int(kv, "delta", 1))
    raise UsageError(f"unknown field {text!r}")


def _fields(args, allow_plain=False, default=None):
    specs = [parse_field(t) for t in (args.field or [])]
    if not specs and default is not None:
        specs = [default]
    if not allow_plain and any(isinstance(s, str) for s in specs):
        raise UsageError("this command needs qp:... or nf:... fields")
    return specs


def _budget(args) -> Budget:
    return Budget(max_terms=args.budget_terms)


def _emit(args, payload: dict, text: Callable[[], str]) -> None:
    if args.json:
        payload = {"schema": SCHEMA, **payload}
        sys.stdout.write(json.dumps(payload, sort_keys=False, default=str) + "\n")
    else:
        sys.stdout.write(text().rstrip("\n") + "\n")


def _table(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    cells = [list(map(str, header))] + [[("" if c is None else str(c)) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    e = parse(args.expr)
    cx = complexity(e)
    fields = _fields(args, default=Local(2))
    payload: dict = {
        "command": "analyze",
        "expression": str(e),
        "sigma_hat": cx.sigma_hat,
        "tau_hat": cx.tau_hat,
        "n_vars": cx.n_vars,
        "k_polys": cx.k_polys,
    }
    rec = None
    if cx.n_vars == 1 and cx.k_polys == 1:
        try:
            f = expand(e, _budget(args))
            payload["terms"] = f.term_count()
            payload["degree"] = f.degree()
        except BudgetExceeded:
            payload["terms"] = None
        rec = verify_parsed(e, args.expr, fields, args.precision, _budget(args))
        payload["record"] = rec.to_json()

    def text() -> str:
        out = [f"expression  {payload['expression']}", f"sigma_hat   {cx.sigma_hat}", f"tau_hat     {cx.tau_hat}"]
        if "terms" in payload:
            out.append(f"terms       {payload['terms']}   degree {payload.get('degree')}")
        if rec is not None:
            rows = [(c.bound, c.oracle, c.count, c.floor, c.verdict) for c in rec.checks]
            out += ["", _table(rows, ("bound", "oracle", "count", "floor", "verdict")), "", f"verdict {rec.verdict}"]
        return "\n".join(out)

    _emit(args, payload, text)
    return EXIT_FAIL if rec is not None and rec.verdict == FAIL else EXIT_OK


def _local_from(kv) -> Local:
    return Local(_int(kv, "p"), _int(kv, "e", 1), _int(kv, "f", 1))


def _global_from(kv) -> Global:
    return Global(_int(kv, "d", 1), _int(kv, "delta", 1))


def _bound_thm1(kv, prec):
    return bd.thm1_bound(_int(kv, "p"), _int(kv, "d", 1), _int(kv, "sigma"), prec)


def _bound_thm2(kv, prec):
    return bd.thm2_bound(_int(kv, "d", 1), _int(kv, "delta", 1), _int(kv, "sigma"), prec)


def _bound_sharpened(kv, prec):
    b3 = kv.get("b3")
    if b3 is not None and b3 != "exact":
        try:
            b3 = Fraction(b3)
        except ValueError:
            raise UsageError("b3 must be a number or 'exact'") from None
    return bd.thm1_sharpened(_local_from(kv), _int(kv, "sigma"), b3, prec)


def _bound_thm3(kv, prec):
    n, sigma = _int(kv, "n"), _int(kv, "sigma")
    variant = kv.get("variant", "statement")
    terms = kv.get("terms", "amd")
    if "p" in kv:
        return bd.thm3_local(n, sigma, _local_from(kv), variant=variant, terms=terms, precision=prec)
    return bd.thm3_global(n, sigma, _global_from(kv), variant=variant, terms=terms, precision=prec)


def _bound_lenstra(kv, prec):
    m = _int(kv, "m")
    if "p" in kv:
        return bd.lenstra_local(_local_from(kv), m, prec)
    return bd.lenstra_global(_global_from(kv), m, prec)


def _bound_amd(kv, prec):
    m, N = _int_list(kv, "m"), _int_list(kv, "N")
    if "p" in kv:
        return bd.amd_local_B(_local_from(kv), m, N, prec)
    return bd.amd_global_A(_global_from(kv), m, N, prec)


def _bound_unity(kv, prec):
    return bd.roots_of_unity_bound(_local_from(kv))


def _bound_risler(kv, prec):
    return bd.risler_report(_int(kv, "sigma"))


def _bound_abstract(kv, prec):
    return bd.abstract_report(_int(kv, "sigma"))


def _bound_tau(kv, prec):
    return bd.tau_report(_int(kv, "tau"))


BOUND_FLAGS = {
    "thm1": (_bound_thm1, "main local bound: p= d= sigma="),
    "thm2": (_bound_thm2, "number-field bound: d= delta= sigma="),
    "sharpened": (_bound_sharpened, "roots-of-unity sharpening: p= [e= f=] sigma= [b3=]"),
    "thm3": (_bound_thm3, "system bound: n= sigma= and p=[,e=,f=] or d=,delta= [variant= terms=]"),
    "lenstra": (_bound_lenstra, "m-nomial bound: m= and p=[,e=,f=] or d=,delta="),
    "amd": (_bound_amd, "sparse-system bound: m=a:b N=c:d and p= or d=,delta="),
    "unity": (_bound_unity, "roots of unity in a local field: p= [e= f=]"),
    "risler": (_bound_risler, "real-root bound: sigma="),
    "abstract": (_bound_abstract, "rational-root formula: sigma="),
    "tau": (_bound_tau, "integer roots from straight-line length: tau="),
}


def cmd_bounds(args) -> int:
    reports = []
    tower = None
    for name, (fn, _) in BOUND_FLAGS.items():
        for items in getattr(args, name) or []:
            reports.append(fn(parse_kv(items), args.precision))
    for items in args.tower or []:
        kv = parse_kv(items)
        try:
            K = Fraction(kv.get("K", "1"))
        except ValueError:
            raise UsageError("K must be a rational number") from None
        tower = bd.borodin_cook_tower(_int(kv, "sigma"), K)
    if not reports and tower is None:
        raise UsageError("bounds needs at least one bound flag")
    payload = {"command": "bounds", "bounds": [r.to_json() for r in reports]}
    if tower is not None:
        payload["tower"] = {
            "sigma": tower.sigma,
            "symbolic": tower.symbolic,
            "digits": tower.digits,
            "value": None if tower.value is None else str(tower.value),
        }

    def text() -> str:
        rows = [(r.name, json.dumps(r.inputs, default=str), r.real_upper(), r.integer_value) for r in reports]
        out = _table(rows, ("bound", "inputs", "real upper", "floor")) if rows else ""
        if tower is not None:
            shown = "refused (too large)" if tower.value is None else str(tower.value)
            out += f"\ntower sigma={tower.sigma}: {tower.symbolic} = {shown}"
        return out

    _emit(args, payload, text)
    return EXIT_OK


def cmd_count(args) -> int:
    e = parse(args.expr)
    f = expand(e, _budget(args))
    if f.n_vars != 1:
        raise UsageError("count needs a univariate expression")
    specs = _fields(args, allow_plain=True, default="Q")
    results = []
    for spec in specs:
        if isinstance(spec, Local):
            if spec.d != 1:
                raise UsageError("root counting is available over Q_p itself only (e=f=1)")
            name = f"Qp({spec.p})"
        elif isinstance(spec, Global):
            if spec.d != 1 or spec.delta != 1:
                raise UsageError("root counting over number fields needs d=delta=1")
            name = "Q"
        else:
            name = spec
        results.append(count_in_field(f, name))
    payload = {"command": "count", "expression": str(e), "results": [r.to_json() for r in results]}

    def text() -> str:
        rows = [(r.field, r.distinct, r.with_multiplicity, r.zero_multiplicity) for r in results]
        return _table(rows, ("field", "distinct", "with multiplicity", "zero multiplicity"))

    _emit(args, payload, text)
    return EXIT_OK


def cmd_reduce(args) -> int:
    exprs = args.expr
    e = parse(exprs[0]) if len(exprs) == 1 else parse_system(exprs)
    payload = {"command": "reduce", **{k: v for k, v in reduce_json(e).items() if k != "schema"}}

    def text() -> str:
        out = [f"{k} = {v}" for k, v in payload["variables"].items()]
        for eq in payload["equations"]:
            terms = " + ".join(
                f"{t['coeff']}*" + "*".join(f"X{i + 1}^{k}" for i, k in enumerate(t["exponents"]) if k) if any(t["exponents"]) else t["coeff"]
                for t in eq["terms"]
            )
            out.append(f"[{eq['kind']}] {terms} = 0")
        return "\n".join(out)

    _emit(args, payload, text)
    return EXIT_OK


def _gen_config(kv: Dict[str, str], seed: Optional[int]) -> GenConfig:
    defaults = GenConfig()
    return GenConfig(
        seed=_int(kv, "seed", seed if seed is not None else defaults.seed),
        sigma_target=_int(kv, "sigma", defaults.sigma_target),
        max_exponent=_int(kv, "max_exponent", defaults.max_exponent),
        coeff_bound=_int(kv, "coeff_bound", defaults.coeff_bound),
        n_vars=_int(kv, "n_vars", defaults.n_vars),
        max_degree=_int(kv, "max_degree", defaults.max_degree),
        output_degree=_int(kv, "output_degree", defaults.output_degree),
    )


def _gen_texts(kv: Dict[str, str], seed: Optional[int], budget: Budget) -> List[str]:
    count = _int(kv, "count", 100)
    if "sigma" in kv and ":" in kv["sigma"]:
        lo, hi = (int(t) for t in kv["sigma"].split(":"))
        texts = []
        for s in range(lo, hi + 1):
            sub = dict(kv, sigma=str(s))
            texts += [c.text for c in generate(_gen_config(sub, seed), count, budget)]
        return texts
    return [c.text for c in generate(_gen_config(kv, seed), count, budget)]


def cmd_gen(args) -> int:
    kv = parse_kv(args.params)
    texts = _gen_texts(kv, args.seed, _budget(args))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(f"# generated with {' '.join(args.params)}\n")
            for t in texts:
                fh.write(t + "\n")
    payload = {"command": "gen", "count": len(texts), "output": args.output}
    if not args.output:
        payload["expressions"] = texts
    _emit(args, payload, lambda: (f"wrote {len(texts)} expressions to {args.output}" if args.output else "\n".join(texts)))
    return EXIT_OK


def cmd_verify(args) -> int:
    texts: List[str] = []
    if args.corpus:
        texts += read_corpus(args.corpus)
    if args.gen is not None:
        texts += _gen_texts(parse_kv(args.gen), args.seed, _budget(args))
    if not texts:
        raise UsageError("verify needs a corpus file or --gen parameters")
    fields = _fields(args, default=Local(2))
    records = verify_corpus(texts, fields, args.precision, _budget(args), jobs=args.jobs)
    summary = summarize(records)
    payload = {"command": "verify", "summary": summary}
    if not args.summary_only:
        payload["records"] = [r.to_json() for r in records]

    def text() -> str:
        out = []
        if not args.summary_only:
            rows = [(i + 1, r.sigma_hat, r.m, r.verdict, r.expression[:60]) for i, r in enumerate(records)]
            out.append(_table(rows, ("#", "sigma", "m", "verdict", "expression")))
            for i, r in enumerate(records):
                for c in r.failures():
                    out.append(f"FAIL #{i + 1}: {c.bound} count {c.count} > floor {c.floor}")
        out.append(
            f"records {summary['records']}: PASS {summary['PASS']}  FAIL {summary['FAIL']}  SKIPPED {summary['SKIPPED']}"
        )
        return "\n".join(out)

    _emit(args, payload, text)
    return EXIT_FAIL if summary["FAIL"] else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--json", action="store_true", default=d(False), help="emit JSON")
    p.add_argument("--precision", type=int, default=d(DEFAULT_PRECISION), help="significand bits for real bounds")
    p.add_argument("--budget-terms", type=int, default=d(10**6), help="term cap for expansions")
    p.add_argument("--seed", type=int, default=d(None), help="generator seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="addbound", description="Root-count bounds from additive complexity.")
    _add_globals(parser, suppress=False)
    glob = argparse.ArgumentParser(add_help=False)
    _add_globals(glob, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    field_help = "qp:p=<prime>[,e=<int>,f=<int>] or nf:d=<int>,delta=<int>"

    p = sub.add_parser("analyze", parents=[glob], help="complexity, bounds and root counts of one expression")
    p.add_argument("expr")
    p.add_argument("--field", action="append", help=field_help)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bounds", parents=[glob], help="evaluate bound formulas")
    for name, (_, helptext) in BOUND_FLAGS.items():
        p.add_argument(f"--{name}", nargs="*", action="append", metavar="KEY=VALUE", help=helptext)
    p.add_argument("--tower", nargs="*", action="append", metavar="KEY=VALUE", help="tower bound: sigma= K=")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("count", parents=[glob], help="exact root counts")
    p.add_argument("expr")
    p.add_argument("--field", action="append", help=field_help + ", or R, Q, Z")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("reduce", parents=[glob], help="emit the gate system as JSON")
    p.add_argument("expr", nargs="+")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", parents=[glob], help="generate a corpus")
    p.add_argument("params", nargs="*", metavar="KEY=VALUE", help="seed= sigma= count= max_exponent= coeff_bound= n_vars=")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[glob], help="check bounds against oracle counts")
    p.add_argument("corpus", nargs="?")
    p.add_argument("--gen", nargs="*", metavar="KEY=VALUE")
    p.add_argument("--field", action="append", help=field_help)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--summary-only", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def _diagnostic(args, exc: BaseException) -> None:
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["position"] = exc.position
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps({"schema": SCHEMA, "error": err}) + "\n")
    else:
        sys.stderr.write(f"error: {err['message']}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _diagnostic(args, exc)
        return EXIT_USAGE
    except INPUT_ERRORS as exc:
        _diagnostic(args, exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
