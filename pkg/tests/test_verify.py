import pytest

from addbound.bounds import Global, Local
from addbound.verify import FAIL, PASS, Check, VerifyRecord, summarize, verify_corpus, verify_expression


def _check(rec, bound):
    return next(c for c in rec.checks if c.bound == bound)


def test_cubic_attains_sharpened_bound():
    rec = verify_expression("x*(x^2 - 1)", fields=(Local(2),))
    assert rec.verdict == PASS
    assert rec.sigma_hat == 1
    sh = _check(rec, "thm1_sharpened@Qp(p=2,e=1,f=1)")
    assert (sh.count, sh.floor) == (3, 3)
    assert sh.as_dict()["attained"] is True
    assert _check(rec, "thm1@Qp(p=2,e=1,f=1)").floor == 3


def test_global_field_checks():
    rec = verify_expression("(x - 1)*(x + 2)*(x^2 - 3)", fields=(Global(1, 1),))
    t2 = _check(rec, "thm2@NF(d=1,delta=1)")
    assert t2.count == 2 and t2.verdict == PASS
    lg = _check(rec, "lenstra_global@NF(d=1,delta=1)")
    assert lg.oracle == "Q*"


def test_extension_fields_are_skipped():
    rec = verify_expression("x^2 - 2", fields=(Local(2, 2, 1), Global(2, 1)))
    for c in rec.checks:
        if "e=2" in c.bound or "d=2" in c.bound:
            assert c.verdict.startswith("SKIPPED")
    assert rec.verdict == PASS  # the field-free checks still run


def test_zero_and_multivariate_records():
    z = verify_expression("x - x")
    assert z.verdict.startswith("SKIPPED") and z.note == "zero polynomial"
    mv = verify_expression("x1*x2 - 1")
    assert mv.note == "multivariate"
    bad = verify_expression("x +* 1")
    assert bad.note.startswith("parse error")


def test_fail_verdict_dominates():
    r = VerifyRecord("x")
    r.checks = [Check("a", "Q", 1, 2, PASS), Check("b", "Q", 5, 2, FAIL)]
    assert r.verdict == FAIL
    assert r.failures() == [r.checks[1]]
    s = summarize([r, verify_expression("x")])
    assert s["FAIL"] == 1 and s["PASS"] == 1 and s["checks"]["FAIL"] == 1


def test_parallel_matches_serial():
    texts = ["x*(x^2 - 1)", "(x^2 - 17)*(x + 1)", "3*x^10 + x^2 - 4", "x^4 - 1"]
    fields = (Local(2), Local(3), Global(1, 1))
    a = [r.to_json() for r in verify_corpus(texts, fields)]
    b = [r.to_json() for r in verify_corpus(texts, fields, jobs=2)]
    assert a == b
    assert all(r["verdict"] == PASS for r in a)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_trinomial_counts(p):
    rec = verify_expression("3*x^10 + x^2 - 4", fields=(Local(p),))
    assert rec.verdict == PASS
    if p == 2:
        assert rec.counts["Qp(2)"]["distinct"] == 6
