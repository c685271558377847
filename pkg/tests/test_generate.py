import pytest

from addbound.expr import complexity, parse
from addbound.generate import GenConfig, collapsed_gates, generate, read_corpus, write_corpus


@pytest.mark.parametrize("sigma", [0, 1, 2, 3, 4])
def test_sigma_hat_hits_target(sigma):
    for case in generate(GenConfig(seed=sigma, sigma_target=sigma), 50):
        assert case.sigma_hat == sigma
        assert complexity(parse(case.text)).sigma_hat == sigma


def test_same_config_same_sequence():
    cfg = GenConfig(seed=123, sigma_target=3)
    a = [c.text for c in generate(cfg, 40)]
    b = [c.text for c in generate(cfg, 40)]
    assert a == b
    c = [c.text for c in generate(GenConfig(seed=124, sigma_target=3), 40)]
    assert a != c


def test_multivariate_generation():
    for case in generate(GenConfig(seed=3, sigma_target=2, n_vars=3), 20):
        assert complexity(case.expression).n_vars <= 3
        assert case.sigma_hat == 2


def test_bad_config():
    with pytest.raises(ValueError):
        GenConfig(sigma_target=-1)
    with pytest.raises(ValueError):
        GenConfig(coeff_bound=0)


def test_collapsed_gate_detection():
    e = parse("x*((x + 1)^2 - x^2 - 2*x)")
    assert collapsed_gates(e) == (3,)
    assert collapsed_gates(parse("x*(x^2 - 1)")) == ()


def test_corpus_round_trip(tmp_path):
    cases = list(generate(GenConfig(seed=9, sigma_target=2), 10))
    path = tmp_path / "corpus.txt"
    assert write_corpus(cases, str(path), header="seed 9\nsigma 2") == 10
    text = path.read_text(encoding="utf-8")
    assert text.startswith("# seed 9\n# sigma 2\n")
    assert read_corpus(str(path)) == [c.text for c in cases]


def test_read_corpus_skips_comments(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("# header\n\nx^2 - 1  # trailing\n  x*(x+1)\n", encoding="utf-8")
    assert read_corpus(str(path)) == ["x^2 - 1", "x*(x+1)"]
