import filecmp
from pathlib import Path

import pytest

from conftest import SENTENCE
from mlsubword.errors import ConfigError
from mlsubword.lexicon import read_lexicon
from mlsubword.pipeline import (FAILED, Cell, ExperimentConfig, ExperimentReport,
                                parse_config_text, render_report, run_experiment,
                                simulate_errors)
from mlsubword.syllabifier import MARKER, detokenize, tokenize_corpus

LM = [
    "കലമല കലവല മലകല", "മലകല വലകല", "കലമല വലമല കലവല", "കലമല മലവല",
    "വലകല കലമല", "മലവല കലവല", "വലമല വലമല", "അവൻ വള ഇടുകയില്ല",
    "കടൽ കലമല", "കടൽ മലകല", "പുലി", "പുലി കടൽ",
]
TRAIN = ["കലമല വള", "അവൻ കടൽ"]
TEST = ["മലവല കലവല", "വലമല അവൻ"]


@pytest.fixture
def toy(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    for name, lines in [("lm.txt", LM), ("train.txt", TRAIN), ("test.txt", TEST)]:
        (d / name).write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    cfg = ExperimentConfig(lm_corpus=d / "lm.txt", train_transcripts=d / "train.txt",
                           tests=[d / "test.txt"], orders=[2, 3], thresholds=[None, 2],
                           output_dir=tmp_path / "out")
    return cfg


def files(root: Path, pattern: str):
    return sorted(p for p in root.rglob(pattern) if p.is_file())


def test_grid_cells_and_shared_artifacts(toy):
    rep = run_experiment(toy)
    assert len(rep.cells) == 8 and not rep.failures
    out = toy.output_dir
    assert len(files(out, "lexicon-word-*.txt")) == 2
    assert len(files(out, "lexicon-syllable-*.txt")) == 2
    assert len(files(out, "tokens-*.txt")) == 2
    assert len(files(out, "lm-*.arpa")) == 8
    for cell in rep.cells:
        lex = read_lexicon(out / cell.lexicon_path)
        assert len(lex) == cell.lexicon_size
    assert (out / "report.tsv").exists() and (out / "report.md").exists()


def test_word_only_grid(toy):
    toy.modes = ["word"]
    rep = run_experiment(toy)
    assert {c.mode for c in rep.cells} == {"word"}
    assert not files(toy.output_dir, "*syllable*")


def test_missing_input_fails_before_work(toy):
    toy.tests = [toy.lm_corpus.parent / "nope.txt"]
    with pytest.raises(ConfigError):
        run_experiment(toy)
    assert not toy.output_dir.exists()


def test_output_dir_must_not_hold_inputs(toy):
    toy.output_dir = toy.lm_corpus.parent
    with pytest.raises(ConfigError):
        run_experiment(toy)


def test_reproducible(toy, tmp_path):
    run_experiment(toy)
    first = toy.output_dir
    toy.output_dir = tmp_path / "again"
    run_experiment(toy)
    a, b = files(first, "*"), files(toy.output_dir, "*")
    assert [p.relative_to(first) for p in a] == [p.relative_to(toy.output_dir) for p in b]
    assert all(filecmp.cmp(x, y, shallow=False) for x, y in zip(a, b))


def test_dedup_happens_before_thresholds(toy, tmp_path):
    # "മലവല കലവല" is a test line; repeating it in the LM text must not push
    # its words over the threshold
    lm = LM + ["ചെറുത് ഇലകൾ"] * 3 + TEST * 5
    toy.lm_corpus.write_text("".join(l + "\n" for l in lm), encoding="utf-8")
    toy.thresholds = [3]
    toy.modes = ["word"]
    rep = run_experiment(toy)
    lex = read_lexicon(toy.output_dir / rep.cells[0].lexicon_path)
    # the five copies of each test line plus one already in the LM text
    assert rep.dedup_removed == 11
    assert "ചെറുത്" in lex
    assert "വലമല" in lex  # 3 occurrences outside test lines
    assert "മലവല" not in lex  # 1 occurrence outside test lines


def test_failed_cells_are_marked(toy):
    toy.train_transcripts.write_text("", encoding="utf-8")
    rep = run_experiment(toy)
    assert len(rep.failures) == len(rep.cells) == 8
    md = render_report(rep, "markdown")
    assert FAILED in md and "[1] failed" in md


def test_render_order_and_empty():
    rep = ExperimentReport(["t"], [None, 5])
    assert render_report(rep, "tsv").count("\n") == 1
    rep.cells = [Cell("syllable", 5, 2, error="boom"), Cell("word", None, 3, error="x")]
    lines = render_report(rep, "tsv").splitlines()
    assert lines[1].startswith("word\tPL1\tnone\t3")
    assert lines[2].startswith("syllable\tPL2\t5\t2\t" + FAILED)
    assert lines[-1] == "# failed syllable/5/2: boom"


def test_config_parsing(tmp_path):
    text = """
    # comment
    lm_corpus = lm.txt
    train_transcripts = tr.txt
    tests = a.txt, b.txt
    orders = 2, 4
    thresholds = none, 3
    modes = syllable
    smoothing = add_k:0.5
    output_dir = out
    """
    (tmp_path / "c.cfg").write_text(text, encoding="utf-8")
    cfg = ExperimentConfig.from_file(tmp_path / "c.cfg")
    assert cfg.lm_corpus == tmp_path / "lm.txt"
    assert cfg.orders == [2, 4] and cfg.thresholds == [None, 3] and cfg.modes == ["syllable"]
    assert cfg.test_names == ["a", "b"]
    cfg = ExperimentConfig.from_pairs({"orders": "3"}, into=cfg)
    assert cfg.orders == [3]
    with pytest.raises(ConfigError):
        parse_config_text("orders 2")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_pairs({"colour": "blue"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_pairs({"thresholds": "0"})


def test_hypotheses_fill_wer(toy):
    hyp = toy.lm_corpus.parent / "hyp.txt"
    toks = list(tokenize_corpus(TEST, "syllable"))
    hyp.write_text("".join(t + "\n" for t in toks), encoding="utf-8")
    toy.syllable_hypotheses = [hyp]
    rep = run_experiment(toy)
    assert all(c.wer == {"test": 0.0} for c in rep.cells if c.mode == "syllable")
    assert all(c.wer == {} for c in rep.cells if c.mode == "word")


SYL = list(tokenize_corpus([SENTENCE, "കലമല മലവല", "വലകല"], "syllable"))


def test_simulate_deterministic_and_identity():
    a = simulate_errors(SYL, 0.3, seed=7, unit="syllable")
    assert a == simulate_errors(SYL, 0.3, seed=7, unit="syllable")
    assert simulate_errors(SYL, 0.0, seed=1, unit="syllable") == SYL


def test_simulate_keeps_marker_class():
    out = simulate_errors(SYL, 1.0, seed=3, unit="syllable")
    for before, after in zip(SYL, out):
        b, a = before.split(), after.split()
        assert len(a) == len(b)
        assert [t.endswith(MARKER) for t in a] == [t.endswith(MARKER) for t in b]
        assert all(x != y for x, y in zip(a, b))
        assert len(detokenize(a).split()) == len(detokenize(b).split())


def test_simulate_deletion_insertion_rates():
    lines = ["a b c d e f g h"] * 50
    dels = simulate_errors(lines, 0.0, seed=2, unit="word", deletion_rate=0.5)
    assert 0 < sum(len(l.split()) for l in dels) < 400
    ins = simulate_errors(lines, 0.0, seed=2, unit="word", insertion_rate=0.5)
    assert sum(len(l.split()) for l in ins) > 400


def test_simulate_lexicon_forcing():
    out = simulate_errors(["a b zz"], 0.0, seed=0, unit="word", lexicon=["a", "b"])
    assert out[0].split()[:2] == ["a", "b"] and out[0].split()[2] in {"a", "b"}
    with pytest.raises(ValueError):
        simulate_errors(["a"], 1.5, seed=0)
