from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SEED = ROOT / "data" / "seed"

# the three words of the reference sentence and their expected tokens
SENTENCE_WORDS = ["അവൻ", "വള", "ഇടുകയില്ല"]
SENTENCE = " ".join(SENTENCE_WORDS)
SENTENCE_TOKENS = "അ+ വൻ വ+ ള ഇ+ ടു+ ക+ യി+ ല്ല"

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


def seed_lines(name):
    return (SEED / name).read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def seed_files():
    names = ["lm_corpus.txt", "train_transcripts.txt", "test_in_domain.txt", "test_out_of_domain.txt"]
    return {n: SEED / n for n in names}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[num]
        line = f"AC{num:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
