"""Command-line front end.

Exit codes: 0 ok, 1 configuration/usage error, 2 data error,
3 experiment grid finished with failed cells.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import ngram_lm
from .errors import ConfigError, MlsubwordError
from .evaluation import (FrequencyTable, dedup_corpus, frequency_profile, oov_rate,
                         score_corpus)
from .lexicon import (PhoneTable, Rejection, build_word_lexicon, derive_syllable_lexicon,
                      read_lexicon, verify_pronunciation_consistency, write_lexicon)
from .pipeline import ExperimentConfig, render_report, run_experiment, simulate_errors
from .syllabifier import Diagnostics, decode_lines, read_encoded_lines, tokenize_corpus

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _lines(path, diag=None) -> list[str]:
    return list(decode_lines(path, diag))


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


def _report_diagnostics(diag: Diagnostics, path=None):
    if path:
        _write_lines(path, [str(d) for d in diag])
    if len(diag):
        kinds = sorted({d.kind for d in diag})
        summary = ", ".join(f"{k}={diag.count(k)}" for k in kinds)
        print(f"diagnostics: {summary}", file=sys.stderr)


def cmd_tokenize(args):
    diag = Diagnostics()
    out = tokenize_corpus(read_encoded_lines(args.input), args.mode, diagnostics=diag)
    _write_lines(args.output, out)
    _report_diagnostics(diag, args.diagnostics)
    return EXIT_OK


def _phones(args):
    return PhoneTable.from_file(args.phones) if args.phones else None


def _rejections(rejected: list[Rejection]):
    for r in rejected:
        print(f"rejected\t{r.token}\t{r.reason}", file=sys.stderr)


def cmd_lexicon_build(args):
    base = FrequencyTable.from_lines(_lines(args.base)).keys()
    freqs = FrequencyTable.from_lines(_lines(args.corpus)) if args.corpus else {}
    if args.min_count is not None and not args.corpus:
        raise ConfigError("--min-count needs --corpus")
    rejected: list[Rejection] = []
    lex = build_word_lexicon(base, freqs, args.min_count, _phones(args), rejected)
    write_lexicon(lex, args.output)
    _rejections(rejected)
    print(f"{len(lex)} entries", file=sys.stderr)
    return EXIT_OK


def cmd_lexicon_derive(args):
    rejected: list[Rejection] = []
    words = read_lexicon(args.word_lexicon)
    lex = derive_syllable_lexicon(words, _phones(args), rejected)
    write_lexicon(lex, args.output)
    _rejections(rejected)
    print(f"{len(lex)} entries", file=sys.stderr)
    return EXIT_OK


def cmd_lexicon_verify(args):
    rep = verify_pronunciation_consistency(read_lexicon(args.word_lexicon),
                                           read_lexicon(args.syllable_lexicon))
    for v in rep.violations:
        missing = f"\tmissing={','.join(v.missing_tokens)}" if v.missing_tokens else ""
        print(f"{v.word}\t{' '.join(v.word_phones)}\t{' '.join(v.syllable_phones)}{missing}")
    print(f"checked={rep.checked} violations={len(rep.violations)} skipped={len(rep.skipped)}",
          file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_DATA


def _cutoffs(items):
    out = {}
    for item in items or []:
        k, sep, c = item.partition("=")
        if not sep:
            raise ConfigError(f"bad cutoff {item!r}, expected ORDER=COUNT")
        out[int(k)] = int(c)
    return out


def cmd_lm_train(args):
    try:
        smoothing = ngram_lm.parse_smoothing(args.smoothing)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    counts = ngram_lm.count_ngrams(_lines(args.input), args.order)
    model = ngram_lm.estimate_model(counts, smoothing, _cutoffs(args.cutoff))
    ngram_lm.write_arpa(model, args.output)
    fp = ngram_lm.model_footprint(model)
    sizes = " ".join(f"{k}-grams={c}" for k, c in fp.ngram_counts.items())
    print(f"{sizes} bytes={fp.byte_size}", file=sys.stderr)
    return EXIT_OK


def cmd_lm_ppl(args):
    model = ngram_lm.read_arpa(args.model)
    lines = _lines(args.input)
    total, n = ngram_lm.corpus_logprob(model, lines)
    ppl = ngram_lm.perplexity(model, lines)
    print(f"logprob={total:.4f} predictions={n} ppl={ppl:.4f}")
    return EXIT_OK


def cmd_score(args):
    rep = score_corpus(_lines(args.ref), _lines(args.hyp), subword=args.subword)
    print(f"wer={rep.wer:.6f} percent={100 * rep.wer:.2f} I={rep.I} D={rep.D} S={rep.S} N={rep.N}")
    return EXIT_OK


def cmd_oov(args):
    lex = read_lexicon(args.lexicon)
    rep = oov_rate(lex, _lines(args.test), unit=args.unit, by=args.by)
    print(f"unit={rep.unit} by={rep.count_by} lexicon_size={rep.lexicon_size} "
          f"test_{rep.count_by}s={rep.test_tokens} oov={rep.oov_tokens} oov_rate={rep.oov_rate:.6f}")
    return EXIT_OK


def cmd_profile(args):
    prof = frequency_profile(_lines(args.input))
    with open(args.output, "w", encoding="utf-8", newline="\n") as f:
        prof.write(f)
    print(f"types={len(prof.table)} tokens={prof.table.total}", file=sys.stderr)
    return EXIT_OK


def cmd_dedup(args):
    res = dedup_corpus(_lines(args.corpus), _lines(args.test))
    _write_lines(args.output, res.lines)
    print(f"removed={res.removed} kept={len(res.lines)}", file=sys.stderr)
    return EXIT_OK


def cmd_experiment_run(args):
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
    else:
        cfg = ExperimentConfig()
    flags = {k: getattr(args, k) for k in ExperimentConfig.KEYS if getattr(args, k, None) is not None}
    cfg = ExperimentConfig.from_pairs(flags, Path("."), into=cfg)
    report = run_experiment(cfg)
    sys.stdout.write(render_report(report, args.format))
    for d in report.diagnostics:
        print(d, file=sys.stderr)
    return EXIT_PARTIAL if report.failures else EXIT_OK


def cmd_simulate(args):
    vocab = None
    if args.vocab:
        vocab = [line.split("\t")[0].split()[0] for line in _lines(args.vocab) if line.strip()]
    lex = None
    if args.lexicon:
        lex = read_lexicon(args.lexicon).tokens
    out = simulate_errors(_lines(args.input), args.rate, args.seed, args.unit,
                          args.deletion_rate, args.insertion_rate, vocab, lex)
    _write_lines(args.output, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mlsubword", description="Malayalam syllable subword toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tokenize", help="word or syllable tokenization of a text file")
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--out", dest="output", required=True)
    t.add_argument("--mode", choices=["word", "syllable"], default="syllable")
    t.add_argument("--diagnostics", help="write per-item diagnostics here")
    t.set_defaults(func=cmd_tokenize)

    lx = sub.add_parser("lexicon", help="pronunciation lexicons")
    lsub = lx.add_subparsers(dest="lexicon_command", required=True, parser_class=_Parser)
    b = lsub.add_parser("build", help="word lexicon from base words plus frequent corpus words")
    b.add_argument("--base", required=True, help="text whose words form the base vocabulary")
    b.add_argument("--corpus", help="text supplying extra words")
    b.add_argument("--min-count", type=int)
    b.add_argument("--phones", help="phone table (default: bundled)")
    b.add_argument("--out", dest="output", required=True)
    b.set_defaults(func=cmd_lexicon_build)
    d = lsub.add_parser("derive", help="syllable lexicon from a word lexicon")
    d.add_argument("--word-lexicon", required=True)
    d.add_argument("--phones")
    d.add_argument("--out", dest="output", required=True)
    d.set_defaults(func=cmd_lexicon_derive)
    v = lsub.add_parser("verify", help="check word vs syllable pronunciations")
    v.add_argument("--word-lexicon", required=True)
    v.add_argument("--syllable-lexicon", required=True)
    v.set_defaults(func=cmd_lexicon_verify)

    lm = sub.add_parser("lm", help="n-gram language models")
    lmsub = lm.add_subparsers(dest="lm_command", required=True, parser_class=_Parser)
    tr = lmsub.add_parser("train")
    tr.add_argument("--order", type=int, required=True)
    tr.add_argument("--smoothing", default="witten_bell", help="witten_bell or add_k:K")
    tr.add_argument("--cutoff", action="append", metavar="ORDER=COUNT",
                    help="drop n-grams of ORDER seen fewer than COUNT times")
    tr.add_argument("--in", dest="input", required=True)
    tr.add_argument("--out", dest="output", required=True)
    tr.set_defaults(func=cmd_lm_train)
    pp = lmsub.add_parser("ppl")
    pp.add_argument("--model", required=True)
    pp.add_argument("--in", dest="input", required=True)
    pp.set_defaults(func=cmd_lm_ppl)

    s = sub.add_parser("score", help="WER of a hypothesis file against a reference file")
    s.add_argument("--ref", required=True)
    s.add_argument("--hyp", required=True)
    s.add_argument("--subword", action="store_true", help="hypothesis holds '+'-marked tokens")
    s.set_defaults(func=cmd_score)

    o = sub.add_parser("oov", help="OOV rate of a test text against a lexicon")
    o.add_argument("--lexicon", required=True)
    o.add_argument("--test", required=True)
    o.add_argument("--unit", choices=["word", "syllable"], default="word")
    o.add_argument("--by", choices=["token", "type"], default="token")
    o.set_defaults(func=cmd_oov)

    pr = sub.add_parser("profile", help="rank/frequency/coverage table")
    pr.add_argument("--in", dest="input", required=True)
    pr.add_argument("--out", dest="output", required=True)
    pr.set_defaults(func=cmd_profile)

    dd = sub.add_parser("dedup", help="remove test sentences from an LM corpus")
    dd.add_argument("--corpus", required=True)
    dd.add_argument("--test", required=True)
    dd.add_argument("--out", dest="output", required=True)
    dd.set_defaults(func=cmd_dedup)

    ex = sub.add_parser("experiment", help="run the lexicon/LM grid")
    exsub = ex.add_subparsers(dest="experiment_command", required=True, parser_class=_Parser)
    run = exsub.add_parser("run")
    run.add_argument("--config")
    for key in ExperimentConfig.KEYS:
        run.add_argument("--" + key.replace("_", "-"), dest=key, help="overrides the config file")
    run.add_argument("--format", choices=["tsv", "markdown"], default="tsv")
    run.set_defaults(func=cmd_experiment_run)

    se = sub.add_parser("simulate-errors", help="seeded token corruption for WER experiments")
    se.add_argument("--rate", type=float, required=True, help="substitution probability per token")
    se.add_argument("--deletion-rate", type=float, default=0.0)
    se.add_argument("--insertion-rate", type=float, default=0.0)
    se.add_argument("--unit", choices=["word", "syllable"], required=True)
    se.add_argument("--seed", type=int, required=True)
    se.add_argument("--vocab", help="replacement tokens (first column); default: input tokens")
    se.add_argument("--lexicon", help="force tokens outside this lexicon to be substituted")
    se.add_argument("--in", dest="input", required=True)
    se.add_argument("--out", dest="output", required=True)
    se.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MlsubwordError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
