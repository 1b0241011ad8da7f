#!/usr/bin/env python3
"""Regenerate the seed corpus under data/seed/.

Needs ``mlmorph`` (and its ``sfst`` binding) in the running interpreter, plus
the lemma dump produced by ``dump_mlmorph_lemmas.cpp``. Neither is a
dependency of the package itself; the generated files are committed.

Sentences are drawn from a handful of verb-final templates. Lemmas are
sampled with Zipf-Mandelbrot weights and inflected by the mlmorph
generator, so every word form is one the morphology actually licenses.

usage: build_seed_corpus.py LEMMAS.tsv OUTDIR [--seed 2023]
"""

import argparse
import copy
import random
from collections import defaultdict
from pathlib import Path

from mlmorph import Generator

NOUN_TAGS = {
    "nom": "",
    "pl": "<pl>",
    "acc": "<accusative>",
    "dat": "<dative>",
    "gen": "<genitive>",
    "loc": "<locative>",
    "soc": "<sociative>",
    "pl_acc": "<pl><accusative>",
    "pl_dat": "<pl><dative>",
    "pl_gen": "<pl><genitive>",
    "pl_loc": "<pl><locative>",
}
VERB_TAGS = {
    "past": "<past>",
    "pres": "<present>",
    "fut": "<future>",
    "rp_past": "<adv-clause-rp-past>",
    "rp_pres": "<adv-clause-rp-present>",
    "cvb": "<cvb-adv-part-past>",
    "purp": "<purposive-mood>",
    "cond": "<conditional-mood>",
    "imp": "<imperative-mood>",
    "perf": "<simple-perfect-aspect>",
}

# slot = (pos, form); pos "fn:<tag>" draws an uninflected function word
TEMPLATES = [
    [("n", "nom"), ("n", "acc"), ("v", "past")],
    [("fn:prn", None), ("n", "loc"), ("v", "pres")],
    [("n", "gen"), ("n", "nom"), ("n", "dat"), ("n", "acc"), ("v", "fut")],
    [("n", "pl"), ("n", "loc"), ("v", "rp_past"), ("n", "acc"), ("v", "past")],
    [("fn:prn", None), ("n", "soc"), ("fn:cnj", None), ("n", "nom"), ("v", "past")],
    [("fn:adj", None), ("n", "nom"), ("n", "pl_loc"), ("v", "pres")],
    [("n", "nom"), ("n", "pl_acc"), ("v", "cvb"), ("n", "dat"), ("v", "perf")],
    [("fn:quantifier", None), ("n", "nom"), ("n", "pl_gen"), ("n", "loc"), ("v", "fut")],
    [("n", "dat"), ("v", "purp"), ("n", "nom"), ("v", "past")],
    [("n", "nom"), ("v", "cond"), ("fn:prn", None), ("n", "acc"), ("v", "imp")],
    [("fn:prn", None), ("n", "pl_dat"), ("n", "acc"), ("v", "rp_pres"), ("n", "nom"), ("v", "pres")],
    [("n", "gen"), ("n", "acc"), ("fn:prn", None), ("v", "past")],
]


class Inflector:
    def __init__(self):
        self.gen = Generator()
        self.cache = {}

    def form(self, lemma, tags):
        key = (lemma, tags)
        if key not in self.cache:
            out = self.gen.generate(lemma + tags, weighted=True) if tags else [(lemma, 0)]
            # lowest weight is the standard spelling
            out = sorted(out, key=lambda fw: (fw[1], fw[0]))
            self.cache[key] = out[0][0] if out else None
        return self.cache[key]


def zipf_weights(n, s=1.07, q=2.7):
    return [1.0 / (r + q) ** s for r in range(1, n + 1)]


def load_lemmas(path):
    pools = defaultdict(list)
    for line in open(path, encoding="utf-8"):
        lemma, tag = line.rstrip("\n").split("\t")
        pools[tag.strip("<>")].append(lemma)
    return pools


class SentenceSampler:
    def __init__(self, pools, rng, n_nouns, n_verbs, flat=1.0):
        self.rng = rng
        self.inflect = Inflector()
        nouns = [w for w in pools["n"] if 2 <= len(w) <= 12]
        verbs = [w for w in pools["v"] if w.endswith("ുക")]  # -uka citation form
        self.nouns = rng.sample(sorted(nouns), n_nouns)
        self.verbs = rng.sample(sorted(verbs), n_verbs)
        self.nw = [w ** flat for w in zipf_weights(n_nouns)]
        self.vw = [w ** flat for w in zipf_weights(n_verbs)]
        self.fn = {t: sorted(pools[t]) for t in ("prn", "cnj", "adj", "quantifier")}

    def flattened(self, flat, rng):
        other = copy.copy(self)
        other.rng = rng
        other.nw = [w ** flat for w in self.nw]
        other.vw = [w ** flat for w in self.vw]
        return other

    def word(self, pos, form):
        rng = self.rng
        for _ in range(20):
            if pos.startswith("fn:"):
                return rng.choice(self.fn[pos[3:]])
            if pos == "n":
                lemma = rng.choices(self.nouns, self.nw)[0]
                w = self.inflect.form(lemma, "<n>" + NOUN_TAGS[form] if form != "nom" else "")
            else:
                lemma = rng.choices(self.verbs, self.vw)[0]
                w = self.inflect.form(lemma, "<v>" + VERB_TAGS[form])
            if w and " " not in w:
                return w
        raise RuntimeError(f"no form for {pos}/{form}")

    def sentence(self):
        tpl = self.rng.choice(TEMPLATES)
        return " ".join(self.word(pos, form) for pos, form in tpl)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("lemmas")
    ap.add_argument("outdir")
    ap.add_argument("--seed", type=int, default=2023)
    ap.add_argument("--lm-sentences", type=int, default=12000)
    ap.add_argument("--train-sentences", type=int, default=3000)
    ap.add_argument("--test-sentences", type=int, default=400)
    args = ap.parse_args()

    pools = load_lemmas(args.lemmas)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    rng = random.Random(args.seed)
    main_dist = SentenceSampler(pools, rng, n_nouns=6000, n_verbs=900)
    lm = [main_dist.sentence() for _ in range(args.lm_sentences)]
    train = [main_dist.sentence() for _ in range(args.train_sentences)]
    test_in = [main_dist.sentence() for _ in range(args.test_sentences)]

    # out-of-domain: same lemma pool, much flatter frequency draw
    ood = main_dist.flattened(0.3, random.Random(args.seed + 1))
    test_out = [ood.sentence() for _ in range(args.test_sentences)]

    # a few test sentences leak into the LM text, as in web-scale corpora
    for s in rng.sample(test_in, 40) + rng.sample(test_out, 20):
        lm.insert(rng.randrange(len(lm) + 1), s)

    for name, lines in [("lm_corpus.txt", lm), ("train_transcripts.txt", train),
                        ("test_in_domain.txt", test_in), ("test_out_of_domain.txt", test_out)]:
        (out / name).write_text("".join(l + "\n" for l in lines), encoding="utf-8")
        print(name, len(lines))


if __name__ == "__main__":
    main()
