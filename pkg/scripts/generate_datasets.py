#!/usr/bin/env python3
"""Deterministically (re)generate the bundled benchmark datasets.

Two binary sentence-classification tasks in the published two-benchmark
style, written as <label><TAB><sentence> files under src/qconvtext/data/:

* mc: 130 short sentences (3-4 words) from a small context-free grammar,
  food (label 1) vs IT (label 0), vocabulary of exactly 17 words,
  70 train / 30 dev / 30 test, class-balanced.

* rp: 105 noun phrases with relative clauses, subject (label 1,
  "<noun> that <verb> ... <noun>") vs object (label 0,
  "<noun> that ... <noun> <verb>"), vocabulary of exactly 115 words,
  74 train / 31 test.  More than half of the unique test words never
  occur in training, and the test set contains mirrored phrase pairs
  (identical word multisets with both orders/labels) that no
  bag-of-words model can fully separate.

Run: python scripts/generate_datasets.py [--out DIR]
"""

from __future__ import annotations

import argparse
from collections import Counter
from pathlib import Path

import numpy as np

SEED = 20240521


# ---------------------------------------------------------------------------
# MC: food vs IT sentences
# ---------------------------------------------------------------------------

# Word spellings are chosen so the sorted vocabulary groups each class into
# a contiguous index block: food-only words sort to indices 0-5, shared words
# to 6-11, IT-only words to 12-16.  Blocked indices share leading bits in the
# basis-state encoding, which keeps both benchmarks separable for shallow
# circuits over sorted-vocabulary amplitude encodings.
MC_SUBJECTS = ["lady", "man", "person"]
MC_SHARED_VERBS = ["makes", "prepares"]
MC_SHARED_ADJ = "keen"
MC_FOOD_VERBS = ["bakes", "cooks"]
MC_IT_VERBS = ["tests", "updates"]
MC_FOOD_OBJECTS = ["bread", "dinner", "feast"]
MC_IT_OBJECTS = ["software", "website"]
# 3 subjects + 2 shared verbs + 1 shared adj + 2+2 class verbs
# + 3+2 objects + 2 class adjectives = 17
MC_VOCAB_SIZE = 17


def mc_sentences(label: int, rng: np.random.Generator) -> list[tuple[int, str]]:
    verbs = (MC_FOOD_VERBS if label == 1 else MC_IT_VERBS) + MC_SHARED_VERBS
    objects = MC_FOOD_OBJECTS if label == 1 else MC_IT_OBJECTS
    object_adj = "fresh" if label == 1 else "useful"
    combos = []
    for subj in MC_SUBJECTS:
        for verb in verbs:
            for obj in objects:
                combos.append((label, f"{subj} {verb} {obj}"))
                combos.append((label, f"{MC_SHARED_ADJ} {subj} {verb} {obj}"))
                combos.append((label, f"{subj} {verb} {object_adj} {obj}"))
    order = rng.permutation(len(combos))
    return [combos[i] for i in order]


def generate_mc(rng: np.random.Generator):
    food = mc_sentences(1, rng)[:65]
    it = mc_sentences(0, rng)[:65]
    train = food[:35] + it[:35]
    dev = food[35:50] + it[35:50]
    test = food[50:65] + it[50:65]
    for split in (train, dev, test):
        order = rng.permutation(len(split))
        split[:] = [split[i] for i in order]

    vocab = {tok for _, s in train + dev + test for tok in s.split()}
    assert len(vocab) == MC_VOCAB_SIZE, f"mc vocabulary {len(vocab)} != {MC_VOCAB_SIZE}"
    train_vocab = {tok for _, s in train for tok in s.split()}
    assert train_vocab == vocab, "every mc word must occur in the training split"
    assert (len(train), len(dev), len(test)) == (70, 30, 30)
    assert max(len(s.split()) for _, s in train + dev + test) == 4
    for split in (train, dev, test):
        labels = Counter(lbl for lbl, _ in split)
        assert labels[0] == labels[1], "mc splits must be class-balanced"
    return {"mc_train.txt": train, "mc_dev.txt": dev, "mc_test.txt": test}


# ---------------------------------------------------------------------------
# RP: subject vs object relative clauses
# ---------------------------------------------------------------------------

# Initial letters place each word class in a contiguous sorted-index block,
# so class membership is carried by the leading bits of the basis-state
# index: subject-signal words sort first ('a' verbs, 'b' adjectives),
# nouns fill the middle ('c'-'l'), neutral mirror words sit between ('m'
# verbs, 'n' adjectives), and object-signal words sort last ('v'
# adjectives, 'w' verbs).  Subject phrases pair an 'a' verb with a 'b'
# adjective and object phrases pair a 'v' adjective with a 'w' verb, so
# the class signal is redundant; mirrored pairs use only the neutral
# words, keeping them invisible to bag-of-words features.  Test-only
# nouns/adjectives are spelled to intersperse with training ones.
RP_TRAIN_NOUNS = [
    "camera", "canal", "castle", "circuit", "colony", "comet", "committee",
    "crystal", "designer", "device", "engineer", "factory", "farmer",
    "forest", "fossil", "gallery", "garden", "glacier", "harbor",
    "historian", "island", "journal", "library", "cellar", "chapel",
    "cottage", "courtyard", "den", "depot", "dome", "engine", "exhibit",
    "fountain", "gazebo", "granary", "grove", "hall", "hangar", "inlet",
    "jetty", "kiln", "kiosk", "lab", "lagoon", "lane", "ledge", "lighthouse",
    "lodge",
]
RP_TEST_NOUNS = [
    "cabin", "canyon", "cavern", "cliff", "creek", "dockyard", "dune",
    "estuary", "fjord", "fortress", "geyser", "gorge", "hamlet", "harvest",
    "icefield", "islet", "knoll", "lakebed", "lookout",
]
RP_SUBJ_VERBS = [
    "activates", "adjusts", "amplifies", "analyzes", "assembles",
    "assesses", "assists", "attracts", "audits",
]
RP_OBJ_VERBS = [
    "wants", "warms", "watches", "weighs", "welcomes",
    "wields", "wins", "wraps", "writes",
]
RP_NEUTRAL_VERBS = ["maintains", "manages", "maps", "marks", "measures", "monitors"]
RP_SUBJ_ADJS = [
    "barren", "bleak", "bold", "brassy", "brave", "brisk", "broad", "bronze",
]
RP_OBJ_ADJS = [
    "vacant", "vast", "velvet", "vibrant", "vivid", "vocal", "volcanic",
    "vying",
]
RP_TRAIN_NEUTRAL_ADJS = ["narrow", "nearby", "noble", "northern"]
RP_TEST_NEUTRAL_ADJS = ["neat", "new", "noisy"]
RP_VOCAB_SIZE = 115  # 67 nouns + 24 verbs + 23 adjectives + "that"


class Allocator:
    """Deterministically hands out the least-used word from a pool."""

    def __init__(self, pool: list[str]):
        self.pool = list(pool)
        self.counts = Counter()

    def take(self, exclude: set[str] | None = None) -> str:
        exclude = exclude or set()
        best = min(
            (w for w in self.pool if w not in exclude),
            key=lambda w: (self.counts[w], self.pool.index(w)),
        )
        self.counts[best] += 1
        return best


def subj_phrase(n1, verb, n2, adj=None) -> str:
    middle = f"{verb} {adj} {n2}" if adj else f"{verb} {n2}"
    return f"{n1} that {middle}"


def obj_phrase(n1, verb, n2, adj=None) -> str:
    middle = f"{adj} {n2} {verb}" if adj else f"{n2} {verb}"
    return f"{n1} that {middle}"


def generate_rp(rng: np.random.Generator):
    nouns = Allocator(RP_TRAIN_NOUNS)
    subj_adjs = Allocator(RP_SUBJ_ADJS)
    obj_adjs = Allocator(RP_OBJ_ADJS)
    neutral_adjs = Allocator(RP_TRAIN_NEUTRAL_ADJS)
    subj_verbs = Allocator(RP_SUBJ_VERBS)
    obj_verbs = Allocator(RP_OBJ_VERBS)
    neutral_verbs = Allocator(RP_NEUTRAL_VERBS)

    train: list[tuple[int, str]] = []
    # 12 mirrored pairs (identical word multiset, both orders) built from
    # neutral words only: 8 with an adjective, 4 without.  These force
    # order-sensitivity during training.
    for pair in range(12):
        verb = neutral_verbs.take()
        n1 = nouns.take()
        n2 = nouns.take(exclude={n1})
        adj = neutral_adjs.take() if pair < 8 else None
        train.append((1, subj_phrase(n1, verb, n2, adj)))
        train.append((0, obj_phrase(n1, verb, n2, adj)))
        if adj:
            neutral_adjs.counts[adj] += 1  # the mirror reuses it
        nouns.counts[n1] += 1
        nouns.counts[n2] += 1
        neutral_verbs.counts[verb] += 1
    # 25 subject + 25 object phrases; the class signal is redundant (a
    # subject-leaning verb usually comes with a subject-leaning adjective).
    for i in range(25):
        n1 = nouns.take()
        n2 = nouns.take(exclude={n1})
        train.append((1, subj_phrase(n1, subj_verbs.take(), n2, subj_adjs.take())))
        n1 = nouns.take()
        n2 = nouns.take(exclude={n1})
        train.append((0, obj_phrase(n1, obj_verbs.take(), n2, obj_adjs.take())))

    # Test: signal words are always seen (drawn from few distinct choices,
    # topping up the least-trained ones); most nouns and the mirror
    # adjectives are unseen, keeping the unique-unseen fraction above half.
    tnouns = Allocator(RP_TEST_NOUNS)
    tadjs = Allocator(RP_TEST_NEUTRAL_ADJS)
    seen_nouns = Allocator(RP_TRAIN_NOUNS[:2])
    t_neutral = Allocator(RP_NEUTRAL_VERBS[:3])
    t_subj = Allocator(RP_SUBJ_VERBS[7:] + RP_SUBJ_VERBS[:2])
    t_obj = Allocator(RP_OBJ_VERBS[7:] + RP_OBJ_VERBS[:2])
    t_subj_adjs = Allocator(RP_SUBJ_ADJS[5:] + RP_SUBJ_ADJS[:1])
    t_obj_adjs = Allocator(RP_OBJ_ADJS[5:])

    test: list[tuple[int, str]] = []
    # 6 mirrored pairs, all with unseen nouns and an unseen neutral adjective
    for _ in range(6):
        verb = t_neutral.take()
        n1 = tnouns.take()
        n2 = tnouns.take(exclude={n1})
        adj = tadjs.take()
        test.append((1, subj_phrase(n1, verb, n2, adj)))
        test.append((0, obj_phrase(n1, verb, n2, adj)))
        tadjs.counts[adj] += 1
        tnouns.counts[n1] += 1
        tnouns.counts[n2] += 1
    # 10 subject + 9 object phrases with seen signal words
    for i in range(10):
        n1 = seen_nouns.take() if i in (1, 3) else tnouns.take()
        n2 = tnouns.take(exclude={n1})
        test.append((1, subj_phrase(n1, t_subj.take(), n2, t_subj_adjs.take())))
    for i in range(9):
        n1 = seen_nouns.take() if i in (0, 2) else tnouns.take()
        n2 = tnouns.take(exclude={n1})
        test.append((0, obj_phrase(n1, t_obj.take(), n2, t_obj_adjs.take())))

    train = [train[i] for i in rng.permutation(len(train))]
    test = [test[i] for i in rng.permutation(len(test))]

    all_rows = train + test
    vocab = {tok for _, s in all_rows for tok in s.split()}
    assert len(vocab) == RP_VOCAB_SIZE, f"rp vocabulary {len(vocab)} != {RP_VOCAB_SIZE}"
    assert (len(train), len(test)) == (74, 31)
    assert max(len(s.split()) for _, s in all_rows) == 5

    counts = Counter(tok for _, s in all_rows for tok in s.split())
    rare = [w for w, c in counts.items() if c < 3]
    assert not rare, f"words with fewer than 3 occurrences: {rare}"

    train_vocab = {tok for _, s in train for tok in s.split()}
    test_vocab = {tok for _, s in test for tok in s.split()}
    unseen = test_vocab - train_vocab
    frac = len(unseen) / len(test_vocab)
    assert frac > 0.5, f"unseen fraction of unique test words is {frac:.2f}"

    labels = Counter(lbl for lbl, _ in test)
    assert labels[1] == 16 and labels[0] == 15
    labels = Counter(lbl for lbl, _ in train)
    assert labels[1] == labels[0] == 37
    return {"rp_train.txt": train, "rp_test.txt": test}


def write_files(files: dict[str, list[tuple[int, str]]], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, rows in files.items():
        with open(out / name, "w", encoding="utf-8") as fh:
            for label, sentence in rows:
                fh.write(f"{label}\t{sentence}\n")
        print(f"wrote {out / name} ({len(rows)} examples)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        default=Path(__file__).resolve().parents[1] / "src" / "qconvtext" / "data",
        type=Path,
    )
    args = parser.parse_args()
    rng = np.random.default_rng(SEED)
    files = generate_mc(rng)
    files.update(generate_rp(rng))
    write_files(files, args.out)


if __name__ == "__main__":
    main()
