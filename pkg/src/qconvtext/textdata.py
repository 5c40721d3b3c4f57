"""Dataset loading, vocabulary, TF-IDF vectors, padding and masking.

File format: UTF-8 text, one example per line, ``<label><TAB><sentence>``
with labels "0"/"1".  A space-separated variant (label, single space,
sentence) is accepted behind a flag for compatibility with published
benchmark files.  Tokenization is lowercasing plus whitespace splitting;
punctuation stays attached to its token.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError, VocabularyError

DATA_ENV_VAR = "QCONVTEXT_DATA"

IDF_VARIANTS = ("smooth", "raw-ratio")


@dataclass(frozen=True)
class LabeledExample:
    """One sentence with its class id."""

    label: int
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Vocabulary:
    """Dense token -> index map in lexicographic token order."""

    tokens: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_index", {tok: i for i, tok in enumerate(self.tokens)}
        )

    def index_of(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise VocabularyError(f"token {token!r} not in vocabulary") from None

    def __contains__(self, token: str) -> bool:
        return token in self._index


@dataclass(frozen=True)
class CorpusStats:
    """Document counts from the training split, aligned to a vocabulary."""

    n_docs: int
    doc_freq: np.ndarray

    def __post_init__(self) -> None:
        df = np.asarray(self.doc_freq, dtype=np.int64)
        object.__setattr__(self, "doc_freq", df)
        if np.any(df > self.n_docs) or np.any(df < 0):
            raise DataError("document frequencies must lie in [0, n_docs]")


def tokenize(sentence: str) -> tuple[str, ...]:
    return tuple(sentence.lower().split())


def load_dataset(path: str | Path, space_separated: bool = False) -> list[LabeledExample]:
    """Parse one split file; preserves line order, skips blank lines."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    examples: list[LabeledExample] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if space_separated:
                parts = line.strip().split(None, 1)
            else:
                parts = line.split("\t", 1)
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected '<label>{'<space>' if space_separated else '<TAB>'}<sentence>'")
            label_text, sentence = parts[0].strip(), parts[1]
            if label_text not in ("0", "1"):
                raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {label_text!r}")
            tokens = tokenize(sentence)
            if not tokens:
                raise DataError(f"{path}:{lineno}: empty sentence")
            examples.append(LabeledExample(int(label_text), tokens))
    if not examples:
        raise DataError(f"dataset file is empty: {path}")
    return examples


def build_vocab(examples: list[LabeledExample]) -> Vocabulary:
    """Vocabulary over every provided example (pass all splits together)."""
    if not examples:
        raise DataError("cannot build a vocabulary from an empty corpus")
    unique = sorted({tok for ex in examples for tok in ex.tokens})
    return Vocabulary(tuple(unique))


def build_corpus_stats(train: list[LabeledExample], vocab: Vocabulary) -> CorpusStats:
    """Document frequencies computed from the training split only."""
    df = np.zeros(vocab.size, dtype=np.int64)
    for ex in train:
        for tok in set(ex.tokens):
            if tok in vocab:
                df[vocab.index_of(tok)] += 1
    return CorpusStats(len(train), df)


def idf_values(stats: CorpusStats, variant: str = "smooth") -> np.ndarray:
    """Per-token inverse document frequency.

    The default form ln((1 + n) / (1 + df)) + 1 stays finite and positive
    for tokens unseen in training (df = 0), which the test split of the
    harder benchmark contains in quantity; those receive the maximal value.
    The "raw-ratio" form n / max(df, 1) is kept selectable.
    """
    n = stats.n_docs
    df = stats.doc_freq.astype(np.float64)
    if variant == "smooth":
        return np.log((1.0 + n) / (1.0 + df)) + 1.0
    if variant == "raw-ratio":
        return n / np.maximum(df, 1.0)
    raise DataError(f"unknown idf variant {variant!r}; expected one of {IDF_VARIANTS}")


def tfidf_vector(
    example: LabeledExample,
    vocab: Vocabulary,
    stats: CorpusStats,
    idf_variant: str = "smooth",
) -> np.ndarray:
    """L2-normalized tf * idf vector over the full vocabulary.

    tf is the raw in-sentence count; idf comes from training-split stats.
    Never all-zero: every present token has tf >= 1 and idf > 0.
    """
    idf = idf_values(stats, idf_variant)
    vec = np.zeros(vocab.size, dtype=np.float64)
    for tok, count in Counter(example.tokens).items():
        vec[vocab.index_of(tok)] = count
    vec *= idf
    norm = float(np.linalg.norm(vec))
    if norm <= 0.0:
        raise DataError("tf-idf vector collapsed to zero")
    return vec / norm


def pad_and_index(
    example: LabeledExample, vocab: Vocabulary, m: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vocabulary indices padded to length m, plus the validity mask."""
    t = len(example.tokens)
    if t == 0:
        raise DataError("cannot pad an empty sentence")
    if t > m:
        raise DataError(f"sentence of {t} tokens exceeds maximum length {m}")
    indices = np.zeros(m, dtype=np.int64)
    mask = np.zeros(m, dtype=bool)
    for i, tok in enumerate(example.tokens):
        indices[i] = vocab.index_of(tok)
        mask[i] = True
    return indices, mask


@dataclass(frozen=True)
class PreparedExample:
    """Model-ready example: padded indices, mask, TF-IDF vector, label."""

    label: int
    indices: np.ndarray
    mask: np.ndarray
    tfidf: np.ndarray

    @property
    def valid_indices(self) -> np.ndarray:
        return self.indices[self.mask]


def prepare_examples(
    examples: list[LabeledExample],
    vocab: Vocabulary,
    stats: CorpusStats,
    m: int,
    idf_variant: str = "smooth",
) -> list[PreparedExample]:
    prepared = []
    for ex in examples:
        indices, mask = pad_and_index(ex, vocab, m)
        vec = tfidf_vector(ex, vocab, stats, idf_variant)
        prepared.append(PreparedExample(ex.label, indices, mask, vec))
    return prepared


# ---------------------------------------------------------------------------
# bundled benchmark splits
# ---------------------------------------------------------------------------

BENCHMARKS = {
    "mc": {"train": "mc_train.txt", "dev": "mc_dev.txt", "test": "mc_test.txt"},
    "rp": {"train": "rp_train.txt", "test": "rp_test.txt"},
}


@dataclass(frozen=True)
class DatasetSplits:
    train: list[LabeledExample]
    test: list[LabeledExample]
    dev: list[LabeledExample] | None = None

    def all_examples(self) -> list[LabeledExample]:
        extra = self.dev if self.dev is not None else []
        return list(self.train) + list(extra) + list(self.test)

    def max_tokens(self) -> int:
        return max(len(ex.tokens) for ex in self.all_examples())


def data_dir(root: str | Path | None = None) -> Path:
    """Dataset root: explicit argument, then env override, then bundled files."""
    if root is not None:
        return Path(root)
    env = os.environ.get(DATA_ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("qconvtext") / "data"))


def load_benchmark(name: str, root: str | Path | None = None) -> DatasetSplits:
    """Load one of the bundled benchmarks ("mc" or "rp") by split files."""
    if name not in BENCHMARKS:
        raise DataError(f"unknown benchmark {name!r}; expected one of {sorted(BENCHMARKS)}")
    base = data_dir(root)
    files = BENCHMARKS[name]
    train = load_dataset(base / files["train"])
    test = load_dataset(base / files["test"])
    dev = load_dataset(base / files["dev"]) if "dev" in files else None
    return DatasetSplits(train=train, test=test, dev=dev)


def embedding_qubits(vocab_size: int) -> int:
    """Number of qubits for amplitude-encoding a length-N vector."""
    if vocab_size < 2:
        raise DataError(f"vocabulary size must be >= 2, got {vocab_size}")
    return int(math.ceil(math.log2(vocab_size)))
