"""Corpus ingestion: tokenization, vocabulary selection, TF-IDF encoding.

The pipeline turns a labeled JSON-lines corpus into a non-negative
document-term matrix with unit-L2 rows, plus the per-document label sets
needed to build supervision masks.  Everything is deterministic: the same
corpus and settings always produce the same matrix, bit for bit.

Weighting is raw term count times smoothed inverse document frequency,
``idf(j) = ln((1 + n) / (1 + df_j)) + 1``, followed by row-wise L2
normalization.  Tokens are lowercased ASCII-alphabetic runs; anything
shorter than three characters or on the stopword list is dropped.
Lemmatization is not built in; pass ``normalizer`` to plug one in.
"""

from __future__ import annotations

import json
import math
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EmptyVocabularyError
from .matrix import l2_normalize_rows

MIN_TOKEN_LEN = 3
DEFAULT_MIN_CHARS = 250
DEFAULT_VOCAB_CAP = 2000
STOPWORDS_ENV_VAR = "TSNMF_STOPWORDS"

_WORD_RE = re.compile(r"[a-zA-Z]+")


@dataclass(frozen=True)
class RawDocument:
    """One input document: unique id, raw text, and zero or more labels."""

    id: str
    text: str
    labels: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Vocabulary:
    """Ordered term list with a term -> column lookup.

    Ordering is document frequency descending with lexicographic
    tie-break, so it is reproducible across runs.
    """

    terms: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index


@dataclass(frozen=True)
class TermDocumentMatrix:
    """TF-IDF matrix (documents x terms) with row/column identities attached."""

    matrix: np.ndarray
    doc_ids: tuple[str, ...]
    vocabulary: Vocabulary
    zero_rows: tuple[int, ...] = ()

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def load_stopwords(path=None) -> frozenset[str]:
    """Load the stopword set.

    Resolution order: explicit ``path`` argument, then the
    ``TSNMF_STOPWORDS`` environment variable, then the bundled list.
    The file holds one lowercase token per line; '#' starts a comment.
    """
    if path is None:
        env = os.environ.get(STOPWORDS_ENV_VAR)
        if env:
            path = env
    if path is None:
        text = resources.files("tsnmf.data").joinpath("stopwords_en.txt").read_text()
    else:
        text = Path(path).read_text()
    words = set()
    for line in text.splitlines():
        word = line.split("#", 1)[0].strip().lower()
        if word:
            words.add(word)
    return frozenset(words)


_STOPWORDS_CACHE: dict[str, frozenset[str]] = {}


def default_stopwords() -> frozenset[str]:
    """Stopwords from TSNMF_STOPWORDS when set, else the bundled list; cached per path."""
    key = os.environ.get(STOPWORDS_ENV_VAR) or ""
    if key not in _STOPWORDS_CACHE:
        _STOPWORDS_CACHE[key] = load_stopwords(key or None)
    return _STOPWORDS_CACHE[key]


def tokenize(
    text: str,
    stopwords: frozenset[str] | None = None,
    normalizer: Callable[[str], str] | None = None,
) -> list[str]:
    """Split text into lowercase alphabetic tokens, dropping short ones and stopwords.

    ``normalizer`` is applied to each token before the length and stopword
    filters (the hook where a stemmer or lemmatizer would go).
    """
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = []
    for raw in _WORD_RE.findall(text):
        token = raw.lower()
        if normalizer is not None:
            token = normalizer(token)
        if len(token) < MIN_TOKEN_LEN or token in stopwords:
            continue
        tokens.append(token)
    return tokens


def filter_documents(
    corpus: Sequence[RawDocument], min_chars: int = DEFAULT_MIN_CHARS
) -> list[RawDocument]:
    """Keep documents whose raw text has at least ``min_chars`` characters."""
    if min_chars < 0:
        raise ValueError(f"min_chars must be >= 0, got {min_chars}")
    return [doc for doc in corpus if len(doc.text) >= min_chars]


def build_vocabulary(
    tokenized: Sequence[Sequence[str]], cap: int = DEFAULT_VOCAB_CAP
) -> Vocabulary:
    """Select the ``cap`` most document-frequent tokens.

    Ties in document frequency break lexicographically ascending.  Raises
    EmptyVocabularyError when no token survives.
    """
    if cap < 1:
        raise ValueError(f"vocabulary cap must be >= 1, got {cap}")
    df: Counter[str] = Counter()
    for tokens in tokenized:
        df.update(set(tokens))
    if not df:
        raise EmptyVocabularyError("no tokens survive the filters; vocabulary is empty")
    ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))
    return Vocabulary(terms=tuple(term for term, _ in ranked[:cap]))


def tfidf_encode(
    tokenized: Sequence[Sequence[str]],
    vocab: Vocabulary,
    doc_ids: Sequence[str] | None = None,
) -> TermDocumentMatrix:
    """Encode tokenized documents as a row-normalized TF-IDF matrix.

    Out-of-vocabulary tokens contribute nothing; documents with no
    in-vocabulary tokens come out as zero rows and are listed in
    ``zero_rows`` so callers can report them.
    """
    if len(vocab) == 0:
        raise EmptyVocabularyError("cannot encode with an empty vocabulary")
    n = len(tokenized)
    t = len(vocab)
    if doc_ids is None:
        doc_ids = tuple(str(i) for i in range(n))
    else:
        doc_ids = tuple(doc_ids)
        if len(doc_ids) != n:
            raise ValueError(f"{len(doc_ids)} doc_ids for {n} documents")

    counts = np.zeros((n, t), dtype=np.float64)
    df = np.zeros(t, dtype=np.float64)
    for i, tokens in enumerate(tokenized):
        row_seen = set()
        for token in tokens:
            j = vocab.index.get(token)
            if j is None:
                continue
            counts[i, j] += 1.0
            row_seen.add(j)
        for j in row_seen:
            df[j] += 1.0

    idf = np.array([math.log((1.0 + n) / (1.0 + d)) + 1.0 for d in df])
    weighted = counts * idf[np.newaxis, :]
    normalized = l2_normalize_rows(weighted)
    zero_rows = tuple(int(i) for i in np.where(~normalized.any(axis=1))[0])
    return TermDocumentMatrix(
        matrix=normalized, doc_ids=doc_ids, vocabulary=vocab, zero_rows=zero_rows
    )


def read_corpus_jsonl(path) -> list[RawDocument]:
    """Parse a JSON-lines corpus file.

    Each line must be an object with string fields ``id`` and ``text`` and
    an array of strings ``labels``.  Errors name the offending line number.
    """
    docs = []
    seen_ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise ValueError(f"{path}: line {lineno}: expected a JSON object")
            for key in ("id", "text", "labels"):
                if key not in obj:
                    raise ValueError(f"{path}: line {lineno}: missing field {key!r}")
            if not isinstance(obj["id"], str) or not isinstance(obj["text"], str):
                raise ValueError(f"{path}: line {lineno}: 'id' and 'text' must be strings")
            labels = obj["labels"]
            if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
                raise ValueError(f"{path}: line {lineno}: 'labels' must be an array of strings")
            if obj["id"] in seen_ids:
                raise ValueError(f"{path}: line {lineno}: duplicate document id {obj['id']!r}")
            seen_ids.add(obj["id"])
            docs.append(RawDocument(id=obj["id"], text=obj["text"], labels=frozenset(labels)))
    return docs


@dataclass(frozen=True)
class IngestResult:
    """Everything the downstream stages need, plus filter statistics."""

    tdm: TermDocumentMatrix
    doc_labels: tuple[frozenset[str], ...]
    stats: dict


def ingest(
    corpus: Iterable[RawDocument],
    vocab_cap: int = DEFAULT_VOCAB_CAP,
    min_chars: int = DEFAULT_MIN_CHARS,
    stopwords: frozenset[str] | None = None,
    normalizer: Callable[[str], str] | None = None,
) -> IngestResult:
    """Run the full preprocessing pipeline on an in-memory corpus."""
    corpus = list(corpus)
    kept = filter_documents(corpus, min_chars=min_chars)
    tokenized = [tokenize(doc.text, stopwords=stopwords, normalizer=normalizer) for doc in kept]
    vocab = build_vocabulary(tokenized, cap=vocab_cap)
    tdm = tfidf_encode(tokenized, vocab, doc_ids=[doc.id for doc in kept])
    stats = {
        "input_docs": len(corpus),
        "kept_docs": len(kept),
        "dropped_short": len(corpus) - len(kept),
        "min_chars": min_chars,
        "vocab_cap": vocab_cap,
        "vocab_size": len(vocab),
        "zero_rows": len(tdm.zero_rows),
    }
    return IngestResult(tdm=tdm, doc_labels=tuple(doc.labels for doc in kept), stats=stats)
