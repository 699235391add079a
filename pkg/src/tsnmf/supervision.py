"""Supervision masks, error weights, and labeled-subset sampling.

The mask is an n x d binary matrix: entry (i, j) is 0 when topic j is
forbidden in document i.  Documents outside the supervised subset are
unconstrained (all-ones rows), which is what makes zero supervision
collapse to plain NMF.  Error weights emphasize supervised rows by the
inverse supervision rate, n / |supervised|.

All sampling goes through numpy's PCG64 generator seeded explicitly, so
sweeps are reproducible for a given seed and numpy version.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidSupervisionError, ShapeError


@dataclass(frozen=True)
class LabelTable:
    """Distinct labels in lexicographic order plus per-document label indices.

    The label order defines the topic columns 0..d-1 used by masks and
    truth matrices.
    """

    labels: tuple[str, ...]
    doc_labels: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("label list contains duplicates")
        if list(self.labels) != sorted(self.labels):
            raise ValueError("labels must be in lexicographic order")
        d = len(self.labels)
        for i, idxs in enumerate(self.doc_labels):
            for j in idxs:
                if not 0 <= j < d:
                    raise ValueError(f"document {i}: label index {j} out of range 0..{d - 1}")

    @property
    def n_docs(self) -> int:
        return len(self.doc_labels)

    @property
    def n_labels(self) -> int:
        return len(self.labels)


def build_label_table(doc_label_names: Sequence[Iterable[str]]) -> LabelTable:
    """Build a LabelTable from per-document label-name sets."""
    names = sorted({name for labels in doc_label_names for name in labels})
    index = {name: j for j, name in enumerate(names)}
    doc_labels = tuple(
        frozenset(index[name] for name in labels) for labels in doc_label_names
    )
    return LabelTable(labels=tuple(names), doc_labels=doc_labels)


@dataclass(frozen=True)
class SupervisionMask:
    """Binary n x d matrix of permitted topic-document pairs."""

    matrix: np.ndarray
    supervised_rows: frozenset[int]

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2:
            raise ShapeError(f"mask must be 2-D, got ndim={m.ndim}")
        if not np.isin(m, (0.0, 1.0)).all():
            raise ValueError("mask entries must be exactly 0 or 1")
        row_sums = m.sum(axis=1)
        for i in self.supervised_rows:
            if row_sums[i] < 1:
                raise InvalidSupervisionError(f"supervised row {i} permits no topic")
        unsupervised = np.ones(m.shape[0], dtype=bool)
        unsupervised[list(self.supervised_rows)] = False
        if not m[unsupervised].all():
            raise ValueError("unsupervised rows must be all ones")


@dataclass(frozen=True)
class ErrorWeights:
    """Per-document loss weights; 1 for unsupervised rows, >= 1 for supervised."""

    row_weight: np.ndarray

    def __post_init__(self):
        w = self.row_weight
        if w.ndim != 1:
            raise ShapeError(f"row weights must be 1-D, got ndim={w.ndim}")
        if w.size and w.min() < 1.0:
            raise ValueError(f"row weights must be >= 1, min is {w.min()!r}")


def sample_supervised_set(n: int, rate: float, seed: int) -> set[int]:
    """Draw a uniform random subset of round(rate * n) document indices.

    Reproducible for a given seed (PCG64).  Rounding is Python's
    round-half-even.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"supervision rate must be in [0, 1], got {rate}")
    k = round(rate * n)
    if k == 0:
        return set()
    rng = np.random.default_rng(seed)
    return {int(i) for i in rng.choice(n, size=k, replace=False)}


def build_mask(
    labels: LabelTable, supervised: Iterable[int], n: int, d: int
) -> SupervisionMask:
    """Construct the supervision mask for a labeled subset.

    Supervised rows get a 1 exactly at their label columns; everything
    else in the row is 0.  Unsupervised rows are all ones.  A supervised
    document with no labels is a contract violation.
    """
    if labels.n_docs != n:
        raise ShapeError(f"label table covers {labels.n_docs} documents, expected {n}")
    if d < 1:
        raise ValueError(f"topic count must be >= 1, got {d}")
    supervised = frozenset(int(i) for i in supervised)
    for i in supervised:
        if not 0 <= i < n:
            raise ValueError(f"supervised index {i} out of range 0..{n - 1}")
    matrix = np.ones((n, d), dtype=np.float64)
    for i in supervised:
        idxs = labels.doc_labels[i]
        if not idxs:
            raise InvalidSupervisionError(f"supervised document {i} has an empty label set")
        if max(idxs) >= d:
            raise ShapeError(
                f"document {i} carries label index {max(idxs)} but the mask has only {d} topics"
            )
        matrix[i, :] = 0.0
        matrix[i, sorted(idxs)] = 1.0
    return SupervisionMask(matrix=matrix, supervised_rows=supervised)


def build_error_weights(n: int, supervised: Iterable[int]) -> ErrorWeights:
    """Weight supervised rows by n / |supervised|, unsupervised rows by 1."""
    supervised = frozenset(int(i) for i in supervised)
    weights = np.ones(n, dtype=np.float64)
    if supervised:
        w = n / len(supervised)
        for i in supervised:
            weights[i] = w
    return ErrorWeights(row_weight=weights)


def topic_coverage(labels: LabelTable, supervised: Iterable[int]) -> float:
    """Fraction of all labels carried by at least one supervised document."""
    if labels.n_labels == 0:
        return 0.0
    covered: set[int] = set()
    for i in supervised:
        covered.update(labels.doc_labels[i])
    return len(covered) / labels.n_labels
