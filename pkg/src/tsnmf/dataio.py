"""Dataset directory format shared by the pipeline stages.

A dataset directory holds the encoded matrix plus everything needed to
supervise and evaluate against it:

    matrix.sparse.txt   sparse coordinate form of the documents x terms matrix
    meta.json           doc_ids, vocabulary, labels, per-document label names,
                        and filter statistics

The ingest and synth commands write this layout; fit, evaluate, sweep,
and top-terms read it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .matrix import SparseMatrix, read_sparse, write_dense_csv, write_sparse
from .preprocessing import IngestResult, Vocabulary
from .supervision import LabelTable
from .synthetic import PlantedInstance

MATRIX_FILENAME = "matrix.sparse.txt"
META_FILENAME = "meta.json"


@dataclass(frozen=True)
class Dataset:
    """In-memory view of a dataset directory."""

    V: np.ndarray
    doc_ids: tuple[str, ...]
    vocabulary: Vocabulary
    label_table: LabelTable
    stats: dict

    @property
    def n_docs(self) -> int:
        return self.V.shape[0]


def _write(
    outdir,
    V: np.ndarray,
    doc_ids,
    vocab_terms,
    doc_label_names,
    stats: dict,
) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_sparse(SparseMatrix.from_dense(V), out / MATRIX_FILENAME)
    meta = {
        "doc_ids": list(doc_ids),
        "vocabulary": list(vocab_terms),
        "labels": sorted({name for labels in doc_label_names for name in labels}),
        "doc_labels": [sorted(labels) for labels in doc_label_names],
        "stats": stats,
    }
    (out / META_FILENAME).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def write_ingest_result(outdir, result: IngestResult) -> None:
    _write(
        outdir,
        result.tdm.matrix,
        result.tdm.doc_ids,
        result.tdm.vocabulary.terms,
        result.doc_labels,
        result.stats,
    )


def write_planted_instance(outdir, inst: PlantedInstance, stats: dict | None = None) -> None:
    """Persist a synthetic instance in dataset layout, plus the truth factors."""
    n, t = inst.V.shape
    id_width = len(str(n - 1))
    term_width = len(str(t - 1))
    doc_ids = [f"doc{i:0{id_width}d}" for i in range(n)]
    terms = [f"term{j:0{term_width}d}" for j in range(t)]
    doc_label_names = [
        sorted(inst.label_table.labels[j] for j in idxs)
        for idxs in inst.label_table.doc_labels
    ]
    _write(outdir, inst.V, doc_ids, terms, doc_label_names, stats or {"synthetic": True})
    out = Path(outdir)
    write_dense_csv(inst.W_true, out / "W_true.csv")
    write_dense_csv(inst.H_true, out / "H_true.csv")


def read_dataset(datadir) -> Dataset:
    datadir = Path(datadir)
    V = read_sparse(datadir / MATRIX_FILENAME).to_dense()
    meta = json.loads((datadir / META_FILENAME).read_text())
    doc_ids = tuple(meta["doc_ids"])
    vocab = Vocabulary(terms=tuple(meta["vocabulary"]))
    if len(doc_ids) != V.shape[0]:
        raise ValueError(
            f"{datadir}: {len(doc_ids)} doc_ids for a {V.shape[0]}-row matrix"
        )
    if len(vocab) != V.shape[1]:
        raise ValueError(
            f"{datadir}: vocabulary size {len(vocab)} for a {V.shape[1]}-column matrix"
        )
    labels = tuple(meta["labels"])
    index = {name: j for j, name in enumerate(labels)}
    doc_labels = tuple(
        frozenset(index[name] for name in names) for names in meta["doc_labels"]
    )
    table = LabelTable(labels=labels, doc_labels=doc_labels)
    return Dataset(
        V=V,
        doc_ids=doc_ids,
        vocabulary=vocab,
        label_table=table,
        stats=meta.get("stats", {}),
    )
