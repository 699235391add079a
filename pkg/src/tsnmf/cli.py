"""Command-line front end.

Stages hand off through files: ``ingest`` (or ``synth``) writes a dataset
directory, ``fit`` writes a model directory, ``evaluate`` and
``top-terms`` read both, and ``sweep`` orchestrates fit + evaluate over a
(rate, seed) grid in-process while writing the same per-cell artifacts.

Exit codes are a stable contract: 0 success, 2 input or shape error,
3 empty-data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .dataio import read_dataset, write_ingest_result, write_planted_instance
from .errors import EmptyVocabularyError, NumericalFailureError, TsnmfError
from .evaluation import TruthMatrix, score_report, top_terms, write_report
from .experiment import SweepConfig, run_sweep
from .factorization import FitConfig, FitTrace, fit, load_model, save_model, write_trace_csv
from .matrix import write_dense_csv
from .preprocessing import (
    DEFAULT_MIN_CHARS,
    DEFAULT_VOCAB_CAP,
    ingest,
    load_stopwords,
    read_corpus_jsonl,
)
from .supervision import (
    build_error_weights,
    build_mask,
    sample_supervised_set,
    topic_coverage,
)
from .synthetic import make_planted_instance

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3
EXIT_NUMERICAL = 4


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_ingest(args) -> int:
    try:
        docs = read_corpus_jsonl(args.corpus)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    stopwords = None
    if args.stopwords:
        try:
            stopwords = load_stopwords(args.stopwords)
        except OSError as exc:
            return _fail(str(exc), EXIT_INPUT)
    try:
        result = ingest(
            docs,
            vocab_cap=args.vocab_cap,
            min_chars=args.min_chars,
            stopwords=stopwords,
        )
    except EmptyVocabularyError as exc:
        return _fail(str(exc), EXIT_EMPTY)
    except ValueError as exc:
        return _fail(str(exc), EXIT_INPUT)
    if result.stats["kept_docs"] == 0:
        return _fail("no documents survive the minimum-length filter", EXIT_EMPTY)
    write_ingest_result(args.out, result)
    s = result.stats
    print(
        f"ingested {s['kept_docs']}/{s['input_docs']} documents, "
        f"vocabulary {s['vocab_size']}, zero rows {s['zero_rows']} -> {args.out}"
    )
    return EXIT_OK


def _load_supervision_spec(path) -> dict:
    spec = json.loads(Path(path).read_text())
    if not isinstance(spec, dict):
        raise ValueError(f"{path}: supervision spec must be a JSON object")
    if "rate" not in spec and "supervised_ids" not in spec:
        raise ValueError(f"{path}: supervision spec needs 'rate' or 'supervised_ids'")
    return spec


def _resolve_supervised(dataset, args) -> tuple[set[int], float | None, int]:
    """Determine the supervised row set from --supervision or --rate/--seed."""
    seed = args.seed
    if args.supervision:
        spec = _load_supervision_spec(args.supervision)
        seed = int(spec.get("seed", seed))
        if "supervised_ids" in spec:
            id_to_row = {doc_id: i for i, doc_id in enumerate(dataset.doc_ids)}
            missing = [x for x in spec["supervised_ids"] if x not in id_to_row]
            if missing:
                raise ValueError(f"supervised_ids not in dataset: {missing[:5]}")
            return {id_to_row[x] for x in spec["supervised_ids"]}, None, seed
        rate = float(spec["rate"])
    else:
        rate = args.rate
    supervised = sample_supervised_set(dataset.n_docs, rate, seed)
    supervised = {i for i in supervised if dataset.label_table.doc_labels[i]}
    return supervised, rate, seed


def cmd_fit(args) -> int:
    try:
        dataset = read_dataset(args.data)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    d = args.topics if args.topics is not None else dataset.label_table.n_labels
    if d < 1:
        return _fail("dataset has no labels; pass --topics", EXIT_INPUT)
    try:
        supervised, rate, seed = _resolve_supervised(dataset, args)
        config = FitConfig(
            d=d,
            max_iter=args.max_iter,
            rel_tol=args.rel_tol,
            epsilon=args.epsilon,
            seed=seed,
            weighted=args.weighted,
            acol_q=args.acol_q,
        )
        mask = build_mask(dataset.label_table, supervised, dataset.n_docs, d)
        weights = (
            build_error_weights(dataset.n_docs, supervised).row_weight
            if args.weighted
            else None
        )
    except (TsnmfError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    try:
        model, trace = fit(dataset.V, mask.matrix, config, row_weights=weights)
    except NumericalFailureError as exc:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        partial = FitTrace(
            losses=tuple(exc.losses), stop_reason="numerical_failure"
        ) if exc.losses else None
        if partial is not None:
            write_trace_csv(out / "trace.csv", partial)
        return _fail(f"{exc} (iteration {exc.iteration})", EXIT_NUMERICAL)
    except (TsnmfError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    out = Path(args.out)
    save_model(out, model, trace, config)
    supervision_info = {
        "rate": rate,
        "seed": seed,
        "supervised_ids": sorted(dataset.doc_ids[i] for i in supervised),
    }
    (out / "supervision.json").write_text(
        json.dumps(supervision_info, indent=2, sort_keys=True) + "\n"
    )
    if args.mask_out:
        write_dense_csv(mask.matrix, args.mask_out)
    print(
        f"fit d={d} stopped after {trace.iterations} iterations "
        f"({trace.stop_reason}), final loss {trace.final_loss!r}"
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    try:
        dataset = read_dataset(args.data)
        model, _header = load_model(args.model)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    coverage = None
    supervision_path = Path(args.model) / "supervision.json"
    if supervision_path.exists():
        info = json.loads(supervision_path.read_text())
        id_to_row = {doc_id: i for i, doc_id in enumerate(dataset.doc_ids)}
        rows = {id_to_row[x] for x in info.get("supervised_ids", []) if x in id_to_row}
        coverage = topic_coverage(dataset.label_table, rows)
    truth = TruthMatrix.from_label_table(dataset.label_table)
    try:
        report = score_report(model, truth, threshold=args.threshold, coverage=coverage)
    except (TsnmfError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    write_report(args.out, report, labels=dataset.label_table.labels)
    print(
        f"resolved {report.resolved_count}/{len(report.matching.pairs)} topics "
        f"(threshold {report.threshold}), mean similarity {report.mean_similarity:.4f}"
    )
    return EXIT_OK


def cmd_top_terms(args) -> int:
    try:
        dataset = read_dataset(args.data)
        model, _header = load_model(args.model)
        tables = top_terms(model.H, dataset.vocabulary, args.terms)
    except (OSError, TsnmfError, ValueError, KeyError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    if args.out:
        width = len(tables[0]) if tables else 0
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["topic"] + [f"term{k + 1}" for k in range(width)])
            for j, terms in enumerate(tables):
                writer.writerow([j] + terms)
    else:
        for j, terms in enumerate(tables):
            print(f"topic {j}: {', '.join(terms)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        cfg = SweepConfig.from_json(args.config)
    except (OSError, ValueError, TypeError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    try:
        result = run_sweep(cfg)
    except (OSError, TsnmfError, ValueError, KeyError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    ok = sum(1 for c in result.cells if c.status == "ok")
    print(f"sweep finished: {ok}/{len(result.cells)} cells ok -> {cfg.out}")
    if result.all_failed:
        return _fail("all sweep cells failed", 1)
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        inst = make_planted_instance(
            n_docs=args.docs,
            n_terms=args.terms,
            d=args.topics,
            noise_level=args.noise,
            seed=args.seed,
        )
    except ValueError as exc:
        return _fail(str(exc), EXIT_INPUT)
    stats = {
        "synthetic": True,
        "docs": args.docs,
        "terms": args.terms,
        "topics": args.topics,
        "noise": args.noise,
        "seed": args.seed,
    }
    write_planted_instance(args.out, inst, stats=stats)
    print(f"planted instance {args.docs}x{args.terms}, {args.topics} topics -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsnmf",
        description="Topic-supervised non-negative matrix factorization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="encode a JSONL corpus as a dataset directory")
    p.add_argument("--corpus", required=True, help="JSON-lines corpus file")
    p.add_argument("--vocab-cap", type=int, default=DEFAULT_VOCAB_CAP)
    p.add_argument("--min-chars", type=int, default=DEFAULT_MIN_CHARS)
    p.add_argument("--stopwords", help="override the stopword list file")
    p.add_argument("--out", required=True, help="dataset output directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit a masked factorization to a dataset")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--topics", type=int, default=None, help="topic count (default: label count)")
    p.add_argument("--rate", type=float, default=0.0, help="supervision rate in [0, 1]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--supervision", help="JSON spec with 'rate' or 'supervised_ids'")
    p.add_argument("--weighted", action="store_true", help="use error-weighted updates")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--rel-tol", type=float, default=1e-4)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--acol-q", type=int, default=5)
    p.add_argument("--mask-out", help="also export the mask as dense CSV")
    p.add_argument("--out", required=True, help="model output directory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evaluate", help="score a model against the dataset labels")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--out", required=True, help="report output directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("top-terms", help="show the heaviest terms of each topic")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--terms", type=int, default=3)
    p.add_argument("--out", help="write CSV here instead of printing")
    p.set_defaults(func=cmd_top_terms)

    p = sub.add_parser("sweep", help="run a supervision-rate grid from a config file")
    p.add_argument("--config", required=True, help="sweep config JSON")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a planted synthetic dataset")
    p.add_argument("--docs", type=int, required=True)
    p.add_argument("--terms", type=int, required=True)
    p.add_argument("--topics", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="dataset output directory")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
