"""Command-line contract tests: stages, file handoffs, exit codes."""

import json

import numpy as np

from tsnmf.cli import main
from tsnmf.dataio import read_dataset, write_planted_instance
from tsnmf.factorization import FactorModel, FitConfig, FitTrace, fit, load_model, save_model
from tsnmf.matrix import SparseMatrix, write_sparse
from tsnmf.synthetic import make_planted_instance


def _write_corpus(path, docs):
    lines = [json.dumps(d) for d in docs]
    path.write_text("\n".join(lines) + "\n")


def _small_corpus(tmp_path):
    path = tmp_path / "corpus.jsonl"
    body = "wheat corn harvest acreage yields " * 12
    _write_corpus(
        path,
        [
            {"id": "d1", "text": body + "wheat futures rally", "labels": ["grain"]},
            {"id": "d2", "text": body + "corn exports surge", "labels": ["grain", "trade"]},
            {"id": "d3", "text": "gold silver copper mining smelter " * 12, "labels": ["metal"]},
        ],
    )
    return path


def _synth_dataset(tmp_path, docs=30, terms=40, topics=3, seed=1):
    out = tmp_path / "data"
    rc = main(
        [
            "synth",
            "--docs", str(docs),
            "--terms", str(terms),
            "--topics", str(topics),
            "--seed", str(seed),
            "--out", str(out),
        ]
    )
    assert rc == 0
    return out


class TestIngest:
    def test_happy_path(self, tmp_path, capsys):
        corpus = _small_corpus(tmp_path)
        out = tmp_path / "data"
        rc = main(["ingest", "--corpus", str(corpus), "--min-chars", "100", "--out", str(out)])
        assert rc == 0
        dataset = read_dataset(out)
        assert dataset.V.shape[0] == 3
        assert dataset.label_table.labels == ("grain", "metal", "trade")
        assert "ingested 3/3" in capsys.readouterr().out

    def test_malformed_line_exits_2_and_names_line(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "text": "x", "labels": []}\n{"id": "b", "labels": []}\n')
        rc = main(["ingest", "--corpus", str(path), "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "line 2" in capsys.readouterr().err

    def test_filter_dropping_everything_exits_3(self, tmp_path):
        corpus = _small_corpus(tmp_path)
        rc = main(
            ["ingest", "--corpus", str(corpus), "--min-chars", "100000", "--out", str(tmp_path / "o")]
        )
        assert rc == 3

    def test_vocab_cap_respected(self, tmp_path):
        corpus = _small_corpus(tmp_path)
        out = tmp_path / "data"
        rc = main(
            ["ingest", "--corpus", str(corpus), "--min-chars", "100", "--vocab-cap", "4", "--out", str(out)]
        )
        assert rc == 0
        assert len(read_dataset(out).vocabulary) <= 4

    def test_stopword_override_flag(self, tmp_path):
        corpus = _small_corpus(tmp_path)
        stop = tmp_path / "stop.txt"
        stop.write_text("wheat\n")
        out = tmp_path / "data"
        rc = main(
            [
                "ingest", "--corpus", str(corpus), "--min-chars", "100",
                "--stopwords", str(stop), "--out", str(out),
            ]
        )
        assert rc == 0
        assert "wheat" not in read_dataset(out).vocabulary.terms

    def test_stopword_env_var(self, tmp_path, monkeypatch):
        corpus = _small_corpus(tmp_path)
        stop = tmp_path / "stop.txt"
        stop.write_text("corn\n")
        monkeypatch.setenv("TSNMF_STOPWORDS", str(stop))
        out = tmp_path / "data"
        rc = main(["ingest", "--corpus", str(corpus), "--min-chars", "100", "--out", str(out)])
        assert rc == 0
        terms = read_dataset(out).vocabulary.terms
        assert "corn" not in terms and "wheat" in terms


class TestFit:
    def test_rate_zero_equals_plain_nmf(self, tmp_path):
        data = _synth_dataset(tmp_path)
        model_dir = tmp_path / "model"
        rc = main(
            ["fit", "--data", str(data), "--rate", "0", "--seed", "5", "--out", str(model_dir)]
        )
        assert rc == 0
        dataset = read_dataset(data)
        ones = np.ones((dataset.n_docs, 3))
        expected, _ = fit(dataset.V, ones, FitConfig(d=3, seed=5))
        model, header = load_model(model_dir)
        np.testing.assert_array_equal(model.W, expected.W)
        np.testing.assert_array_equal(model.H, expected.H)
        assert header["stop_reason"] in ("converged", "max_iter")

    def test_same_seed_gives_byte_identical_outputs(self, tmp_path):
        data = _synth_dataset(tmp_path)
        out1, out2 = tmp_path / "m1", tmp_path / "m2"
        args = ["fit", "--data", str(data), "--rate", "0.4", "--seed", "3"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        for name in ("model.json", "W.csv", "H.csv", "trace.csv", "supervision.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_trace_csv_non_increasing(self, tmp_path):
        data = _synth_dataset(tmp_path)
        model_dir = tmp_path / "model"
        assert main(["fit", "--data", str(data), "--rate", "0.5", "--out", str(model_dir)]) == 0
        rows = (model_dir / "trace.csv").read_text().strip().splitlines()[1:]
        losses = np.array([float(r.split(",")[1]) for r in rows])
        assert (losses[1:] <= losses[:-1] * (1 + 1e-10)).all()

    def test_supervision_spec_file_with_rate_and_seed(self, tmp_path):
        data = _synth_dataset(tmp_path)
        spec = tmp_path / "sup.json"
        spec.write_text(json.dumps({"rate": 0.5, "seed": 9}))
        m_spec, m_flags = tmp_path / "ms", tmp_path / "mf"
        # the spec file and equivalent flags must produce identical models
        assert main(["fit", "--data", str(data), "--supervision", str(spec), "--out", str(m_spec)]) == 0
        assert main(["fit", "--data", str(data), "--rate", "0.5", "--seed", "9", "--out", str(m_flags)]) == 0
        assert (m_spec / "W.csv").read_bytes() == (m_flags / "W.csv").read_bytes()

    def test_supervision_spec_file_with_explicit_ids(self, tmp_path):
        data = _synth_dataset(tmp_path)
        dataset = read_dataset(data)
        spec = tmp_path / "sup.json"
        spec.write_text(json.dumps({"supervised_ids": list(dataset.doc_ids[:5])}))
        model_dir = tmp_path / "model"
        rc = main(
            ["fit", "--data", str(data), "--supervision", str(spec), "--out", str(model_dir)]
        )
        assert rc == 0
        info = json.loads((model_dir / "supervision.json").read_text())
        assert info["supervised_ids"] == sorted(dataset.doc_ids[:5])

    def test_mask_export(self, tmp_path):
        data = _synth_dataset(tmp_path)
        mask_path = tmp_path / "mask.csv"
        rc = main(
            [
                "fit", "--data", str(data), "--rate", "0.5", "--mask-out", str(mask_path),
                "--out", str(tmp_path / "model"),
            ]
        )
        assert rc == 0
        from tsnmf.matrix import read_dense_csv

        mask = read_dense_csv(mask_path)
        assert np.isin(mask, (0.0, 1.0)).all()

    def test_weighted_flag(self, tmp_path):
        data = _synth_dataset(tmp_path)
        model_dir = tmp_path / "model"
        rc = main(
            ["fit", "--data", str(data), "--rate", "0.5", "--weighted", "--out", str(model_dir)]
        )
        assert rc == 0
        header = json.loads((model_dir / "model.json").read_text())
        assert header["objective"] == "row_weighted_sse"

    def test_numerical_failure_exits_4_with_trace(self, tmp_path, capsys):
        # hand-build a dataset whose matrix contains an Inf
        out = tmp_path / "data"
        out.mkdir()
        write_sparse(
            SparseMatrix(rows=2, cols=2, entries=((0, 0, float("inf")), (1, 1, 1.0))),
            out / "matrix.sparse.txt",
        )
        (out / "meta.json").write_text(
            json.dumps(
                {
                    "doc_ids": ["a", "b"],
                    "vocabulary": ["t0", "t1"],
                    "labels": ["x"],
                    "doc_labels": [["x"], ["x"]],
                    "stats": {},
                }
            )
        )
        model_dir = tmp_path / "model"
        with np.errstate(invalid="ignore"):
            rc = main(["fit", "--data", str(out), "--topics", "1", "--out", str(model_dir)])
        assert rc == 4
        assert (model_dir / "trace.csv").exists()

    def test_dimension_problem_exits_2(self, tmp_path, capsys):
        rc = main(["fit", "--data", str(tmp_path / "missing"), "--out", str(tmp_path / "m")])
        assert rc == 2


class TestEvaluate:
    def test_perfect_planted_model_resolves_all(self, tmp_path, capsys):
        inst = make_planted_instance(20, 30, 3, seed=4)
        data = tmp_path / "data"
        write_planted_instance(data, inst)
        # a model whose W is exactly the truth resolves every topic
        model_dir = tmp_path / "model"
        cfg = FitConfig(d=3, seed=0, max_iter=1)
        trace = FitTrace(losses=(0.0,), stop_reason="converged")
        save_model(model_dir, FactorModel(W=inst.truth.matrix, H=np.ones((3, 30))), trace, cfg)
        rc = main(
            ["evaluate", "--model", str(model_dir), "--data", str(data), "--out", str(tmp_path / "rep")]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "resolved 3/3" in out

    def test_threshold_flag_monotone(self, tmp_path):
        data = _synth_dataset(tmp_path)
        model_dir = tmp_path / "model"
        assert main(["fit", "--data", str(data), "--rate", "0.5", "--out", str(model_dir)]) == 0
        rep1, rep2 = tmp_path / "r1", tmp_path / "r2"
        assert main(["evaluate", "--model", str(model_dir), "--data", str(data), "--out", str(rep1)]) == 0
        assert main(
            ["evaluate", "--model", str(model_dir), "--data", str(data), "--threshold", "0.5", "--out", str(rep2)]
        ) == 0
        low = json.loads((rep1 / "report.json").read_text())
        high = json.loads((rep2 / "report.json").read_text())
        assert high["resolved_count"] <= low["resolved_count"]

    def test_row_mismatch_exits_2(self, tmp_path):
        data = _synth_dataset(tmp_path, docs=30)
        other = _synth_dataset(tmp_path / "other", docs=20)
        model_dir = tmp_path / "model"
        assert main(["fit", "--data", str(other), "--rate", "0", "--out", str(model_dir)]) == 0
        rc = main(
            ["evaluate", "--model", str(model_dir), "--data", str(data), "--out", str(tmp_path / "rep")]
        )
        assert rc == 2

    def test_coverage_recorded_from_supervision_info(self, tmp_path):
        data = _synth_dataset(tmp_path)
        model_dir = tmp_path / "model"
        assert main(["fit", "--data", str(data), "--rate", "1.0", "--out", str(model_dir)]) == 0
        rep = tmp_path / "rep"
        assert main(["evaluate", "--model", str(model_dir), "--data", str(data), "--out", str(rep)]) == 0
        assert json.loads((rep / "report.json").read_text())["coverage"] == 1.0


class TestTopTerms:
    def test_one_hot_h_prints_exact_terms(self, tmp_path, capsys):
        data = _synth_dataset(tmp_path, docs=10, terms=4, topics=2)
        dataset = read_dataset(data)
        model_dir = tmp_path / "model"
        H = np.zeros((2, 4))
        H[0, 2] = 1.0
        H[1, 0] = 1.0
        cfg = FitConfig(d=2, seed=0, max_iter=1)
        save_model(
            model_dir,
            FactorModel(W=np.ones((10, 2)), H=H),
            FitTrace(losses=(1.0,), stop_reason="max_iter"),
            cfg,
        )
        capsys.readouterr()  # drain setup output
        rc = main(["top-terms", "--model", str(model_dir), "--data", str(data), "--terms", "1"])
        assert rc == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == f"topic 0: {dataset.vocabulary.terms[2]}"
        assert out[1] == f"topic 1: {dataset.vocabulary.terms[0]}"

    def test_default_is_three_terms(self, tmp_path, capsys):
        data = _synth_dataset(tmp_path)
        model_dir = tmp_path / "model"
        assert main(["fit", "--data", str(data), "--rate", "0", "--out", str(model_dir)]) == 0
        capsys.readouterr()  # drain setup output
        assert main(["top-terms", "--model", str(model_dir), "--data", str(data)]) == 0
        for line in capsys.readouterr().out.strip().splitlines():
            assert len(line.split(": ")[1].split(", ")) == 3

    def test_csv_output_has_one_row_per_topic(self, tmp_path):
        data = _synth_dataset(tmp_path)
        model_dir = tmp_path / "model"
        assert main(["fit", "--data", str(data), "--rate", "0", "--out", str(model_dir)]) == 0
        out_csv = tmp_path / "tt.csv"
        assert main(
            ["top-terms", "--model", str(model_dir), "--data", str(data), "--out", str(out_csv)]
        ) == 0
        lines = out_csv.read_text().strip().splitlines()
        assert len(lines) == 1 + 3  # header + one row per topic


class TestSweep:
    def _config(self, tmp_path, data, **overrides):
        cfg = {
            "data": str(data),
            "out": str(tmp_path / "sweep"),
            "rates": [0.0, 1.0],
            "seeds": [1],
            "max_iter": 30,
        }
        cfg.update(overrides)
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_two_rates_one_seed_gives_two_rows(self, tmp_path):
        data = _synth_dataset(tmp_path)
        cfg = self._config(tmp_path, data)
        assert main(["sweep", "--config", str(cfg)]) == 0
        lines = (tmp_path / "sweep" / "sweep.csv").read_text().strip().splitlines()
        assert lines[0].startswith("rate,seed,status")
        assert len(lines) == 3

    def test_rate_one_has_full_coverage(self, tmp_path):
        data = _synth_dataset(tmp_path)
        cfg = self._config(tmp_path, data)
        assert main(["sweep", "--config", str(cfg)]) == 0
        rows = (tmp_path / "sweep" / "sweep.csv").read_text().strip().splitlines()[1:]
        by_rate = {float(r.split(",")[0]): r.split(",") for r in rows}
        assert float(by_rate[1.0][3]) == 1.0

    def test_cell_failure_recorded_and_run_continues(self, tmp_path):
        data = _synth_dataset(tmp_path)  # labels carry indices up to 2
        cfg = self._config(tmp_path, data, topics=2, rates=[0.0, 1.0])
        assert main(["sweep", "--config", str(cfg)]) == 0
        rows = (tmp_path / "sweep" / "sweep.csv").read_text().strip().splitlines()[1:]
        statuses = {float(r.split(",")[0]): r.split(",")[2] for r in rows}
        assert statuses[0.0] == "ok"
        assert statuses[1.0].startswith("error")

    def test_all_cells_failing_is_nonzero_exit(self, tmp_path):
        data = _synth_dataset(tmp_path)
        cfg = self._config(tmp_path, data, topics=2, rates=[0.5, 1.0])
        assert main(["sweep", "--config", str(cfg)]) != 0

    def test_summary_and_timing_files_written(self, tmp_path):
        data = _synth_dataset(tmp_path)
        cfg = self._config(tmp_path, data, rates=[0.0, 0.5], seeds=[1, 2])
        assert main(["sweep", "--config", str(cfg)]) == 0
        summary = (tmp_path / "sweep" / "sweep_summary.csv").read_text().strip().splitlines()
        assert len(summary) == 3  # header + one row per rate
        timing = (tmp_path / "sweep" / "sweep_timing.csv").read_text().strip().splitlines()
        assert len(timing) == 5  # header + one row per cell

    def test_cell_artifacts_written(self, tmp_path):
        data = _synth_dataset(tmp_path)
        cfg = self._config(tmp_path, data, rates=[0.5], seeds=[1])
        assert main(["sweep", "--config", str(cfg)]) == 0
        cell = tmp_path / "sweep" / "cells" / "rate_0.5" / "seed_1"
        for name in ("model.json", "W.csv", "H.csv", "trace.csv", "report.json", "report.csv"):
            assert (cell / name).exists()

    def test_unknown_config_key_exits_2(self, tmp_path):
        data = _synth_dataset(tmp_path)
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps({"data": str(data), "out": "x", "rates": [0], "seeds": [1], "bogus": 1}))
        assert main(["sweep", "--config", str(path)]) == 2


class TestSynth:
    def test_dataset_round_trip(self, tmp_path):
        data = _synth_dataset(tmp_path, docs=15, terms=20, topics=4, seed=9)
        dataset = read_dataset(data)
        assert dataset.V.shape == (15, 20)
        assert dataset.label_table.n_labels == 4
        assert (data / "W_true.csv").exists() and (data / "H_true.csv").exists()

    def test_rejects_bad_shape(self, tmp_path):
        rc = main(["synth", "--docs", "2", "--terms", "5", "--topics", "4", "--out", str(tmp_path / "x")])
        assert rc == 2
