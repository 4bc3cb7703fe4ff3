import json
import os

import numpy as np
import pytest

from tocc import (RngStream, fit_baseline, fit_pam_tocc_df, fit_tocc_db,
                  fit_tocc_df, ingest_csv, load_glass, load_model, predict,
                  predict_baseline, save_model)
from tocc.cli import main
from tocc.io_utils import IngestError


def write(path, text):
    with open(path, "w") as fh:
        fh.write(text)
    return str(path)


class TestIngestCsv:
    def test_basic(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,b,kind\n1,2,t\n3,4,u\n")
        data = ingest_csv(path, label_column="kind", target_labels={"t"})
        assert data.feature_names == ["a", "b"]
        assert data.row_labels == ["target", "non-target"]
        assert np.array_equal(data.values, [[1, 2], [3, 4]])

    def test_unknown_label_located(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,kind\n1,t\n2,x\n")
        with pytest.raises(IngestError, match="row 3.*unknown label"):
            ingest_csv(path, label_column="kind", target_labels={"t"},
                       nontarget_labels={"u"})

    def test_non_numeric_located(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,b\n1,2\n3,oops\n")
        with pytest.raises(IngestError, match="row 3, column 'b'"):
            ingest_csv(path)

    def test_non_finite_located(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,b\n1,2\n3,inf\n")
        with pytest.raises(IngestError, match="row 3.*non-finite"):
            ingest_csv(path)

    def test_missing_column(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,b\n1,2\n")
        with pytest.raises(IngestError, match="missing column"):
            ingest_csv(path, label_column="kind")

    def test_empty_file(self, tmp_path):
        path = write(tmp_path / "d.csv", "")
        with pytest.raises(IngestError, match="empty"):
            ingest_csv(path)

    def test_one_row(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,b\n5,6\n")
        data = ingest_csv(path)
        assert data.n == 1

    def test_normalize_by(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,b,o\n2,4,2\n9,3,3\n")
        data = ingest_csv(path, normalize_by="o")
        assert data.feature_names == ["a", "b"]
        assert np.allclose(data.values, [[1, 2], [3, 1]])

    def test_normalize_zero_reference(self, tmp_path):
        path = write(tmp_path / "d.csv", "a,o\n2,0\n")
        with pytest.raises(IngestError, match="zero reference"):
            ingest_csv(path, normalize_by="o")

    def test_comments_skipped(self, tmp_path):
        path = write(tmp_path / "d.csv", "# provenance\na,b\n1,2\n")
        assert ingest_csv(path).n == 1


class TestGlassLoader:
    def test_study_subset(self):
        glass = load_glass()
        assert glass.feature_names == ["RI", "Na", "Mg", "Al", "Si", "K", "Ca",
                                       "Ba", "Fe"]
        assert glass.n == 138
        assert int(glass.is_target().sum()) == 87

    def test_all_windows(self):
        glass = load_glass(subset="all-windows")
        assert glass.n == 214
        assert int(glass.is_target().sum()) == 163

    def test_bad_subset(self):
        with pytest.raises(ValueError):
            load_glass(subset="everything")


class TestModelRoundTrip:
    def fit_models(self):
        gen = np.random.default_rng(50)
        X = gen.normal(size=(60, 2))
        rng = RngStream(51)
        yield fit_tocc_df(X, 0.9), predict
        yield fit_tocc_db(X, 0.9, rng, components_range=(1, 2),
                          n_restarts=2), predict
        yield fit_pam_tocc_df(X, 2, 0.9), predict
        yield fit_baseline("gauss", X, 0.9), predict_baseline
        yield fit_baseline("kmeans", X, 0.9, rng), predict_baseline
        yield fit_baseline("kde", X, 0.9), predict_baseline
        yield fit_baseline("mix_gauss", X, 0.9, rng,
                           components_range=(1, 2)), predict_baseline

    def test_bit_exact_predictions(self, tmp_path):
        Z = np.random.default_rng(52).normal(size=(25, 2))
        for i, (model, predictor) in enumerate(self.fit_models()):
            path = tmp_path / f"model_{i}.json"
            save_model(model, path)
            loaded = load_model(path)
            before = predictor(model, Z)
            after = predictor(loaded, Z)
            assert np.array_equal(before.score, after.score), f"model {i}"
            assert np.array_equal(before.accept, after.accept), f"model {i}"

    def test_schema_version_checked(self, tmp_path):
        path = tmp_path / "m.json"
        with open(path, "w") as fh:
            json.dump({"schema_version": 99, "model": "tocc"}, fh)
        with pytest.raises(ValueError, match="schema"):
            load_model(path)


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestCli:
    def test_simulate_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli("simulate", "--scenario", "a", "--n-target", 50,
                       "--lambda", 2, "--seed", 7, "--out", out1) == 0
        assert run_cli("simulate", "--scenario", "a", "--n-target", 50,
                       "--lambda", 2, "--seed", 7, "--out", out2) == 0
        assert out1.read_bytes() == out2.read_bytes()
        meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
        assert meta["config"]["seed"] == 7

    def test_fit_predict_roundtrip(self, tmp_path):
        sim = tmp_path / "sim.csv"
        run_cli("simulate", "--scenario", "a", "--n-target", 60, "--seed", 3,
                "--out", sim)
        model = tmp_path / "model.json"
        assert run_cli("fit", "--data", sim, "--label-column", "label",
                       "--method", "tocc-df", "--s", 0.9, "--seed", 3,
                       "--out", model) == 0
        pred1, pred2 = tmp_path / "p1.csv", tmp_path / "p2.csv"
        assert run_cli("predict", "--model", model, "--data", sim,
                       "--label-column", "label", "--out", pred1) == 0
        assert run_cli("predict", "--model", model, "--data", sim,
                       "--label-column", "label", "--out", pred2) == 0
        assert pred1.read_bytes() == pred2.read_bytes()
        text = pred1.read_text()
        assert text.startswith("# tocc-version:")
        assert "row,score,decision,cluster" in text

    def test_score_and_roc(self, tmp_path):
        model = tmp_path / "model.json"
        run_cli("fit", "--glass", "--method", "tocc-df", "--s", 0.9,
                "--out", model)
        scores = tmp_path / "scores.csv"
        assert run_cli("score", "--model", model, "--glass",
                       "--out", scores) == 0
        roc_csv, svg = tmp_path / "roc.csv", tmp_path / "roc.svg"
        assert run_cli("roc", "--model", model, "--glass", "--out", roc_csv,
                       "--svg", svg) == 0
        assert "auc:" in roc_csv.read_text()
        assert svg.read_text().startswith("<svg")

    def test_reduce_and_vip(self, tmp_path):
        reduced = tmp_path / "red.csv"
        assert run_cli("reduce", "--glass", "--d", 2, "--which", "last",
                       "--out", reduced) == 0
        header = [ln for ln in reduced.read_text().splitlines()
                  if not ln.startswith("#")][0]
        assert header == "pc_last1,pc_last2,label"

        vip1, vip2 = tmp_path / "v1.csv", tmp_path / "v2.csv"
        for out in (vip1, vip2):
            assert run_cli("vip", "--glass", "--b1", 21, "--b2", 10,
                           "--kappa", 0.5, "--seed", 7, "--out", out) == 0
        assert vip1.read_bytes() == vip2.read_bytes()
        text = vip1.read_text()
        assert "Si,0" in text or "Si," in text

    def test_bench_deterministic(self, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / f"{name}.csv"
            summary = tmp_path / f"{name}.json"
            svg = tmp_path / f"{name}.svg"
            assert run_cli("bench", "--scenario", "a", "--lambda", 2,
                           "--n-target", 60, "--reps", 2, "--s", 0.9,
                           "--methods", "tocc-df,gauss", "--seed", 11,
                           "--out", out, "--summary", summary,
                           "--svg", svg) == 0
            outs.append((out.read_bytes(), summary.read_bytes(),
                         svg.read_bytes()))
        assert outs[0] == outs[1]

    def test_glass_repro_smoke(self, tmp_path):
        outdir = tmp_path / "repro"
        assert run_cli("glass-repro", "--skip-rp", "--b1", 21, "--b2", 10,
                       "--mc-samples", 20000, "--seed", 7,
                       "--outdir", outdir) == 0
        auc = (outdir / "auc_table.csv").read_text()
        assert "varsel2" in auc.splitlines()[-4]  # header row carries columns
        assert (outdir / "report.md").read_text().startswith("# Glass study")

    def test_error_single_line(self, tmp_path, capsys):
        rc = run_cli("fit", "--data", tmp_path / "absent.csv",
                     "--method", "tocc-df", "--out", tmp_path / "m.json")
        assert rc == 2
        err = capsys.readouterr().err.strip()
        assert err.startswith("tocc: error:")
        assert "\n" not in err

    def test_seed_env_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TOCC_SEED", "99")
        from tocc.cli import _default_seed
        assert _default_seed() == 99
