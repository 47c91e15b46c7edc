import json

import pytest

from plantsite.cli import main
from plantsite.fusion import load_scores, load_sweep
from plantsite.loss_model import load_model

from conftest import GOLDEN_SWEEP_CSV


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One small synth/train/score/sweep run shared by the read-only tests."""
    root = tmp_path_factory.mktemp("pipeline")
    landscape = root / "landscape"
    model = root / "model.json"
    scores = root / "scores.csv"
    sweep = root / "sweep.csv"
    assert main([
        "synth", "--seed", "11", "--region", "0,0,2120,1060",
        "--compartments", "10", "--villages", "3",
        "--profile", "separable-loss", "--out", str(landscape),
    ]) == 0
    assert main(["train", "--landscape", str(landscape), "--out-model", str(model)]) == 0
    assert main([
        "score", "--landscape", str(landscape), "--model", str(model),
        "--out", str(scores),
    ]) == 0
    assert main([
        "sweep", "--landscape", str(landscape), "--model", str(model),
        "--out", str(sweep),
    ]) == 0
    return {"root": root, "landscape": landscape, "model": model,
            "scores": scores, "sweep": sweep}


class TestSynth:
    def test_prints_counts(self, tmp_path, capsys):
        out = tmp_path / "ls"
        assert main([
            "synth", "--seed", "3", "--region", "0,0,1060,530",
            "--compartments", "6", "--villages", "2", "--out", str(out),
        ]) == 0
        assert capsys.readouterr().out == "synthesized 8 cells, 6 compartments, 2 villages\n"
        assert (out / "grids.csv").exists()
        assert (out / "compartments.json").exists()
        assert (out / "villages.csv").exists()

    def test_deterministic_bytes(self, tmp_path):
        args = ["synth", "--seed", "5", "--region", "0,0,1060,530",
                "--compartments", "6", "--villages", "2"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        for name in ("grids.csv", "compartments.json", "villages.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_bad_region_format(self, tmp_path, capsys):
        assert main(["synth", "--seed", "1", "--region", "0,0,100",
                     "--out", str(tmp_path / "x")]) == 1
        assert capsys.readouterr().err.startswith("error: --region must be x0,y0,x1,y1")

    def test_degenerate_region(self, tmp_path, capsys):
        assert main(["synth", "--seed", "1", "--region", "0,0,100,100",
                     "--out", str(tmp_path / "x")]) == 1
        assert "error: " in capsys.readouterr().err


class TestTrainScore:
    def test_train_prints_report(self, pipeline, capsys, tmp_path):
        model_path = tmp_path / "model.json"
        assert main(["train", "--landscape", str(pipeline["landscape"]),
                     "--out-model", str(model_path)]) == 0
        out = capsys.readouterr().out
        assert "trained on 8 compartments, evaluated on 2" in out
        assert "precision=" in out and "threshold=0.5" in out
        assert load_model(model_path) == load_model(pipeline["model"])

    def test_score_output(self, pipeline, capsys, tmp_path):
        out_csv = tmp_path / "scores.csv"
        assert main(["score", "--landscape", str(pipeline["landscape"]),
                     "--model", str(pipeline["model"]), "--out", str(out_csv)]) == 0
        assert capsys.readouterr().out == f"scored 32 cells at alpha=0.9 -> {out_csv}\n"
        assert load_scores(out_csv) == load_scores(pipeline["scores"])

    def test_alpha_flag(self, pipeline, capsys, tmp_path):
        out_csv = tmp_path / "scores.csv"
        assert main(["score", "--landscape", str(pipeline["landscape"]),
                     "--model", str(pipeline["model"]), "--alpha", "0.5",
                     "--out", str(out_csv)]) == 0
        assert "at alpha=0.5" in capsys.readouterr().out

    def test_config_file_and_override(self, pipeline, capsys, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("alpha = 0.4\n")
        out_csv = tmp_path / "scores.csv"
        base = ["score", "--landscape", str(pipeline["landscape"]),
                "--model", str(pipeline["model"]), "--config", str(config),
                "--out", str(out_csv)]
        assert main(base) == 0
        assert "at alpha=0.4" in capsys.readouterr().out
        assert main(base + ["--alpha", "0.2"]) == 0
        assert "at alpha=0.2" in capsys.readouterr().out

    def test_missing_model_file(self, pipeline, capsys, tmp_path):
        assert main(["score", "--landscape", str(pipeline["landscape"]),
                     "--model", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "s.csv")]) == 1
        assert capsys.readouterr().err.startswith("error: ")


class TestSweepTune:
    def test_sweep_rows(self, pipeline, capsys):
        assert len(load_sweep(pipeline["sweep"])) == 11

    def test_tune_recovers_alpha(self, capsys):
        assert main(["tune", "--sweep", str(GOLDEN_SWEEP_CSV),
                     "--reference", "48,17.5,34,0.5"]) == 0
        assert capsys.readouterr().out == "alpha=0.9\n"

    def test_tune_bad_reference(self, capsys):
        assert main(["tune", "--sweep", str(GOLDEN_SWEEP_CSV), "--reference", "1,2"]) == 1
        assert capsys.readouterr().err.startswith("error: --reference must be")


class TestReport:
    def test_table(self, pipeline, capsys):
        assert main(["report", "--scores", str(pipeline["scores"]),
                     "--landscape", str(pipeline["landscape"])]) == 0
        out = capsys.readouterr().out
        assert out.startswith(
            "class                 cells  mean_of  mean_mdf  mean_vdf  mean_nf  mean_elev  near_village\n"
        )
        assert "largely_unsuitable" in out

    def test_sites_table(self, pipeline, capsys, tmp_path):
        sites = tmp_path / "sites.csv"
        sites.write_text("site_id,x,y\n1,10.0,10.0\n2,-5.0,0.0\n")
        assert main(["report", "--scores", str(pipeline["scores"]),
                     "--landscape", str(pipeline["landscape"]),
                     "--sites", str(sites)]) == 0
        out = capsys.readouterr().out
        assert "proposed sites: 1 mapped, 1 unmapped" in out
        assert "share_pct" in out

    def test_json_export(self, pipeline, capsys, tmp_path):
        out_json = tmp_path / "summary.json"
        assert main(["report", "--scores", str(pipeline["scores"]),
                     "--landscape", str(pipeline["landscape"]),
                     "--out", str(out_json), "--format", "json"]) == 0
        assert f"wrote json summary -> {out_json}" in capsys.readouterr().out
        payload = json.loads(out_json.read_text())
        assert len(payload) == 32
        assert set(payload[0]) == {"grid_id", "s", "m", "x", "class", "exclusion_reasons"}


class TestParsing:
    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_bad_format_choice(self, pipeline):
        with pytest.raises(SystemExit) as exc:
            main(["report", "--scores", str(pipeline["scores"]),
                  "--landscape", str(pipeline["landscape"]), "--format", "xml"])
        assert exc.value.code == 2


class TestAtomicWrites:
    def test_no_temp_leftovers(self, pipeline):
        stray = [p for p in pipeline["root"].rglob(".*") if p.is_file()]
        assert stray == []

    def test_failed_write_leaves_no_file(self, pipeline, tmp_path, capsys):
        # trains fine but the output path's parent is a file, not a directory
        blocker = tmp_path / "blocker"
        blocker.write_text("occupied")
        code = main(["train", "--landscape", str(pipeline["landscape"]),
                     "--out-model", str(blocker / "model.json")])
        assert code == 1
        assert capsys.readouterr().err.startswith("error: ")
        assert blocker.read_text() == "occupied"
