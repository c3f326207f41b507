import json

import pytest

from bloomclf.cli import main
from bloomclf.corpus import LABELS, load_csv


def _gensynth(tmp_path, n=12, seed=3):
    out = tmp_path / "corpus.csv"
    assert main(["gensynth", str(n), "--seed", str(seed), "--out", str(out)]) == 0
    return out


class TestGensynth:
    def test_writes_per_level_corpus(self, tmp_path, capsys):
        out = _gensynth(tmp_path, n=7, seed=1)
        items, dropped = load_csv(out)
        assert len(items) == 42
        assert dropped == 0
        assert "42 sentences" in capsys.readouterr().out

    def test_deterministic_file(self, tmp_path):
        a = _gensynth(tmp_path / "a", n=5, seed=9)
        b = _gensynth(tmp_path / "b", n=5, seed=9)
        assert a.read_bytes() == b.read_bytes()


class TestRunCommand:
    def test_end_to_end_from_csv(self, tmp_path, capsys):
        corpus = _gensynth(tmp_path, n=12, seed=3)
        outdir = tmp_path / "out"
        code = main([
            "run", "--input", str(corpus), "--seed", "3",
            "--models", "nb", "--folds", "2", "--outdir", str(outdir),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "nb: test accuracy" in out
        for name in ("metrics.json", "confusion.csv", "confusion.png",
                     "model.json", "model.bin", "report.md", "manifest.json"):
            assert (outdir / name).exists(), name

    def test_seed_required(self, tmp_path, capsys):
        assert main(["run", "--synthetic", "10", "--outdir", str(tmp_path)]) == 2
        assert "seed" in capsys.readouterr().err

    def test_config_flag_conflict(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 1}))
        code = main([
            "run", "--synthetic", "10", "--config", str(cfg),
            "--seed", "2", "--outdir", str(tmp_path / "o"),
        ])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "config"
        assert "pick one place" in err["message"]

    def test_config_file_drives_run(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "seed": 4, "models": "nb", "cv_folds": 2,
            "grids": {"nb": {"alpha": [1.0]}},
        }))
        outdir = tmp_path / "o"
        code = main([
            "run", "--synthetic", "12", "--config", str(cfg),
            "--outdir", str(outdir),
        ])
        assert code == 0
        saved = json.loads((outdir / "config.json").read_text())
        assert saved["seed"] == 4
        assert saved["models"] == ["nb"]

    def test_missing_input_file(self, tmp_path, capsys):
        code = main([
            "run", "--input", str(tmp_path / "nope.csv"),
            "--seed", "1", "--outdir", str(tmp_path / "o"),
        ])
        assert code == 3
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "data"
        assert "nope.csv" in err["message"]

    def test_corrupt_corpus(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("text,class\nhi,0\n")
        code = main([
            "run", "--input", str(bad), "--seed", "1",
            "--outdir", str(tmp_path / "o"),
        ])
        assert code == 3

    def test_unknown_model_flag(self, tmp_path):
        code = main([
            "run", "--synthetic", "10", "--seed", "1",
            "--models", "forest", "--outdir", str(tmp_path / "o"),
        ])
        assert code == 2


class TestZeroshotCommand:
    def test_mock_run_with_metrics_rescore(self, tmp_path, capsys):
        corpus = _gensynth(tmp_path, n=8, seed=5)
        outdir = tmp_path / "zs"
        code = main([
            "zeroshot", "--input", str(corpus), "--outdir", str(outdir),
        ])
        assert code == 0
        assert "mock:verbs" in capsys.readouterr().out
        metrics_path = tmp_path / "rescored.json"
        code = main([
            "metrics", "--corpus", str(corpus),
            "--verdicts", str(outdir / "verdicts.jsonl"),
            "--out", str(metrics_path),
        ])
        assert code == 0
        rescored = json.loads(metrics_path.read_text())
        saved = json.loads((outdir / "metrics.json").read_text())
        assert rescored == saved["providers"]["mock:verbs"]

    def test_unparseable_provider(self, tmp_path, capsys):
        corpus = _gensynth(tmp_path, n=4, seed=6)
        outdir = tmp_path / "zs"
        code = main([
            "zeroshot", "--input", str(corpus),
            "--provider", "mock:unparseable", "--outdir", str(outdir),
        ])
        assert code == 0
        doc = json.loads((outdir / "metrics.json").read_text())
        scores = doc["providers"]["mock:unparseable"]
        assert scores["headline"]["accuracy"] == 0.0
        assert scores["parse_failures"] == 24

    def test_two_providers_in_one_call(self, tmp_path, capsys):
        corpus = _gensynth(tmp_path, n=3, seed=6)
        outdir = tmp_path / "zs"
        code = main([
            "zeroshot", "--input", str(corpus),
            "--provider", "mock:verbs,mock:unparseable",
            "--outdir", str(outdir),
        ])
        assert code == 0
        out = capsys.readouterr().out
        # summary lines come out provider-name-sorted
        assert out.index("mock:unparseable:") < out.index("mock:verbs:")
        assert (outdir / "verdicts_mock_verbs.jsonl").exists()
        assert (outdir / "verdicts_mock_unparseable.jsonl").exists()
        assert not (outdir / "verdicts.jsonl").exists()
        doc = json.loads((outdir / "metrics.json").read_text())
        assert set(doc["providers"]) == {"mock:verbs", "mock:unparseable"}

    def test_synthetic_requires_seed(self, tmp_path):
        assert main(["zeroshot", "--synthetic", "5", "--outdir", str(tmp_path)]) == 2

    def test_http_provider_without_settings(self, tmp_path, capsys):
        corpus = _gensynth(tmp_path, n=3, seed=7)
        code = main([
            "zeroshot", "--input", str(corpus),
            "--provider", "http", "--outdir", str(tmp_path / "o"),
        ])
        assert code == 4
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "provider"

    def test_unknown_provider(self, tmp_path):
        corpus = _gensynth(tmp_path, n=3, seed=7)
        code = main([
            "zeroshot", "--input", str(corpus),
            "--provider", "oracle", "--outdir", str(tmp_path / "o"),
        ])
        assert code == 4


class TestInspectCommand:
    def test_describes_artifact(self, tmp_path, capsys):
        corpus = _gensynth(tmp_path, n=12, seed=3)
        outdir = tmp_path / "out"
        main([
            "run", "--input", str(corpus), "--seed", "3",
            "--models", "nb", "--folds", "2", "--outdir", str(outdir),
        ])
        capsys.readouterr()
        assert main(["inspect", str(outdir / "model.json")]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["model_type"] == "nb"
        assert doc["vocabulary"]["fingerprint"]
        assert doc["arrays"]["log_likelihood"][0] == 6
        # one top-10 feature list per class, heaviest first
        assert set(doc["top_features"]) == set(LABELS)
        for entries in doc["top_features"].values():
            assert len(entries) == min(10, doc["vocabulary"]["dim"])
            weights = [w for _, w in entries]
            assert weights == sorted(weights, reverse=True)
            assert all(isinstance(tok, str) for tok, _ in entries)

    def test_missing_artifact(self, tmp_path):
        assert main(["inspect", str(tmp_path / "nope.json")]) == 3


class TestMetricsCommand:
    def test_misaligned_verdicts(self, tmp_path, capsys):
        corpus = _gensynth(tmp_path, n=4, seed=2)
        verdicts = tmp_path / "v.jsonl"
        verdicts.write_text(
            '{"id": 0, "raw": "Knowledge", "parsed": "Knowledge", '
            '"latency_ms": 0.0, "attempts": 1}\n'
        )
        code = main([
            "metrics", "--corpus", str(corpus), "--verdicts", str(verdicts),
        ])
        assert code == 3
        assert "align" in capsys.readouterr().err

    def test_bad_jsonl(self, tmp_path):
        corpus = _gensynth(tmp_path, n=1, seed=2)
        verdicts = tmp_path / "v.jsonl"
        verdicts.write_text("{broken\n")
        assert main([
            "metrics", "--corpus", str(corpus), "--verdicts", str(verdicts),
        ]) == 3
