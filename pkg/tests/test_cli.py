import io
import json
import os

import numpy as np
import pytest

from coos.cli import main
from coos.energy import (
    CommunityParams,
    Scenario,
    SweepConfig,
    load_scenarios,
    save_scenarios,
    sweep_config_to_dict,
)
from coos.ternary import TernaryPoint


@pytest.fixture()
def small_sweep_config(tmp_path):
    config = SweepConfig(
        levels={
            "solar_capacity_kw": (0.0, 30.0, 60.0, 90.0),
            "local_ownership_share": (0.0, 0.5, 1.0),
        }
    )
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(sweep_config_to_dict(config)))
    return str(path)


@pytest.fixture()
def normalized_file(tmp_path):
    rng = np.random.default_rng(5)
    pts = rng.dirichlet((1, 1, 1), size=30)
    params = CommunityParams()
    scenarios = [
        Scenario(
            id=i,
            params=params,
            social=float(pts[i][0]),
            environmental=float(pts[i][1]),
            economic_cost=float(50 + i),
            generation_mix=(0.3, 0.3, 0.4),
            normalized=tuple(pts[i]),
            point=TernaryPoint(*pts[i]),
        )
        for i in range(30)
    ]
    path = tmp_path / "cloud.jsonl"
    save_scenarios(str(path), scenarios)
    return str(path)


class TestSimulateNormalize:
    def test_simulate_writes_and_is_byte_deterministic(self, small_sweep_config, tmp_path):
        out1 = tmp_path / "a.jsonl"
        out2 = tmp_path / "b.jsonl"
        assert main(["simulate", "--config", small_sweep_config, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", small_sweep_config, "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert len(load_scenarios(str(out1))) == 12

    def test_normalize_pipeline(self, small_sweep_config, tmp_path):
        raw = tmp_path / "raw.jsonl"
        norm = tmp_path / "norm.jsonl"
        main(["simulate", "--config", small_sweep_config, "--out", str(raw)])
        assert main(["normalize", "--in", str(raw), "--out", str(norm)]) == 0
        scenarios = load_scenarios(str(norm))
        assert all(s.point is not None for s in scenarios)

    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_file_exits_1(self, tmp_path):
        assert main(["normalize", "--in", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "o")]) == 1


class TestAskEstimate:
    def test_scripted_ask_and_estimate_determinism(self, normalized_file, tmp_path, monkeypatch, capsys):
        answers = io.StringIO("a\nb\na\nq\n")
        monkeypatch.setattr("sys.stdin", answers)
        log_path = tmp_path / "resp.jsonl"
        assert main(
            [
                "ask",
                "--scenarios",
                normalized_file,
                "--participant",
                "alice",
                "--out",
                str(log_path),
                "--max-questions",
                "5",
            ]
        ) == 0
        text = log_path.read_text()
        assert text.count("\n") == 4  # header + 3 answers

        est1 = tmp_path / "est1.json"
        est2 = tmp_path / "est2.json"
        assert main(["estimate", "--scenarios", normalized_file, "--responses", str(log_path), "--out", str(est1)]) == 0
        assert main(["estimate", "--scenarios", normalized_file, "--responses", str(log_path), "--out", str(est2)]) == 0
        assert est1.read_bytes() == est2.read_bytes()
        doc = json.loads(est1.read_text())
        assert doc["participant_id"] == "alice"
        assert doc["response_count"] == 3


class TestConsensusPipeline:
    def _estimates(self, tmp_path):
        points = {
            "p1": (0.62, 0.2, 0.18),
            "p2": (0.6, 0.22, 0.18),
            "p3": (0.64, 0.18, 0.18),
            "p4": (0.58, 0.21, 0.21),
            "p5": (0.6, 0.2, 0.2),
            "p6": (0.63, 0.19, 0.18),
            "p7": (0.59, 0.23, 0.18),
            "p8": (0.2, 0.52, 0.28),
            "p9": (0.22, 0.48, 0.3),
            "p10": (0.18, 0.5, 0.32),
        }
        paths = []
        for pid, pt in points.items():
            path = tmp_path / f"{pid}.json"
            path.write_text(json.dumps({"participant_id": pid, "map_estimate": list(pt)}))
            paths.append(str(path))
        return paths

    def test_intent_then_consensus_and_choose(self, normalized_file, tmp_path):
        est_paths = self._estimates(tmp_path)
        intent_path = tmp_path / "intent.json"
        assert main(["intent", *est_paths, "--out", str(intent_path)]) == 0
        intent_doc = json.loads(intent_path.read_text())
        assert len(intent_doc["groups"]) == 2
        assert intent_doc["groups"][0]["size"] == 7

        geometry_path = tmp_path / "geometry.json"
        svg_path = tmp_path / "board.svg"
        rc = main(
            [
                "consensus",
                "--intent",
                str(intent_path),
                "--scenarios",
                normalized_file,
                "--constraint",
                "b>=0.2",
                "--out",
                str(geometry_path),
                "--svg",
                str(svg_path),
            ]
        )
        assert rc == 0
        doc = json.loads(geometry_path.read_text())
        assert doc["social_choice"] is not None
        assert svg_path.read_text().startswith("<svg")

        choice_path = tmp_path / "choice.json"
        assert main(
            [
                "choose",
                "--intent",
                str(intent_path),
                "--scenarios",
                normalized_file,
                "--dims-total",
                "3",
                "--dims-respected",
                "1",
                "--out",
                str(choice_path),
            ]
        ) == 0
        choice = json.loads(choice_path.read_text())
        assert choice["weights_used"][1] == pytest.approx(3 * choice["weights_used"][0])

    def test_consensus_without_participants_exits_1(self, tmp_path, capsys):
        rc = main(["consensus", "--out", str(tmp_path / "g.json")])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_svg_byte_determinism(self, normalized_file, tmp_path):
        est_paths = self._estimates(tmp_path)
        intent_path = tmp_path / "intent.json"
        main(["intent", *est_paths, "--out", str(intent_path)])
        s1, s2 = tmp_path / "b1.svg", tmp_path / "b2.svg"
        for target in (s1, s2):
            main(
                [
                    "consensus",
                    "--intent",
                    str(intent_path),
                    "--scenarios",
                    normalized_file,
                    "--out",
                    str(tmp_path / "g.json"),
                    "--svg",
                    str(target),
                ]
            )
        assert s1.read_bytes() == s2.read_bytes()


class TestExportAndReport:
    def test_export_cloud_svg(self, normalized_file, tmp_path):
        out1, out2 = tmp_path / "c1.svg", tmp_path / "c2.svg"
        assert main(["export-ternary", "--scenarios", normalized_file, "--out", str(out1)]) == 0
        assert main(["export-ternary", "--scenarios", normalized_file, "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert out1.read_text().count("<circle") == 30

    def test_report_writes_figures_and_csv(self, normalized_file, tmp_path):
        out_dir = tmp_path / "report"
        assert main(["report", "--scenarios", normalized_file, "--out-dir", str(out_dir)]) == 0
        names = sorted(os.listdir(out_dir))
        assert "scenarios.csv" in names
        assert "ternary_cloud.png" in names
        assert "index_histograms.png" in names
        assert "tradeoff_matrix.png" in names
        header = (out_dir / "scenarios.csv").read_text().splitlines()[0]
        assert header.startswith("id,")


class TestKennCli:
    def test_synth_train_predict_interventions(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        gen_out = tmp_path / "gen.json"
        assert main(
            ["kenn-synth", "--out", str(corpus), "--n", "80", "--seed", "3", "--generator-out", str(gen_out)]
        ) == 0
        model_path = tmp_path / "model.json"
        assert main(
            ["kenn-train", "--corpus", str(corpus), "--out", str(model_path), "--iterations", "300"]
        ) == 0

        record = tmp_path / "record.json"
        record.write_text(json.dumps({"features": [0.1] * 33, "traits": [0.0] * 6}))
        pred = tmp_path / "pred.json"
        assert main(["kenn-predict", "--model", str(model_path), "--record", str(record), "--out", str(pred)]) == 0
        doc = json.loads(pred.read_text())
        assert 0.0 < doc["cooperation_rate"] < 1.0
        assert len(doc["determinants"]) == 6

        interventions = tmp_path / "iv.json"
        interventions.write_text(json.dumps({"norm_salience": 2.0, "trust_signal": 1.0}))
        ranking = tmp_path / "ranking.json"
        table = tmp_path / "ranking.txt"
        assert main(
            [
                "kenn-interventions",
                "--model",
                str(model_path),
                "--corpus",
                str(corpus),
                "--interventions",
                str(interventions),
                "--out",
                str(ranking),
                "--table",
                str(table),
            ]
        ) == 0
        ranked = json.loads(ranking.read_text())
        assert len(ranked) == 2
        assert "feature" in table.read_text()

    def test_kenn_train_byte_determinism(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        main(["kenn-synth", "--out", str(corpus), "--n", "40", "--seed", "1"])
        m1, m2 = tmp_path / "m1.json", tmp_path / "m2.json"
        for target in (m1, m2):
            assert main(
                ["kenn-train", "--corpus", str(corpus), "--out", str(target), "--iterations", "150", "--seed", "9"]
            ) == 0
        assert m1.read_bytes() == m2.read_bytes()

    def test_kenn_synth_determinism(self, tmp_path):
        c1, c2 = tmp_path / "c1.jsonl", tmp_path / "c2.jsonl"
        for target in (c1, c2):
            assert main(["kenn-synth", "--out", str(target), "--n", "25", "--seed", "7"]) == 0
        assert c1.read_bytes() == c2.read_bytes()
