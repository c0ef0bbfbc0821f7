import csv
import io
import json
import os

import numpy as np
import pytest

from whitehead.cluster_lab import (
    ConfigError,
    ExperimentConfig,
    always,
    estimate_genericity,
    features_csv,
    nearest_centroid_classify,
    run_experiment,
    separation,
    strictly_minimal_predicate,
    uniform_neighbourhood,
    write_outputs,
)
from whitehead.core import CyclicWord, make_rng
from whitehead.currents import euler_word
from whitehead.graph import graph_distance, header
from whitehead.minimizer import is_minimal_by_wh2

SMALL = dict(sample_size=60, word_length=200, apply_probability=1.0, seed=3)


@pytest.fixture(scope="module")
def two_phi():
    cfg = ExperimentConfig(automorphisms=["a->ab, b->b", "b->ba, a->a"], **SMALL)
    return run_experiment(cfg)


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.k == 2 and cfg.automorphisms == ["a->ab, b->b"]

    @pytest.mark.parametrize(
        "bad",
        [
            {"k": 1},
            {"sample_size": 0},
            {"apply_probability": 1.5},
            {"automorphisms": []},
            {"epsilon": 0},
            {"colour": "red"},
        ],
    )
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(bad)

    def test_simple_rejected(self):
        cfg = ExperimentConfig(automorphisms=["perm(a->b, b->a)"])
        with pytest.raises(ConfigError):
            cfg.parsed_automorphisms()

    def test_bad_literal(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(automorphisms=["a->"]).parsed_automorphisms()

    def test_from_json(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"sample_size": 5, "seed": 9}))
        cfg = ExperimentConfig.from_json(str(p))
        assert cfg.sample_size == 5 and cfg.seed == 9
        p.write_text("{not json")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json(str(p))


class TestRun:
    def test_no_transformation(self):
        rep = run_experiment(ExperimentConfig(sample_size=20, word_length=50, apply_probability=0))
        assert rep.transformed() == []
        assert rep.clusters[0].size == 0 and rep.clusters[0].mean_distance is None
        assert np.isnan(nearest_centroid_classify(rep))

    def test_deterministic(self):
        cfg = ExperimentConfig(sample_size=15, word_length=80, seed=11)
        assert run_experiment(cfg).to_dict() == run_experiment(cfg).to_dict()

    def test_workers_match_serial(self):
        cfg = ExperimentConfig(sample_size=15, word_length=80, seed=11)
        par = ExperimentConfig(sample_size=15, word_length=80, seed=11, workers=2)
        a, b = run_experiment(cfg).to_dict(), run_experiment(par).to_dict()
        a["config"].pop("workers"), b["config"].pop("workers")
        assert a == b

    def test_records(self, two_phi):
        for r in two_phi.records:
            assert sum(r["features"]) == pytest.approx(1)
            assert len(r["features"]) == 6
            if r["label"] is not None:
                assert r["image_length"] > r["word_length"]

    def test_minimized_words_are_minimal(self):
        # W2 words, i.e. records without a label, must admit no decreasing wh2 move
        cfg = ExperimentConfig(sample_size=40, word_length=12, apply_probability=0, seed=1)
        rep = run_experiment(cfg)
        assert any(r["minimization_steps"] for r in rep.records)
        rng_seeds = np.random.SeedSequence(1).spawn(40)
        from whitehead.core import _sample_cyclically_reduced
        from whitehead.minimizer import minimize

        for r, s in zip(rep.records, rng_seeds):
            w = minimize(_sample_cyclically_reduced(12, np.random.default_rng(s), 2)[0], 2).result
            assert len(w) == r["word_length"]
            assert is_minimal_by_wh2(w, 2)

    def test_separation_and_accuracy(self, two_phi):
        assert nearest_centroid_classify(two_phi) == 1.0
        inter, intra = separation(two_phi)
        assert inter > 3 * intra
        assert two_phi.centroid_distances[0][0] == 0

    def test_cluster_summaries(self, two_phi):
        for c in two_phi.clusters:
            assert c.size > 0
            assert c.fraction_reduced == 1.0
            assert c.stretch == {"num": 7, "den": 6}
            assert c.mean_distance <= c.p95_distance <= c.max_distance

    def test_conjugate_phi_shares_centroid(self):
        cfg = ExperimentConfig(automorphisms=["a->ab, b->b", "a->ab * inner(ba)"], **SMALL)
        rep = run_experiment(cfg)
        assert rep.centroid_distances[0][1] == pytest.approx(0, abs=1e-12)
        assert rep.clusters[0].centroid == pytest.approx(rep.clusters[1].centroid)


class TestOutputs:
    def test_write(self, two_phi, tmp_path):
        write_outputs(two_phi, str(tmp_path))
        assert sorted(os.listdir(tmp_path)) == ["clusters.svg", "features.csv", "report.json"]
        data = json.loads((tmp_path / "report.json").read_text())
        assert data["header"] == header(2)
        assert len(data["records"]) == 60
        svg = (tmp_path / "clusters.svg").read_text()
        assert svg.lstrip().startswith("<?xml")

    def test_svg_reproducible(self, two_phi, tmp_path):
        write_outputs(two_phi, str(tmp_path / "a"))
        write_outputs(two_phi, str(tmp_path / "b"))
        assert (tmp_path / "a" / "clusters.svg").read_bytes() == (tmp_path / "b" / "clusters.svg").read_bytes()

    def test_csv(self, two_phi):
        rows = list(csv.reader(io.StringIO(features_csv(two_phi))))
        assert rows[0] == ["id", "label"] + header(2) + ["dist_0", "dist_1"]
        assert len(rows) == 61
        feats = [float(x) for x in rows[1][2:8]]
        assert feats == two_phi.records[0]["features"]


class TestGenericity:
    def test_always(self):
        tab = estimate_genericity(always, "C", [5, 10], 20, make_rng(0))
        assert [f for _, _, f in tab.rows] == [1.0, 1.0]
        assert tab.to_dict()["rows"][0] == {"n": 5, "samples": 20, "frequency": 1.0}

    def test_strict_minimality_grows(self):
        pred = strictly_minimal_predicate(2)
        tab = estimate_genericity(pred, "C", [4, 200], 200, make_rng(1))
        small, large = tab.rows[0][2], tab.rows[1][2]
        assert small < large and large >= 0.95

    def test_domain_f(self):
        tab = estimate_genericity(always, "F", 30, 10, make_rng(2))
        assert tab.frequency == 1.0 and tab.domain == "F"

    def test_uniform_neighbourhood(self):
        pred = uniform_neighbourhood(0.01, 2, 2)
        assert pred(euler_word(2, 2).w)
        assert not pred(CyclicWord.parse("aaab"))
        tab = estimate_genericity(uniform_neighbourhood(0.02, 2, 2), "C", [100, 5000], 50, make_rng(3))
        assert tab.rows[1][2] > tab.rows[0][2]

    def test_errors(self):
        with pytest.raises(ValueError):
            estimate_genericity(always, "X", 5, 5)
        with pytest.raises(ValueError):
            estimate_genericity(always, "C", 0, 5)


def test_centroid_is_the_limit(two_phi):
    # the mean feature vector of each cluster approaches its predicted centre
    for j, c in enumerate(two_phi.clusters):
        feats = np.array([r["features"] for r in two_phi.records if r["label"] == c.label])
        assert np.max(np.abs(feats.mean(axis=0) - np.array(c.centroid))) < 0.03
        assert graph_distance is not None
