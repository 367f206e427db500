import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

import seedkit

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "synthetic"


def test_worked_example():
    s = seedkit.object_recall_precision({"dog": 0.9, "cat": 0.5}, {"dog": 0.6, "cat": 0.4})
    r = 56 / 91
    assert s["recall"] == pytest.approx(r, abs=1e-12)
    assert s["precision"] == pytest.approx(1.0, abs=1e-12)
    assert s["f1"] == pytest.approx(2 * r / (1 + r), abs=1e-12)


def test_detection_lists_and_weighting():
    gt = [("dog", 0.8, [0, 0, 1, 1]), ("cat", 0.8, [0, 0, 0, 0])]
    recon = [("dog", 0.8, [0, 0, 0.5, 0.5])]
    assert seedkit.object_recall_precision(gt, recon, weighting="size")["recall"] == pytest.approx(2 / 3)
    with pytest.raises(seedkit.ValidationError):
        seedkit.object_recall_precision({"dog": 1.5}, {})


def test_degenerate_side_is_flagged():
    s = seedkit.object_recall_precision({"dog": 0.8}, {})
    assert s["precision_degenerate"] and s["f1"] == 0.0


def test_vector_metrics_match_numpy():
    rng = np.random.default_rng(0)
    u, v = rng.normal(size=50), rng.normal(size=50)
    assert seedkit.cosine_similarity(u, v) == pytest.approx(u @ v / np.linalg.norm(u) / np.linalg.norm(v))
    assert seedkit.pearson(u, v) == pytest.approx(stats.pearsonr(u, v)[0], abs=1e-12)
    assert seedkit.correlation_distance(u, v) == 1.0 - seedkit.pearson(u, v)
    assert seedkit.seed_score(0.7619, 0.5, 0.3) == pytest.approx(0.5206333333333334, abs=1e-15)
    with pytest.raises(seedkit.UndefinedError):
        seedkit.pearson([1, 1, 1], [1, 2, 3])


def test_images():
    a = np.full((32, 32, 3), 100, np.uint8)
    b = np.full((32, 32, 3), 150, np.uint8)
    c1 = (0.01 * 255) ** 2
    assert seedkit.ssim(a, b) == pytest.approx((2 * 100 * 150 + c1) / (100**2 + 150**2 + c1), abs=1e-6)
    x = np.random.default_rng(1).integers(0, 121, size=(20, 20, 3), dtype=np.uint8)
    assert seedkit.pixcorr(x, 2 * x + 7) == pytest.approx(1.0, abs=1e-12)
    overall, per_image = seedkit.two_way_identification([[1, 2, 3], [3, 1, 2]], [[1, 2, 3], [3, 1, 2]])
    assert overall == 1.0 and per_image == [1.0, 1.0]


def test_rank_statistics_match_scipy():
    rng = np.random.default_rng(2)
    x, y = rng.integers(0, 5, 200).astype(float), rng.integers(0, 4, 200).astype(float)
    assert seedkit.kendall_tau_b(x, y) == pytest.approx(stats.kendalltau(x, y).statistic, abs=1e-12)
    assert 0.0 <= seedkit.pairwise_accuracy(x, y) <= 1.0


def test_icc_fixture():
    r = seedkit.icc_2k([[1, 2], [3, 4], [5, 6]])
    assert r["icc"] == pytest.approx(8 / 8.5, abs=1e-12)
    assert r["p_value"] == 0.0


def test_bootstrap_is_deterministic():
    ratings = seedkit.load_ratings(str(FIXTURE / "ratings.csv"))
    human = seedkit.human_scores(ratings)
    noisy = {k: v + 0.5 * math.sin(i) for i, (k, v) in enumerate(sorted(human.items()))}
    a = seedkit.bootstrap_delta(ratings, human, noisy, iterations=200, seed=3)
    b = seedkit.bootstrap_delta(ratings, human, noisy, iterations=200, seed=3, threads=4)
    assert a == b
    assert a["lower"] <= a["upper"]
    same = seedkit.bootstrap_delta(ratings, human, human, iterations=50)
    assert same["lower"] == same["upper"] == 0.0


def test_run_score_in_process(monkeypatch):
    monkeypatch.chdir(FIXTURE)
    files, summary = seedkit.run("score", detections="detections.jsonl", embeddings="embeddings.jsonl", out="out")
    assert "scores.csv" in files and "seed" in summary
    report = json.loads(files["score_report.json"])
    assert report["n_pairs"] == 24
    golden = (FIXTURE.parent / "golden" / "score" / "scores.jsonl").read_text().splitlines()
    seeds = {json.loads(l)["image_id"]: json.loads(l)["scores"]["seed"] for l in golden}
    for line in files["scores.jsonl"].splitlines():
        row = json.loads(line)
        assert row["scores"]["seed"] == seeds[row["image_id"]]


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        seedkit.parse_ratings("evaluator_id,image_id,semantic\nA,x,9\n")
    with pytest.raises(seedkit.SeedkitError):
        seedkit.run("nonsense")
