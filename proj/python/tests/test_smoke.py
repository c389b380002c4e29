import json
import math
import os
import pathlib

import numpy as np
import pytest

import uaeval

FIXTURES = pathlib.Path(os.environ.get(
    "UAEVAL_FIXTURE_DIR",
    pathlib.Path(__file__).resolve().parents[2] / "data" / "fixtures"))


def two_annotators():
    return [uaeval.PartialRanking(3, [[0], [1]]), uaeval.PartialRanking(3, [[1]])]


def test_irn_hand_values():
    normalized, unnormalized = uaeval.irn_aggregate(two_annotators())
    assert unnormalized == [1.0, 1.5, 0.0]
    assert normalized == [0.4, 0.6, 0.0]
    assert uaeval.top1_label(normalized) == 1


def test_ranking_validation_raises():
    with pytest.raises(uaeval.UaevalError, match="DuplicateClassAcrossBlocks"):
        uaeval.PartialRanking(3, [[0], [0, 1]])
    with pytest.raises(ValueError):
        uaeval.PartialRanking(2, [[5]])


def test_soft_permutation_hand_example():
    p = uaeval.PartialRanking(4, [[3], [0, 2], [1]]).soft_permutation()
    expected = np.array([[0, 0, 0, 1], [.5, 0, .5, 0], [.5, 0, .5, 0],
                         [0, 1, 0, 0]])
    np.testing.assert_array_equal(p, expected)


def test_samplers_return_simplex_rows():
    rankings = two_annotators()
    for samples in (uaeval.prirn_sample(rankings, 20.0, 300, seed=1),
                    uaeval.gibbs_run(rankings, 3, num_samples=300, burn_in=50,
                                     seed=1),
                    uaeval.dirichlet_from_counts([2, 1, 0], num_samples=300)):
        assert samples.shape == (300, 3)
        np.testing.assert_allclose(samples.sum(axis=1), 1.0, atol=1e-9)
        assert (samples >= 0).all()
    # Zero-IRN classes stay at zero under PrIRN.
    assert (uaeval.prirn_sample(rankings, 20.0, 50)[:, 2] == 0).all()


def test_same_seed_same_samples():
    a = uaeval.gibbs_run(two_annotators(), 3, num_samples=100, seed=9)
    b = uaeval.gibbs_run(two_annotators(), 3, num_samples=100, seed=9)
    np.testing.assert_array_equal(a, b)


def test_likelihood_matches_hand_value():
    lam = [0.5, 0.3, 0.2]
    r = uaeval.PartialRanking(3, [[0], [1]])
    assert math.isclose(math.exp(uaeval.pl_log_prob(lam, r)),
                        0.5 * 0.3 / 0.5, rel_tol=1e-12)
    assert math.isclose(uaeval.pl_log_likelihood(lam, [r, r], repetitions=2),
                        4 * uaeval.pl_log_prob(lam, r), rel_tol=1e-12)


def test_point_mass_metrics():
    samples = np.tile([0.1, 0.6, 0.3], (5, 1))
    assert uaeval.annotation_certainty(samples, 1) == 1.0
    assert uaeval.ua_topk_accuracy(samples, [1, 2, 0], 1) == 1.0
    assert uaeval.ua_topk_accuracy(samples, [0, 2, 1], 2) == 0.0
    assert uaeval.ua_set_accuracy(samples, [2, 1, 0], 2) == 1.0
    assert uaeval.ua_average_overlap(samples, [1, 2, 0], 3) == 1.0
    risk = uaeval.risk_metrics(samples, [0, 2, 1], [1, 0, 2])
    assert risk["risk_certainty"] == 1.0
    assert math.isclose(risk["expected_risk_mean"], 1.5)


def test_mean_average_overlap_self_is_one():
    r = uaeval.PartialRanking(5, [[2], [0, 4]])
    assert math.isclose(uaeval.mean_average_overlap(r, r, 3), 1.0,
                        abs_tol=1e-12)


def test_score_threshold_certainty():
    out = uaeval.score_threshold_certainty([1.0, 1.2, 0.9, 1.1], threshold=0.0,
                                           num_samples=2000, seed=3)
    assert 0.5 <= out["certainty"] <= 1.0
    assert out["mean_prob_below"] < 0.5


def test_selfcheck_passes():
    results = uaeval.selfcheck()
    assert len(results) == 5
    assert all(passed for _, passed, _ in results), results


def test_run_on_fixture(tmp_path):
    config = uaeval.RunConfig.for_model("pl")
    config.reliabilities = [3.0]
    config.num_samples = 200
    config.burn_in = 100
    config.output_dir = tmp_path
    case_dir = FIXTURES / "derm_case"
    result = uaeval.run(config, case_dir / "cases.jsonl", case_dir / "annotations.jsonl",
                        case_dir / "predictions_model_b.jsonl",
                        case_dir / "classes.json")
    assert result["failures"] == []
    manifest = json.loads(pathlib.Path(result["manifest"]).read_text())
    assert manifest["model"] == "pl"
    rows = [json.loads(line) for line in
            pathlib.Path(result["reports"][0]).read_text().splitlines()]
    top3 = [r["value"] for r in rows
            if r["kind"] == "case" and r["metric"] == "ua_topk_accuracy"
            and r["k"] == 3]
    assert top3 and top3[0] > 0.9


def test_bad_config_raises(tmp_path):
    config = uaeval.RunConfig()
    config.reliabilities = []
    with pytest.raises(uaeval.UaevalError, match="ConfigError"):
        config.validate()
    with pytest.raises(ValueError):
        config.stage = "nonsense"
