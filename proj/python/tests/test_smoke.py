import numpy as np
import pytest

import mpc_kcenter as kc


def test_planted_search_respects_certificate():
    inst = kc.generate_planted(6, 600, 2, 1.0, 100.0, seed=3)
    pts = inst["points"]
    assert pts.shape == (600, 2)
    res = kc.search(pts, k=6, seed=1, psi=1)
    assert len(res["centers"]) <= res["threshold"]
    assert kc.cost(pts, res["centers"]) <= res["cost_certificate"] * (1 + 1e-9)
    assert res["trace"][0]["stage"] == "phase1.1.iter1"
    # Same seed, same answer.
    assert kc.search(pts, k=6, seed=1, psi=1)["centers"] == res["centers"]


def test_brute_force_and_gonzalez():
    line = np.array([[0.0], [1.0], [10.0]])
    centers, opt = kc.brute_force_opt(line, 2)
    assert opt == 1.0
    assert centers == [0, 2]
    assert kc.gonzalez(line, 1) == [0]


def test_schedule_helpers():
    assert kc.iter_log(65536, 2) == 4.0
    assert kc.log_star(16) == 3
    assert kc.center_count_threshold(10000, 65536, 1) == 43393


def test_normalize_sets_unit_closest_pair():
    pts = kc.normalize(np.array([[0.0, 0.0], [0.0, 2.0], [0.0, 7.0]]))
    assert pts[1, 1] == pytest.approx(1.0)


def test_run_experiment_report():
    rep = kc.run_experiment({"planted": "4,300,2,1,100", "seed": 2, "psi": 1})
    assert rep["baseline_kind"] == "planted_r_star"
    assert rep["cost_achieved"] <= rep["cost_certificate"] * (1 + 1e-9)


def test_errors_carry_kind():
    with pytest.raises(kc.KCenterError) as info:
        kc.run_experiment({"planted": "4,300,2,1,100", "sed": 1})
    assert info.value.kind == "Validation"
    assert "'sed'" in str(info.value)
    with pytest.raises(kc.KCenterError) as info:
        kc.normalize(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert info.value.kind == "DuplicatePoints"
