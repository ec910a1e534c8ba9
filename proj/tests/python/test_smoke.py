import json

import pytest

import ocpsim

TOY = json.dumps(
    {"tau": 2, "drivers": [{"activation_prob": 1.0}], "noisy": [], "background": []}
)


def test_spec_json_roundtrip():
    doc = json.loads(ocpsim.spec_json("dist1"))
    assert doc["tau"] == 10
    assert len(doc["drivers"]) == 4
    # Canonical JSON of an inline document resolves to the same spec.
    assert ocpsim.spec_json(ocpsim.spec_json("dist1")) == ocpsim.spec_json("dist1")
    with pytest.raises(Exception):
        ocpsim.spec_json("no_such_preset")


def test_sample_trajectories_shape_and_determinism():
    a = ocpsim.sample_trajectories("dist1", 5, seed=42)
    b = ocpsim.sample_trajectories("dist1", 5, seed=42)
    assert a == b
    assert len(a) == 5
    for traj in a:
        assert len(traj) == 10
        assert all(len(row) == 8 for row in traj)
        assert all(v in (0, 1) for row in traj for v in row)
        # Driver columns never switch off.
        for j in range(4):
            col = [row[j] for row in traj]
            assert col == sorted(col)


def test_sample_pairs_structure():
    pairs = ocpsim.sample_pairs("dist1", "ocp", 50, seed=7)
    assert len(pairs) == 50
    for p in pairs:
        assert p["y"] in (-1, 1)
        assert 1 <= p["w_first"] <= 10 and 1 <= p["w_second"] <= 10
        # OCP windows are consecutive; the label encodes the order.
        assert p["w_second"] - p["w_first"] == (1 if p["y"] == 1 else -1)


def test_population_risk_toy_value():
    r = ocpsim.population_risk(TOY, "ocp", [0])
    assert r["err"] == pytest.approx(0.25, abs=1e-12)
    assert r["excess"] == pytest.approx(0.0, abs=1e-12)
    rb = ocpsim.population_risk(TOY, "ocp_biased", [0])
    assert rb["err"] == pytest.approx(0.375, abs=1e-12)


def test_oracle_functions():
    opt = ocpsim.optimal_subset("dist1", "ocp", 4)
    assert opt["subset"] == [0, 1, 2, 3]
    assert opt["is_unique"]
    eps = ocpsim.epsilon_zero("dist1", "ocp", 4)
    assert eps == pytest.approx(0.010179072, abs=1e-9)
    bound = ocpsim.unlabeled_sample_bound(0.1, 8, 4, 0.05)
    assert bound == pytest.approx(1726.104375, abs=1e-4)
    table = ocpsim.risk_table("dist1", "pcl", 4)
    assert len(table) == 70
    assert all("m_expectation" not in row for row in table)


def test_verify_assumptions():
    assert ocpsim.verify_assumptions("dist1")["all_hold"]
    assert ocpsim.verify_assumptions("dist2")["all_hold"]


def test_erm_and_sweep():
    res = ocpsim.erm_subset_search("dist1", "ocp", 2000, 4, seed=3)
    assert len(res["subset"]) == 4
    assert 0 <= res["recovered"] <= 4
    assert 0.0 <= res["empirical_risk"] <= 0.5

    rows = ocpsim.run_sweep("dist1", ["ocp", "pcl"], [50, 100], 2, 4, 1, 0)
    assert len(rows) == 8
    assert [r["scheme"] for r in rows[:4]] == ["ocp"] * 4
    again = ocpsim.run_sweep("dist1", ["ocp", "pcl"], [50, 100], 2, 4, 1, 2)
    assert rows == again
