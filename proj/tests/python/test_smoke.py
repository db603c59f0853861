import math
import os
import subprocess

import pytest

import odflow


def test_distance_and_spec():
    f = (0.0, 0.0, 10.0, 10.0)
    g = (1.0, 2.0, 10.0, 10.0)
    assert odflow.flow_distance(f, g) == 3.0
    assert odflow.flow_distance(f, g, odflow.DistanceSpec("manhattan", "additive", 0.5)) == 1.5
    assert math.isclose(odflow.flow_distance(f, g, odflow.DistanceSpec("euclidean")), math.sqrt(5))
    with pytest.raises(ValueError):
        odflow.DistanceSpec("chebyshev")


def test_dataset_roundtrip(tmp_path):
    data = odflow.FlowDataset([(0.1, 0.2, 0.3, 0.4), (0.5, 0.6, 0.7, 0.8)], ["aggregated", "noise"])
    assert len(data) == 2
    assert data.labels == ["aggregated", "noise"]
    path = tmp_path / "flows.csv"
    path.write_text(data.to_csv())
    back = odflow.read_flows(str(path))
    assert back.flows == data.flows
    assert back.labels == data.labels


def test_parse_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("ox,oy,dx,dy\n0.1,0.2,oops,0.4\n")
    with pytest.raises(odflow.ParseError, match="bad.csv:2"):
        odflow.read_flows(str(path))


def test_pipeline_on_planted_data():
    data, segments = odflow.simulate(4, seed=7)
    assert len(data) == 700
    assert any(s[4] == "main" for s in segments)

    curve = odflow.compute_l_curve(data)
    assert len(curve["r"]) == 100
    assert max(curve["L"]) > 0.05

    scales = odflow.detect_scales(data)
    assert scales["found"]
    assert 0.08 <= scales["maximal_scale"] <= 0.16

    cluster = odflow.extract_key_cluster(data, scales["maximal_scale"], 20)
    rep = odflow.score(cluster["member_ids"], data)
    assert rep["f1"] > 0.85

    labels = odflow.flow_dbscan(data, 0.1, 10)
    assert len(labels) == 700


def test_local_values_sum_to_global():
    data = odflow.sample_csr(300, seed=2)
    lam = odflow.estimate_intensity(data)
    r = 0.1
    total = sum((odflow.local_l_function(data, i, r, lam) + r) ** 4 for i in range(len(data)))
    assert math.isclose((odflow.l_function(data, r, lam) + r) ** 4, total, rel_tol=1e-9)
    assert math.isclose(odflow.k_function(data, r, lam), 4 * total)


def test_envelope_and_errors():
    env = odflow.csr_envelope(200, [0.05, 0.1, 0.2], sims=20, seed=1)
    assert all(lo <= hi for lo, hi in zip(env["lower"], env["upper"]))
    with pytest.raises(odflow.OdflowError):
        odflow.simulate(9)
    with pytest.raises(ValueError):
        odflow.score([10_000], odflow.simulate(1)[0])


def test_small_benchmark():
    rows = odflow.run_benchmark(patterns=[1], seeds=2, methods=["mlf", "dbscan"])
    avg = {r["method"]: r for r in rows if r["pattern"] == "average"}
    assert set(avg) == {"mlf", "dbscan"}
    assert avg["mlf"]["f1"] > 0.8


@pytest.mark.skipif("ODFLOW_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_simulate(tmp_path):
    cli = os.environ["ODFLOW_CLI"]
    flows = tmp_path / "f.csv"
    net = tmp_path / "n.csv"
    subprocess.run([cli, "simulate", "--pattern", "2", "--seed", "3", "--flows-out", str(flows),
                    "--network-out", str(net)], check=True)
    data = odflow.read_flows(str(flows))
    assert data.flows == odflow.simulate(2, seed=3)[0].flows
