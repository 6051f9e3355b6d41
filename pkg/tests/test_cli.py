import csv
import json

import pytest

from torus_superres.cli import ExperimentConfig, main
from torus_superres.adversarial import one_dim_pair


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_grid(tmp_path, capsys):
    path = tmp_path / "v.json"
    code, out, _ = run(["verify", "--construction", "grid", "--d", "2", "--epsilon", "0.1",
                        "--output", str(path)], capsys)
    assert code == 0 and "PASS" in out
    doc = json.loads(path.read_text())
    assert doc["max_fourier_diff"] <= 1e-10 and doc["passed"]
    assert doc["params"]["grid_size"] == 7


def test_usage_errors(tmp_path, capsys):
    code, _, err = run(["verify", "--bogus"], capsys)
    assert code == 2 and "--bogus" in err
    code, _, err = run(["gen", "--construction", "grid", "--d", "2"], capsys)
    assert code == 2 and "--epsilon" in err
    code, _, err = run(["distance", "--metric", "wasserstein", "--a", str(tmp_path / "nope.json"),
                        "--b", str(tmp_path / "nope.json")], capsys)
    assert code == 2
    code, _, _ = run(["frobnicate"], capsys)
    assert code == 2
    code, _, err = run(["gen", "--construction", "onedim", "--d", "2", "--epsilon", "0.1"], capsys)
    assert code == 2 and "--d" in err


def test_distance_on_comb_files(tmp_path, capsys):
    D1, D2 = one_dim_pair(0.1)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(D1.to_dict()))
    b.write_text(json.dumps(D2.to_dict()))
    code, out, _ = run(["distance", "--metric", "wasserstein", "--a", str(a), "--b", str(b)], capsys)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.1, abs=1e-6)
    code, out, _ = run(["distance", "--metric", "hh", "--a", str(a), "--b", str(b)], capsys)
    res = json.loads(out)
    assert res["lower"] == pytest.approx(0.2) and res["upper"] == pytest.approx(0.2)
    assert res["params"]["eps_dist"] == 0.49


def test_gen_is_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("x.json", "y.json"):
        path = tmp_path / name
        argv = ["gen", "--construction", "random", "--d", "2", "--epsilon", "0.01", "--M", "16",
                "--jackson-n", "3", "--kappa", "1.5", "--seed", "4", "--output", str(path)]
        assert run(argv, capsys)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    code, out, _ = run(["verify", "--input", str(tmp_path / "x.json")], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_pair_file_roundtrip(tmp_path, capsys):
    pair = tmp_path / "p.json"
    run(["gen", "--construction", "onedim", "--d", "1", "--epsilon", "0.1", "--output", str(pair)], capsys)
    code, out, _ = run(["distance", "--metric", "wasserstein", "--pair", str(pair)], capsys)
    assert json.loads(out)["value"] == pytest.approx(0.1, abs=1e-6)
    code, out, _ = run(["verify", "--input", str(pair)], capsys)
    assert code == 0
    code, _, err = run(["verify", "--input", str(pair), "--construction", "grid"], capsys)
    assert code == 2 and "--construction" in err


def test_cube_verify(tmp_path, capsys):
    pair = tmp_path / "c.json"
    code, _, _ = run(["gen", "--construction", "cube", "--d", "10", "--epsilon", "0.005",
                      "--no-range-check", "--output", str(pair)], capsys)
    assert code == 0
    code, out, _ = run(["verify", "--input", str(pair)], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["checks"]["hh_witness"]["pass"]
    code, _, _ = run(["gen", "--construction", "cube", "--d", "10", "--epsilon", "0.005"], capsys)
    assert code == 2


def test_failed_generation_exits_one(capsys):
    code, _, err = run(["gen", "--construction", "random", "--d", "1", "--epsilon", "0.05",
                        "--M", "64", "--jackson-n", "80", "--max-retries", "3"], capsys)
    assert code == 1 and "separation" in err


def test_reconstruct_pipeline(tmp_path, capsys):
    table, comb = tmp_path / "t.json", tmp_path / "g.json"
    code, _, _ = run(["gen", "--construction", "spikes", "--d", "1", "--epsilon", "0.25",
                      "--bandlimit", "24", "--kappa", "0.01", "--seed", "2", "--output", str(table)], capsys)
    assert code == 0
    flags = ["--d", "1", "--epsilon", "0.25", "--bandlimit", "24", "--jackson-n", "4",
             "--grid-K", "64", "--kappa", "0.01"]
    code, _, _ = run(["reconstruct", "--input", str(table), *flags, "--output", str(comb)], capsys)
    assert code == 0
    doc = json.loads(comb.read_text())
    assert doc["wasserstein_to_signal"] <= 1.0
    assert doc["params"]["K"] == 64 and doc["params"]["delta"] == pytest.approx(0.01 / 8)
    code, _, err = run(["reconstruct", "--input", str(table), "--d", "1", "--epsilon", "0.25",
                        "--bandlimit", "20"], capsys)
    assert code == 2 and "--bandlimit" in err


def test_bump_command(tmp_path, capsys):
    code, out, _ = run(["bump", "--d", "16", "--epsilon", "0.25", "--verify", "--points", "500"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["bump"]["k"] == 85
    assert doc["bump"]["trig_degree"] == 2 * doc["bump"]["deg_q"]


def test_report_csv(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code, out, _ = run(["report", "--kind", "recon", "--trials", "3", "--output", str(path)], capsys)
    assert code == 0 and "3/3" in out
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 3 and all(r["pass"] == "True" for r in rows)
    assert {"seed", "wasserstein", "kappa", "grid_K"} <= set(rows[0])
    code, out, _ = run(["report", "--kind", "hh", "--d", "1", "--trials", "2", "--format", "json"], capsys)
    assert code == 0 and len(json.loads(out)["rows"]) == 4


def test_config_roundtrip():
    cfg = ExperimentConfig("verify", {"d": 2, "epsilon": 0.1}, seed=2**63 - 1, output="v.json")
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg
