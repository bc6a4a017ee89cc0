import json

import pytest

import frameseq.cli as cli
from frameseq.gram import InconsistencyError


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert out, f"no stdout (stderr: {err})"
    return code, json.loads(out)


def test_analyze_box_orthonormal(capsys):
    code, doc = run_json(capsys, "analyze", "--profile", "box", "--indices", "Z")
    assert code == 0
    assert doc["schema"] == "frameseq/1"
    assert doc["result"]["report"]["classification"] == "orthonormal"
    assert doc["config_hash"]


def test_analyze_exit_codes(capsys):
    code, out, err = run(capsys, "analyze", "--profile", "wavelet", "--indices", "Z")
    assert code == 1 and "usage error" in err
    code, out, err = run(capsys, "analyze", "--profile", "box", "--grid", "100")
    assert code == 1 and "power of two" in err
    # non-integer explicit sets carry no lattice structure: undetermined
    code, doc = run_json(
        capsys, "analyze", "--profile", "taper:2:1", "--indices", "list:0.5,1.5,2.25"
    )
    assert code == 2
    assert doc["result"]["report"]["classification"] == "undetermined"


def test_analyze_inconsistency_exit(capsys, monkeypatch):
    def boom(*a, **k):
        raise InconsistencyError("routes disagree")

    monkeypatch.setattr(cli, "classify", boom)
    code, out, err = run(capsys, "analyze", "--profile", "box")
    assert code == 3 and "inconsistency" in err


def test_missing_subcommand_is_usage_error(capsys):
    code, out, err = run(capsys)
    assert code == 1


def test_periodize_summary_and_csv(capsys, tmp_path):
    csv_path = tmp_path / "phi.csv"
    code, doc = run_json(
        capsys, "periodize", "--profile", "half", "--grid", "1024", "--csv", str(csv_path)
    )
    assert code == 0
    assert doc["result"]["summary"]["sup"] == 1.0
    assert doc["result"]["zero_runs"] == 1
    header = csv_path.read_text().splitlines()[0]
    assert header == "xi,phi"


def test_gram_reports_route_and_bounds(capsys):
    code, doc = run_json(
        capsys, "gram", "--profile", "taper:2:1", "--b", "2", "--indices", "Z", "--window", "32"
    )
    assert code == 0
    res = doc["result"]
    assert res["route"] == "periodization-grid"
    assert res["dim"] == 65
    assert 0 < res["A_est"] <= res["B_est"]
    assert res["checked_shifts"]
    assert not res["degenerate"]


def test_density_with_envelope(capsys):
    code, doc = run_json(
        capsys,
        "density",
        "--indices", "Z",
        "--window", "4000",
        "--xmax", "4000",
        "--envelope", "power:0.75",
    )
    assert code == 0
    res = doc["result"]
    assert res["table"][0] == {"x": 1.0, "D": 2}
    assert "violated" in res["upper_bound_necessary"]["verdict"]
    assert res["upper_bound_necessary"]["growth_quarter"] >= 2.0
    assert res["g_equivalence"]["hypotheses_hold"] and res["g_equivalence"]["C"] < 10
    assert res["upper_bound_sufficient"]["verdict"] == "diverges"


def test_density_envelope_token_errors(capsys):
    code, out, err = run(
        capsys, "density", "--indices", "squares:80", "--envelope", "gaussian", "--xmax", "1000"
    )
    assert code == 1 and "envelope" in err
    code, doc = run_json(
        capsys,
        "density",
        "--indices", "squares:80",
        "--envelope", "exp:1:xlog",
        "--xmax", "1000",
    )
    assert code == 0
    assert doc["result"]["g_equivalence"]["hypotheses_hold"] is False


def test_hausdorff_levels(capsys, tmp_path):
    csv_path = tmp_path / "cover.csv"
    code, doc = run_json(
        capsys,
        "hausdorff",
        "--profile", "tent",
        "--alpha", "0.6",
        "--levels", "3",
        "--csv", str(csv_path),
    )
    assert code == 0
    levels = doc["result"]["levels"]
    sums = [l["measure_sum"] for l in levels]
    assert sums[-1] <= sums[0]
    assert not levels[0]["full_circle"]
    assert csv_path.read_text().splitlines()[0] == "eps,depth,cells,measure_sum"


def test_gallery_taper_and_ramp_paired(capsys):
    code, doc = run_json(capsys, "gallery", "taper", "--window", "64")
    assert code == 0
    assert doc["result"]["paired"] is True
    verdicts = [c["report"]["classification"] for c in doc["result"]["cases"]]
    assert "not a frame sequence" in verdicts and "exact frame sequence" in verdicts

    code, doc = run_json(capsys, "gallery", "ramp", "--window", "64")
    assert code == 0
    assert doc["result"]["paired"] is True
    assert doc["result"]["eps"] == pytest.approx(1.0 / 6.0, abs=1e-5)


def test_gallery_blocks_upper_bound_only(capsys):
    code, doc = run_json(capsys, "gallery", "blocks", "--nmax", "10", "--window", "64")
    assert code == 0
    rep = doc["result"]["cases"][0]["report"]
    assert rep["classification"] == "upper bound only"
    assert doc["result"]["paired"] is True


def test_verify_blocks_failure_exit(capsys):
    code, out, err = run(
        capsys, "verify", "blocks", "--alpha", "0.9", "--nmin", "4", "--nmax", "5"
    )
    assert code == 3 and "verification failed" in err


def test_verify_blocks_csv(capsys, tmp_path):
    csv_path = tmp_path / "w.csv"
    code, doc = run_json(
        capsys,
        "verify", "blocks",
        "--nmin", "4",
        "--nmax", "12",
        "--grid", "65536",
        "--csv", str(csv_path),
    )
    assert code == 0
    assert doc["result"]["w_ratio"] < 0.5
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "n,w" and len(lines) == 10


def test_reports_are_deterministic(capsys, tmp_path):
    f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
    for f in (f1, f2):
        code = cli.main(
            ["periodize", "--profile", "taper:2:1", "--b", "2", "--out", str(f), "--seed", "7"]
        )
        assert code == 0
    capsys.readouterr()
    assert f1.read_bytes() == f2.read_bytes()
    # a different seed must change the config hash, not just the payload
    code = cli.main(
        ["periodize", "--profile", "taper:2:1", "--b", "2", "--out", str(f2), "--seed", "8"]
    )
    capsys.readouterr()
    assert f1.read_bytes() != f2.read_bytes()
