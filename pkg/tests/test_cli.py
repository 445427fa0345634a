import csv
import json

import pytest
from click.testing import CliRunner

from percolab import cli, fourier

from cli_cases import CASES


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def go(*args, out=None, env=None):
        extra = [] if env else ["--out", str(out or tmp_path)]
        return runner.invoke(cli.main, [*args, *extra], env=env, catch_exceptions=False)
    return go


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_help_lists_every_subcommand(run):
    res = CliRunner().invoke(cli.main, ["--help"])
    assert res.exit_code == 0
    for name in CASES:
        assert name in res.output


def test_usage_errors_exit_two(run):
    res = run("arm-estimate", "--r", "0", "--R", "0")
    assert res.exit_code == 2 and "--r" in res.output
    assert run("arm-estimate", "--r", "2").exit_code == 2
    assert run("revealment", "--alg", "spiral", "--R", "8").exit_code == 2
    assert run("crossing-times", "--domain", "hexagon:3").exit_code == 2
    assert run("arm-estimate", "--event", "five-arm", "--r", "1", "--R", "4").exit_code == 2


def test_runtime_failure_exits_one(run, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n0\n1\n")
    res = run("fourier-check", "--table", str(bad))
    assert res.exit_code == 1


def test_arm_estimate_outputs(run, tmp_path):
    res = run("arm-estimate", "--r", "3", "--radii", "2,6", "--trials", "300",
              "--emit-gnuplot-data")
    assert res.exit_code == 0, res.output
    rows = _rows(tmp_path / "arm-estimate.csv")
    assert [r["R"] for r in rows] == ["2", "6"]
    assert rows[0]["convention"] == "1" and float(rows[0]["p_hat"]) == 1.0
    assert 0 <= float(rows[1]["ci_low"]) <= float(rows[1]["p_hat"]) <= float(rows[1]["ci_high"])
    dat = (tmp_path / "arm-estimate.dat").read_text().splitlines()
    assert dat[0].startswith("#") and len(dat) == 3


def test_manifest_hash_and_tamper_detection(run, tmp_path):
    assert run("revealment", "--alg", "annulus", "--r", "2", "--R", "6",
               "--trials", "50").exit_code == 0
    manifest = tmp_path / "revealment.json"
    assert cli.verify_manifest(manifest)
    meta = json.loads(manifest.read_text())
    assert meta["schema"] == cli.SCHEMA and meta["config"]["trials"] == 50
    assert meta["payload"]["rows"] == len(meta["records"])
    payload = tmp_path / "revealment.csv"
    payload.write_bytes(payload.read_bytes() + b"extra\n")
    assert not cli.verify_manifest(manifest)


def test_git_blob_hash_matches_git():
    # `printf 'hello\n' | git hash-object --stdin`
    assert cli.git_blob_hash(b"hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"


def test_output_directory_from_environment(tmp_path):
    target = tmp_path / "envout"
    res = CliRunner().invoke(cli.main, ["fourier-check", "--corpus", "builtin"],
                             env={"PERCOLAB_OUT": str(target)})
    assert res.exit_code == 0, res.output
    assert (target / "fourier-check.csv").exists()


def test_fourier_table_file(run, tmp_path):
    path = tmp_path / "maj.txt"
    fourier.write_truth_table(fourier.majority3(), path)
    assert run("fourier-check", "--table", str(path)).exit_code == 0
    rows = _rows(tmp_path / "fourier-check.csv")
    assert rows and all(r["ok"] == "1" for r in rows)


@pytest.mark.parametrize("name", ["arm-estimate", "quasi-mult", "noise-curve"])
def test_worker_count_does_not_change_results(run, tmp_path, name):
    payloads = []
    for w in ("1", "4"):
        out = tmp_path / f"w{w}"
        assert run(name, *CASES[name], "--workers", w, out=out).exit_code == 0
        payloads.append((out / f"{name}.csv").read_bytes())
    assert payloads[0] == payloads[1]


def test_shards_are_fixed():
    assert cli.shards(2500) == [(0, 1000), (1000, 2000), (2000, 2500)]


def test_noise_curve_default_levels(run, tmp_path):
    res = run("noise-curve", "--m", "4", "--trials", "50")
    assert res.exit_code == 0
    rows = _rows(tmp_path / "noise-curve.csv")
    assert [float(r["eps"]) for r in rows] == [0.05, 0.1, 0.2]
    assert run("noise-curve", "--m", "4", "--eps", "0.6").exit_code == 2
