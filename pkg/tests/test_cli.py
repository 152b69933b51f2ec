import json
import math
import os
import subprocess
import sys

import pytest

from qaspace import (
    StepFunction,
    lorentz_norm,
    equivalence,
    iterated_log_profile,
    qa_phi,
    qa_psi,
    qa_upper,
    rearrange,
    tau,
    witness_qa_upper,
)
from qaspace.cli import main

F3 = '{"breakpoints": [0, 0.25, 0.5, 1], "values": [3, 1, 2]}'
QA_PHI = '{"family": "qa_phi"}'
QA_PSI = '{"family": "qa_psi"}'


def run_cli(*args, env_extra=None, check=True):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        [sys.executable, "-c", "from qaspace.cli import main; raise SystemExit(main())", *args],
        capture_output=True,
        text=True,
        env=env,
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
    return proc


def lib_three_layer():
    return StepFunction.from_json(json.loads(F3))


class TestRearrange:
    def test_roundtrip(self):
        proc = run_cli("rearrange", "--input", F3)
        out = json.loads(proc.stdout)
        assert out["config"]["subcommand"] == "rearrange"
        got = StepFunction.from_json(out["result"])
        assert got == rearrange(lib_three_layer())

    def test_deterministic_bytes(self):
        a = run_cli("rearrange", "--input", F3).stdout
        b = run_cli("rearrange", "--input", F3).stdout
        assert a == b

    def test_reads_file_input(self, tmp_path):
        src = tmp_path / "f.json"
        src.write_text(F3)
        proc = run_cli("rearrange", "--input", str(src))
        assert StepFunction.from_json(json.loads(proc.stdout)["result"]) == rearrange(
            lib_three_layer()
        )


class TestLorentzNorm:
    def test_value(self):
        proc = run_cli("lorentz-norm", "--phi", QA_PHI, "--input", F3)
        out = json.loads(proc.stdout)
        assert out["result"]["value"] == 2.5623351446188085
        assert out["result"]["value"] == lorentz_norm(lib_three_layer(), qa_phi()).value


class TestQaBounds:
    def test_matches_library(self):
        proc = run_cli(
            "qa-bounds", "--phi", QA_PHI, "--psi", QA_PSI,
            "--input", F3, "--strategy", "exhaustive",
        )
        out = json.loads(proc.stdout)["result"]
        want = qa_upper(lib_three_layer(), qa_phi(), qa_psi(), strategy="exhaustive")
        assert out["lower"] == want.lower
        assert out["upper"] == want.upper

    def test_local_alias(self):
        proc = run_cli(
            "qa-bounds", "--phi", QA_PHI, "--psi", QA_PSI,
            "--input", F3, "--strategy", "local",
        )
        assert json.loads(proc.stdout)["result"]["upper"] > 0.0


class TestTauCurve:
    args = (
        "tau", "--phi", QA_PHI, "--psi", QA_PSI,
        "--tmin", "1e-12", "--tmax", "1", "--points", "50",
    )

    def test_csv_schema(self):
        lines = run_cli(*self.args).stdout.splitlines()
        assert lines[0].startswith("# config:")
        json.loads(lines[0].split("# config:", 1)[1])
        assert lines[1] == "t,tau,phi,ratio"
        rows = [line.split(",") for line in lines[2:]]
        assert len(rows) == 50
        ts = [float(r[0]) for r in rows]
        assert ts == sorted(ts) and len(set(ts)) == 50
        assert ts[0] == 1e-12 and ts[-1] == 1.0

    def test_values_match_library(self):
        lines = run_cli(*self.args).stdout.splitlines()
        for row in (lines[2], lines[-1]):
            t, tv = row.split(",")[:2]
            assert float(tv) == tau(qa_phi(), qa_psi(), float(t))

    def test_deterministic_bytes(self):
        assert run_cli(*self.args).stdout == run_cli(*self.args).stdout

    def test_json_variant(self):
        out = json.loads(run_cli(*self.args, "--out", "json").stdout)
        assert len(out["result"]["rows"]) == 50


class TestCheckSeq:
    def test_passing_report(self):
        proc = run_cli(
            "check-seq", "--seq", '{"kind": "gamma_exp"}',
            "--phi", QA_PHI, "--psi", QA_PSI,
            "--xmin", "1", "--xmax", "40", "--points", "200",
        )
        rep = json.loads(proc.stdout)["result"]
        assert rep["passed"] is True
        assert rep["step_ratio_constant"] == pytest.approx(math.e, rel=1e-9)


class TestEquivalence:
    def test_matches_library(self):
        proc = run_cli(
            "equivalence",
            "--a", '{"kind": "tau", "phi": {"family": "alpha_beta", "alpha": 0.5, "beta": 1}, "psi": {"family": "psi_gamma", "gamma": 1}}',
            "--b", '{"kind": "iterated_log", "alpha": 0.5, "beta": 1, "exponent": 1}',
            "--tmin", "1e-12", "--tmax", "1e-3", "--points", "100",
            "--threshold", "10",
        )
        out = json.loads(proc.stdout)["result"]
        from qaspace import alpha_beta, psi_gamma

        want = equivalence(
            lambda t: tau(alpha_beta(0.5, 1.0), psi_gamma(1.0), t),
            iterated_log_profile(0.5, 1.0, 1.0),
            1e-12, 1e-3, points=100, threshold=10.0,
        )
        assert out["ratio_min"] == want.ratio_min
        assert out["ratio_max"] == want.ratio_max
        assert out["equivalent"] is True


class TestWitness:
    def test_report(self):
        proc = run_cli(
            "witness", "--phi", QA_PHI, "--psi", QA_PSI,
            "--c", "0.5", "--N", "2",
        )
        out = json.loads(proc.stdout)["result"]
        assert set(out) == {
            "log_mu", "log_a", "lorentz_norm", "qa_upper", "lower_bound", "ratios",
        }
        from qaspace import WitnessSpec, build_witness

        w = build_witness(WitnessSpec(qa_phi(), qa_psi(), N=2, c=0.5, p=1.0))
        assert out["qa_upper"] == witness_qa_upper(w, qa_phi(), qa_psi())
        assert out["ratios"]["qa_upper_over_lower_bound"] > 1.0


class TestOmega:
    def test_report(self):
        proc = run_cli(
            "omega", "--phi-x", '{"family": "alpha_beta", "alpha": 1, "beta": 0.1}',
            "--phi", QA_PHI, "--psi", QA_PSI, "--c", "0.5", "--N", "2",
        )
        out = json.loads(proc.stdout)["result"]
        assert out["omega_N"] == pytest.approx(0.6225507482175058, rel=1e-9)
        assert out["normalized"] == out["omega_N"] / out["psi_at_N"]


class TestSelftest:
    def test_seed_seven_passes(self):
        proc = run_cli("selftest", "--seed", "7")
        out = json.loads(proc.stdout)["result"]
        assert out["passed"] is True
        assert all(fam["failures"] == 0 for fam in out["families"])
        assert {fam["name"] for fam in out["families"]} >= {
            "rearrangement-equimeasurable",
            "quasi-triangle",
            "psi-one-collapse",
        }

    def test_deterministic_bytes(self):
        a = run_cli("selftest", "--seed", "7").stdout
        assert a == run_cli("selftest", "--seed", "7").stdout


class TestErrors:
    def test_unknown_flag(self):
        proc = run_cli("rearrange", "--input", F3, "--frobnicate", check=False)
        assert proc.returncode == 2

    def test_unknown_subcommand(self):
        proc = run_cli("transmogrify", check=False)
        assert proc.returncode == 2

    def test_bad_shape_family(self):
        proc = run_cli(
            "qa-bounds", "--phi", '{"family": "nope"}', "--psi", QA_PSI,
            "--input", F3, check=False,
        )
        assert proc.returncode == 2
        err = json.loads(proc.stderr)
        assert err["error"]["type"] == "SpecParseError"

    def test_malformed_json(self):
        proc = run_cli("rearrange", "--input", '{"breakpoints": [0, 1]', check=False)
        assert proc.returncode == 2
        assert json.loads(proc.stderr)["error"]["type"]

    def test_bad_grid(self):
        proc = run_cli(
            "tau", "--phi", QA_PHI, "--psi", QA_PSI,
            "--tmin", "0.5", "--tmax", "0.1", check=False,
        )
        assert proc.returncode == 2

    def test_main_in_process(self, capsys):
        code = main(["qa-bounds", "--phi", '{"family": "nope"}', "--psi", QA_PSI, "--input", F3])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "SpecParseError"


class TestOutputRouting:
    def test_output_file(self, tmp_path):
        dest = tmp_path / "out.json"
        proc = run_cli("lorentz-norm", "--phi", QA_PHI, "--input", F3, "--output", str(dest))
        assert proc.stdout == ""
        assert json.loads(dest.read_text())["result"]["value"] == 2.5623351446188085

    def test_out_dir_env(self, tmp_path):
        run_cli(
            "lorentz-norm", "--phi", QA_PHI, "--input", F3,
            "--output", "routed.json",
            env_extra={"QASPACE_OUT_DIR": str(tmp_path)},
        )
        assert (tmp_path / "routed.json").exists()
