import json

from bhm import cli, verify
from bhm.instances import BhmInstance, sample_T
from bhm.quantum import run_repeated
from bhm.seeding import substream


def run_cli(argv):
    return cli.main(argv)


def read_json_lines(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_gen_emits_instances(tmp_path):
    out = tmp_path / "inst.jsonl"
    code = run_cli(["gen", "--n", "4", "--count", "5", "--seed", "7", "--out", str(out)])
    assert code == 0
    records = read_json_lines(out)
    assert len(records) == 5
    for i, record in enumerate(records):
        assert record["n"] == 4
        assert record["trial"] == i
        assert record["seed"] == 7
        inst = BhmInstance.from_json_dict(record)
        assert inst == sample_T(4, substream(7, i))


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli(["gen", "--n", "3", "--count", "4", "--seed", "11", "--out", str(a)])
    run_cli(["gen", "--n", "3", "--count", "4", "--seed", "11", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    run_cli(["gen", "--n", "3", "--count", "4", "--seed", "12", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_gen_requires_seed(capsys):
    assert run_cli(["gen", "--n", "3", "--count", "1"]) == cli.EXIT_CONFIG
    capsys.readouterr()


def test_quantum_run_csv_schema_and_reproducibility(tmp_path):
    out = tmp_path / "q.csv"
    code = run_cli(
        ["quantum-run", "--n", "8", "--trials", "6", "--reps", "3",
         "--seed", "21", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "trial,n,r,d,source,guess,correct,qubit_cost,seed"
    assert len(lines) == 7
    # any row is reproducible in isolation from (seed, trial)
    row = dict(zip(lines[0].split(","), lines[3].split(",")))
    rng = substream(21, int(row["trial"]))
    inst = sample_T(8, rng)
    report = run_repeated(inst, 3, rng)
    assert int(row["d"]) == inst.disagreements()
    assert int(row["source"]) == inst.source
    assert int(row["guess"]) == report.guess
    assert int(row["qubit_cost"]) == report.qubit_cost


def test_quantum_run_json_format(tmp_path):
    out = tmp_path / "q.jsonl"
    run_cli(
        ["quantum-run", "--n", "4", "--trials", "3", "--seed", "5",
         "--format", "json", "--out", str(out)]
    )
    records = read_json_lines(out)
    assert len(records) == 3
    assert set(records[0]) == {
        "trial", "n", "r", "d", "source", "guess", "correct", "qubit_cost", "seed",
    }


def test_quantum_run_rejects_even_reps(capsys):
    code = run_cli(["quantum-run", "--n", "4", "--trials", "2", "--reps", "2", "--seed", "1"])
    assert code == cli.EXIT_CONFIG
    capsys.readouterr()


def test_classical_run_report(tmp_path):
    out = tmp_path / "c.json"
    code = run_cli(
        ["classical-run", "--n", "16", "--subset-size", "6", "--trials", "500",
         "--seed", "9", "--out", str(out)]
    )
    assert code == 0
    (record,) = read_json_lines(out)
    assert record["protocol"] == "subset-6"
    assert record["message_bits"] == 6
    assert record["method"] == "monte_carlo"
    assert record["trials"] == 500
    assert 0.0 <= record["success_prob"] <= 1.0
    assert record["sigma"] >= 0.0
    assert record["n"] == 16 and record["seed"] == 9


def test_bruteforce_report(tmp_path, capsys):
    out = tmp_path / "b.json"
    assert run_cli(["bruteforce", "--n", "2", "--bits", "1", "--out", str(out)]) == 0
    (record,) = read_json_lines(out)
    assert record["success_exact"] == "5/8"
    assert record["success_prob"] == 0.625
    assert "message_1" in record["witness"]
    assert run_cli(["bruteforce", "--n", "3", "--bits", "1"]) == cli.EXIT_BUDGET
    capsys.readouterr()


def test_gamma_report(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run_cli(["gamma", "--n", "4", "--k", "2", "--out", str(out)]) == 0
    (record,) = read_json_lines(out)
    assert record["exact_fraction"] == "1/7"
    assert record["bound"] == 0.25
    assert record["proof_relevant"] is True
    assert run_cli(["gamma", "--n", "4", "--k", "4", "--out", str(out)]) == 0
    (record,) = read_json_lines(out)
    assert record["proof_relevant"] is False
    assert run_cli(["gamma", "--n", "4", "--k", "3"]) == cli.EXIT_CONFIG
    assert run_cli(["gamma", "--n", "4", "--k", "2", "--mc", "100"]) == cli.EXIT_CONFIG
    capsys.readouterr()


def test_gamma_with_monte_carlo(tmp_path):
    out = tmp_path / "g.json"
    code = run_cli(
        ["gamma", "--n", "4", "--k", "2", "--mc", "2000", "--seed", "3", "--out", str(out)]
    )
    assert code == 0
    (record,) = read_json_lines(out)
    assert record["trials"] == 2000
    assert abs(record["mc_estimate"] - record["exact"]) <= 4 * max(record["sigma"], 1e-3)


def test_fourier_verify_passes(tmp_path):
    out = tmp_path / "f.jsonl"
    code = run_cli(
        ["fourier-verify", "--m", "6", "--cases", "8", "--seed", "13", "--out", str(out)]
    )
    assert code == 0
    records = read_json_lines(out)
    assert records[-1]["check"] == "summary"
    assert records[-1]["passed"] is True
    names = {r["check"] for r in records[:-1]}
    assert "parseval" in names and "convolution_theorem" in names


def test_injected_fault_fails_loudly(tmp_path, monkeypatch):
    # flip the diagonalization constant through the test hook: the suite
    # must go red and the CLI must exit nonzero
    bad = verify.check_convolution(6, 5, seed=1, spectral_scale=(1 << 6) / 2)
    assert not bad.passed

    original = verify.check_convolution

    def faulted(m, cases, seed, tol=1e-9, spectral_scale=None):
        return original(m, cases, seed, tol=tol, spectral_scale=(1 << m) * 2.0)

    monkeypatch.setattr(verify, "check_convolution", faulted)
    out = tmp_path / "f.jsonl"
    code = run_cli(
        ["fourier-verify", "--m", "6", "--cases", "5", "--seed", "13", "--out", str(out)]
    )
    assert code == cli.EXIT_VERIFY_FAILED
    records = read_json_lines(out)
    assert records[-1]["passed"] is False
    assert "convolution_theorem" in records[-1]["failed"]


def test_sweep_csv_and_determinism(tmp_path, capsys):
    args = [
        "sweep", "--ns", "4,8", "--trials", "300", "--reps", "1",
        "--subset-size", "4", "--seed", "17", "--format", "csv",
    ]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0].split(",") == [
        "n", "qubit_cost", "quantum_trials", "quantum_success", "quantum_sigma",
        "bit_cost", "classical_trials", "classical_success", "classical_sigma", "seed",
    ]
    assert len(lines) == 3
    assert run_cli(["sweep", "--ns", "8,4", "--trials", "10", "--subset-size", "2",
                    "--seed", "1"]) == cli.EXIT_CONFIG
    assert run_cli(["sweep", "--ns", "4", "--trials", "10", "--reps", "2",
                    "--subset-size", "2", "--seed", "1"]) == cli.EXIT_CONFIG
    capsys.readouterr()


def test_verify_all_smoke(tmp_path):
    out = tmp_path / "v.jsonl"
    code = run_cli(
        ["verify-all", "--m", "5", "--cases", "5", "--trials", "2000",
         "--seed", "23", "--out", str(out)]
    )
    assert code == 0
    records = read_json_lines(out)
    assert records[-1]["check"] == "summary"
    assert records[-1]["passed"] is True
    assert len(records) == 19  # 18 checks + summary


def test_emit_empty_rows_header_only(tmp_path):
    out = tmp_path / "empty.csv"
    cli.emit([], ["a", "b"], "csv", str(out))
    assert out.read_text() == "a,b\n"


def test_emit_float_formatting(capsys):
    cli.emit([{"v": 1 / 3}], ["v"], "csv", None)
    captured = capsys.readouterr().out
    assert captured == "v\n0.33333333333333331\n"


def test_unknown_command_is_config_error(capsys):
    assert run_cli(["nonsense"]) == cli.EXIT_CONFIG
    capsys.readouterr()
