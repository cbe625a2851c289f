import json
from pathlib import Path

from entlab import cli


def run_main(*args):
    return cli.main([str(a) for a in args])


def test_unknown_experiment_is_usage_error(tmp_path, capsys):
    assert run_main("--experiment", "nope") == 2
    assert "unknown experiment" in capsys.readouterr().err


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("experiment = symmetry\nbogus = 1\n")
    assert run_main("--config", cfg) == 2
    assert "bogus" in capsys.readouterr().err


def test_unwritable_output_is_io_error(tmp_path):
    out = tmp_path / "missing-dir" / "rows.csv"
    code = run_main("--experiment", "kruskal", "--out", out)
    assert code == 3


def test_missing_experiment_is_usage_error(capsys):
    assert run_main("--seed", "1") == 2


def test_symmetry_run_is_byte_identical_for_fixed_seed(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    out_c = tmp_path / "c.csv"
    assert run_main("--experiment", "symmetry", "--seed", "42", "--out", out_a) == 0
    assert run_main("--experiment", "symmetry", "--seed", "42", "--out", out_b) == 0
    assert run_main("--experiment", "symmetry", "--seed", "43", "--out", out_c) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert out_a.read_bytes() != out_c.read_bytes()


def test_csv_uses_lf_and_roundtrip_floats(tmp_path):
    out_csv = tmp_path / "rows.csv"
    out_json = tmp_path / "rows.json"
    assert run_main("--experiment", "growth", "--seed", "5", "--out", out_csv,
                    "--format", "csv") == 0
    assert run_main("--experiment", "growth", "--seed", "5", "--out", out_json,
                    "--format", "json") == 0
    raw = out_csv.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    header = lines[0].split(",")
    first = dict(zip(header, lines[1].split(",")))
    payload = json.loads(out_json.read_text())
    for key in ("s_in", "s_out", "slack"):
        assert float(first[key]) == payload["rows"][0][key]  # 17 digits round-trip


def test_json_payload_structure_and_no_wall_clock(tmp_path):
    out = tmp_path / "report.json"
    assert run_main("--experiment", "oracle", "--seed", "0", "--out", out,
                    "--format", "json") == 0
    payload = json.loads(out.read_text())
    assert payload["experiment"] == "oracle"
    assert payload["seed"] == 0
    assert payload["rng"] == "pcg64"
    assert payload["passed"] is True
    assert payload["version"]
    assert "wall_clock" not in json.dumps(payload)
    assert all(payload["checks"].values())


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("experiment = truncation\nseed = 1\nstates = 4\n"
                   "random_projections = 20\nformat = json\n")
    out = tmp_path / "t.json"
    assert run_main("--config", cfg, "--seed", "9", "--out", out) == 0
    payload = json.loads(out.read_text())
    assert payload["seed"] == 9
    assert payload["parameters"]["states"] == 4
    assert len(payload["rows"]) == 4


def test_checks_recomputed_from_rows_pass_for_each_quick_experiment(tmp_path):
    quick = {
        "symmetry": {"trials": "20"},
        "growth": {"trials": "20"},
        "truncation": {"states": "4", "random_projections": "25"},
        "oracle": {"fock_cutoff": "12"},
        "modes": {"samples": "400"},
        "kruskal": {"points": "60"},
    }
    for name, params in quick.items():
        cfg = tmp_path / f"{name}.cfg"
        cfg.write_text(f"experiment = {name}\n"
                       + "".join(f"{k} = {v}\n" for k, v in params.items()))
        out = tmp_path / f"{name}.json"
        code = run_main("--config", cfg, "--out", out, "--format", "json")
        payload = json.loads(out.read_text())
        assert code == 0, (name, payload["checks"])
        assert payload["passed"] is True


def test_spectrum_and_geom_entropy_experiments(tmp_path):
    cfg = tmp_path / "spectrum.cfg"
    cfg.write_text("experiment = spectrum\nepsilon = 0.2\nell_max = 5\n")
    out = tmp_path / "spectrum.json"
    assert run_main("--config", cfg, "--out", out, "--format", "json") == 0
    payload = json.loads(out.read_text())
    assert payload["checks"]["residuals_small"] is True

    cfg = tmp_path / "ge.cfg"
    cfg.write_text("experiment = geom-entropy\nell_max = 5\nepsilons = 0.2,0.1\n")
    out = tmp_path / "ge.json"
    assert run_main("--config", cfg, "--out", out, "--format", "json") == 0
    payload = json.loads(out.read_text())
    assert payload["checks"]["entropy_grows_as_regulator_shrinks"] is True
    assert [row["epsilon"] for row in payload["rows"]] == [0.2, 0.1]


def test_dmrg_experiment_and_failing_checks_exit_code(tmp_path):
    cfg = tmp_path / "dmrg.cfg"
    cfg.write_text("experiment = dmrg\ntarget_length = 8\nlocal_dim = 4\n"
                   "kept_states = 8\n")
    out = tmp_path / "dmrg.json"
    assert run_main("--config", cfg, "--out", out, "--format", "json") == 0
    payload = json.loads(out.read_text())
    assert payload["checks"]["energy_within_1_percent"] is True

    # an unreached target length must flag the report and exit 1
    cfg.write_text("experiment = dmrg\ntarget_length = 12\nlocal_dim = 4\n"
                   "kept_states = 8\nmax_iterations = 2\n")
    code = run_main("--config", cfg, "--out", tmp_path / "short.json",
                    "--format", "json")
    assert code == 1
    payload = json.loads((tmp_path / "short.json").read_text())
    assert payload["passed"] is False
    assert payload["checks"]["reached_target_length"] is False


def test_kruskal_records_rejected_boundary_probe(tmp_path):
    cfg = tmp_path / "kr.cfg"
    cfg.write_text("experiment = kruskal\npoints = 30\nmasses = 1\n")
    out = tmp_path / "kr.json"
    assert run_main("--config", cfg, "--out", out, "--format", "json") == 0
    payload = json.loads(out.read_text())
    statuses = [row["status"] for row in payload["rows"]]
    assert statuses.count("rejected") == 1
    assert payload["checks"]["horizon_input_rejected"] is True


def test_default_output_path_uses_experiment_name(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_main("--experiment", "kruskal", "--seed", "1") == 0
    assert Path("kruskal.csv").exists()


def test_invalid_parameter_value_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("experiment = symmetry\ntrials = not-a-number\n")
    assert run_main("--config", cfg) == 2
    assert "bad value" in capsys.readouterr().err
