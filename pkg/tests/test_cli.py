"""Front-door tests: exit codes, config files, units, determinism.

Everything goes through ``dispatch`` in-process, so the suite checks the
same code path the console script runs without paying subprocess startup
per case.  Files land in per-test tmp directories via ``--out`` (or the
environment override, where that is the point of the test).
"""

import json
import math

import pytest

from liouville_lab import HeightInputs, integrate_cauchy, load_solution, WeightSpec
from liouville_lab.cli import dispatch

TWO_PI = 2.0 * math.pi


@pytest.fixture(autouse=True)
def _isolated_out(monkeypatch):
    monkeypatch.delenv("LIOUVILLE_LAB_OUT", raising=False)


def run(tmp_path, *argv):
    return dispatch(list(argv) + ["--out", str(tmp_path)])


def read_json(tmp_path, name):
    return json.loads((tmp_path / name).read_text(encoding="utf-8"))


def stderr_record(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    record = json.loads(err[-1])
    assert set(record) == {"command", "error", "exit", "message"}
    return record, err


# ---------------------------------------------------------------------------
# the documented examples


def test_masses_example(tmp_path):
    assert run(tmp_path, "masses", "--alpha1", "2", "--alpha2", "2") == 0
    data = read_json(tmp_path, "masses.json")
    assert data["pairs"] == [{"m": 1, "mass": 4.0}, {"m": 2, "mass": 8.0}]
    assert data["units"] == "beta"


def test_blowup_points_example(tmp_path):
    assert run(tmp_path, "blowup-points", "--alpha1", "2", "--alpha2", "2",
               "--m", "2") == 0
    data = read_json(tmp_path, "blowup_points.json")
    pts = sorted((re, im) for re, im in data["points"])
    root = 1.0 / math.sqrt(3.0)
    assert pts[0] == pytest.approx((0.0, -root), abs=1e-12)
    assert pts[1] == pytest.approx((0.0, root), abs=1e-12)
    assert data["residual"] <= 1e-10


def test_beta_anchor_example(tmp_path):
    assert run(tmp_path, "beta", "--alpha", "1", "--a", "2.4849") == 0
    data = read_json(tmp_path, "beta.json")
    assert data["mass"] == pytest.approx(6.0, abs=1e-4)
    assert data["converged"] is True


# ---------------------------------------------------------------------------
# exit codes and the stderr record


def test_unknown_subcommand_is_usage_error(tmp_path, capsys):
    assert dispatch(["frobnicate"]) == 64
    record, err = stderr_record(capsys)
    assert record["error"] == "UsageError"
    assert record["exit"] == 64
    # help text accompanies the record
    assert any("usage:" in line for line in err)


def test_missing_required_flag_is_usage_error(tmp_path):
    assert run(tmp_path, "masses", "--alpha1", "2") == 64


def test_invalid_units_choice_is_usage_error(tmp_path):
    assert run(tmp_path, "masses", "--alpha1", "2", "--alpha2", "2",
               "--units", "furlongs") == 64


def test_bad_list_literal_is_usage_error(tmp_path):
    assert run(tmp_path, "mass-curve", "--alpha", "1,x") == 64


def test_help_exits_zero(capsys):
    assert dispatch(["--help"]) == 0
    assert "usage:" in capsys.readouterr().out


def test_bad_params_are_validation_error(tmp_path, capsys):
    assert run(tmp_path, "masses", "--alpha1", "-3", "--alpha2", "2") == 1
    record, _ = stderr_record(capsys)
    assert record["error"] == "InvalidParams"
    assert record["exit"] == 1


def test_stderr_record_is_one_line(tmp_path, capsys):
    run(tmp_path, "masses", "--alpha1", "-3", "--alpha2", "2")
    _, err = stderr_record(capsys)
    assert len(err) == 1


def test_monotone_curve_is_numerical_error(tmp_path, capsys):
    # below the structure threshold the curve has no interior minimum
    assert run(tmp_path, "rho-bar", "--alpha", "0.5", "--n", "40") == 2
    record, _ = stderr_record(capsys)
    assert record["error"] == "NoInteriorMin"


def test_missing_config_file_is_io_error(tmp_path, capsys):
    assert run(tmp_path, "masses", "--alpha1", "2", "--alpha2", "2",
               "--config", str(tmp_path / "absent.cfg")) == 2
    record, _ = stderr_record(capsys)
    assert record["exit"] == 2


def test_missing_height_inputs_is_io_error(tmp_path):
    assert run(tmp_path, "height", "--inputs", str(tmp_path / "absent.json")) == 2


def test_increasing_collapse_schedule_is_validation_error(tmp_path):
    assert run(tmp_path, "collapse", "--eps", "1e-4,1e-2") == 1


def test_weight_shorthand_conflicts_with_explicit(tmp_path, capsys):
    assert run(tmp_path, "beta", "--alpha", "1", "--p", "2", "--a", "0") == 1
    record, _ = stderr_record(capsys)
    assert record["error"] == "InvalidInputs"


def test_weight_needs_alpha_or_p(tmp_path):
    assert run(tmp_path, "beta", "--a", "0") == 1


# ---------------------------------------------------------------------------
# config files


def test_config_file_matches_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# vortex pair\nalpha1 = 2\nalpha2 = 2\nunits = rho\n",
                   encoding="utf-8")
    a, b = tmp_path / "a", tmp_path / "b"
    assert dispatch(["masses", "--alpha1", "2", "--alpha2", "2",
                     "--units", "rho", "--out", str(a)]) == 0
    assert dispatch(["masses", "--config", str(cfg), "--out", str(b)]) == 0
    assert (a / "masses.json").read_bytes() == (b / "masses.json").read_bytes()


def test_flags_override_config(tmp_path):
    # the config alone is rejected (strength gap too wide); the flag
    # override is what makes the run valid, so success proves precedence
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha1 = 2\nalpha2 = 5\n", encoding="utf-8")
    assert run(tmp_path, "masses", "--config", str(cfg), "--alpha2", "2") == 0
    data = read_json(tmp_path, "masses.json")
    assert data["alpha1"] == 2 and data["alpha2"] == 2


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha1 = 2\nalpha2 = 2\nbogus = 1\n", encoding="utf-8")
    assert run(tmp_path, "masses", "--config", str(cfg)) == 1
    record, _ = stderr_record(capsys)
    assert record["error"] == "InvalidInputs"
    assert "bogus" in record["message"]


def test_duplicate_config_key_rejected(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha1 = 2\nalpha1 = 3\nalpha2 = 2\n", encoding="utf-8")
    assert run(tmp_path, "masses", "--config", str(cfg)) == 1


def test_config_without_equals_rejected(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha1\n", encoding="utf-8")
    assert run(tmp_path, "masses", "--config", str(cfg), "--alpha2", "2") == 1


def test_config_boolean_flag(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha = 0\na = 0\nplot = true\n", encoding="utf-8")
    assert run(tmp_path, "shoot", "--config", str(cfg)) == 0
    assert (tmp_path / "shoot.png").exists()


def test_config_bad_boolean_rejected(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha = 0\na = 0\nplot = maybe\n", encoding="utf-8")
    assert run(tmp_path, "shoot", "--config", str(cfg)) == 1


def test_config_key_may_use_dashes(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("t-vortex = 0.1\nn-theta = 24\nht = 0.09\n", encoding="utf-8")
    assert run(tmp_path, "disk-solve", "--config", str(cfg)) == 0


def test_config_may_not_nest_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"config = {cfg}\nalpha1 = 2\nalpha2 = 2\n", encoding="utf-8")
    assert run(tmp_path, "masses", "--config", str(cfg)) == 1


# ---------------------------------------------------------------------------
# units, output directory, determinism


def test_units_rho_scales_masses(tmp_path):
    assert run(tmp_path, "masses", "--alpha1", "2", "--alpha2", "2",
               "--units", "rho") == 0
    data = read_json(tmp_path, "masses.json")
    assert data["pairs"][0]["mass"] == pytest.approx(4.0 * TWO_PI, rel=1e-15)
    assert data["pairs"][1]["mass"] == pytest.approx(8.0 * TWO_PI, rel=1e-15)


def test_disk_units_beta_divides_by_two_pi(tmp_path):
    a, b = tmp_path / "rho", tmp_path / "beta"
    args = ["disk-solve", "--t-vortex", "0.1", "--ht", "0.09", "--n-theta", "24"]
    assert dispatch(args + ["--out", str(a)]) == 0
    assert dispatch(args + ["--units", "beta", "--out", str(b)]) == 0
    rho = json.loads((a / "disk_summary.json").read_text())
    bet = json.loads((b / "disk_summary.json").read_text())
    for key in ("mass", "flux", "cap_mass", "local_mass", "poho_residual"):
        assert bet[key] == pytest.approx(rho[key] / TWO_PI, rel=1e-15)
    # non-mass fields are untouched by the units flag
    assert bet["pole_value"] == rho["pole_value"]


def test_env_var_overrides_out_flag(tmp_path, monkeypatch):
    env_dir = tmp_path / "env"
    monkeypatch.setenv("LIOUVILLE_LAB_OUT", str(env_dir))
    assert dispatch(["masses", "--alpha1", "2", "--alpha2", "2",
                     "--out", str(tmp_path / "flag")]) == 0
    assert (env_dir / "masses.json").exists()
    assert not (tmp_path / "flag").exists()


def test_nested_out_dir_is_created(tmp_path):
    deep = tmp_path / "a" / "b" / "c"
    assert dispatch(["masses", "--alpha1", "2", "--alpha2", "2",
                     "--out", str(deep)]) == 0
    assert (deep / "masses.json").exists()


def test_repeat_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["mass-curve", "--alpha", "2", "--n", "25"]
    assert dispatch(args + ["--out", str(a)]) == 0
    assert dispatch(args + ["--out", str(b)]) == 0
    for name in ("mass_curve_alpha2.csv", "mass_curve_summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_jobs_do_not_change_output(tmp_path):
    a, b = tmp_path / "serial", tmp_path / "parallel"
    args = ["mass-curve", "--alpha", "1.5", "--n", "31"]
    assert dispatch(args + ["--out", str(a), "--jobs", "1"]) == 0
    assert dispatch(args + ["--out", str(b), "--jobs", "3"]) == 0
    assert ((a / "mass_curve_alpha1p5.csv").read_bytes()
            == (b / "mass_curve_alpha1p5.csv").read_bytes())


def test_oracle_check_is_seeded(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["blowup-points", "--alpha1", "2", "--alpha2", "1", "--m", "1",
            "--check-oracle", "3", "--seed", "11"]
    assert dispatch(args + ["--out", str(a)]) == 0
    assert dispatch(args + ["--out", str(b)]) == 0
    assert ((a / "blowup_points.json").read_bytes()
            == (b / "blowup_points.json").read_bytes())
    data = json.loads((a / "blowup_points.json").read_text())
    assert data["oracle"]["converged_runs"] == 3
    assert data["oracle"]["max_set_distance"] <= 1e-7


def test_seed_recorded_in_summary(tmp_path):
    assert run(tmp_path, "masses", "--alpha1", "2", "--alpha2", "2",
               "--seed", "42") == 0
    assert read_json(tmp_path, "masses.json")["seed"] == 42


# ---------------------------------------------------------------------------
# per-command output shape


def test_shoot_trace_header_and_values(tmp_path):
    assert run(tmp_path, "shoot", "--alpha", "0", "--a", "0") == 0
    lines = (tmp_path / "shoot_trace.csv").read_text().splitlines()
    assert lines[0] == "t,r,v,slope,mass"
    sol = integrate_cauchy(WeightSpec(eps=1.0, p=0.0, q=0.0), 0.0)
    first = lines[1].split(",")
    # 17-significant-digit formatting round-trips exactly
    assert float(first[0]) == sol.grid[0]
    assert float(first[2]) == sol.v[0]
    summary = read_json(tmp_path, "shoot_summary.json")
    assert summary["mass"] == pytest.approx(4.0, abs=1e-6)


def test_rho_bar_reports_window(tmp_path):
    assert run(tmp_path, "rho-bar", "--alpha", "2", "--n", "60") == 0
    data = read_json(tmp_path, "rho_bar.json")
    assert data["rho_bar"] == pytest.approx(TWO_PI * data["beta_bar"], rel=1e-15)
    assert 2.0 * 3.0 < data["beta_bar"] < 4.0 * 2.0
    lo, hi = data["window"]
    assert lo < hi


def test_mass_literal_accepts_pi_suffix(tmp_path):
    assert run(tmp_path, "limit-profile", "--rho", "12.6pi") == 0
    data = read_json(tmp_path, "limit_profile_summary.json")
    assert data["rho"] == pytest.approx(12.6 * math.pi, rel=1e-15)
    assert data["a_pow"] == pytest.approx(-0.85, abs=1e-12)
    # the regular part carries the spread remainder of the mass
    assert data["mass"] == pytest.approx(12.6 * math.pi / TWO_PI - 4.0, abs=1e-6)


def test_collapse_csv_columns(tmp_path):
    assert run(tmp_path, "collapse", "--eps", "1e-2,1e-4") == 0
    lines = (tmp_path / "collapse_steps.csv").read_text().splitlines()
    assert lines[0] == "eps,a_found,mass_check,plateau,plateau_alt,r_probe"
    assert len(lines) == 3
    summary = read_json(tmp_path, "collapse_summary.json")
    assert summary["found"] == 2
    assert summary["note"]


def test_height_round_trips_through_reader(tmp_path):
    inputs = HeightInputs(
        rho=8.0 * math.pi * 2 + 1.0,
        m=2,
        alpha1=2,
        alpha2=2,
        mass_integral=2.0,
        C_ti=(1.5, 1.5),
        pairwise_dist=((0.0, 1.1547), (1.1547, 0.0)),
        green_regular=((0.25, 0.1), (0.1, 0.25)),
        w_at_points=(1.0, 1.0),
        t=0.1,
    )
    src = tmp_path / "inputs.json"
    src.write_text(json.dumps(inputs.as_dict()), encoding="utf-8")
    assert run(tmp_path, "height", "--inputs", str(src)) == 0
    data = read_json(tmp_path, "height.json")
    assert HeightInputs.from_dict(data["inputs"]) == inputs
    assert data["indices"] == [0, 1]
    assert len(data["heights"]) == 2
    # symmetric inputs give equal heights
    assert data["heights"][0] == pytest.approx(data["heights"][1], rel=1e-12)

    assert run(tmp_path, "height", "--inputs", str(src), "--i", "1") == 0
    single = read_json(tmp_path, "height.json")
    assert single["indices"] == [1]
    assert single["heights"][0] == pytest.approx(data["heights"][1], rel=1e-15)


def test_disk_solution_files_load_back(tmp_path):
    assert run(tmp_path, "disk-solve", "--t-vortex", "0.1",
               "--ht", "0.09", "--n-theta", "24") == 0
    meta, field = load_solution(tmp_path / "disk_solution")
    assert field.shape == tuple(meta["shape"])
    summary = read_json(tmp_path, "disk_summary.json")
    assert summary["converged"] is True
    assert summary["points"], "a vortex-pair solve should report its peaks"
    assert summary["lambda_extract"] is not None


def test_scaling_label_and_units(tmp_path):
    assert run(tmp_path, "scaling", "--schedule", "0.2", "--ht", "0.045",
               "--n-theta", "48", "--units", "beta") == 0
    summary = read_json(tmp_path, "scaling_summary.json")
    assert summary["label"] == "EXPLORATORY"
    lines = (tmp_path / "scaling_report.csv").read_text().splitlines()
    assert lines[0].startswith("label,")
    assert lines[1].startswith("EXPLORATORY,")
    # anchored total mass 8*pi + 1 in rho units, converted on request
    mass_col = lines[0].split(",").index("mass")
    mass = float(lines[1].split(",")[mass_col])
    assert mass == pytest.approx((8.0 * math.pi + 1.0) / TWO_PI, rel=1e-6)
