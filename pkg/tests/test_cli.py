import json
import math

import numpy as np
import pytest

import coupledwells as cw
from coupledwells import cli, coupling
from coupledwells.cli import main, parse_config, regression
from coupledwells.errors import ConfigError


def run_scenario(tmp_path, scenario, config_text, fmt="csv", name="out"):
    config = tmp_path / "scenario.cfg"
    config.write_text(config_text, encoding="utf-8")
    out = tmp_path / f"{name}.{fmt}"
    code = main([scenario, "--config", str(config), "--out", str(out),
                 "--format", fmt])
    return code, out


def read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
    return header, rows


# --- config parsing -------------------------------------------------------

def test_parse_defaults_and_overrides():
    text = """
    # a comment
    separation_um = 35.5
    shielding = off
    freq_a_mhz=4.1  # trailing comment
    """
    values = parse_config(text, "coupling-calc")
    assert values["separation_um"] == 35.5
    assert values["shielding"] is False
    assert values["freq_a_mhz"] == 4.1
    assert values["height_um"] == 40.0  # default kept


def test_parse_rejects_unknown_key():
    with pytest.raises(ConfigError, match="separation_nm"):
        parse_config("separation_nm = 40", "coupling-calc")


def test_parse_rejects_scenario_foreign_key():
    with pytest.raises(ConfigError, match="nbar_a"):
        parse_config("nbar_a = 0.5", "modes-sweep")


def test_parse_rejects_bad_values():
    with pytest.raises(ConfigError, match="steps"):
        parse_config("steps = many", "modes-sweep")
    with pytest.raises(ConfigError, match="shielding"):
        parse_config("shielding = maybe", "coupling-calc")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config("separation_um 40", "coupling-calc")


# --- scenario runs ----------------------------------------------------------

def test_coupling_calc_outputs_exchange_time(tmp_path):
    code, out = run_scenario(tmp_path, "coupling-calc", "")
    assert code == 0
    header, rows = read_csv(out)
    row = dict(zip(header, rows[0]))
    assert row["tau_ex_us"] == pytest.approx(162.0, rel=0.01)
    assert row["beta"] == pytest.approx(1.018, abs=1e-3)
    assert row["splitting_hz"] == pytest.approx(3.1e3, rel=0.02)


def test_metadata_sidecar_echoes_all_parameters(tmp_path):
    code, out = run_scenario(tmp_path, "modes-sweep", "steps = 5")
    assert code == 0
    meta = json.loads((tmp_path / "out.csv.meta.json").read_text())
    assert meta["scenario"] == "modes-sweep"
    for key in ("separation_um", "height_um", "freq_a_mhz", "freq_b_mhz",
                "shielding", "species_a", "species_b", "mass_a_amu",
                "charge_a_e", "detuning_span_khz", "steps"):
        assert key in meta["parameters"], key
    assert meta["parameters"]["steps"] == 5
    assert meta["parameters"]["mass_a_amu"] == pytest.approx(9.0117, abs=1e-3)


def test_modes_sweep_schema_and_zero_width(tmp_path):
    code, out = run_scenario(tmp_path, "modes-sweep",
                             "detuning_span_khz = 0\nsteps = 7")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["detuning_hz", "f_minus_hz", "f_plus_hz", "splitting_hz"]
    assert len(rows) == 1
    assert rows[0][3] == pytest.approx(3.1e3, rel=0.02)


def test_modes_sweep_minimum_at_resonance(tmp_path):
    code, out = run_scenario(tmp_path, "modes-sweep",
                             "detuning_span_khz = 40\nsteps = 41")
    assert code == 0
    _, rows = read_csv(out)
    arr = np.array(rows)
    idx = int(np.argmin(arr[:, 3]))
    assert arr[idx, 0] == pytest.approx(0.0, abs=1e-9)


def test_thermal_exchange_spot_value(tmp_path):
    # operating point of the few-quanta exchange, sampled at 155 us
    code, out = run_scenario(tmp_path, "thermal-exchange",
                             "tau_max_us = 155\ntau_points = 2\ntail_tol = 1e-5")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["tau_s", "n_a_mean"]
    trap = cw.TrapConfig(40e-6, 40e-6, 4.04e6, 4.04e6)
    omega = cw.exchange_rate(trap, cw.BERYLLIUM_9, cw.BERYLLIUM_9)
    closed = cw.closed_form_exchange(0.35, 2.3, omega, 1885.0, [155e-6])
    assert rows[1][1] == pytest.approx(closed.values[0], abs=2e-3)
    assert rows[1][1] == pytest.approx(2.59, abs=2e-2)


def test_single_quantum_ideal_json(tmp_path):
    config = "tau_max_us = 120\ntau_points = 5"
    code, out = run_scenario(tmp_path, "single-quantum", config, fmt="json")
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["columns"] == ["tau_s", "p_up_a"]
    trap = cw.TrapConfig(40e-6, 40e-6, 4.04e6, 4.04e6)
    omega = cw.exchange_rate(trap, cw.BERYLLIUM_9, cw.BERYLLIUM_9)
    for tau, p_up in payload["rows"]:
        assert p_up == pytest.approx(math.sin(omega * tau) ** 2, abs=1e-6)


def test_outputs_are_deterministic(tmp_path):
    text = "detuning_span_khz = 30\nsteps = 21"
    _, first = run_scenario(tmp_path, "modes-sweep", text, name="first")
    _, second = run_scenario(tmp_path, "modes-sweep", text, name="second")
    assert first.read_bytes() == second.read_bytes()
    meta_first = (tmp_path / "first.csv.meta.json").read_bytes()
    meta_second = (tmp_path / "second.csv.meta.json").read_bytes()
    assert meta_first == meta_second


# --- exit codes -------------------------------------------------------------

def test_exit_code_unknown_key(tmp_path, capsys):
    code, _ = run_scenario(tmp_path, "coupling-calc", "bogus_key = 1")
    assert code == 2
    assert "bogus_key" in capsys.readouterr().err


def test_exit_code_physics_error(tmp_path):
    code, _ = run_scenario(tmp_path, "coupling-calc", "separation_um = -5")
    assert code == 3


def test_exit_code_unknown_species(tmp_path):
    code, _ = run_scenario(tmp_path, "coupling-calc", "species_a = xe999")
    assert code == 2


def test_exit_code_missing_config(tmp_path):
    out = tmp_path / "out.csv"
    code = main(["coupling-calc", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(out)])
    assert code == 4


def test_exit_code_unwritable_output(tmp_path):
    config = tmp_path / "c.cfg"
    config.write_text("", encoding="utf-8")
    code = main(["coupling-calc", "--config", str(config),
                 "--out", str(tmp_path / "missing-dir" / "out.csv")])
    assert code == 4


# --- regression -------------------------------------------------------------

def test_regression_passes_and_is_deterministic(capsys):
    assert main(["regression"]) == 0
    first = capsys.readouterr().out
    assert main(["regression"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "overall: PASS (6/6)" in first
    for name in ("tau_ex_us_4.04MHz", "shielding_beta_max", "min_splitting_khz",
                 "exchange_period_us_5.56MHz", "p_up_ideal_at_tau_ex",
                 "heating_rate_quanta_per_s"):
        assert name in first


def test_regression_catches_tampered_exchange_rate(monkeypatch, capsys):
    true_rate = coupling.exchange_rate

    def tampered(config, species_a, species_b):
        return 1.1 * true_rate(config, species_a, species_b)

    monkeypatch.setattr(coupling, "exchange_rate", tampered)
    assert main(["regression"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_regression_report_structure():
    report = regression()
    assert len(report.checks) == 6
    assert report.passed == all(check.passed for check in report.checks)
