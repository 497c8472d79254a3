"""Command-line front end: scenario execution and the regression table.

Usage:
    coupled-wells <scenario> --config FILE --out FILE [--format csv|json]
    coupled-wells regression

Scenarios: coupling-calc, modes-sweep, thermal-exchange, single-quantum.
Config files are flat "key = value" text with units in the key names; all
keys have defaults, unknown keys are rejected, and the fully resolved
parameter set is echoed to a .meta.json sidecar next to the data file.

Exit codes: 0 ok, 1 regression failure, 2 config error, 3 physics-domain
error, 4 I/O error.
"""
import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import coupling, modes, protocols
from .constants import (ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE, IonSpecies,
                        SPECIES_REGISTRY)
from .coupling import TrapConfig
from .dynamics import ExchangeHamiltonian, HeatingModel, evolve
from .errors import ConfigError, PhysicsDomainError, StepSizeError, TruncationError
from .fock import FockSpace, expectation_number, thermal_state
from .protocols import ExperimentPlan

_VERSION = "0.1.0"


def _format_number(x) -> str:
    """12 significant digits; stable across runs."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.11e}"


# --- config handling -----------------------------------------------------

_COMMON_KEYS = {
    "separation_um": (float, 40.0),
    "height_um": (float, 40.0),
    "freq_a_mhz": (float, 4.04),
    "freq_b_mhz": (float, 4.04),
    "shielding": (bool, True),
    "species_a": (str, "be9"),
    "species_b": (str, "be9"),
    "mass_a_amu": (float, 0.0),   # 0 = use species registry value
    "mass_b_amu": (float, 0.0),
    "charge_a_e": (float, 0.0),   # 0 = use species registry value
    "charge_b_e": (float, 0.0),
}

_SCENARIO_KEYS = {
    "coupling-calc": {},
    "modes-sweep": {
        "detuning_span_khz": (float, 40.0),
        "steps": (int, 81),
    },
    "thermal-exchange": {
        "nbar_a": (float, 0.35),
        "nbar_b": (float, 2.3),
        "heating_a_per_s": (float, 1885.0),
        "heating_b_per_s": (float, 1885.0),
        "tau_max_us": (float, 600.0),
        "tau_points": (int, 61),
        "tail_tol": (float, 1e-6),
        "dt_us": (float, 0.0),    # 0 = integrator default
        "ramp": (str, "instantaneous"),
        "ramp_time_us": (float, 9.0),
        "off_resonance_detuning_khz": (float, 100.0),
    },
    "single-quantum": {
        "nbar_a": (float, 0.0),
        "nbar_b": (float, 0.0),
        "heating_a_per_s": (float, 0.0),
        "heating_b_per_s": (float, 0.0),
        "pulse_error": (float, 0.0),
        "tau_max_us": (float, 0.0),   # 0 = four exchange times
        "tau_points": (int, 65),
        "tail_tol": (float, 1e-6),
        "dt_us": (float, 0.0),
    },
}


def _parse_bool(raw: str, key: str) -> bool:
    lowered = raw.lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"key '{key}': cannot parse boolean from {raw!r}")


def parse_config(text: str, scenario: str) -> dict:
    """Parse flat key=value text against the scenario's key table."""
    table = dict(_COMMON_KEYS)
    table.update(_SCENARIO_KEYS[scenario])
    values = {key: default for key, (_, default) in table.items()}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in table:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        kind, _ = table[key]
        try:
            if kind is bool:
                values[key] = _parse_bool(raw, key)
            elif kind is int:
                values[key] = int(raw)
            elif kind is float:
                values[key] = float(raw)
            else:
                values[key] = raw
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: key '{key}': {exc}") from None
    return values


def _resolve_species(values: dict, side: str) -> IonSpecies:
    name = values[f"species_{side}"].lower()
    if name not in SPECIES_REGISTRY:
        known = ", ".join(sorted(SPECIES_REGISTRY))
        raise ConfigError(f"key 'species_{side}': unknown species '{name}' "
                          f"(known: {known})")
    species = SPECIES_REGISTRY[name]
    mass = values[f"mass_{side}_amu"]
    charge = values[f"charge_{side}_e"]
    if mass or charge:
        species = IonSpecies(
            mass=(mass * ATOMIC_MASS_UNIT) if mass else species.mass,
            charge=(charge * ELEMENTARY_CHARGE) if charge else species.charge,
            name=f"custom-{side}")
    return species


def _resolve_trap(values: dict) -> TrapConfig:
    return TrapConfig(separation_s0=values["separation_um"] * 1e-6,
                      height_d0=values["height_um"] * 1e-6,
                      freq_a=values["freq_a_mhz"] * 1e6,
                      freq_b=values["freq_b_mhz"] * 1e6,
                      shielding_enabled=values["shielding"])


def _resolved_metadata(values: dict, species_a, species_b) -> dict:
    resolved = dict(values)
    resolved["mass_a_amu"] = species_a.mass / ATOMIC_MASS_UNIT
    resolved["mass_b_amu"] = species_b.mass / ATOMIC_MASS_UNIT
    resolved["charge_a_e"] = species_a.charge / ELEMENTARY_CHARGE
    resolved["charge_b_e"] = species_b.charge / ELEMENTARY_CHARGE
    return resolved


# --- scenarios -----------------------------------------------------------

def _run_coupling_calc(values):
    trap = _resolve_trap(values)
    species_a = _resolve_species(values, "a")
    species_b = _resolve_species(values, "b")
    params = coupling.coupling_params(trap, species_a, species_b)
    spectrum = modes.normal_mode_frequencies(trap, species_a, species_b)
    columns = ("kappa_n_per_m", "beta", "omega_ex_rad_per_s", "tau_ex_us",
               "splitting_hz")
    rows = [(params.kappa, params.beta, params.omega_ex, params.tau_ex * 1e6,
             spectrum.splitting)]
    return columns, rows, _resolved_metadata(values, species_a, species_b)


def _run_modes_sweep(values):
    trap = _resolve_trap(values)
    species_a = _resolve_species(values, "a")
    species_b = _resolve_species(values, "b")
    half_span = 0.5 * values["detuning_span_khz"] * 1e3
    sweep = modes.avoided_crossing_sweep(trap, species_a, species_b,
                                         -half_span, half_span, values["steps"])
    columns = ("detuning_hz", "f_minus_hz", "f_plus_hz", "splitting_hz")
    rows = [(det, spec.f_minus, spec.f_plus, spec.splitting)
            for det, spec in zip(sweep.detunings, sweep.spectra)]
    return columns, rows, _resolved_metadata(values, species_a, species_b)


def _make_plan(values, trap, species_a, species_b, taus, ramp="instantaneous",
               ramp_time=9e-6, off_res_hz=1e5):
    return ExperimentPlan(
        trap=trap, species_a=species_a, species_b=species_b,
        heating=HeatingModel(values["heating_a_per_s"], values["heating_b_per_s"]),
        nbar_a=values["nbar_a"], nbar_b=values["nbar_b"], taus=taus,
        ramp_model=ramp, ramp_time=ramp_time,
        off_resonance_detuning_hz=off_res_hz,
        pulse_error=values.get("pulse_error", 0.0),
        tail_tol=values["tail_tol"],
        dt=(values["dt_us"] * 1e-6) if values["dt_us"] else None)


def _run_thermal_exchange(values):
    trap = _resolve_trap(values)
    species_a = _resolve_species(values, "a")
    species_b = _resolve_species(values, "b")
    taus = np.linspace(0.0, values["tau_max_us"] * 1e-6, values["tau_points"])
    plan = _make_plan(values, trap, species_a, species_b, taus,
                      ramp=values["ramp"],
                      ramp_time=values["ramp_time_us"] * 1e-6,
                      off_res_hz=values["off_resonance_detuning_khz"] * 1e3)
    series = protocols.thermal_exchange_experiment(plan)
    columns = ("tau_s", "n_a_mean")
    rows = list(zip(series.times, series.values))
    return columns, rows, _resolved_metadata(values, species_a, species_b)


def _run_single_quantum(values):
    trap = _resolve_trap(values)
    species_a = _resolve_species(values, "a")
    species_b = _resolve_species(values, "b")
    tau_max = values["tau_max_us"] * 1e-6
    if tau_max == 0.0:
        omega = coupling.exchange_rate(trap, species_a, species_b)
        tau_max = 4.0 * coupling.exchange_time(omega)
        values = dict(values)
        values["tau_max_us"] = tau_max * 1e6
    taus = np.linspace(0.0, tau_max, values["tau_points"])
    plan = _make_plan(values, trap, species_a, species_b, taus)
    series = protocols.single_quantum_experiment(plan)
    columns = ("tau_s", "p_up_a")
    rows = list(zip(series.times, series.values))
    return columns, rows, _resolved_metadata(values, species_a, species_b)


_SCENARIO_RUNNERS = {
    "coupling-calc": _run_coupling_calc,
    "modes-sweep": _run_modes_sweep,
    "thermal-exchange": _run_thermal_exchange,
    "single-quantum": _run_single_quantum,
}


# --- output --------------------------------------------------------------

def _write_output(path: str, fmt: str, scenario: str, columns, rows, resolved):
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format_number(v) for v in row])
    else:
        payload = {
            "scenario": scenario,
            "columns": list(columns),
            "rows": [[float(_format_number(v)) for v in row] for row in rows],
        }
        with open(path, "w", encoding="utf-8", newline="") as handle:
            json.dump(payload, handle, sort_keys=True, indent=2)
            handle.write("\n")
    meta = {
        "tool": "coupled-wells",
        "version": _VERSION,
        "scenario": scenario,
        "format": fmt,
        "columns": list(columns),
        "parameters": {k: (v if isinstance(v, (str, bool, int)) else float(v))
                       for k, v in sorted(resolved.items())},
    }
    with open(path + ".meta.json", "w", encoding="utf-8", newline="") as handle:
        json.dump(meta, handle, sort_keys=True, indent=2)
        handle.write("\n")


# --- regression ----------------------------------------------------------

@dataclass(frozen=True)
class RegressionCheck:
    name: str
    expected: float
    computed: float
    tolerance: float
    relative: bool

    @property
    def passed(self) -> bool:
        err = abs(self.computed - self.expected)
        if self.relative:
            return err <= self.tolerance * abs(self.expected)
        return err <= self.tolerance


@dataclass(frozen=True)
class RegressionReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def render(self) -> str:
        lines = [f"{'check':<34} {'expected':>18} {'computed':>18} "
                 f"{'tolerance':>12} status"]
        for c in self.checks:
            tol = f"{'rel' if c.relative else 'abs'} {c.tolerance:.0e}"
            lines.append(f"{c.name:<34} {_format_number(c.expected):>18} "
                         f"{_format_number(c.computed):>18} {tol:>12} "
                         f"{'PASS' if c.passed else 'FAIL'}")
        done = sum(1 for c in self.checks if c.passed)
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} "
                     f"({done}/{len(self.checks)})")
        return "\n".join(lines)


def regression() -> RegressionReport:
    """Recompute the headline predictions and compare each to its target."""
    be9 = SPECIES_REGISTRY["be9"]
    trap_404 = TrapConfig(40e-6, 40e-6, 4.04e6, 4.04e6, shielding_enabled=True)
    trap_556 = TrapConfig(40e-6, 40e-6, 5.56e6, 5.56e6, shielding_enabled=True)
    checks = []

    # full exchange time at the 4.04 MHz operating point
    omega = coupling.exchange_rate(trap_404, be9, be9)
    tau_ex = coupling.exchange_time(omega)
    checks.append(RegressionCheck("tau_ex_us_4.04MHz", 162.0, tau_ex * 1e6,
                                  0.01, relative=True))

    # shielding factor maximum over a wide geometry scan
    ratios = np.geomspace(0.01, 100.0, 401)
    betas = [coupling.shielding_factor(r * 40e-6, 40e-6) for r in ratios]
    checks.append(RegressionCheck("shielding_beta_max", 1.018, max(betas),
                                  0.001, relative=False))

    # minimum normal-mode splitting through the avoided crossing
    sweep = modes.avoided_crossing_sweep(trap_404, be9, be9, -20e3, 20e3, 81)
    checks.append(RegressionCheck("min_splitting_khz", 3.1,
                                  min(sweep.splittings) / 1e3, 0.02,
                                  relative=True))

    # oscillation period of the single-quantum exchange at 5.56 MHz
    omega_556 = coupling.exchange_rate(trap_556, be9, be9)
    checks.append(RegressionCheck("exchange_period_us_5.56MHz", 447.0,
                                  2.0 * coupling.exchange_time(omega_556) * 1e6,
                                  0.01, relative=True))

    # ideal pulse-exchange-pulse sequence transfers the quantum completely
    plan = ExperimentPlan(trap=trap_404, species_a=be9, species_b=be9,
                          heating=HeatingModel(), nbar_a=0.0, nbar_b=0.0,
                          taus=(0.0, tau_ex))
    series = protocols.single_quantum_experiment(plan)
    checks.append(RegressionCheck("p_up_ideal_at_tau_ex", 1.0,
                                  float(series.values[-1]), 1e-6,
                                  relative=False))

    # Lindblad heating reproduces the configured linear growth rate
    rate = 1885.0
    space = FockSpace(18, 18)
    rho = thermal_state(space, 0.2, 0.2)
    horizon = 200e-6
    final = evolve(rho, ExchangeHamiltonian(0.0, 0.0),
                   HeatingModel(rate, rate), duration=horizon)
    slope = (expectation_number(final, "a") - expectation_number(rho, "a")) / horizon
    checks.append(RegressionCheck("heating_rate_quanta_per_s", rate, slope,
                                  0.01, relative=True))

    return RegressionReport(checks=tuple(checks))


# --- entry point ---------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coupled-wells",
        description="Simulator of two Coulomb-coupled trapped-ion oscillators")
    sub = parser.add_subparsers(dest="command", required=True)
    for scenario in _SCENARIO_RUNNERS:
        s = sub.add_parser(scenario, help=f"run the {scenario} scenario")
        s.add_argument("--config", required=True, help="key=value config file")
        s.add_argument("--out", required=True, help="output data file")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_parser("regression", help="recompute and check headline numbers")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "regression":
        report = regression()
        print(report.render())
        return 0 if report.passed else 1
    try:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 4
        values = parse_config(text, args.command)
        columns, rows, resolved = _SCENARIO_RUNNERS[args.command](values)
        try:
            _write_output(args.out, args.format, args.command, columns, rows,
                          resolved)
        except OSError as exc:
            print(f"error: cannot write output: {exc}", file=sys.stderr)
            return 4
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PhysicsDomainError, TruncationError, StepSizeError) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
