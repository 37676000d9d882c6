"""Batch front-end: parse a run configuration, execute a scenario, write artifacts.

Configs are INI-style text with sections [run], [model], [plan], [initial],
[scenario] (scenario-specific extras) and, for the 2D scenario, [model_y].
Unset keys fall back to the demo defaults (4-site chain, delta_a=5,
delta_b=1, F=1.5, dt=0.02, spike at site 2), so a minimal config is just:

    [run]
    scenario = single-exact

Outputs land in --out (default: current directory): trajectory.csv,
series.csv, spectrum.csv, circuit.qasm, counts.json as the scenario
dictates, plus manifest.json recording every parameter. Outputs are
deterministic: the same config produces byte-identical files.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .model import ModelParams
from .evolve import EvolutionPlan, Trajectory, initial_amplitudes, run, write_trajectory_csv
from . import observables as obs
from .oracles import bessel_jn_sequence, dense_2d_hamiltonian, dense_hamiltonian
from .circuits import build_trotter_step, build_two_particle_step
from .transpile import REFERENCE_STEP_COUNTS_3Q, count, decompose, emit_qasm

__all__ = ["ConfigError", "RunConfig", "parse_config", "run_scenario", "main"]

SCENARIOS = (
    "single-exact",
    "single-trotter",
    "single-ode",
    "two-particle",
    "spectrum",
    "dispersion",
    "ladder",
    "transpile-report",
    "bessel-check",
    "dim2",
)

_SCENARIO_STEPPER = {
    "single-exact": "exact-dense",
    "single-trotter": "trotter1",
    "single-ode": "ode-rk4",
}

#: scenarios that run gate circuits and therefore need N = 2**gamma
_CIRCUIT_SCENARIOS = ("single-trotter", "two-particle", "transpile-report")

_MODEL_KEYS = ("delta_a", "delta_b", "f_dc", "f_ac", "omega", "v", "n_sites")
_MODEL_DEFAULTS = {
    "delta_a": 5.0, "delta_b": 1.0, "f_dc": 1.5, "f_ac": 0.0,
    "omega": 0.0, "v": 0.0, "n_sites": 4,
}
_PLAN_KEYS = ("dt", "n_steps", "stepper", "field_sampling", "store_states")
_INITIAL_KEYS = ("kind", "site", "site1", "site2")
_SCENARIO_KEYS = {
    "spectrum": ("f_values",),
    "dispersion": ("k_points",),
    "ladder": ("f_const", "alpha_min", "alpha_max", "bands"),
    "transpile-report": ("sample_time",),
    "bessel-check": ("n_max", "x_values"),
    "dim2": ("t_end",),
}


class ConfigError(ValueError):
    """A configuration problem, reported with its section.key location."""


class RunConfig:
    """Validated scenario configuration."""

    def __init__(self, scenario: str, label: str, model: ModelParams,
                 plan: EvolutionPlan | None, initial: dict, extras: dict,
                 model_y: ModelParams | None):
        self.scenario = scenario
        self.label = label
        self.model = model
        self.plan = plan
        self.initial = initial
        self.extras = extras
        self.model_y = model_y


def _fail(section: str, key: str, message: str):
    raise ConfigError(f"{section}.{key}: {message}")


class _Section:
    """One config section with typed getters and unknown-key rejection."""

    def __init__(self, parser: configparser.ConfigParser, name: str, allowed):
        self.name = name
        self.raw = dict(parser.items(name)) if parser.has_section(name) else {}
        for key in self.raw:
            if key not in allowed:
                _fail(name, key, "unknown key")

    def get(self, key: str, default=None):
        return self.raw.get(key, default)

    def get_float(self, key: str, default=None):
        value = self.raw.get(key)
        if value is None:
            if default is None:
                _fail(self.name, key, "required key missing")
            return float(default)
        try:
            return float(value)
        except ValueError:
            _fail(self.name, key, f"not a number: {value!r}")

    def get_int(self, key: str, default=None):
        value = self.raw.get(key)
        if value is None:
            if default is None:
                _fail(self.name, key, "required key missing")
            return int(default)
        try:
            return int(value)
        except ValueError:
            _fail(self.name, key, f"not an integer: {value!r}")

    def get_bool(self, key: str, default: bool):
        value = self.raw.get(key)
        if value is None:
            return default
        lowered = value.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        _fail(self.name, key, f"not a boolean: {value!r}")

    def get_floats(self, key: str, default: str):
        text = self.raw.get(key, default)
        try:
            return [float(tok) for tok in text.split(",") if tok.strip()]
        except ValueError:
            _fail(self.name, key, f"not a comma-separated number list: {text!r}")


def _model_from(section: _Section, where: str) -> ModelParams:
    kwargs = {key: section.get_float(key, _MODEL_DEFAULTS[key]) for key in _MODEL_KEYS
              if key != "n_sites"}
    kwargs["n_sites"] = section.get_int("n_sites", _MODEL_DEFAULTS["n_sites"])
    try:
        return ModelParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate config text; unknown sections/keys are errors."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None

    known_sections = {"run", "model", "plan", "initial", "scenario", "model_y"}
    for name in parser.sections():
        if name not in known_sections:
            raise ConfigError(f"unknown section [{name}]")

    run_sec = _Section(parser, "run", ("scenario", "label"))
    scenario = run_sec.get("scenario", "")
    if not scenario:
        _fail("run", "scenario", "required key missing")
    if scenario not in SCENARIOS:
        _fail("run", "scenario", f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    label = run_sec.get("label", scenario)

    model = _model_from(_Section(parser, "model", _MODEL_KEYS), "model")
    if scenario in _CIRCUIT_SCENARIOS and model.gamma is None:
        _fail("model", "n_sites",
              f"must be a power of two for scenario {scenario}, got {model.n_sites}")

    plan_sec = _Section(parser, "plan", _PLAN_KEYS)
    plan = None
    if scenario in _SCENARIO_STEPPER or scenario == "two-particle":
        forced = _SCENARIO_STEPPER.get(scenario)
        stepper = plan_sec.get("stepper", forced or "trotter1")
        if forced is not None and stepper != forced:
            _fail("plan", "stepper", f"scenario {scenario} runs {forced!r}, got {stepper!r}")
        if scenario == "two-particle" and stepper not in ("trotter1", "exact-dense"):
            _fail("plan", "stepper", f"two-particle supports trotter1/exact-dense, got {stepper!r}")
        dt = plan_sec.get_float("dt", 0.02)
        if dt <= 0:
            _fail("plan", "dt", f"must be > 0, got {dt}")
        n_steps = plan_sec.get_int("n_steps", 100)
        if n_steps < 1:
            _fail("plan", "n_steps", f"must be >= 1, got {n_steps}")
        field_sampling = plan_sec.get("field_sampling", "end")
        if field_sampling not in ("end", "midpoint"):
            _fail("plan", "field_sampling", f"must be end or midpoint, got {field_sampling!r}")
        plan = EvolutionPlan(dt=dt, n_steps=n_steps, stepper=stepper,
                             field_sampling=field_sampling,
                             store_states=plan_sec.get_bool("store_states", True))
    elif plan_sec.raw and scenario != "transpile-report":
        key = sorted(plan_sec.raw)[0]
        _fail("plan", key, f"scenario {scenario} takes no evolution plan")

    init_sec = _Section(parser, "initial", _INITIAL_KEYS)
    initial: dict = {}
    if scenario in _SCENARIO_STEPPER:
        kind = init_sec.get("kind", "spike")
        if kind not in ("spike", "gaussian"):
            _fail("initial", "kind", f"single-particle scenarios take spike or gaussian, got {kind!r}")
        initial["kind"] = kind
        if kind == "spike":
            initial["site"] = init_sec.get_int("site", 2)
    elif scenario == "two-particle":
        kind = init_sec.get("kind", "spike2")
        if kind != "spike2":
            _fail("initial", "kind", f"two-particle takes spike2, got {kind!r}")
        initial["kind"] = kind
        initial["site1"] = init_sec.get_int("site1", 1)
        initial["site2"] = init_sec.get_int("site2", 2)
    elif init_sec.raw:
        key = sorted(init_sec.raw)[0]
        _fail("initial", key, f"scenario {scenario} takes no initial state")

    extras_sec = _Section(parser, "scenario", _SCENARIO_KEYS.get(scenario, ()))
    extras: dict = {}
    if scenario == "spectrum":
        extras["f_values"] = extras_sec.get_floats("f_values", "0, 0.2, 1")
    elif scenario == "dispersion":
        k_points = extras_sec.get_int("k_points", 201)
        if k_points < 2:
            _fail("scenario", "k_points", f"must be >= 2, got {k_points}")
        extras["k_points"] = k_points
    elif scenario == "ladder":
        f_const = extras_sec.get_float("f_const", 1.0)
        if f_const <= 0:
            _fail("scenario", "f_const", f"must be > 0, got {f_const}")
        extras["f_const"] = f_const
        extras["alpha_min"] = extras_sec.get_int("alpha_min", -10)
        extras["alpha_max"] = extras_sec.get_int("alpha_max", 10)
        if extras["alpha_max"] < extras["alpha_min"]:
            _fail("scenario", "alpha_max", "must be >= alpha_min")
        bands = extras_sec.get("bands", "-,+")
        band_list = [tok.strip() for tok in bands.split(",") if tok.strip()]
        if not band_list or any(b not in ("-", "+") for b in band_list):
            _fail("scenario", "bands", f"must list '-' and/or '+', got {bands!r}")
        extras["bands"] = band_list
    elif scenario == "transpile-report":
        extras["sample_time"] = extras_sec.get_float("sample_time", plan_sec.get_float("dt", 0.02))
    elif scenario == "bessel-check":
        n_max = extras_sec.get_int("n_max", 40)
        if n_max < 0:
            _fail("scenario", "n_max", f"must be >= 0, got {n_max}")
        extras["n_max"] = n_max
        extras["x_values"] = extras_sec.get_floats("x_values", "0.5, 2.0, 7.5, 20.0")
    elif scenario == "dim2":
        t_end = extras_sec.get_float("t_end", 0.5)
        if t_end < 0:
            _fail("scenario", "t_end", f"must be >= 0, got {t_end}")
        extras["t_end"] = t_end

    model_y = None
    if scenario == "dim2":
        model_y = _model_from(_Section(parser, "model_y", _MODEL_KEYS), "model_y")
    elif parser.has_section("model_y"):
        raise ConfigError(f"section [model_y] only applies to the dim2 scenario, not {scenario}")

    return RunConfig(scenario, label, model, plan, initial, extras, model_y)


# ---------------------------------------------------------------------------
# scenario execution


def _write_rows(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")


def _initial_array(config: RunConfig) -> np.ndarray:
    initial = config.initial
    if initial["kind"] == "spike":
        return initial_amplitudes("spike", config.model, initial["site"])
    if initial["kind"] == "gaussian":
        return initial_amplitudes("gaussian", config.model)
    return initial_amplitudes("spike2", config.model, initial["site1"], initial["site2"])


def _series_for(traj: Trajectory, store_states: bool):
    series = [obs.position_series(traj), obs.probability_series(traj)]
    if store_states:
        series.append(obs.momentum_series(traj))
    return series


def _run_single(config: RunConfig, out: Path) -> list[str]:
    traj = run(_initial_array(config), config.model, config.plan)
    write_trajectory_csv(traj, out / "trajectory.csv")
    obs.write_series_csv(_series_for(traj, config.plan.store_states), out / "series.csv")
    return ["trajectory.csv", "series.csv"]


def _run_two_particle(config: RunConfig, out: Path) -> list[str]:
    traj = run(_initial_array(config), config.model, config.plan)
    write_trajectory_csv(traj, out / "trajectory.csv")
    return ["trajectory.csv"]


def _run_spectrum(config: RunConfig, out: Path) -> list[str]:
    rows = []
    for f in config.extras["f_values"]:
        for idx, energy in enumerate(obs.spectrum(config.model, f)):
            rows.append((float(f), idx, float(energy)))
    _write_rows(out / "spectrum.csv", "f,index,energy", rows)
    return ["spectrum.csv"]


def _run_dispersion(config: RunConfig, out: Path) -> list[str]:
    k = np.linspace(-np.pi / 2.0, np.pi / 2.0, config.extras["k_points"])
    upper, lower = obs.dispersion(config.model, k)
    rows = [(float(ki), float(lo), float(up)) for ki, lo, up in zip(k, lower, upper)]
    _write_rows(out / "spectrum.csv", "k,band_minus,band_plus", rows)
    return ["spectrum.csv"]


def _run_ladder(config: RunConfig, out: Path) -> tuple[list[str], dict]:
    rows = []
    offsets = {}
    for band in config.extras["bands"]:
        ladder = obs.stark_ladder(
            config.model, config.extras["f_const"],
            (config.extras["alpha_min"], config.extras["alpha_max"]), band=band,
        )
        offsets[f"offset_{'plus' if band == '+' else 'minus'}"] = ladder.offset
        rows.extend((band, int(a), float(e)) for a, e in zip(ladder.alphas, ladder.energies))
    _write_rows(out / "spectrum.csv", "band,alpha,energy", rows)
    return ["spectrum.csv"], offsets


def _run_transpile_report(config: RunConfig, out: Path) -> tuple[list[str], dict]:
    dt = config.extras["sample_time"]
    if config.model.v != 0.0:
        circuit = build_two_particle_step(config.model, dt, dt)
    else:
        circuit = build_trotter_step(config.model, dt, dt)
    basis = decompose(circuit)
    counts = count(basis)
    (out / "circuit.qasm").write_text(emit_qasm(basis), encoding="ascii")
    report = {
        "qubits": basis.qubit_count,
        "counts": counts.as_dict(),
        "reference_counts_3q": REFERENCE_STEP_COUNTS_3Q,
        "matches_reference": counts.as_dict() == REFERENCE_STEP_COUNTS_3Q,
    }
    (out / "counts.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                     encoding="ascii")
    return ["circuit.qasm", "counts.json"], {"counts": counts.as_dict()}


def _run_bessel_check(config: RunConfig, out: Path) -> tuple[list[str], dict]:
    n_max = config.extras["n_max"]
    rows = []
    worst_sum_rule = 0.0
    for x in config.extras["x_values"]:
        seq = bessel_jn_sequence(n_max, x)
        rows.extend((float(x), n, float(j)) for n, j in enumerate(seq))
        full = bessel_jn_sequence(max(n_max, int(abs(x)) + 40), x)
        worst_sum_rule = max(worst_sum_rule,
                             abs(full[0] ** 2 + 2.0 * float(np.sum(full[1:] ** 2)) - 1.0))
    _write_rows(out / "series.csv", "x,n,jn", rows)
    return ["series.csv"], {"sum_rule_residual": worst_sum_rule}


def _run_dim2(config: RunConfig, out: Path) -> tuple[list[str], dict]:
    h2d = dense_2d_hamiltonian(config.model, config.model_y, 0.0)
    energies = np.linalg.eigvalsh(h2d)
    wx = np.linalg.eigvalsh(dense_hamiltonian(config.model, 0.0))
    wy = np.linalg.eigvalsh(dense_hamiltonian(config.model_y, 0.0))
    pair_sums = np.sort(np.add.outer(wx, wy).ravel())
    residual = float(np.max(np.abs(np.sort(energies) - pair_sums)))
    _write_rows(out / "spectrum.csv", "index,energy",
                [(idx, float(e)) for idx, e in enumerate(energies)])
    return ["spectrum.csv"], {"kronecker_sum_residual": residual, "t_end": config.extras["t_end"]}


def run_scenario(config: RunConfig, out_dir) -> list[str]:
    """Execute one scenario; returns the artifact names written (manifest last)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    notes: dict = {}
    if config.scenario in _SCENARIO_STEPPER:
        artifacts = _run_single(config, out)
    elif config.scenario == "two-particle":
        artifacts = _run_two_particle(config, out)
    elif config.scenario == "spectrum":
        artifacts = _run_spectrum(config, out)
    elif config.scenario == "dispersion":
        artifacts = _run_dispersion(config, out)
    elif config.scenario == "ladder":
        artifacts, notes = _run_ladder(config, out)
    elif config.scenario == "transpile-report":
        artifacts, notes = _run_transpile_report(config, out)
    elif config.scenario == "bessel-check":
        artifacts, notes = _run_bessel_check(config, out)
    else:
        artifacts, notes = _run_dim2(config, out)

    manifest = {
        "package": "blochsim",
        "version": __version__,
        "scenario": config.scenario,
        "label": config.label,
        "model": _params_dict(config.model),
        "plan": _plan_dict(config.plan),
        "initial": config.initial or None,
        "scenario_extras": config.extras or None,
        "notes": notes or None,
        "outputs": artifacts,
    }
    if config.model_y is not None:
        manifest["model_y"] = _params_dict(config.model_y)
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="ascii")
    return artifacts + ["manifest.json"]


def _params_dict(params: ModelParams) -> dict:
    return {
        "delta_a": params.delta_a, "delta_b": params.delta_b,
        "f_dc": params.f_dc, "f_ac": params.f_ac, "omega": params.omega,
        "v": params.v, "n_sites": params.n_sites,
    }


def _plan_dict(plan: EvolutionPlan | None):
    if plan is None:
        return None
    return {
        "dt": plan.dt, "n_steps": plan.n_steps, "stepper": plan.stepper,
        "field_sampling": plan.field_sampling, "store_states": plan.store_states,
    }


# ---------------------------------------------------------------------------
# entry point


def _apply_overrides(text: str, overrides: list[str]) -> str:
    """Apply repeatable --override section.key=value onto the config text."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        location, value = item.split("=", 1)
        section, key = location.split(".", 1)
        section, key = section.strip(), key.strip()
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value.strip())
    chunks = []
    for section in parser.sections():
        chunks.append(f"[{section}]")
        chunks.extend(f"{key} = {value}" for key, value in parser.items(section))
        chunks.append("")
    return "\n".join(chunks)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blochsim",
        description="Bloch-oscillation circuit simulator and classical oracle toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runner = sub.add_parser("run", help="execute a scenario described by a config file")
    runner.add_argument("config", help="path to the INI-style run configuration")
    runner.add_argument("--out", default=".", help="output directory (default: current)")
    runner.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config value; repeatable")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        if args.override:
            text = _apply_overrides(text, args.override)
        config = parse_config(text)
        artifacts = run_scenario(config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary, report and exit nonzero
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{config.scenario}: wrote {', '.join(artifacts)} to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
