"""INI experiment files for the command line.

Five sections: [system] (SystemConfig fields plus the snr_db convenience),
[algorithm] (which solver, trials, master seed, workers), [sweep], [solver]
(OptimizerOptions fields) and [output].  Every key is validated; unknown
sections or keys are errors, since a typoed key silently falling back to a
default would corrupt an experiment.
"""

import configparser
import math

import numpy as np

from .config import SystemConfig
from .errors import ConfigError
from .harness import ALGORITHMS, SWEEP_PARAMS, ExperimentSpec
from .optimizers import OptimizerOptions

SECTIONS = ("system", "algorithm", "sweep", "solver", "output")

# CLI spellings -> canonical sweep parameter names
SWEEP_ALIASES = {"snr": "snr_db", "snr_db": "snr_db", "k": "k", "n": "n", "r0": "r0", "rho": "rho"}


def _parse_int(text, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {text!r}") from None


def _parse_float(text, key):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {text!r}") from None


def _parse_float_list(text, key):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{key} must hold at least one number")
    return [_parse_float(p, key) for p in parts]


def _parse_scalar_or_list(text, key):
    values = _parse_float_list(text, key)
    return values[0] if len(values) == 1 else values


def _parse_bool(text, key):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {text!r}")


def _parse_str(text, key):
    return text.strip()


_SYSTEM_KEYS = {
    "n_bs_antennas": _parse_int,
    "n_ues": _parse_int,
    "n_ue_antennas": _parse_int,
    "n_comp_streams": _parse_int,
    "n_sense_streams": _parse_int,
    "noise_power": _parse_float,
    "power_budget_per_ue": _parse_scalar_or_list,
    "rate_thresholds": _parse_scalar_or_list,
    "priorities": _parse_scalar_or_list,
    "mse_budget": _parse_float,
    "cell_radius": _parse_float,
    "min_ue_distance": _parse_float,
    "interference_model": _parse_str,
    "channel_mode": _parse_str,
    "snr_db": _parse_float,
}

_SOLVER_KEYS = {
    "max_iterations": _parse_int,
    "rel_tol": _parse_float,
    "subproblem_tol": _parse_float,
    "monotonicity_slack": _parse_float,
    "debug_dump": _parse_str,
}

_ALGORITHM_KEYS = {
    "name": _parse_str,
    "objective_mode": _parse_str,
    "trials": _parse_int,
    "master_seed": _parse_int,
    "workers": _parse_int,
}

_SWEEP_KEYS = {"param": _parse_str, "values": _parse_float_list}

_OUTPUT_KEYS = {"directory": _parse_str, "timings": _parse_bool, "traces": _parse_bool}

_KEYS_BY_SECTION = {
    "system": _SYSTEM_KEYS,
    "algorithm": _ALGORITHM_KEYS,
    "sweep": _SWEEP_KEYS,
    "solver": _SOLVER_KEYS,
    "output": _OUTPUT_KEYS,
}


def canonical_algorithm(name):
    cleaned = name.strip().lower().replace("-", "_")
    if cleaned not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
    return cleaned


def canonical_sweep_param(name):
    cleaned = name.strip().lower()
    if cleaned not in SWEEP_ALIASES:
        raise ConfigError(
            f"unknown sweep parameter {name!r}; choose from {sorted(set(SWEEP_ALIASES))}"
        )
    return SWEEP_ALIASES[cleaned]


def _read_sections(path):
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"cannot read experiment file {path}")
    parsed = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}] in {path}; expected {SECTIONS}")
        known = _KEYS_BY_SECTION[section]
        values = {}
        for key, raw in parser.items(section):
            if key not in known:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}] of {path}; "
                    f"valid keys: {sorted(known)}"
                )
            values[key] = known[key](raw, f"[{section}] {key}")
        parsed[section] = values
    return parsed


def _reshape_per_stream(value, k, j, key):
    if np.isscalar(value):
        return value
    arr = np.asarray(value, dtype=float)
    if arr.size == k * j:
        return arr.reshape(k, j)
    raise ConfigError(f"{key} must be a scalar or {k}*{j} comma-separated values")


def build_system_config(values):
    values = dict(values)
    snr_db = values.pop("snr_db", None)
    if snr_db is not None and "power_budget_per_ue" in values:
        raise ConfigError("give either snr_db or power_budget_per_ue, not both")
    if values.get("mse_budget") is not None and values["mse_budget"] < 0:
        raise ConfigError("mse_budget must be >= 0 (omit or use inf to disable)")
    k = values.get("n_ues", SystemConfig.n_ues)
    j = values.get("n_sense_streams", SystemConfig.n_sense_streams)
    for key in ("rate_thresholds", "priorities"):
        if key in values:
            values[key] = _reshape_per_stream(values[key], k, j, f"[system] {key}")
    config = SystemConfig(**values)
    if snr_db is not None:
        config = config.with_snr_db(snr_db)
    return config


def load_experiment(path, out_dir=None, seed=None, threads=None):
    """Parse an INI file into an ExperimentSpec; CLI overrides win."""
    parsed = _read_sections(path)
    config = build_system_config(parsed.get("system", {}))

    solver = parsed.get("solver", {})
    options = OptimizerOptions(**solver) if solver else None

    algo = parsed.get("algorithm", {})
    algorithm = canonical_algorithm(algo.get("name", "cem"))
    objective_mode = algo.get("objective_mode", "cem")

    sweep = parsed.get("sweep", {})
    sweep_param = None
    sweep_values = ()
    if sweep:
        if "param" not in sweep or "values" not in sweep:
            raise ConfigError("[sweep] needs both param and values")
        sweep_param = canonical_sweep_param(sweep["param"])
        sweep_values = tuple(sweep["values"])

    output = parsed.get("output", {})
    directory = out_dir if out_dir is not None else output.get("directory")

    spec = ExperimentSpec(
        config=config,
        algorithm=algorithm,
        objective_mode=objective_mode,
        sweep_param=sweep_param,
        sweep_values=sweep_values,
        trials=algo.get("trials", 20),
        master_seed=seed if seed is not None else algo.get("master_seed", 0),
        output_dir=directory,
        workers=threads if threads is not None else algo.get("workers", 1),
        record_timings=output.get("timings", False),
        options=options,
    )
    if spec.algorithm == "cem" and math.isfinite(spec.config.mse_budget):
        raise ConfigError("a finite mse_budget belongs to the sum-rate problem; use algorithm wsr")
    return spec, output.get("traces", True)
