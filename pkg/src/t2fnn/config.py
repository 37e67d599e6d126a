"""Plain-text configuration documents and network checkpoints.

Experiment manifests are flat ``key = value`` documents with dotted keys
(``smc.gamma = 2.0``), ``#`` comments and blank lines. Unknown keys are
rejected so that typos cannot silently fall back to defaults; an empty
document yields the default experiment (non-BIBO plant, sliding-mode
learner, 10 runs, seed 0). Command-line flags override file values.

The same lexical format serializes :class:`~t2fnn.network.NetworkState`
for checkpointing, with arrays flattened row-major as comma-separated
full-precision floats.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .errors import T2FNNError
from .experiment import ExperimentConfig
from .gradient import GdParams
from .network import NetworkState
from .smc import SmcParams


class ParseError(T2FNNError):
    """Malformed document: bad syntax, unknown key or unparsable value."""


class ValidationError(T2FNNError):
    """Well-formed document whose values break an invariant."""


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (ExperimentConfig field, caster)
_EXPERIMENT_KEYS = {
    "experiment.plant": ("plant", str),
    "experiment.learner": ("learner", str),
    "experiment.epochs": ("epochs", int),
    "experiment.samples_per_epoch": ("samples_per_epoch", int),
    "experiment.runs": ("runs", int),
    "experiment.seed": ("seed", int),
    "experiment.train_fraction": ("train_fraction", float),
    "experiment.n_mfs": ("n_mfs", int),
    "experiment.noise_std": ("noise_std", float),
    "experiment.dry_run": ("dry_run", _parse_bool),
    "experiment.skip_failed_runs": ("skip_failed_runs", _parse_bool),
    "experiment.tv_period": ("tv_period", int),
    "plant.input": ("plant_input", str),
    "plant.input_value": ("plant_input_value", float),
    "init.q": ("q_init", float),
    "init.center_jitter": ("center_jitter", float),
    "init.sigma_scale_min": ("sigma_scale_min", float),
    "init.sigma_scale_max": ("sigma_scale_max", float),
    "init.sigma_ratio_min": ("sigma_ratio_min", float),
    "init.sigma_ratio_max": ("sigma_ratio_max", float),
    "init.ab": ("ab_init", float),
}

_SMC_KEYS = {
    "smc.gamma": ("gamma", float),
    "smc.nu": ("nu", float),
    "smc.delta_s": ("delta_s", float),
    "smc.rho_ant": ("rho_ant", float),
    "smc.denom_guard": ("denom_guard", float),
    "smc.dt": ("dt", float),
    "smc.sigma_floor": ("sigma_floor", float),
    "smc.sigma_cap": ("sigma_cap", float),
    "smc.alpha_init": ("alpha_init", float),
}

_GD_KEYS = {
    "gd.eta": ("eta", float),
    "gd.eta_ant": ("eta_ant", float),
}

_ALL_KEYS = {**_EXPERIMENT_KEYS, **_SMC_KEYS, **_GD_KEYS}


def parse_document(text):
    """Parse a flat key/value document into an ordered dict of strings."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ParseError(f"line {lineno}: empty key")
        if key in values:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        values[key] = (value, lineno)
    return values


def parse_config(text: str) -> ExperimentConfig:
    """Parse an experiment manifest.

    Raises :class:`ParseError` for syntax problems, unknown keys or values
    of the wrong type (with line context) and :class:`ValidationError` when
    a value breaks a declared invariant (e.g. a non-positive ``smc.delta_s``).
    """
    values = parse_document(text)
    exp_kwargs = {}
    smc_kwargs = {}
    gd_kwargs = {}
    for key, (value, lineno) in values.items():
        if key not in _ALL_KEYS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        field, caster = _ALL_KEYS[key]
        try:
            parsed = caster(value)
        except ValueError as err:
            raise ParseError(f"line {lineno}: bad value for {key!r}: {err}") from err
        if key in _SMC_KEYS:
            smc_kwargs[field] = parsed
        elif key in _GD_KEYS:
            gd_kwargs[field] = parsed
        else:
            exp_kwargs[field] = parsed
    try:
        smc = SmcParams(**smc_kwargs)
        # the baseline shares the width projection so safeguards stay identical
        gd = GdParams(sigma_floor=smc.sigma_floor, sigma_cap=smc.sigma_cap,
                      **gd_kwargs)
        config = ExperimentConfig(smc=smc, gd=gd, **exp_kwargs)
        config.validate()
    except ValueError as err:
        raise ValidationError(str(err)) from err
    return config


def serialize_config(config: ExperimentConfig) -> str:
    """Emit a manifest that parses back to an equal configuration."""
    lines = []
    for key, (field, caster) in _ALL_KEYS.items():
        if key in _SMC_KEYS:
            value = getattr(config.smc, field)
        elif key in _GD_KEYS:
            value = getattr(config.gd, field)
        else:
            value = getattr(config, field)
        if caster is _parse_bool:
            text = "true" if value else "false"
        elif caster is float:
            text = repr(float(value))
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def apply_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Replace fields from non-None keyword overrides (CLI flags)."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return config
    try:
        new = replace(config, **updates)
        new.validate()
    except ValueError as err:
        raise ValidationError(str(err)) from err
    return new


# -- network checkpoints ----------------------------------------------------

def _floats_to_text(arr):
    return ",".join(repr(float(v)) for v in np.asarray(arr).ravel())


def network_to_text(net: NetworkState) -> str:
    """Serialize a network state as a flat checkpoint document."""
    lines = [
        f"network.n_inputs = {net.n_inputs}",
        "network.mf_counts = " + ",".join(str(k) for k in net.mf_counts),
        f"network.q = {net.q!r}",
        f"network.alpha = {net.alpha!r}",
        f"network.alpha_ant = {net.alpha_ant!r}",
        "network.centers = " + _floats_to_text(net.centers),
        "network.sigma_lower = " + _floats_to_text(net.sigma_lower),
        "network.sigma_upper = " + _floats_to_text(net.sigma_upper),
        "network.a = " + _floats_to_text(net.a),
        "network.b = " + _floats_to_text(net.b),
    ]
    return "\n".join(lines) + "\n"


def network_from_text(text: str) -> NetworkState:
    """Rebuild a network state from a checkpoint document (exact round-trip)."""
    values = {k: v for k, (v, _) in parse_document(text).items()}
    required = ("network.n_inputs", "network.mf_counts", "network.q",
                "network.alpha", "network.alpha_ant", "network.centers",
                "network.sigma_lower", "network.sigma_upper", "network.a",
                "network.b")
    for key in required:
        if key not in values:
            raise ParseError(f"checkpoint is missing {key!r}")
    try:
        n_in = int(values["network.n_inputs"])
        counts = tuple(int(v) for v in values["network.mf_counts"].split(","))
        k_max = max(counts)
        n_rules = int(np.prod(counts))

        def grid(key):
            return np.array([float(v) for v in values[key].split(",")]).reshape(n_in, k_max)

        a = np.array([float(v) for v in values["network.a"].split(",")]).reshape(n_rules, n_in)
        b = np.array([float(v) for v in values["network.b"].split(",")])
        return NetworkState(
            grid("network.centers"), grid("network.sigma_lower"),
            grid("network.sigma_upper"), a, b,
            q=float(values["network.q"]), alpha=float(values["network.alpha"]),
            alpha_ant=float(values["network.alpha_ant"]), mf_counts=counts)
    except ValueError as err:
        raise ValidationError(f"invalid checkpoint: {err}") from err


def save_network(net: NetworkState, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(network_to_text(net))


def load_network(path) -> NetworkState:
    with open(path, "r", encoding="utf-8") as fh:
        return network_from_text(fh.read())
