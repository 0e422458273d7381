"""Schema-versioned YAML configuration for the simulator and its CLI.

Unit conventions at the file boundary: frequencies and rates are ordinary
hertz (converted to angular rad/s at parse time), powers in watts, lengths
in metres, phases in radians, temperature in kelvin. The internal
representation is angular throughout.

Schema (version 1)::

    schema_version: 1
    physical:
      cavity_length_m: <m>          mirror_mass_kg: <kg>
      temperature_K: <K>            mech_freq_Hz: <Hz>
      mech_damping_Hz: <Hz>         cavity_decay_Hz: <Hz>
      wavelength_m: <m>             pump1_power_W: <W>
      pump2_power_W: <W>            probe_powers_W: [<W>, ...]
      pump_separation_Hz: <Hz>      relative_phase_rad: <rad>
      probe_detunings_Hz: [<Hz>, ...]
      pump1_detuning: {mode: effective|bare, value_Hz: <Hz>}
      detuning_interpretation: effective|bare     # optional
      fourier_freq_Hz: <Hz>                       # optional, default 0
    sweep:                                        # optional
      axes:                                       # 1 or 2 entries
        - {name: <axis>, min: <f>, max: <f>, points: <int>, spacing: linear}
      pairs: [[<mode>, <mode>], ...]              # optional: default all pairs
    monte_carlo:                                  # optional
      seed: <int>  n_segments: <int>  n_trajectories: <int>  window: hann|rect

Axis names: delta_eff (units of mech_freq), pump_ratio (pump2/pump1 power),
phase (rad), temperature (K), decay (units of the base cavity_decay).
Mode names: pump_minus, pump_plus, probe_1..probe_n.

Errors are reported with dotted field paths (e.g. ``physical.mech_freq_Hz``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import yaml

from .params import DETUNING_MODES, DetuningSpec, ParamValidationError, PhysicalParams
from .sweep import AXIS_NAMES, AxisSpec, SweepSpec

SCHEMA_VERSION = 1
TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Configuration-file problem, reported with a dotted field path."""


@dataclass(frozen=True)
class MonteCarloSettings:
    seed: int = 12345
    n_segments: int = 384
    n_trajectories: int = 2
    window: str = "hann"


@dataclass(frozen=True)
class Config:
    schema_version: int
    physical: PhysicalParams
    sweep: SweepSpec | None
    monte_carlo: MonteCarloSettings


def _expect_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(node).__name__}")
    return node


def _reject_unknown(node: dict, allowed: set[str], path: str) -> None:
    unknown = set(node) - allowed
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown key")


def _get_number(node: dict, key: str, path: str, default=None) -> float:
    if key not in node:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}: required key missing")
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)

def _get_int(node: dict, key: str, path: str, default=None) -> int:
    if key not in node:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}: required key missing")
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    return value


def _get_str(node: dict, key: str, path: str, default=None) -> str:
    if key not in node:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}: required key missing")
    value = node[key]
    if not isinstance(value, str):
        raise ConfigError(f"{path}.{key}: expected a string, got {value!r}")
    return value


def _get_number_list(node: dict, key: str, path: str) -> list[float]:
    if key not in node:
        raise ConfigError(f"{path}.{key}: required key missing")
    value = node[key]
    if not isinstance(value, list):
        raise ConfigError(f"{path}.{key}: expected a list, got {value!r}")
    out = []
    for idx, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{path}.{key}[{idx}]: expected a number, got {item!r}")
        out.append(float(item))
    return out


_PHYSICAL_KEYS = {
    "cavity_length_m", "mirror_mass_kg", "temperature_K", "mech_freq_Hz",
    "mech_damping_Hz", "cavity_decay_Hz", "wavelength_m", "pump1_power_W",
    "pump2_power_W", "probe_powers_W", "pump_separation_Hz",
    "relative_phase_rad", "probe_detunings_Hz", "pump1_detuning",
    "detuning_interpretation", "fourier_freq_Hz",
}


def _parse_physical(node, path: str) -> PhysicalParams:
    node = _expect_mapping(node, path)
    _reject_unknown(node, _PHYSICAL_KEYS, path)
    det_node = _expect_mapping(
        node.get("pump1_detuning") or _missing(path, "pump1_detuning"),
        f"{path}.pump1_detuning",
    )
    _reject_unknown(det_node, {"mode", "value_Hz"}, f"{path}.pump1_detuning")
    mode = _get_str(det_node, "mode", f"{path}.pump1_detuning")
    if mode not in DETUNING_MODES:
        raise ConfigError(
            f"{path}.pump1_detuning.mode: must be one of {DETUNING_MODES}, got {mode!r}"
        )
    try:
        return PhysicalParams(
            cavity_length_m=_get_number(node, "cavity_length_m", path),
            mirror_mass_kg=_get_number(node, "mirror_mass_kg", path),
            temperature_K=_get_number(node, "temperature_K", path),
            mech_freq=TWO_PI * _get_number(node, "mech_freq_Hz", path),
            mech_damping=TWO_PI * _get_number(node, "mech_damping_Hz", path),
            cavity_decay=TWO_PI * _get_number(node, "cavity_decay_Hz", path),
            wavelength_m=_get_number(node, "wavelength_m", path),
            pump1_power_W=_get_number(node, "pump1_power_W", path),
            pump2_power_W=_get_number(node, "pump2_power_W", path),
            probe_powers_W=tuple(_get_number_list(node, "probe_powers_W", path)),
            pump_separation=TWO_PI * _get_number(node, "pump_separation_Hz", path),
            relative_phase=_get_number(node, "relative_phase_rad", path),
            probe_detunings=tuple(
                TWO_PI * v for v in _get_number_list(node, "probe_detunings_Hz", path)
            ),
            pump1_detuning_spec=DetuningSpec(
                mode=mode,
                value=TWO_PI * _get_number(det_node, "value_Hz", f"{path}.pump1_detuning"),
            ),
            detuning_interpretation=_get_str(
                node, "detuning_interpretation", path, default="effective"
            ),
            fourier_freq=TWO_PI * _get_number(node, "fourier_freq_Hz", path, default=0.0),
        )
    except ParamValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _missing(path: str, key: str):
    raise ConfigError(f"{path}.{key}: required key missing")


def _parse_pair(entry, n_probes: int, path: str) -> tuple[int, int]:
    if not isinstance(entry, list) or len(entry) != 2:
        raise ConfigError(f"{path}: expected a two-element list of mode names")
    modes = []
    for pos, name in enumerate(entry):
        if not isinstance(name, str):
            raise ConfigError(f"{path}[{pos}]: expected a mode name string")
        if name == "pump_minus":
            modes.append(0)
        elif name == "pump_plus":
            modes.append(1)
        elif name.startswith("probe_"):
            try:
                j = int(name.split("_", 1)[1])
            except ValueError:
                j = -1
            if not 1 <= j <= n_probes:
                raise ConfigError(
                    f"{path}[{pos}]: {name!r} out of range (config has "
                    f"{n_probes} probe(s))"
                )
            modes.append(1 + j)
        else:
            raise ConfigError(
                f"{path}[{pos}]: unknown mode {name!r} (expected pump_minus, "
                "pump_plus, or probe_<j>)"
            )
    if modes[0] == modes[1]:
        raise ConfigError(f"{path}: a pair needs two distinct modes")
    return (modes[0], modes[1])


def _all_pairs(n_probes: int) -> tuple[tuple[int, int], ...]:
    n_opt = n_probes + 2
    return tuple(
        (i, j) for i in range(n_opt) for j in range(i + 1, n_opt)
    )


def _parse_sweep(node, base: PhysicalParams, path: str) -> SweepSpec:
    node = _expect_mapping(node, path)
    _reject_unknown(node, {"axes", "pairs"}, path)
    axes_node = node.get("axes")
    if not isinstance(axes_node, list) or not 1 <= len(axes_node) <= 2:
        raise ConfigError(f"{path}.axes: expected a list of 1 or 2 axis mappings")
    axes = []
    for idx, axis_entry in enumerate(axes_node):
        axis_path = f"{path}.axes[{idx}]"
        axis_entry = _expect_mapping(axis_entry, axis_path)
        _reject_unknown(axis_entry, {"name", "min", "max", "points", "spacing"}, axis_path)
        name = _get_str(axis_entry, "name", axis_path)
        if name not in AXIS_NAMES:
            raise ConfigError(f"{axis_path}.name: must be one of {AXIS_NAMES}, got {name!r}")
        spacing = _get_str(axis_entry, "spacing", axis_path, default="linear")
        if spacing != "linear":
            raise ConfigError(f"{axis_path}.spacing: only 'linear' is supported")
        lo = _get_number(axis_entry, "min", axis_path)
        hi = _get_number(axis_entry, "max", axis_path)
        points = _get_int(axis_entry, "points", axis_path)
        try:
            axes.append(AxisSpec(name=name, min=lo, max=hi, points=points))
        except ValueError as exc:
            raise ConfigError(f"{axis_path}: {exc}") from exc
    if len(axes) == 2 and axes[0].name == axes[1].name:
        raise ConfigError(f"{path}.axes: the two axes must be distinct")
    pairs_node = node.get("pairs")
    if pairs_node is None:
        pairs = _all_pairs(base.n_probes)
    else:
        if not isinstance(pairs_node, list) or not pairs_node:
            raise ConfigError(f"{path}.pairs: expected a non-empty list")
        pairs = tuple(
            _parse_pair(entry, base.n_probes, f"{path}.pairs[{idx}]")
            for idx, entry in enumerate(pairs_node)
        )
    return SweepSpec(base=base, axes=tuple(axes), pairs=pairs, omega=base.fourier_freq)


def _parse_monte_carlo(node, path: str) -> MonteCarloSettings:
    node = _expect_mapping(node, path)
    _reject_unknown(node, {"seed", "n_segments", "n_trajectories", "window"}, path)
    window = _get_str(node, "window", path, default="hann")
    if window not in ("hann", "rect"):
        raise ConfigError(f"{path}.window: must be 'hann' or 'rect', got {window!r}")
    settings = MonteCarloSettings(
        seed=_get_int(node, "seed", path, default=12345),
        n_segments=_get_int(node, "n_segments", path, default=384),
        n_trajectories=_get_int(node, "n_trajectories", path, default=2),
        window=window,
    )
    if settings.n_segments < 8:
        raise ConfigError(f"{path}.n_segments: must be >= 8")
    if settings.n_trajectories < 1:
        raise ConfigError(f"{path}.n_trajectories: must be >= 1")
    return settings


def parse_config(text: str) -> Config:
    """Parse and validate a YAML configuration document."""
    try:
        root = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from exc
    root = _expect_mapping(root, "<root>")
    _reject_unknown(root, {"schema_version", "physical", "sweep", "monte_carlo"}, "<root>")
    if "schema_version" not in root:
        raise ConfigError("schema_version: required key missing")
    version = root["schema_version"]
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: unsupported version {version!r} (this build reads "
            f"{SCHEMA_VERSION})"
        )
    if "physical" not in root:
        raise ConfigError("physical: required section missing")
    physical = _parse_physical(root["physical"], "physical")
    sweep = None
    if root.get("sweep") is not None:
        sweep = _parse_sweep(root["sweep"], physical, "sweep")
    monte_carlo = MonteCarloSettings()
    if root.get("monte_carlo") is not None:
        monte_carlo = _parse_monte_carlo(root["monte_carlo"], "monte_carlo")
    return Config(
        schema_version=version,
        physical=physical,
        sweep=sweep,
        monte_carlo=monte_carlo,
    )


def load_config(path: str | Path) -> Config:
    """Read and parse a configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
