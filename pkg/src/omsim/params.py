"""Lab-level physical parameters and derived model coefficients.

The simulated system is a single optical cavity driven by two strong pump
tones (one red- and one blue-detuned from a mechanical sideband) plus ``n``
weak probe tones, all coupled by radiation pressure to one mechanical mode.
This module validates the lab-level inputs and derives the coefficients of
the model in consistent angular-frequency SI units:

* optomechanical coupling rates ``g_i = omega_field * sqrt(hbar/(m*omega_m)) / L``
* drive rates ``eta_i = sqrt(2 * P_i * kappa / (hbar * omega_field))``
* mean thermal phonon number ``N = 1/(exp(hbar*omega_m/(k_B*T)) - 1)``

A single optical carrier ``omega_laser1 = 2*pi*c/wavelength`` is used for all
``g_i`` and ``eta_i``: the tone offsets are MHz-scale on a ~1e15 rad/s
carrier, a fractional difference below 1e-8.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CODATA_2018, PhysicalConstants

#: Detuning input modes: ``effective`` fixes the shifted detuning
#: directly; ``bare`` gives the laser detuning and requires the
#: self-consistent working-point solve.
DETUNING_MODES = ("effective", "bare")

#: When hbar*omega_m/(k_B*T) exceeds this, the occupancy underflows double
#: precision (< 1e-304) and is returned as exactly 0.
_OCCUPANCY_EXP_CUTOFF = 700.0


class ParamValidationError(ValueError):
    """A physical-parameter invariant is violated."""


@dataclass(frozen=True)
class DetuningSpec:
    """How the pump-1 detuning is specified.

    ``mode == "effective"``: ``value`` is the already-shifted detuning
    Delta_eff (rad/s). ``mode == "bare"``: ``value`` is the bare laser
    detuning Delta_0 (rad/s) and the working point must be solved
    self-consistently.
    """

    mode: str
    value: float

    def __post_init__(self) -> None:
        if self.mode not in DETUNING_MODES:
            raise ParamValidationError(
                f"pump1_detuning_spec.mode: must be one of {DETUNING_MODES}, "
                f"got {self.mode!r}"
            )
        if not math.isfinite(self.value):
            raise ParamValidationError("pump1_detuning_spec.value: must be finite")


@dataclass(frozen=True)
class PhysicalParams:
    """Lab-level inputs. All frequencies/rates are angular (rad/s).

    ``probe_detunings`` is read according to ``detuning_interpretation``:
    ``"effective"`` (default) takes the values as already-shifted effective
    detunings; ``"bare"`` subtracts the radiation-pressure shift ``g_j * q``
    at the working point.
    """

    cavity_length_m: float
    mirror_mass_kg: float
    temperature_K: float
    mech_freq: float
    mech_damping: float
    cavity_decay: float
    wavelength_m: float
    pump1_power_W: float
    pump2_power_W: float
    probe_powers_W: tuple[float, ...]
    pump_separation: float
    relative_phase: float
    probe_detunings: tuple[float, ...]
    pump1_detuning_spec: DetuningSpec
    detuning_interpretation: str = "effective"
    fourier_freq: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "probe_powers_W", tuple(self.probe_powers_W))
        object.__setattr__(self, "probe_detunings", tuple(self.probe_detunings))
        _validate(self)

    @property
    def n_probes(self) -> int:
        return len(self.probe_powers_W)


def _validate(p: PhysicalParams) -> None:
    """Raise ParamValidationError on any hard invariant violation."""
    positive = {
        "cavity_length_m": p.cavity_length_m,
        "mirror_mass_kg": p.mirror_mass_kg,
        "mech_freq": p.mech_freq,
        "mech_damping": p.mech_damping,
        "wavelength_m": p.wavelength_m,
    }
    for name, value in positive.items():
        if not (value > 0.0) or not math.isfinite(value):
            raise ParamValidationError(f"{name}: must be positive and finite, got {value!r}")
    nonnegative = {
        "temperature_K": p.temperature_K,
        "cavity_decay": p.cavity_decay,
        "pump1_power_W": p.pump1_power_W,
        "pump2_power_W": p.pump2_power_W,
    }
    for name, value in nonnegative.items():
        if value < 0.0 or not math.isfinite(value):
            raise ParamValidationError(f"{name}: must be >= 0 and finite, got {value!r}")
    for i, value in enumerate(p.probe_powers_W):
        if value < 0.0 or not math.isfinite(value):
            raise ParamValidationError(f"probe_powers_W[{i}]: must be >= 0, got {value!r}")
    if len(p.probe_powers_W) != len(p.probe_detunings):
        raise ParamValidationError(
            "probe_powers_W and probe_detunings must have equal lengths "
            f"({len(p.probe_powers_W)} vs {len(p.probe_detunings)})"
        )
    for name in ("pump_separation", "relative_phase", "fourier_freq"):
        if not math.isfinite(getattr(p, name)):
            raise ParamValidationError(f"{name}: must be finite")
    for i, value in enumerate(p.probe_detunings):
        if not math.isfinite(value):
            raise ParamValidationError(f"probe_detunings[{i}]: must be finite")
    if p.detuning_interpretation not in DETUNING_MODES:
        raise ParamValidationError(
            f"detuning_interpretation: must be one of {DETUNING_MODES}, "
            f"got {p.detuning_interpretation!r}"
        )


def validation_warnings(p: PhysicalParams) -> list[str]:
    """Soft-limit diagnostics. The model is evaluated regardless.

    * the sideband-resolution assumption needs ``mech_freq >> cavity_decay``;
    * the weak-damping treatment of the mirror needs a large quality factor;
    * the working point neglects probe radiation pressure, valid only for
      probe powers well below the pump powers.
    """
    warnings: list[str] = []
    if p.cavity_decay > 0 and p.mech_freq / p.cavity_decay <= 1.0:
        warnings.append(
            "mech_freq/cavity_decay <= 1: outside the resolved-sideband regime"
        )
    if p.mech_freq / p.mech_damping <= 100.0:
        warnings.append("mech_freq/mech_damping <= 100: low mechanical quality factor")
    min_pump = min(p.pump1_power_W, p.pump2_power_W)
    if any(pp > 0.2 * min_pump for pp in p.probe_powers_W):
        warnings.append(
            "a probe power exceeds 0.2x the weakest pump power: "
            "probe back-action on the working point is not negligible"
        )
    return warnings


@dataclass(frozen=True)
class DerivedParams:
    """Model coefficients computed from :class:`PhysicalParams`."""

    g0: float
    g_probe: tuple[float, ...]
    eta_l1: float
    eta_l2: float
    eta_probe: tuple[float, ...]
    n_thermal: float
    omega_laser1: float
    q_m: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "g_probe", tuple(self.g_probe))
        object.__setattr__(self, "eta_probe", tuple(self.eta_probe))


def thermal_occupancy(mech_freq: float, temperature_K: float,
                      c: PhysicalConstants = CODATA_2018) -> float:
    """Bose-Einstein occupancy of the mechanical bath; exactly 0 at T = 0."""
    if temperature_K == 0.0:
        return 0.0
    x = c.hbar * mech_freq / (c.k_B * temperature_K)
    if x > _OCCUPANCY_EXP_CUTOFF:
        return 0.0
    return 1.0 / math.expm1(x)


def derive_params(p: PhysicalParams, c: PhysicalConstants = CODATA_2018) -> DerivedParams:
    """Derive coupling rates, drive rates, and thermal occupancy.

    Pure function: identical inputs produce bit-identical outputs.
    """
    omega_laser1 = 2.0 * math.pi * c.c / p.wavelength_m
    zpf_over_length = math.sqrt(c.hbar / (p.mirror_mass_kg * p.mech_freq)) / p.cavity_length_m
    g0 = omega_laser1 * zpf_over_length
    # Single-carrier approximation: all tones share omega_laser1 (fractional
    # error < 1e-8 for MHz offsets on an optical carrier).
    g_probe = tuple(g0 for _ in p.probe_powers_W)

    def eta(power_W: float) -> float:
        return math.sqrt(2.0 * power_W * p.cavity_decay / (c.hbar * omega_laser1))

    return DerivedParams(
        g0=g0,
        g_probe=g_probe,
        eta_l1=eta(p.pump1_power_W),
        eta_l2=eta(p.pump2_power_W),
        eta_probe=tuple(eta(pw) for pw in p.probe_powers_W),
        n_thermal=thermal_occupancy(p.mech_freq, p.temperature_K, c),
        omega_laser1=omega_laser1,
        q_m=p.mech_freq / p.mech_damping,
    )
