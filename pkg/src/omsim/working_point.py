"""Classical steady-state working point of the driven cavity.

The linearization point consists of the mean intracavity amplitudes of the
two pump tones and the probes, and the static mirror displacement they
induce. Phase references are chosen so that the pump-1 and probe amplitudes
are real and nonnegative; the pump-2 amplitude keeps its full complex value
(drive phase ``relative_phase`` and complex response denominator).

Two entry points are provided:

* :func:`solve_direct` takes the *effective* (shift-included) pump-1
  detuning as the independent variable — the natural variable for sweeps.
* :func:`solve_self_consistent` takes the *bare* laser detuning and finds
  the radiation-pressure-shifted fixed point by damped iteration.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .params import DerivedParams, PhysicalParams


class NonConvergenceError(RuntimeError):
    """The damped fixed-point iteration did not reach tolerance.

    Carries the last iterate and residual; persistent non-convergence at
    physical parameters is evidence of multistability.
    """

    def __init__(self, message: str, last_q: float, residual: float):
        super().__init__(message)
        self.last_q = last_q
        self.residual = residual


@dataclass(frozen=True)
class WorkingPoint:
    """Steady-state amplitudes and mirror displacement.

    ``alpha_0minus`` and each ``alpha_probe`` entry are stored as real
    nonnegative floats (modulus convention); ``alpha_0plus`` is complex.
    ``q = 2*Re(beta)`` is the static mirror displacement in zero-point units.
    """

    alpha_0minus: float
    alpha_0plus: complex
    alpha_probe: tuple[float, ...]
    beta: complex
    q: float
    delta_eff: float
    probe_eff_detunings: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha_probe", tuple(self.alpha_probe))
        object.__setattr__(self, "probe_eff_detunings", tuple(self.probe_eff_detunings))


def solve_direct(d: DerivedParams, p: PhysicalParams, delta_eff: float) -> WorkingPoint:
    """Working point at a prescribed effective pump-1 detuning.

    The mirror displacement uses only the pump amplitudes (probe radiation
    pressure is negligible at valid probe powers; see
    :func:`omsim.params.validation_warnings`).
    """
    if not math.isfinite(delta_eff):
        raise ValueError("delta_eff must be finite")
    kappa = p.cavity_decay
    alpha_0minus = abs(d.eta_l1 / (kappa + 1j * delta_eff))
    alpha_0plus = (
        cmath.exp(1j * p.relative_phase)
        * d.eta_l2
        / (kappa + 1j * (delta_eff - p.pump_separation))
    )
    beta = (
        1j
        * d.g0
        * (alpha_0minus**2 + abs(alpha_0plus) ** 2)
        / (p.mech_damping + 1j * p.mech_freq)
    )
    q = 2.0 * beta.real
    if p.detuning_interpretation == "effective":
        probe_eff = tuple(p.probe_detunings)
    else:
        probe_eff = tuple(
            det - g_j * q for det, g_j in zip(p.probe_detunings, d.g_probe)
        )
    alpha_probe = tuple(
        abs(eta_j / (kappa + 1j * det_eff))
        for eta_j, det_eff in zip(d.eta_probe, probe_eff)
    )
    return WorkingPoint(
        alpha_0minus=alpha_0minus,
        alpha_0plus=alpha_0plus,
        alpha_probe=alpha_probe,
        beta=beta,
        q=q,
        delta_eff=delta_eff,
        probe_eff_detunings=probe_eff,
    )


def _displacement_map(d: DerivedParams, p: PhysicalParams, delta0: float, q: float) -> float:
    """Mirror displacement produced by the pump amplitudes at displacement q."""
    kappa2 = p.cavity_decay**2
    pref = 2.0 * d.g0 * p.mech_freq / (p.mech_damping**2 + p.mech_freq**2)
    d1 = delta0 - d.g0 * q
    d2 = delta0 - p.pump_separation - d.g0 * q
    return pref * (d.eta_l1**2 / (kappa2 + d1**2) + d.eta_l2**2 / (kappa2 + d2**2))


def solve_self_consistent(
    d: DerivedParams,
    p: PhysicalParams,
    delta0: float,
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> WorkingPoint:
    """Working point at a prescribed bare laser detuning.

    Damped fixed-point iteration ``q <- q + 0.5*(f(q) - q)`` started at
    ``q = 0`` selects the solution branch continuously connected to the
    undriven cavity; other multistable branches are out of scope.
    Convergence: ``|q_next - q| <= tol * max(1, |q|)``.
    """
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    q = 0.0
    for _ in range(max_iter):
        q_next = q + 0.5 * (_displacement_map(d, p, delta0, q) - q)
        if abs(q_next - q) <= tol * max(1.0, abs(q)):
            return solve_direct(d, p, delta0 - d.g0 * q_next)
        q = q_next
    residual = abs(_displacement_map(d, p, delta0, q) - q)
    raise NonConvergenceError(
        f"fixed-point iteration did not converge in {max_iter} steps "
        f"(last q={q:.6g}, residual={residual:.3g})",
        last_q=q,
        residual=residual,
    )


def delta0_for(d: DerivedParams, p: PhysicalParams, target_delta_eff: float) -> float:
    """Bare detuning that realizes a target effective detuning.

    Inverse of the shift map: ``delta0 = target + g0 * q(target)`` with the
    displacement taken from :func:`solve_direct`. Round-tripping through
    :func:`solve_self_consistent` is verified in tests rather than enforced
    here (the forward map can be multivalued in strongly driven regimes).
    """
    wp = solve_direct(d, p, target_delta_eff)
    return target_delta_eff + d.g0 * wp.q
