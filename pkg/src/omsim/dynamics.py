"""Linearized fluctuation dynamics: drift matrix, noise model, stability.

Quadrature fluctuations ``u = (X_0m, Y_0m, X_0p, Y_0p, X_p1, Y_p1, ...,
X_b, Y_b)`` obey the linear Langevin system ``du/dt = M u + F n(t)`` where
``M`` is the real drift matrix, ``F`` the diagonal input-gain matrix
(``sqrt(2*kappa)`` on optical rows, ``sqrt(2*gamma_m)`` on mirror rows), and
``n`` the vacuum/thermal input noise whose non-symmetrized spectral matrix
``D`` is block diagonal: ``[[1/2, i/2], [-i/2, 1/2]]`` per optical mode and
``[[N+1/2, i/2], [-i/2, N+1/2]]`` for the mirror. The ``+-i/2`` parts encode
the operator ordering used by the entanglement correlations downstream.

Mode order is fixed as [pump_minus, pump_plus, probe_1..probe_n, mirror];
mode ``k`` occupies rows ``2k`` (X) and ``2k+1`` (Y). All downstream
indexing depends on this layout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .params import DerivedParams, PhysicalParams
from .working_point import WorkingPoint

#: Mirror-row coupling conventions: per-mode coupling rates (default, the
#: linearization of the interaction term) or a uniform pump coupling applied
#: to every mode (legacy compatibility; numerically identical under the
#: single-carrier approximation).
MIRROR_COUPLINGS = ("per_mode", "uniform_g0")

#: Absolute stability margin used when cavity_decay == 0 (the relative
#: margin 1e-9*kappa degenerates there).
_ABS_STAB_MARGIN = 1e-3


class EigenvalueSolverError(RuntimeError):
    """The dense eigenvalue solver failed to converge on the drift matrix."""


@dataclass(frozen=True)
class ModeIndex:
    """Index map for the fixed quadrature layout."""

    n_probes: int

    @property
    def n_modes(self) -> int:
        """Total mode count: two pumps + probes + mirror."""
        return self.n_probes + 3

    @property
    def n_optical(self) -> int:
        return self.n_probes + 2

    @property
    def dim(self) -> int:
        """Quadrature-space dimension, 2*(n_probes + 3)."""
        return 2 * self.n_modes

    @property
    def optical_dim(self) -> int:
        return 2 * self.n_optical

    @property
    def mirror(self) -> int:
        """Mode number of the mechanical mode (always last)."""
        return self.n_modes - 1

    def x(self, mode: int) -> int:
        return 2 * mode

    def y(self, mode: int) -> int:
        return 2 * mode + 1

    def label(self, mode: int) -> str:
        if mode == 0:
            return "pump_minus"
        if mode == 1:
            return "pump_plus"
        if mode == self.mirror:
            return "mirror"
        if 2 <= mode < self.mirror:
            return f"probe_{mode - 1}"
        raise IndexError(f"mode {mode} out of range for {self.n_modes} modes")

    def mode_of(self, label: str) -> int:
        if label == "pump_minus":
            return 0
        if label == "pump_plus":
            return 1
        if label == "mirror":
            return self.mirror
        if label.startswith("probe_"):
            j = int(label.split("_", 1)[1])
            if 1 <= j <= self.n_probes:
                return 1 + j
        raise KeyError(f"unknown mode label {label!r}")


@dataclass(frozen=True)
class LinearSystem:
    """Drift and input-gain matrices with their index map.

    Arrays are made read-only at construction; the system is immutable and
    safe to share across threads.
    """

    drift: np.ndarray
    input_gain: np.ndarray
    index: ModeIndex

    def __post_init__(self) -> None:
        self.drift.flags.writeable = False
        self.input_gain.flags.writeable = False


@dataclass(frozen=True)
class NoiseModel:
    """Non-symmetrized input-noise spectral matrix (Hermitian, PSD)."""

    spectral: np.ndarray

    def __post_init__(self) -> None:
        self.spectral.flags.writeable = False


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_real_eig: float
    eigenvalues: tuple[complex, ...]


def build_linear_system(
    wp: WorkingPoint,
    d: DerivedParams,
    p: PhysicalParams,
    mirror_coupling: str = "per_mode",
) -> LinearSystem:
    """Assemble the drift matrix M and input gain F at a working point.

    Optical mode ``k`` with effective detuning ``Delta_k`` and amplitude
    ``alpha_k`` contributes rows::

        dX_k/dt = -kappa X_k + Delta_k Y_k - 2 g_k Im(alpha_k) X_b
        dY_k/dt = -kappa Y_k - Delta_k X_k + 2 g_k Re(alpha_k) X_b

    (pump-1 and probe amplitudes are real, so their X rows carry no mirror
    coupling). The mirror rows are::

        dX_b/dt = -gamma_m X_b + omega_m Y_b
        dY_b/dt = -gamma_m Y_b - omega_m X_b
                  + sum_k 2 g_k [Re(alpha_k) X_k + Im(alpha_k) Y_k]
    """
    if mirror_coupling not in MIRROR_COUPLINGS:
        raise ValueError(f"mirror_coupling must be one of {MIRROR_COUPLINGS}")
    index = ModeIndex(n_probes=len(wp.alpha_probe))
    dim = index.dim
    kappa = p.cavity_decay
    detunings = (
        wp.delta_eff,
        wp.delta_eff - p.pump_separation,
        *wp.probe_eff_detunings,
    )
    amplitudes = (complex(wp.alpha_0minus), wp.alpha_0plus,
                  *(complex(a) for a in wp.alpha_probe))
    if mirror_coupling == "per_mode":
        couplings = (d.g0, d.g0, *d.g_probe)
    else:
        couplings = (d.g0,) * index.n_optical

    drift = np.zeros((dim, dim))
    xb, yb = index.x(index.mirror), index.y(index.mirror)
    for k, (det, alpha, g_k) in enumerate(zip(detunings, amplitudes, couplings)):
        x, y = index.x(k), index.y(k)
        drift[x, x] = -kappa
        drift[x, y] = det
        drift[x, xb] = -2.0 * g_k * alpha.imag
        drift[y, y] = -kappa
        drift[y, x] = -det
        drift[y, xb] = 2.0 * g_k * alpha.real
        drift[yb, x] = 2.0 * g_k * alpha.real
        drift[yb, y] = 2.0 * g_k * alpha.imag
    drift[xb, xb] = -p.mech_damping
    drift[xb, yb] = p.mech_freq
    drift[yb, yb] = -p.mech_damping
    drift[yb, xb] = -p.mech_freq

    gains = [math.sqrt(2.0 * kappa)] * index.optical_dim
    gains += [math.sqrt(2.0 * p.mech_damping)] * 2
    input_gain = np.diag(gains)
    return LinearSystem(drift=drift, input_gain=input_gain, index=index)


def build_noise_model(d: DerivedParams, n_modes: int) -> NoiseModel:
    """Block-diagonal input-noise spectral matrix for ``n_modes`` modes.

    The last mode is the mirror with occupancy ``d.n_thermal``; all others
    are optical vacuum inputs.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    dim = 2 * n_modes
    spectral = np.zeros((dim, dim), dtype=complex)
    for k in range(n_modes):
        occ = d.n_thermal if k == n_modes - 1 else 0.0
        block = np.array(
            [[occ + 0.5, 0.5j], [-0.5j, occ + 0.5]], dtype=complex
        )
        spectral[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = block
    return NoiseModel(spectral=spectral)


def check_stability(ls: LinearSystem) -> StabilityReport:
    """Strict-Hurwitz test with a margin distinguishing marginal numerics.

    Stable iff every eigenvalue of M has real part below ``-1e-9*kappa``
    (an absolute floor is used when kappa == 0).
    """
    kappa = -float(ls.drift[0, 0]) if ls.index.n_optical > 0 else 0.0
    margin = 1e-9 * kappa if kappa > 0 else _ABS_STAB_MARGIN
    try:
        eigenvalues = np.linalg.eigvals(ls.drift)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise EigenvalueSolverError(f"eigenvalue solve failed: {exc}") from exc
    max_real = float(eigenvalues.real.max())
    return StabilityReport(
        stable=bool(max_real < -margin),
        max_real_eig=max_real,
        eigenvalues=tuple(complex(ev) for ev in eigenvalues),
    )


def _format_matrix(m: np.ndarray) -> str:
    return "\n".join(
        " ".join(f"{v:.17g}" for v in row) for row in np.asarray(m, dtype=float)
    ) + "\n"


def dump_matrices(ls: LinearSystem, nm: NoiseModel, directory: str | Path) -> list[Path]:
    """Write M, F, and D as plain-text matrices for cross-language diffing.

    Row-major, space-separated, 17 significant digits. The complex noise
    matrix is split into ``D_real.txt`` and ``D_imag.txt``.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, matrix in (
        ("M.txt", ls.drift),
        ("F.txt", ls.input_gain),
        ("D_real.txt", nm.spectral.real),
        ("D_imag.txt", nm.spectral.imag),
    ):
        path = directory / name
        path.write_text(_format_matrix(matrix))
        written.append(path)
    return written
