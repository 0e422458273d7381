"""Independent verification paths for the frequency-domain solver.

Two cross-checks, deliberately built on different mathematics:

* :func:`lyapunov_covariance` — the steady-state intracavity covariance from
  the continuous Lyapunov equation ``M P + P M^T + D_s = 0`` (Bartels-Stewart
  via scipy), which must equal the frequency integral of the symmetrized
  intracavity spectrum. :func:`spectral_integral_covariance` computes that
  integral with a panel quadrature whose breakpoints ladder around every
  drift-matrix eigenvalue (the mechanical line is ~six orders narrower than
  the cavity line, so generic adaptive quadrature misses it).
* :func:`simulate_time_domain` — an Euler-Maruyama Monte-Carlo realization of
  the same linear stochastic dynamics, with the output series formed from the
  identical noise increments that drive the state. Zero-frequency spectral
  estimates come from Welch-style windowed segment sums.

The Monte-Carlo path samples the *symmetrized* noise (a classical process);
this is a sound oracle for the pairwise correlations V because the
anti-Hermitian ordering parts of the noise model cancel identically in every
V combination (asserted in the test suite).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
from numba import njit

from .dynamics import LinearSystem, NoiseModel, check_stability

_RESIDUAL_RTOL = 1e-8
_DIVERGENCE_FACTOR = 1e6


class UnstableSystemError(RuntimeError):
    """Steady-state quantities requested for a non-Hurwitz drift matrix."""


class SingularLyapunovError(RuntimeError):
    """Lyapunov solve failed or left a large residual (marginal eigenvalues)."""


class InstabilityDetectedError(RuntimeError):
    """State norm exceeded the divergence bound during time integration."""


@dataclass(frozen=True)
class LyapunovSolution:
    """Steady-state covariance and the achieved equation residual."""

    covariance: np.ndarray
    residual: float

    def __post_init__(self) -> None:
        self.covariance.flags.writeable = False


@dataclass(frozen=True)
class PairEstimate:
    """Monte-Carlo estimate of one pairwise correlation at zero frequency."""

    pair: tuple[int, int]
    sign_u: str
    value: float
    std_error: float


@dataclass(frozen=True)
class TrajectoryStats:
    """Summary of a Monte-Carlo run; bit-reproducible for a fixed seed."""

    seed: int
    duration: float
    dt: float
    n_segments: int
    segment_steps: int
    window: str
    estimates: tuple[PairEstimate, ...]


def _symmetrized_drive(ls: LinearSystem, nm: NoiseModel) -> np.ndarray:
    """D_s = F Re(D) F^T — the diffusion matrix of the symmetrized dynamics."""
    gain = ls.input_gain
    return gain @ nm.spectral.real @ gain.T


def lyapunov_covariance(ls: LinearSystem, nm: NoiseModel) -> LyapunovSolution:
    """Solve M P + P M^T + D_s = 0 for the stationary covariance P."""
    report = check_stability(ls)
    if not report.stable:
        raise UnstableSystemError(
            f"no stationary covariance: max Re(eig) = {report.max_real_eig:.3g}"
        )
    drive = _symmetrized_drive(ls, nm)
    try:
        cov = scipy.linalg.solve_continuous_lyapunov(ls.drift, -drive)
    except np.linalg.LinAlgError as exc:
        raise SingularLyapunovError(f"Lyapunov solve failed: {exc}") from exc
    cov = 0.5 * (cov + cov.T)
    residual = float(np.abs(ls.drift @ cov + cov @ ls.drift.T + drive).max())
    scale = float(np.abs(drive).max())
    if scale > 0 and residual > _RESIDUAL_RTOL * scale:
        raise SingularLyapunovError(
            f"Lyapunov residual {residual:.3g} exceeds {_RESIDUAL_RTOL:g} x "
            f"max|D_s| = {_RESIDUAL_RTOL * scale:.3g} (marginal eigenvalues?)"
        )
    return LyapunovSolution(covariance=cov, residual=residual)


def _quadrature_breakpoints(drift: np.ndarray, cutoff: float) -> np.ndarray:
    """Positive-frequency panel edges laddered around each eigenvalue.

    Each eigenvalue contributes edges at |Im| +- 2^k * |Re| so that panels
    resolve every resonance at its own linewidth; a geometric fill covers the
    smooth region out to the tail cutoff.
    """
    eigenvalues = np.linalg.eigvals(drift)
    edges = {0.0, cutoff}
    for ev in eigenvalues:
        center, width = abs(ev.imag), max(abs(ev.real), 1e-3)
        for scale in (0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0):
            for sign in (1.0, -1.0):
                point = center + sign * scale * width
                if 0.0 < point < cutoff:
                    edges.add(point)
    top = max(abs(eigenvalues.imag).max(), 1.0) + 10.0 * abs(eigenvalues.real).max()
    point = max(top, 1.0)
    while point < cutoff:
        edges.add(point)
        point *= 2.0
    return np.array(sorted(edges))


def spectral_integral_covariance(
    ls: LinearSystem,
    nm: NoiseModel,
    rtol: float = 1e-9,
    n_gauss: int = 24,
    max_refine: int = 6,
    tail_cut: float | None = None,
) -> tuple[np.ndarray, dict]:
    """Integrate the symmetrized intracavity spectrum over all frequencies.

    Returns ``(covariance, info)`` where covariance approximates
    ``Int Re[G(w) F Re(D) F^T G(w)^dag] dw / 2pi`` with
    ``G = (-i w I - M)^-1``, plus the analytic ``D_s/(pi W)`` tail beyond the
    cutoff ``W``. Panels are refined (halved) until two successive passes
    agree entrywise to ``rtol`` of the matrix maximum.
    """
    drift = np.asarray(ls.drift)
    dim = drift.shape[0]
    gain = ls.input_gain
    noise_sym = nm.spectral.real
    drive = _symmetrized_drive(ls, nm)
    if tail_cut is None:
        eigenvalues = np.linalg.eigvals(drift)
        tail_cut = 2000.0 * max(float(np.abs(eigenvalues).max()), 1.0)
    base_edges = _quadrature_breakpoints(drift, tail_cut)
    nodes, weights = np.polynomial.legendre.leggauss(n_gauss)
    identity = np.eye(dim)

    def one_pass(split: int) -> tuple[np.ndarray, int]:
        total = np.zeros((dim, dim))
        n_evals = 0
        for lo, hi in zip(base_edges[:-1], base_edges[1:]):
            sub = np.linspace(lo, hi, split + 1)
            for a, b in zip(sub[:-1], sub[1:]):
                mid, half = 0.5 * (a + b), 0.5 * (b - a)
                for xg, wg in zip(nodes, weights):
                    omega = mid + half * xg
                    for sgn in (1.0, -1.0):
                        kernel = -1j * sgn * omega * identity - drift
                        prop = np.linalg.solve(kernel, gain)
                        total += (wg * half) * (prop @ noise_sym @ prop.conj().T).real
                        n_evals += 1
        return total / (2.0 * math.pi) + drive / (math.pi * tail_cut), n_evals

    previous = None
    info: dict = {"tail_cut": tail_cut, "panels": len(base_edges) - 1}
    split = 1
    for refinement in range(max_refine + 1):
        estimate, n_evals = one_pass(split)
        info["n_evals"] = n_evals
        if previous is not None:
            change = float(np.abs(estimate - previous).max())
            scale = float(np.abs(estimate).max())
            info["last_change"] = change
            info["refinements"] = refinement
            if change <= rtol * scale:
                return estimate, info
        previous = estimate
        split *= 2
    return previous, info


@njit(cache=True)
def _em_windowed_sums(u, drift_dt, state_amp, input_amp, out_gain, dt,
                      window, noise, acc, seg_sums, pos_in_seg):
    """Advance Euler-Maruyama through one noise chunk, accumulating windowed
    output sums per segment.

    ``noise`` holds standard-normal draws (steps, dim). The output uses the
    identical increments that drive the state: per step and optical channel c,
    acc[c] += w_k * (sqrt(2*kappa) * u[c] * dt - input_amp[c] * xi[c]).
    Returns (position within current segment, segments completed).
    """
    steps, dim = noise.shape
    seg_len = window.shape[0]
    n_out = acc.shape[0]
    capacity = seg_sums.shape[0]
    filled = 0
    for step in range(steps):
        wk = window[pos_in_seg]
        for c in range(n_out):
            acc[c] += wk * (out_gain * u[c] * dt - input_amp[c] * noise[step, c])
        fresh = np.empty(dim)
        for i in range(dim):
            s = u[i]
            for j in range(dim):
                s += drift_dt[i, j] * u[j]
            fresh[i] = s + state_amp[i] * noise[step, i]
        for i in range(dim):
            u[i] = fresh[i]
        pos_in_seg += 1
        if pos_in_seg == seg_len:
            pos_in_seg = 0
            if filled < capacity:
                for c in range(n_out):
                    seg_sums[filled, c] = acc[c]
                    acc[c] = 0.0
                filled += 1
    return pos_in_seg, filled


def _stationary_draw(cov: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """PSD-safe sample from N(0, cov) (eigendecomposition square root)."""
    evals, evecs = np.linalg.eigh(cov)
    root = evecs * np.sqrt(np.clip(evals, 0.0, None))
    return root @ rng.standard_normal(cov.shape[0])


def simulate_time_domain(
    ls: LinearSystem,
    nm: NoiseModel,
    duration: float | None = None,
    dt: float | None = None,
    seed: int = 0,
    pairs: tuple[tuple[int, int, str], ...] = ((0, 1, "+"),),
    n_segments: int = 384,
    n_trajectories: int = 2,
    window: str = "hann",
    window_cycles: float = 20.0,
    chunk_steps: int = 1 << 18,
    dump_path: str | Path | None = None,
) -> TrajectoryStats:
    """Monte-Carlo estimate of zero-frequency pairwise correlations.

    Each trajectory starts from a stationary draw (Lyapunov covariance), is
    advanced by Euler-Maruyama with Philox noise streams spawned per
    trajectory from ``seed``, and contributes ``n_segments`` windowed segment
    sums of the output quadratures. Each pair's V is the segment average of
    ``(U^2 + V^2)/Int w^2 dt`` with standard error from segment scatter.
    Segment length is ``window_cycles`` cavity cycles (2*pi/kappa each);
    ``duration``, when given, overrides ``n_segments`` per trajectory.
    The Hann window (default) suppresses spectral leakage from the sharp
    mechanical line at +-omega_m; ``window="rect"`` gives plain averages.

    Fixed ``seed`` (with fixed sizes) makes the result bit-reproducible:
    trajectories are merged in seed order regardless of scheduling.
    """
    index = ls.index
    report = check_stability(ls)
    if not report.stable:
        raise UnstableSystemError(
            f"time-domain oracle needs a stable system: max Re(eig) = "
            f"{report.max_real_eig:.3g}"
        )
    if window not in ("hann", "rect"):
        raise ValueError("window must be 'hann' or 'rect'")
    dim = index.dim
    n_opt = index.optical_dim
    xb = index.x(index.mirror)
    mech_freq = float(ls.drift[xb, index.y(index.mirror)])
    kappa = -float(ls.drift[0, 0])
    fastest = max(kappa, abs(mech_freq))
    if dt is None:
        dt = 0.01 / fastest
    if dt > 0.05 / fastest:
        raise ValueError(
            f"dt={dt:.3g} too coarse: must be <= 0.05/max(kappa, omega_m) = "
            f"{0.05 / fastest:.3g}"
        )
    seg_len = int(round(window_cycles * 2.0 * math.pi / kappa / dt))
    if duration is not None:
        n_segments = max(int(duration / (seg_len * dt)), 8)
    if window == "hann":
        win = 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(seg_len) / seg_len))
    else:
        win = np.ones(seg_len)
    window_norm = float(np.sum(win**2) * dt)

    drift_dt = np.ascontiguousarray(ls.drift * dt)
    noise_sigma = np.sqrt(np.diag(nm.spectral.real).real)
    input_amp = noise_sigma * math.sqrt(dt)
    state_amp = np.diag(ls.input_gain) * input_amp
    out_gain = math.sqrt(2.0 * kappa)

    init_cov = lyapunov_covariance(ls, nm).covariance
    diverged_at = _DIVERGENCE_FACTOR * (1.0 + math.sqrt(max(init_cov.diagonal().max(), 0.0)))

    streams = np.random.SeedSequence(seed).spawn(n_trajectories)
    all_sums = []
    for stream in streams:
        rng = np.random.Generator(np.random.Philox(stream))
        state = _stationary_draw(init_cov, rng)
        acc = np.zeros(n_opt)
        seg_sums = np.empty((n_segments, n_opt))
        pos, filled = 0, 0
        remaining = n_segments * seg_len
        while remaining > 0:
            steps = min(chunk_steps, remaining)
            noise = rng.standard_normal((steps, dim))
            pos, new = _em_windowed_sums(
                state, drift_dt, state_amp, input_amp, out_gain, dt,
                win, noise, acc, seg_sums[filled:], pos,
            )
            filled += new
            remaining -= steps
            peak = float(np.abs(state).max())
            if not math.isfinite(peak) or peak > diverged_at:
                raise InstabilityDetectedError(
                    f"state norm {peak:.3g} exceeded divergence bound {diverged_at:.3g}"
                )
        all_sums.append(seg_sums)
    sums = np.concatenate(all_sums, axis=0)

    if dump_path is not None:
        header = ",".join(
            f"{q}_{index.label(k)}" for k in range(index.n_optical) for q in ("X", "Y")
        )
        np.savetxt(dump_path, sums, delimiter=",", header=header, comments="# ")

    estimates = []
    for i, j, sign_u in pairs:
        s = 1.0 if sign_u == "+" else -1.0
        u_comb = sums[:, 2 * i] + s * sums[:, 2 * j]
        v_comb = sums[:, 2 * i + 1] - s * sums[:, 2 * j + 1]
        per_segment = (u_comb**2 + v_comb**2) / window_norm
        value = float(per_segment.mean())
        se = float(per_segment.std(ddof=1) / math.sqrt(per_segment.size))
        estimates.append(
            PairEstimate(
                pair=(i, j),
                sign_u=sign_u,
                value=value,
                std_error=max(se, np.finfo(float).tiny),
            )
        )
    return TrajectoryStats(
        seed=seed,
        duration=n_segments * n_trajectories * seg_len * dt,
        dt=dt,
        n_segments=n_segments * n_trajectories,
        segment_steps=seg_len,
        window=window,
        estimates=tuple(estimates),
    )
