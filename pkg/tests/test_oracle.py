"""Oracle tests: Lyapunov covariance, spectral-integral covariance, and the
Euler-Maruyama Monte-Carlo estimator."""
import math
from dataclasses import replace

import numpy as np
import pytest

from omsim import (
    InstabilityDetectedError,
    LinearSystem,
    ModeIndex,
    NoiseModel,
    UnstableSystemError,
    build_linear_system,
    build_noise_model,
    derive_params,
    lyapunov_covariance,
    simulate_time_domain,
    solve_direct,
    spectral_integral_covariance,
)
from conftest import make_reference_params

TWO_PI = 2.0 * math.pi


def hand_system():
    """M = -I, F = sqrt(2) I, D = I/2  =>  P = I/2 exactly."""
    dim = 6
    ls = LinearSystem(
        drift=-np.eye(dim),
        input_gain=math.sqrt(2.0) * np.eye(dim),
        index=ModeIndex(n_probes=0),
    )
    nm = NoiseModel(spectral=0.5 * np.eye(dim, dtype=complex))
    return ls, nm


def unstable_system(reference_params):
    p = replace(reference_params, pump2_power_W=4.0 * reference_params.pump1_power_W)
    d = derive_params(p)
    wp = solve_direct(d, p, p.mech_freq)
    ls = build_linear_system(wp, d, p)
    return ls, build_noise_model(d, ls.index.n_modes)


def test_lyapunov_hand_solvable():
    ls, nm = hand_system()
    solution = lyapunov_covariance(ls, nm)
    assert np.allclose(solution.covariance, 0.5 * np.eye(6), atol=1e-14)
    assert solution.residual <= 1e-14


def test_lyapunov_zero_noise():
    ls, _ = hand_system()
    nm = NoiseModel(spectral=np.zeros((6, 6), dtype=complex))
    solution = lyapunov_covariance(ls, nm)
    assert np.array_equal(solution.covariance, np.zeros((6, 6)))


def test_lyapunov_reference_residual(reference_stack):
    _, _, _, ls, nm = reference_stack
    solution = lyapunov_covariance(ls, nm)
    drive = ls.input_gain @ nm.spectral.real @ ls.input_gain.T
    assert solution.residual <= 1e-8 * np.abs(drive).max()
    assert np.array_equal(solution.covariance, solution.covariance.T)
    # Physical covariance: positive definite.
    assert np.linalg.eigvalsh(solution.covariance).min() > 0.0


def test_lyapunov_rejects_unstable(reference_params):
    ls, nm = unstable_system(reference_params)
    with pytest.raises(UnstableSystemError):
        lyapunov_covariance(ls, nm)


def test_integral_matches_lyapunov_hand_case():
    ls, nm = hand_system()
    integral, info = spectral_integral_covariance(ls, nm)
    assert np.allclose(integral, 0.5 * np.eye(6), atol=1e-9)
    assert info["panels"] >= 1


def test_integral_matches_lyapunov_reference(reference_stack):
    # The two computations share no mathematics beyond the model matrices:
    # Bartels-Stewart vs panel Gauss-Legendre quadrature of the spectrum.
    _, _, _, ls, nm = reference_stack
    lyap = lyapunov_covariance(ls, nm).covariance
    integral, info = spectral_integral_covariance(ls, nm)
    scale = np.abs(lyap).max()
    deviation = np.max(np.abs(integral - lyap) / (np.abs(lyap) + 1e-9 * scale))
    assert deviation <= 1e-8
    assert "last_change" in info


def test_mc_reproducible_bit_for_bit(reference_stack):
    _, _, _, ls, nm = reference_stack
    kwargs = dict(seed=777, n_segments=16, n_trajectories=1)
    a = simulate_time_domain(ls, nm, **kwargs)
    b = simulate_time_domain(ls, nm, **kwargs)
    assert a == b  # dataclass equality covers every estimate bit-for-bit
    c = simulate_time_domain(ls, nm, seed=778, n_segments=16, n_trajectories=1)
    assert c.estimates[0].value != a.estimates[0].value


def test_mc_chunking_does_not_change_the_stream(reference_stack):
    # Slicing the noise generation into smaller chunks must not move any
    # draw: same seed, same estimates, bit for bit.
    _, _, _, ls, nm = reference_stack
    a = simulate_time_domain(ls, nm, seed=5, n_segments=8, n_trajectories=2)
    b = simulate_time_domain(
        ls, nm, seed=5, n_segments=8, n_trajectories=2, chunk_steps=1 << 12
    )
    assert a == b


def test_mc_vacuum_hits_bound():
    # Coupling removed, so the optical outputs are exact vacuum (V = 2).
    # The mirror must be dissipation-dominated at the default step for the
    # explicit integrator (2*gamma*dt > (omega*dt)^2), hence the heavy
    # damping here; it cannot influence the optics with the coupling off.
    p = make_reference_params(mech_damping=TWO_PI * 2.0e4)
    d = replace(derive_params(p), g0=0.0, g_probe=(0.0,))
    wp = solve_direct(d, p, p.mech_freq)
    ls = build_linear_system(wp, d, p)
    nm = build_noise_model(d, ls.index.n_modes)
    stats = simulate_time_domain(
        ls, nm, seed=99, pairs=((0, 1, "+"), (0, 2, "-")), n_segments=96,
        n_trajectories=1,
    )
    for estimate in stats.estimates:
        assert abs(estimate.value - 2.0) <= 3.0 * estimate.std_error
        assert estimate.std_error < 0.45


def test_mc_divergence_guard_catches_numerical_blowup(
    reference_params, reference_derived
):
    # With the coupling removed the bare mirror keeps its 1e6 quality
    # factor: the explicit integrator is antidamped at the default step
    # (growth ~ (omega*dt)^2/2 per step) and the state-norm guard must
    # abort instead of returning garbage.
    p = reference_params
    d = replace(reference_derived, g0=0.0, g_probe=(0.0,))
    wp = solve_direct(d, p, p.mech_freq)
    ls = build_linear_system(wp, d, p)
    nm = build_noise_model(d, ls.index.n_modes)
    with pytest.raises(InstabilityDetectedError, match="divergence bound"):
        simulate_time_domain(
            ls, nm, seed=99, pairs=((0, 1, "+"),), n_segments=96,
            n_trajectories=1,
        )


def test_mc_zero_noise_gives_zero(reference_stack):
    _, _, _, ls, _ = reference_stack
    nm = NoiseModel(spectral=np.zeros((ls.index.dim, ls.index.dim), dtype=complex))
    stats = simulate_time_domain(ls, nm, seed=1, n_segments=8, n_trajectories=1)
    assert stats.estimates[0].value == 0.0
    assert stats.estimates[0].std_error > 0.0  # floored, never exactly zero


def test_mc_rejects_unstable(reference_params):
    ls, nm = unstable_system(reference_params)
    with pytest.raises(UnstableSystemError):
        simulate_time_domain(ls, nm, n_segments=8)


def test_mc_argument_validation(reference_stack):
    _, _, _, ls, nm = reference_stack
    with pytest.raises(ValueError):
        simulate_time_domain(ls, nm, dt=1e-5, n_segments=8)
    with pytest.raises(ValueError):
        simulate_time_domain(ls, nm, window="blackman", n_segments=8)


def test_mc_duration_overrides_segments(reference_stack):
    _, _, _, ls, nm = reference_stack
    short = simulate_time_domain(ls, nm, seed=3, n_segments=8, n_trajectories=1)
    seg_time = short.segment_steps * short.dt
    stats = simulate_time_domain(
        ls, nm, seed=3, duration=25.0 * seg_time, n_trajectories=1
    )
    assert stats.n_segments == 25
    tiny = simulate_time_domain(ls, nm, seed=3, duration=seg_time, n_trajectories=1)
    assert tiny.n_segments == 8  # floor


def test_mc_both_windows_run(reference_stack):
    _, _, _, ls, nm = reference_stack
    hann = simulate_time_domain(ls, nm, seed=11, n_segments=32, n_trajectories=1)
    rect = simulate_time_domain(
        ls, nm, seed=11, n_segments=32, n_trajectories=1, window="rect"
    )
    assert hann.window == "hann" and rect.window == "rect"
    assert 0.0 < hann.estimates[0].value < 4.0
    assert 0.0 < rect.estimates[0].value < 4.0


def test_mc_dump_segment_sums(tmp_path, reference_stack):
    _, _, _, ls, nm = reference_stack
    dump = tmp_path / "segments.csv"
    stats = simulate_time_domain(
        ls, nm, seed=4, n_segments=8, n_trajectories=1, dump_path=dump
    )
    data = np.loadtxt(dump, delimiter=",", skiprows=1)
    assert data.shape == (stats.n_segments, ls.index.optical_dim)
    header = dump.read_text().splitlines()[0]
    assert "X_pump_minus" in header and "Y_probe_1" in header
