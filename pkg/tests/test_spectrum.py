"""Output-field spectral covariance and pairwise-correlation tests."""
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omsim import (
    LinearSystem,
    ModeIndex,
    NoiseModel,
    SingularAtFrequencyError,
    build_linear_system,
    build_noise_model,
    check_stability,
    derive_params,
    duan_best,
    duan_correlation,
    multipartite_verdict,
    output_spectral_matrix,
    solve_direct,
)
from conftest import make_reference_params

TWO_PI = 2.0 * math.pi
KAPPA = TWO_PI * 4.3e5


def zero_coupling_result(omega, n_probes=1):
    p = make_reference_params(
        probe_powers_W=(0.004,) * n_probes,
        probe_detunings=(TWO_PI * 1e6,) * n_probes,
    )
    d = replace(derive_params(p), g0=0.0, g_probe=(0.0,) * n_probes)
    wp = solve_direct(d, p, p.mech_freq)
    ls = build_linear_system(wp, d, p)
    nm = build_noise_model(d, ls.index.n_modes)
    return output_spectral_matrix(ls, nm, omega)


@pytest.fixture(scope="module")
def reference_result(reference_stack):
    _, _, _, ls, nm = reference_stack
    return output_spectral_matrix(ls, nm, 0.0, stable=True)


def test_zero_frequency_regression_values(reference_result):
    assert duan_correlation(reference_result, 0, 1, "+").value == pytest.approx(
        1.3795103546297993, rel=1e-9
    )
    assert duan_correlation(reference_result, 0, 2, "-").value == pytest.approx(
        1.8413934151022826, rel=1e-9
    )
    assert duan_correlation(reference_result, 1, 2, "+").value == pytest.approx(
        1.8361927763265506, rel=1e-9
    )
    for corr in (
        duan_correlation(reference_result, 0, 1, "+"),
        duan_correlation(reference_result, 0, 2, "-"),
        duan_correlation(reference_result, 1, 2, "+"),
    ):
        assert corr.entangled


def test_vacuum_output_block_is_vacuum():
    # Decoupled modes reflect pure vacuum even with a hot mirror bath.
    sr = zero_coupling_result(0.37 * KAPPA)
    vacuum = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    for k in range(sr.index.n_optical):
        block = sr.s_out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2]
        assert np.allclose(block, vacuum, atol=1e-12)
    # Cross-mode blocks vanish.
    assert np.allclose(sr.s_out[0:2, 2:4], 0.0, atol=1e-12)


@given(
    omega_over_kappa=st.floats(min_value=-5.0, max_value=5.0),
    sign=st.sampled_from(["+", "-"]),
    pair=st.sampled_from([(0, 1), (0, 2), (1, 2)]),
)
@settings(max_examples=40, deadline=None)
def test_vacuum_saturates_bound_exactly(omega_over_kappa, sign, pair):
    sr = zero_coupling_result(omega_over_kappa * KAPPA)
    value = duan_correlation(sr, pair[0], pair[1], sign).value
    assert abs(value - 2.0) <= 1e-12


def test_spectral_matrix_hermitian(reference_stack):
    _, _, _, ls, nm = reference_stack
    idx = ls.index
    mech_freq = ls.drift[idx.x(idx.mirror), idx.y(idx.mirror)]
    for omega in (0.0, 0.3 * KAPPA, -mech_freq):
        s = output_spectral_matrix(ls, nm, omega, stable=True).s_out
        scale = np.abs(s).max()
        assert np.allclose(s, s.conj().T, atol=1e-12 * scale)


def test_pair_swap_symmetry(reference_result):
    for sign in ("+", "-"):
        a = duan_correlation(reference_result, 0, 2, sign).value
        b = duan_correlation(reference_result, 2, 0, sign).value
        assert a == pytest.approx(b, rel=1e-12)


def test_sign_v_is_opposite(reference_result):
    plus = duan_correlation(reference_result, 0, 1, "+")
    minus = duan_correlation(reference_result, 0, 1, "-")
    assert (plus.sign_u, plus.sign_v) == ("+", "-")
    assert (minus.sign_u, minus.sign_v) == ("-", "+")
    assert plus.value != minus.value


def test_best_sign_selection(reference_result):
    best = duan_best(reference_result, 0, 2)
    worse = duan_correlation(reference_result, 0, 2, "+" if best.sign_u == "-" else "-")
    assert best.value <= worse.value
    assert best.sign_u == "-"  # pump-minus/probe pairs favor the difference


def test_mode_validation(reference_result):
    mirror = reference_result.index.mirror
    with pytest.raises(ValueError):
        duan_correlation(reference_result, 0, mirror, "+")
    with pytest.raises(ValueError):
        duan_correlation(reference_result, 1, 1, "+")
    with pytest.raises(ValueError):
        duan_correlation(reference_result, 0, 1, "x")
    with pytest.raises(ValueError):
        multipartite_verdict(reference_result, (0,))


def test_ordering_terms_cancel_in_pairwise_values(reference_stack):
    # The anti-Hermitian part of the noise model shifts the spectral matrix
    # but cancels identically in every pairwise combination.
    _, _, _, ls, nm = reference_stack
    nm_sym = NoiseModel(spectral=nm.spectral.real.astype(complex))
    for omega in (0.0, 0.3 * KAPPA):
        full = output_spectral_matrix(ls, nm, omega, stable=True)
        sym = output_spectral_matrix(ls, nm_sym, omega, stable=True)
        assert not np.allclose(full.s_out, sym.s_out, atol=1e-6)
        for i, j, sign in ((0, 1, "+"), (0, 2, "-"), (1, 2, "+")):
            v_full = duan_correlation(full, i, j, sign).value
            v_sym = duan_correlation(sym, i, j, sign).value
            assert v_full == pytest.approx(v_sym, rel=1e-12)


def test_negative_frequency_relation(reference_stack):
    _, _, _, ls, nm = reference_stack
    omega = 0.42 * KAPPA
    nm_t = NoiseModel(spectral=nm.spectral.T.copy())
    s_neg = output_spectral_matrix(ls, nm, -omega, stable=True).s_out
    s_pos_t = output_spectral_matrix(ls, nm_t, omega, stable=True).s_out
    scale = np.abs(s_neg).max()
    assert np.allclose(s_neg, s_pos_t.conj(), atol=1e-12 * scale)
    # With symmetrized (real) noise the spectrum is even up to transposition.
    nm_sym = NoiseModel(spectral=nm.spectral.real.astype(complex))
    s1 = output_spectral_matrix(ls, nm_sym, omega, stable=True).s_out
    s2 = output_spectral_matrix(ls, nm_sym, -omega, stable=True).s_out
    assert np.allclose(s2, s1.T, atol=1e-12 * scale)
    assert np.allclose(s2, s1.conj(), atol=1e-12 * scale)


def test_unstable_flag_passthrough(reference_params):
    p = replace(reference_params, pump2_power_W=4.0 * reference_params.pump1_power_W)
    d = derive_params(p)
    wp = solve_direct(d, p, p.mech_freq)
    ls = build_linear_system(wp, d, p)
    assert not check_stability(ls).stable
    nm = build_noise_model(d, ls.index.n_modes)
    sr = output_spectral_matrix(ls, nm, 0.0)
    assert sr.stable is False
    assert np.isfinite(sr.s_out).all()


def test_singular_frequency_raises(reference_derived):
    # Undamped optical rotation block: the kernel is exactly singular at the
    # rotation frequency.
    delta = TWO_PI * 1e6
    drift = np.zeros((6, 6))
    drift[0, 1], drift[1, 0] = delta, -delta
    drift[2, 2] = drift[3, 3] = -KAPPA
    drift[4, 4] = drift[5, 5] = -1.0
    drift[4, 5], drift[5, 4] = delta, -delta
    ls = LinearSystem(drift=drift, input_gain=np.eye(6), index=ModeIndex(n_probes=0))
    nm = build_noise_model(reference_derived, 3)
    with pytest.raises(SingularAtFrequencyError) as excinfo:
        output_spectral_matrix(ls, nm, delta, stable=False)
    assert excinfo.value.omega == delta


def test_multipartite_verdict_reference(reference_result):
    verdict = multipartite_verdict(reference_result, (0, 1, 2))
    assert len(verdict.pairs) == 3
    assert verdict.all_entangled
    assert "not a genuine multipartite witness" in verdict.note


def test_result_matrix_read_only(reference_result):
    with pytest.raises(ValueError):
        reference_result.s_out[0, 0] = 0.0
