"""Shared fixtures and the acceptance-criteria terminal summary.

Tests marked ``@pytest.mark.acceptance(criterion, description)`` get one
PASS/FAIL line each in a dedicated section at the end of the run.
"""
from __future__ import annotations

import pytest

from omsim import (
    PhysicalParams,
    DetuningSpec,
    build_linear_system,
    build_noise_model,
    derive_params,
    solve_direct,
)

_ACCEPTANCE_RESULTS: list[tuple[str, str, str]] = []


def make_reference_params(**overrides) -> PhysicalParams:
    """The reference system: two 20 mW pumps split by twice the mechanical
    frequency, one 4 mW probe, effective pump-1 detuning at the mechanical
    frequency, 0.1 K bath."""
    two_pi = 6.283185307179586
    fields = dict(
        cavity_length_m=0.025,
        mirror_mass_kg=1.5e-10,
        temperature_K=0.1,
        mech_freq=two_pi * 1.0e6,
        mech_damping=two_pi * 1.0,
        cavity_decay=two_pi * 4.3e5,
        wavelength_m=1.064e-6,
        pump1_power_W=0.02,
        pump2_power_W=0.02,
        probe_powers_W=(0.004,),
        pump_separation=two_pi * 2.0e6,
        relative_phase=-0.3,
        probe_detunings=(two_pi * 1.0e6,),
        pump1_detuning_spec=DetuningSpec(mode="effective", value=two_pi * 1.0e6),
    )
    fields.update(overrides)
    return PhysicalParams(**fields)


@pytest.fixture(scope="session")
def reference_params() -> PhysicalParams:
    return make_reference_params()


@pytest.fixture(scope="session")
def reference_derived(reference_params):
    return derive_params(reference_params)


@pytest.fixture(scope="session")
def reference_stack(reference_params, reference_derived):
    """(params, derived, working point, linear system, noise model) at the
    effective detuning equal to the mechanical frequency."""
    p, d = reference_params, reference_derived
    wp = solve_direct(d, p, p.mech_freq)
    ls = build_linear_system(wp, d, p)
    nm = build_noise_model(d, ls.index.n_modes)
    return p, d, wp, ls, nm


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    criterion = str(marker.args[0])
    description = str(marker.args[1]) if len(marker.args) > 1 else ""
    status = "PASS" if report.passed else "FAIL"
    _ACCEPTANCE_RESULTS.append((criterion, description, status))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for criterion, description, status in sorted(_ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{status}] criterion {criterion}: {description}")
