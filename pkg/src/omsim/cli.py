"""Command-line interface.

Subcommands (all read the same YAML config, see :mod:`omsim.config`):

* ``derive``    — print the derived model coefficients.
* ``point``     — solve the working point; print amplitudes, stability, and
  pairwise correlations at the configured Fourier frequency.
* ``sweep``     — run the configured parameter sweep; write CSV and
  optionally a gnuplot script.
* ``stability`` — print drift-matrix eigenvalues and the stability verdict.
* ``verify``    — cross-check the frequency-domain solver against the
  Lyapunov/quadrature oracle and the time-domain Monte-Carlo oracle.

Exit codes: 0 success; 1 configuration problem (unreadable file, schema or
validation error); 2 numerical failure (non-convergence, instability where a
steady state is required, singular solve, or oracle disagreement).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import Config, ConfigError, _all_pairs, load_config
from .dynamics import (
    EigenvalueSolverError,
    build_linear_system,
    build_noise_model,
    check_stability,
)
from .oracle import (
    InstabilityDetectedError,
    SingularLyapunovError,
    UnstableSystemError,
    lyapunov_covariance,
    simulate_time_domain,
    spectral_integral_covariance,
)
from .params import ParamValidationError, derive_params, validation_warnings
from .spectrum import (
    SingularAtFrequencyError,
    duan_best,
    duan_correlation,
    output_spectral_matrix,
)
from .sweep import (
    SweepSpec,
    conventional_sign,
    emit_gnuplot_script,
    mode_tag,
    resolve_working_point,
    run_sweep,
    write_csv,
)
from .working_point import NonConvergenceError

#: Entrywise relative gate for Lyapunov-vs-quadrature agreement.
COVARIANCE_GATE = 1e-6
#: Monte-Carlo agreement gate in units of the estimate's standard error.
MC_SIGMA_GATE = 3.0

_CONFIG_ERRORS = (ConfigError, ParamValidationError, FileNotFoundError)
_NUMERICAL_ERRORS = (
    NonConvergenceError,
    UnstableSystemError,
    SingularLyapunovError,
    InstabilityDetectedError,
    SingularAtFrequencyError,
    EigenvalueSolverError,
    FloatingPointError,
)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _pair_signs(config: Config) -> tuple[tuple[int, int], ...]:
    if config.sweep is not None:
        return config.sweep.pairs
    return _all_pairs(config.physical.n_probes)


def _build_all(config: Config):
    params = config.physical
    derived = derive_params(params)
    wp, delta0 = resolve_working_point(derived, params)
    system = build_linear_system(wp, derived, params)
    noise = build_noise_model(derived, system.index.n_modes)
    return params, derived, wp, delta0, system, noise


def _cmd_derive(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    d = derive_params(config.physical)
    print(f"g0 = {_fmt(d.g0)}")
    for k, g in enumerate(d.g_probe, start=1):
        print(f"g_probe_{k} = {_fmt(g)}")
    print(f"eta_l1 = {_fmt(d.eta_l1)}")
    print(f"eta_l2 = {_fmt(d.eta_l2)}")
    for k, eta in enumerate(d.eta_probe, start=1):
        print(f"eta_probe_{k} = {_fmt(eta)}")
    print(f"n_thermal = {_fmt(d.n_thermal)}")
    print(f"omega_laser1 = {_fmt(d.omega_laser1)}")
    print(f"q_m = {_fmt(d.q_m)}")
    for warning in validation_warnings(config.physical):
        print(f"warning: {warning}")
    return 0


def _cmd_point(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    params, derived, wp, delta0, system, noise = _build_all(config)
    print("working point:")
    print(f"  alpha_pump_minus = {_fmt(wp.alpha_0minus)}")
    print(
        f"  alpha_pump_plus = {_fmt(wp.alpha_0plus.real)} "
        f"{'+' if wp.alpha_0plus.imag >= 0 else '-'} {_fmt(abs(wp.alpha_0plus.imag))}j"
        f"  (modulus {_fmt(abs(wp.alpha_0plus))})"
    )
    for k, amp in enumerate(wp.alpha_probe, start=1):
        print(f"  alpha_probe_{k} = {_fmt(amp)}")
    print(f"  displacement_q = {_fmt(wp.q)}")
    print(f"  delta_eff = {_fmt(wp.delta_eff)} rad/s")
    print(f"  delta0 = {_fmt(delta0)} rad/s")
    report = check_stability(system)
    verdict = "stable" if report.stable else "UNSTABLE"
    print(f"stability: {verdict} (max Re eig = {_fmt(report.max_real_eig)})")
    if report.stable:
        omega = params.fourier_freq
        result = output_spectral_matrix(system, noise, omega, stable=True)
        print(f"pairwise correlations at omega = {_fmt(omega)} rad/s:")
        for i, j in _pair_signs(config):
            sign = conventional_sign(i, j)
            corr = (
                duan_best(result, i, j)
                if sign is None
                else duan_correlation(result, i, j, sign)
            )
            flag = "entangled" if corr.entangled else "separable"
            print(
                f"  V_{mode_tag(i)}_{mode_tag(j)} (sign {corr.sign_u}) = "
                f"{_fmt(corr.value)}  [{flag}]"
            )
    else:
        print("pairwise correlations skipped: no steady state")
    for warning in validation_warnings(params):
        print(f"warning: {warning}")
    return 0


def _cmd_stability(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    _, _, _, _, system, _ = _build_all(config)
    report = check_stability(system)
    print("drift-matrix eigenvalues (rad/s):")
    for ev in report.eigenvalues:
        print(f"  {_fmt(ev.real)} {'+' if ev.imag >= 0 else '-'} {_fmt(abs(ev.imag))}j")
    print(f"max Re eig = {_fmt(report.max_real_eig)}")
    print(f"verdict: {'stable' if report.stable else 'UNSTABLE'}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if config.sweep is None:
        raise ConfigError("sweep: section missing (required by the sweep subcommand)")
    spec: SweepSpec = config.sweep
    rows = run_sweep(spec, threads=args.threads)
    out_path = Path(args.out)
    write_csv(rows, spec, out_path, header_meta=not args.no_header_meta)
    n_stable = sum(1 for r in rows if r.stable)
    n_failed = sum(1 for r in rows if r.error is not None)
    print(f"wrote {len(rows)} rows to {out_path} ({n_stable} stable, {n_failed} failed)")
    for k, (i, j) in enumerate(spec.pairs):
        values = [
            (r.correlations[k].value, r.axis1, r.axis2)
            for r in rows
            if r.correlations[k] is not None
        ]
        if values:
            best = min(values)
            where = _fmt(best[1]) + ("" if best[2] is None else f", {_fmt(best[2])}")
            print(
                f"min V_{mode_tag(i)}_{mode_tag(j)} = {_fmt(best[0])} at ({where})"
            )
    if args.plot_script is not None:
        script = (
            out_path.with_suffix(".gp") if args.plot_script == "" else Path(args.plot_script)
        )
        emit_gnuplot_script(spec, out_path, script)
        print(f"wrote gnuplot script to {script}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    params, derived, wp, delta0, system, noise = _build_all(config)
    report = check_stability(system)
    if not report.stable:
        raise UnstableSystemError(
            f"verification needs a stable working point: max Re eig = "
            f"{report.max_real_eig:.6g}"
        )
    ok = True

    lyap = lyapunov_covariance(system, noise)
    integral, info = spectral_integral_covariance(system, noise)
    scale = float(np.abs(lyap.covariance).max())
    deviation = float(
        np.max(
            np.abs(integral - lyap.covariance)
            / (np.abs(lyap.covariance) + 1e-9 * scale)
        )
    )
    passed = deviation <= COVARIANCE_GATE
    ok &= passed
    print(
        f"covariance check: Lyapunov vs frequency integral, entrywise relative "
        f"deviation = {deviation:.3e} (gate {COVARIANCE_GATE:g}) "
        f"[{'PASS' if passed else 'FAIL'}]"
    )
    print(
        f"  quadrature: {info['panels']} panels, {info['n_evals']} evaluations, "
        f"last change {info.get('last_change', float('nan')):.3e}"
    )

    result = output_spectral_matrix(system, noise, 0.0, stable=True)
    mc_pairs = []
    freq_values = {}
    for i, j in _pair_signs(config):
        sign = conventional_sign(i, j)
        corr = (
            duan_best(result, i, j) if sign is None else duan_correlation(result, i, j, sign)
        )
        mc_pairs.append((i, j, corr.sign_u))
        freq_values[(i, j)] = corr.value
    mc = config.monte_carlo
    seed = mc.seed if args.seed is None else args.seed
    n_segments = mc.n_segments if args.segments is None else args.segments
    n_trajectories = mc.n_trajectories if args.trajectories is None else args.trajectories
    stats = simulate_time_domain(
        system,
        noise,
        seed=seed,
        pairs=tuple(mc_pairs),
        n_segments=n_segments,
        n_trajectories=n_trajectories,
        window=mc.window,
    )
    print(
        f"time-domain check: seed={stats.seed}, dt={stats.dt:.3e} s, "
        f"{stats.n_segments} segments of {stats.segment_steps} steps, "
        f"window={stats.window}"
    )
    for estimate in stats.estimates:
        i, j = estimate.pair
        target = freq_values[(i, j)]
        z = (estimate.value - target) / estimate.std_error
        passed = abs(z) <= MC_SIGMA_GATE
        ok &= passed
        print(
            f"  V_{mode_tag(i)}_{mode_tag(j)} (sign {estimate.sign_u}): "
            f"monte-carlo {estimate.value:.6f} +- {estimate.std_error:.6f}, "
            f"frequency-domain {target:.6f}, z = {z:+.2f} "
            f"[{'PASS' if passed else 'FAIL'}]"
        )
    print(f"verification {'PASSED' if ok else 'FAILED'}")
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omsim",
        description=(
            "Simulator for pairwise output-field entanglement of a two-pump, "
            "n-probe optomechanical cavity."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, handler) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML configuration file")
        p.set_defaults(handler=handler)
        return p

    add("derive", "print derived model coefficients", _cmd_derive)
    add("point", "working point, stability, pairwise correlations", _cmd_point)
    add("stability", "drift-matrix eigenvalues and verdict", _cmd_stability)

    p_sweep = add("sweep", "run the configured parameter sweep", _cmd_sweep)
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument(
        "--plot-script",
        nargs="?",
        const="",
        default=None,
        metavar="PATH",
        help="also write a gnuplot script (default: CSV path with .gp suffix)",
    )
    p_sweep.add_argument(
        "--no-header-meta",
        action="store_true",
        help="omit the timestamped '#' metadata line (deterministic bytes)",
    )
    p_sweep.add_argument("--threads", type=int, default=None, help="worker thread count")

    p_verify = add("verify", "cross-check the solver against both oracles", _cmd_verify)
    p_verify.add_argument("--seed", type=int, default=None, help="Monte-Carlo seed")
    p_verify.add_argument(
        "--segments", type=int, default=None, help="segments per trajectory"
    )
    p_verify.add_argument(
        "--trajectories", type=int, default=None, help="number of trajectories"
    )
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":  # pragma: no cover
    main()
