"""Parameter sweeps, CSV persistence, and gnuplot script emission.

A sweep evaluates the full pipeline (derive -> working point -> linear
system -> stability -> output spectrum -> pairwise correlations) on a 1- or
2-axis linear grid. Grid points are independent pure computations and run
concurrently in a thread pool (NumPy releases the GIL inside the dense
solves); rows are emitted in row-major grid order regardless of scheduling,
so output is deterministic for a given spec.

CSV format: optional leading ``#`` metadata line (the only non-deterministic
content — a timestamp — suppressible for byte-exact diffing), then a header
row ``axis1,axis2,stable,delta0,q,V_<i>_<j>,sign_<i>_<j>,...,warnings,error``
with RFC-4180 quoting, LF line endings, and 17-significant-digit floats.
Unstable or failed points leave their correlation cells empty — values are
never fabricated.
"""
from __future__ import annotations

import csv
import datetime as _dt
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dynamics import build_linear_system, build_noise_model, check_stability
from .params import (
    DerivedParams,
    ParamValidationError,
    PhysicalParams,
    derive_params,
    validation_warnings,
)
from .spectrum import (
    DuanCorrelation,
    SingularAtFrequencyError,
    duan_best,
    duan_correlation,
    output_spectral_matrix,
)
from .working_point import (
    NonConvergenceError,
    WorkingPoint,
    delta0_for,
    solve_direct,
    solve_self_consistent,
)

#: Sweepable axes. ``delta_eff`` is in units of the mechanical frequency and
#: feeds the working point directly; ``pump_ratio`` scales pump-2 power
#: relative to the base pump-1 power; ``decay`` is in units of the base
#: cavity decay rate; ``phase`` (rad) and ``temperature`` (K) override their
#: fields.
AXIS_NAMES = ("delta_eff", "pump_ratio", "phase", "temperature", "decay")

#: Environment variable overriding the sweep thread count.
THREADS_ENV_VAR = "OMSIM_THREADS"

_POINT_ERRORS = (
    ParamValidationError,
    NonConvergenceError,
    SingularAtFrequencyError,
    FloatingPointError,
    np.linalg.LinAlgError,
    ValueError,
)


@dataclass(frozen=True)
class AxisSpec:
    """One linear sweep axis."""

    name: str
    min: float
    max: float
    points: int
    spacing: str = "linear"

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.points < 2:
            raise ValueError("an axis needs at least 2 grid points")
        if not self.max > self.min:
            raise ValueError("axis max must exceed min")
        if self.spacing != "linear":
            raise ValueError("only linear spacing is supported")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class SweepSpec:
    """A grid over 1 or 2 axes with the pairs to correlate at each point."""

    base: PhysicalParams
    axes: tuple[AxisSpec, ...]
    pairs: tuple[tuple[int, int], ...]
    omega: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep takes 1 or 2 axes")
        if len(self.axes) == 2 and self.axes[0].name == self.axes[1].name:
            raise ValueError("sweep axes must be distinct")
        if not self.pairs:
            raise ValueError("at least one mode pair is required")
        n_opt = self.base.n_probes + 2
        for i, j in self.pairs:
            if not (0 <= i < n_opt and 0 <= j < n_opt and i != j):
                raise ValueError(f"invalid optical pair ({i}, {j}) for {n_opt} modes")


@dataclass(frozen=True)
class SweepRow:
    """One evaluated grid point. Correlations are None when unavailable."""

    axis1: float
    axis2: float | None
    stable: bool | None
    delta0: float | None
    q: float | None
    correlations: tuple[DuanCorrelation | None, ...]
    warnings: tuple[str, ...]
    error: str | None


def mode_tag(mode: int) -> str:
    """Short column tag: pump_minus -> 0m, pump_plus -> 0p, probe_j -> pj."""
    if mode == 0:
        return "0m"
    if mode == 1:
        return "0p"
    return f"p{mode - 1}"


def conventional_sign(i: int, j: int) -> str | None:
    """Pinned sign convention for a pair, or None to pick the smaller V.

    Pump-pump and pump-plus/probe combinations take '+' in the X-joining
    quadrature; pump-minus/probe combinations take '-'; probe-probe pairs
    have no pinned convention.
    """
    a, b = min(i, j), max(i, j)
    if (a, b) == (0, 1):
        return "+"
    if a == 0 and b >= 2:
        return "-"
    if a == 1 and b >= 2:
        return "+"
    return None


def _apply_axes(base: PhysicalParams, named: dict[str, float]) -> tuple[PhysicalParams, float | None]:
    """Override base params per axis values; return (params, delta_eff or None)."""
    updates: dict = {}
    delta_eff = None
    for name, value in named.items():
        if name == "delta_eff":
            delta_eff = value * base.mech_freq
        elif name == "pump_ratio":
            updates["pump2_power_W"] = value * base.pump1_power_W
        elif name == "phase":
            updates["relative_phase"] = value
        elif name == "temperature":
            updates["temperature_K"] = value
        elif name == "decay":
            updates["cavity_decay"] = value * base.cavity_decay
        else:  # pragma: no cover - AxisSpec already validates names
            raise ValueError(f"unknown axis {name!r}")
    params = replace(base, **updates) if updates else base
    return params, delta_eff


def resolve_working_point(
    d: DerivedParams, p: PhysicalParams, delta_eff: float | None = None
) -> tuple[WorkingPoint, float]:
    """Working point plus the bare detuning that realizes it.

    ``delta_eff`` overrides the configured detuning (sweep axis);
    otherwise the detuning mode on the parameters decides between the
    direct and the self-consistent solve.
    """
    spec = p.pump1_detuning_spec
    if delta_eff is not None:
        wp = solve_direct(d, p, delta_eff)
        return wp, delta_eff + d.g0 * wp.q
    if spec.mode == "effective":
        wp = solve_direct(d, p, spec.value)
        return wp, delta0_for(d, p, spec.value)
    wp = solve_self_consistent(d, p, spec.value)
    return wp, spec.value


def _evaluate_point(spec: SweepSpec, named: dict[str, float]) -> SweepRow:
    axis1 = named[spec.axes[0].name]
    axis2 = named[spec.axes[1].name] if len(spec.axes) == 2 else None
    try:
        params, delta_eff = _apply_axes(spec.base, named)
        warnings = tuple(validation_warnings(params))
        derived = derive_params(params)
        wp, delta0 = resolve_working_point(derived, params, delta_eff)
        system = build_linear_system(wp, derived, params)
        stable = check_stability(system).stable
        if not stable:
            return SweepRow(
                axis1=axis1, axis2=axis2, stable=False, delta0=delta0, q=wp.q,
                correlations=(None,) * len(spec.pairs), warnings=warnings, error=None,
            )
        noise = build_noise_model(derived, system.index.n_modes)
        result = output_spectral_matrix(system, noise, spec.omega, stable=True)
        correlations = []
        for i, j in spec.pairs:
            sign = conventional_sign(i, j)
            if sign is None:
                correlations.append(duan_best(result, i, j))
            else:
                correlations.append(duan_correlation(result, i, j, sign))
        return SweepRow(
            axis1=axis1, axis2=axis2, stable=True, delta0=delta0, q=wp.q,
            correlations=tuple(correlations), warnings=warnings, error=None,
        )
    except _POINT_ERRORS as exc:
        return SweepRow(
            axis1=axis1, axis2=axis2, stable=None, delta0=None, q=None,
            correlations=(None,) * len(spec.pairs), warnings=(), error=str(exc),
        )


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list[SweepRow]:
    """Evaluate the grid; rows in row-major order (first axis outermost)."""
    grids = [axis.values() for axis in spec.axes]
    if len(grids) == 1:
        points = [{spec.axes[0].name: float(v)} for v in grids[0]]
    else:
        points = [
            {spec.axes[0].name: float(v1), spec.axes[1].name: float(v2)}
            for v1 in grids[0]
            for v2 in grids[1]
        ]
    workers = _thread_count(threads)
    if workers == 1:
        return [_evaluate_point(spec, named) for named in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda named: _evaluate_point(spec, named), points))


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.17g}"


def csv_header(spec: SweepSpec) -> list[str]:
    columns = ["axis1", "axis2", "stable", "delta0", "q"]
    for i, j in spec.pairs:
        tag = f"{mode_tag(i)}_{mode_tag(j)}"
        columns += [f"V_{tag}", f"sign_{tag}"]
    columns += ["warnings", "error"]
    return columns


def write_csv(
    rows: list[SweepRow],
    spec: SweepSpec,
    destination: str | Path | io.TextIOBase,
    header_meta: bool = True,
) -> None:
    """Serialize rows; deterministic bytes when ``header_meta`` is False."""
    if isinstance(destination, (str, Path)):
        with open(destination, "w", newline="", encoding="utf-8") as handle:
            write_csv(rows, spec, handle, header_meta=header_meta)
        return
    out = destination
    if header_meta:
        stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        axes = ",".join(a.name for a in spec.axes)
        out.write(f"# omsim sweep generated={stamp} axes={axes}\n")
    writer = csv.writer(out, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(csv_header(spec))
    for row in rows:
        cells = [
            _fmt(row.axis1),
            _fmt(row.axis2),
            "" if row.stable is None else ("true" if row.stable else "false"),
            _fmt(row.delta0),
            _fmt(row.q),
        ]
        for corr in row.correlations:
            if corr is None:
                cells += ["", ""]
            else:
                cells += [_fmt(corr.value), corr.sign_u]
        cells.append(";".join(row.warnings))
        cells.append(row.error or "")
        writer.writerow(cells)


def emit_gnuplot_script(
    spec: SweepSpec, csv_path: str | Path, script_path: str | Path
) -> None:
    """Write a gnuplot script that plots the CSV (no rendering here).

    One axis: every pair's V against the axis, plus the separability bound 2.
    Two axes: a gridded surface of the first pair (others listed, commented).
    """
    csv_name = Path(csv_path).name
    lines = [
        "# gnuplot script generated by omsim; run:  gnuplot -p <this file>",
        'set datafile separator ","',
        "set key autotitle columnhead",
        "set grid",
    ]
    v_col = lambda k: 6 + 2 * k  # noqa: E731 - column of pair k's V
    if len(spec.axes) == 1:
        lines += [
            f'set xlabel "{spec.axes[0].name}"',
            'set ylabel "pairwise correlation V"',
        ]
        plots = [
            f"'{csv_name}' using 1:{v_col(k)} with lines title 'V_{mode_tag(i)}_{mode_tag(j)}'"
            for k, (i, j) in enumerate(spec.pairs)
        ]
        plots.append("2 with lines dashtype 2 linecolor rgb 'gray' title 'bound'")
        lines.append("plot \\\n  " + ", \\\n  ".join(plots))
    else:
        i, j = spec.pairs[0]
        lines += [
            f'set xlabel "{spec.axes[0].name}"',
            f'set ylabel "{spec.axes[1].name}"',
            'set zlabel "V"',
            f"set dgrid3d {spec.axes[1].points},{spec.axes[0].points}",
            "set hidden3d",
            f"splot '{csv_name}' using 1:2:{v_col(0)} with lines "
            f"title 'V_{mode_tag(i)}_{mode_tag(j)}'",
        ]
        for k, (a, b) in enumerate(spec.pairs[1:], start=1):
            lines.append(
                f"# additional pair: V_{mode_tag(a)}_{mode_tag(b)} in column {v_col(k)}"
            )
    Path(script_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
