"""Frequency-domain solution, output fields, and entanglement correlations.

With the Fourier convention ``x(omega) = Int x(t) exp(i*omega*t) dt`` the
Langevin system solves to ``u(omega) = (-i*omega*I - M)^-1 F n(omega)``, and
the standard input-output relation ``o = sqrt(2*kappa) u_opt - n_opt`` gives
the measurable output quadratures. Their spectral covariance matrix
(vacuum level 1/2 on the diagonal) feeds the Duan two-party correlations

    V_ij = <dU dU^dag + dV dV^dag>,   dU = X_i +- X_j,  dV = Y_i -+ Y_j,

whose value drops below 2 only for entangled pairs. The non-symmetrized
operator ordering of the noise model is kept throughout so that uncorrelated
vacuum saturates V = 2 exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import LinearSystem, ModeIndex, NoiseModel, check_stability

#: Allowed sign choices for the U combination; the V combination always
#: takes the opposite sign.
SIGNS = ("+", "-")

_HERMITICITY_RTOL = 1e-8


class SingularAtFrequencyError(RuntimeError):
    """(-i*omega*I - M) is singular: the system is marginal at this frequency."""

    def __init__(self, omega: float):
        super().__init__(f"frequency-domain solve singular at omega={omega:.6g} rad/s")
        self.omega = omega


@dataclass(frozen=True)
class DuanCorrelation:
    """One pairwise correlation value with its sign convention."""

    pair: tuple[int, int]
    sign_u: str
    sign_v: str
    value: float
    entangled: bool


@dataclass(frozen=True)
class SpectralResult:
    """Output-field spectral covariance over the optical quadratures.

    ``stable`` is a pass-through diagnostic: when the drift matrix is not
    Hurwitz the mathematical spectrum still exists away from marginal
    frequencies but has no steady-state meaning.
    """

    omega: float
    s_out: np.ndarray
    index: ModeIndex
    stable: bool
    pair_correlations: tuple[DuanCorrelation, ...] = ()

    def __post_init__(self) -> None:
        self.s_out.flags.writeable = False


@dataclass(frozen=True)
class VerdictReport:
    """All pairwise correlations among a party set.

    ``all_entangled`` is the operational pairwise notion (every pair's
    V < 2, each sufficient for that pair) — not a genuine multipartite
    entanglement witness.
    """

    pairs: tuple[DuanCorrelation, ...]
    all_entangled: bool
    note: str = (
        "pairwise criterion: sufficient for each pair separately; "
        "not a genuine multipartite witness"
    )


def output_spectral_matrix(
    ls: LinearSystem,
    nm: NoiseModel,
    omega: float,
    stable: bool | None = None,
) -> SpectralResult:
    """Spectral covariance matrix of the optical output quadratures.

    Builds the output transfer matrix ``T(omega) = C (-i*omega*I - M)^-1 F -
    P_opt`` (``C`` projects on optical quadratures scaled by sqrt(2*kappa);
    ``P_opt`` routes the reflected input) and returns ``T D T^dag``.

    ``stable`` may be supplied by callers that already ran
    :func:`omsim.dynamics.check_stability`; otherwise it is computed here.
    """
    index = ls.index
    dim = index.dim
    n_opt = index.optical_dim
    if stable is None:
        stable = check_stability(ls).stable
    kernel = -1j * omega * np.eye(dim) - ls.drift
    try:
        propagated = np.linalg.solve(kernel, ls.input_gain)
    except np.linalg.LinAlgError as exc:
        raise SingularAtFrequencyError(omega) from exc
    sqrt2k = ls.input_gain[0, 0]  # sqrt(2*kappa), uniform over optical rows
    transfer = sqrt2k * propagated[:n_opt, :]
    transfer[:, :n_opt] -= np.eye(n_opt)
    s_out = transfer @ nm.spectral @ transfer.conj().T
    return SpectralResult(omega=omega, s_out=s_out, index=index, stable=stable)


def _check_optical(index: ModeIndex, mode: int) -> None:
    if not 0 <= mode < index.n_optical:
        raise ValueError(
            f"mode {mode} is not an optical mode (valid: 0..{index.n_optical - 1}); "
            "the mirror has no output channel"
        )


def duan_correlation(
    sr: SpectralResult, i: int, j: int, sign_u: str
) -> DuanCorrelation:
    """Two-party correlation V for optical modes ``(i, j)``.

    ``sign_u`` is the sign joining the X quadratures in dU; dV joins the Y
    quadratures with the opposite sign. The imaginary part of the assembled
    combination must vanish by Hermiticity and is asserted before being
    dropped.
    """
    index = sr.index
    _check_optical(index, i)
    _check_optical(index, j)
    if i == j:
        raise ValueError("duan_correlation requires two distinct modes")
    if sign_u not in SIGNS:
        raise ValueError(f"sign_u must be one of {SIGNS}")
    s = 1.0 if sign_u == "+" else -1.0
    S = sr.s_out
    xi, yi, xj, yj = index.x(i), index.y(i), index.x(j), index.y(j)
    combo = (
        S[xi, xi] + S[xj, xj] + s * (S[xi, xj] + S[xj, xi])
        + S[yi, yi] + S[yj, yj] - s * (S[yi, yj] + S[yj, yi])
    )
    if abs(combo.imag) > _HERMITICITY_RTOL * max(abs(combo.real), 1e-300):
        raise FloatingPointError(
            f"correlation combination lost Hermiticity: {combo!r}"
        )
    value = float(combo.real)
    return DuanCorrelation(
        pair=(i, j),
        sign_u=sign_u,
        sign_v="-" if sign_u == "+" else "+",
        value=value,
        entangled=bool(value < 2.0),
    )


def duan_best(sr: SpectralResult, i: int, j: int) -> DuanCorrelation:
    """The smaller-V sign choice for a pair; ties break toward sign_u='+'."""
    plus = duan_correlation(sr, i, j, "+")
    minus = duan_correlation(sr, i, j, "-")
    return plus if plus.value <= minus.value else minus


def multipartite_verdict(sr: SpectralResult, parties: list[int] | tuple[int, ...]) -> VerdictReport:
    """Evaluate every unordered pair among ``parties`` with duan_best."""
    parties = tuple(parties)
    if len(parties) < 2:
        raise ValueError("need at least two parties")
    pairs = tuple(
        duan_best(sr, parties[a], parties[b])
        for a in range(len(parties))
        for b in range(a + 1, len(parties))
    )
    return VerdictReport(
        pairs=pairs,
        all_entangled=all(c.entangled for c in pairs),
    )
