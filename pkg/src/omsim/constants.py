"""Physical constants used throughout the simulator.

Values are the exact SI-2019 defining constants (CODATA 2018): the Planck
constant and Boltzmann constant are exact by definition, as is the speed of
light. They are hard-coded rather than imported so that results are
reproducible independent of the installed scipy version.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

_PLANCK = 6.62607015e-34  # J*s, exact (SI 2019)


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable bundle of the fundamental constants the model needs.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant, J*s.
    k_B : float
        Boltzmann constant, J/K.
    c : float
        Speed of light in vacuum, m/s.
    """

    hbar: float = _PLANCK / (2.0 * math.pi)
    k_B: float = 1.380649e-23
    c: float = 299792458.0


#: Module-level default constant set (exact SI-2019 values).
CODATA_2018 = PhysicalConstants()
