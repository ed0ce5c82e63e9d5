"""Ready-made chains and time grids for two standard mirror demonstrations.

End-to-end z transfer: the 31-site chain is fully determined by its
31-level spectrum, so the z-z correlation between the ends is exact.

Long-time x revival: a 41-site chain built from the 41-level distorted-cosine
spectrum at the default amplitude (tau = pi). Periodicity and the revival at
t = 48 pi are exact properties of any such chain; the coupling profile is one
representative choice, not a unique answer.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import ThermalState, zz_correlation
from .inverse_problem import reconstruct_direct
from .jacobi_core import SymmetricChainSpec, diagonalize
from .mirror_design import SpectrumSpec, cosine_distorted_spectrum
from .series import CorrelationSeries
from .string_correlators import xx_correlation

MIRROR31_POSITIVE_LEVELS = (21, 40, 61, 80, 97, 116, 131, 146, 161, 172, 183, 192, 199, 204, 207)


def mirror31_spectrum() -> SpectrumSpec:
    """Antisymmetric 31-level mirror spectrum (tau = pi), couplings within 101.5..108.5."""
    pos = np.array(MIRROR31_POSITIVE_LEVELS, dtype=float)
    eps = np.concatenate([-pos[::-1], [0.0], pos])
    return SpectrumSpec.from_energies(eps, math.pi)


def mirror31_chain() -> SymmetricChainSpec:
    return reconstruct_direct(mirror31_spectrum()).chain


def revival41_chain() -> SymmetricChainSpec:
    return reconstruct_direct(cosine_distorted_spectrum(41)).chain


def end_to_end_zz_series(temperatures=(0.0, 1000.0), times=None) -> list[CorrelationSeries]:
    """<S_30^z(t) S_0^z(0)> on the 31-site chain around t = pi."""
    if times is None:
        times = np.linspace(math.pi - 0.5, math.pi + 0.5, 201)
    eig = diagonalize(mirror31_chain())
    return [zz_correlation(eig, ThermalState.from_temperature(eig, T), 30, 0, times) for T in temperatures]


def revival_xx_series(temperatures=(0.0, 1e4), window: float = 1.0, points: int = 101) -> list[CorrelationSeries]:
    """x autocorrelation at site 19 of the 41-site chain near t = 0 and near t = 48 pi (24 periods)."""
    t0 = np.linspace(0.0, window, points)
    times = np.concatenate([t0, 48 * math.pi + t0])
    eig = diagonalize(revival41_chain())
    return [xx_correlation(eig, ThermalState.from_temperature(eig, T), 19, times) for T in temperatures]
