"""Free-fermion dynamics: propagator, transfer fidelity and z-z correlations.

Everything is expressed through the single-particle eigensystem (eps_nu, V):

    U(t) = V diag(exp(-i eps t)) V^T,        F = V diag(f) V^T,

where f are Fermi factors at chemical potential zero. Time-dependent
operators follow A(t) = exp(iHt) A exp(-iHt).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .jacobi_core import EigenSystem
from .series import CorrelationSeries

ZERO_MODE_RTOL = 1e-10


@dataclass(frozen=True)
class Propagator:
    time: float
    matrix: np.ndarray

    def unitarity_error(self) -> float:
        U = self.matrix
        return float(np.abs(U @ U.conj().T - np.eye(U.shape[0])).max())


def propagator(eig: EigenSystem, t: float) -> Propagator:
    """Single-particle propagator U(t)_{ij} = sum_nu exp(-i eps_nu t) <i|nu><nu|j>."""
    V = eig.eigenvectors
    U = (V * np.exp(-1j * eig.eigenvalues * t)) @ V.T
    return Propagator(float(t), U)


def transfer_amplitude(eig: EigenSystem, t: float) -> complex:
    """Complex amplitude <N| exp(-iHt) |0> for one excitation."""
    V = eig.eigenvectors
    return complex(np.sum(V[-1] * V[0] * np.exp(-1j * eig.eigenvalues * t)))


def transfer_fidelity(eig: EigenSystem, t: float) -> float:
    """End-to-end transfer probability |U(t)_{N,0}|^2."""
    return abs(transfer_amplitude(eig, t)) ** 2


def mirror_phase(eig: EigenSystem, tau: float) -> complex:
    """Global phase c with U(tau) = c R if the chain is a perfect mirror at tau.

    Here R is the site reversal i -> N - i. With phi0 = eps_0 tau the phase
    is exp(-i (phi0 + N pi)): the lowest eigenvector has parity (-1)^N.
    """
    N = eig.n_sites - 1
    return complex(np.exp(-1j * (eig.eigenvalues[0] * tau + N * math.pi)))


def mirror_error(eig: EigenSystem, tau: float) -> float:
    """max |U(tau) - c R| with c from :func:`mirror_phase`."""
    U = propagator(eig, tau).matrix
    R = np.eye(eig.n_sites)[::-1]
    return float(np.abs(U - mirror_phase(eig, tau) * R).max())


def fermi_factors(energies: np.ndarray, beta: float) -> np.ndarray:
    """Occupations 1/(1 + exp(beta eps)); at beta = inf zero modes get 1/2."""
    eps = np.asarray(energies, dtype=float)
    if beta < 0 or math.isnan(beta):
        raise ValidationError(f"beta must be >= 0, got {beta!r}")
    if math.isinf(beta):
        scale = np.abs(eps).max() if eps.size else 0.0
        zero = np.abs(eps) <= ZERO_MODE_RTOL * scale
        return np.where(zero, 0.5, np.where(eps < 0, 1.0, 0.0))
    return 0.5 * (1.0 - np.tanh(0.5 * beta * eps))


@dataclass(frozen=True)
class ThermalState:
    """Grand-canonical free-fermion equilibrium state at chemical potential 0."""

    beta: float
    occupation: np.ndarray

    @property
    def temperature(self) -> float:
        if math.isinf(self.beta):
            return 0.0
        return math.inf if self.beta == 0 else 1.0 / self.beta

    @classmethod
    def from_beta(cls, eig: EigenSystem, beta: float) -> "ThermalState":
        return cls(float(beta), fermi_factors(eig.eigenvalues, beta))

    @classmethod
    def from_temperature(cls, eig: EigenSystem, temperature: float) -> "ThermalState":
        if temperature < 0 or math.isnan(temperature):
            raise ValidationError(f"temperature must be >= 0, got {temperature!r}")
        if temperature == 0:
            beta = math.inf
        elif math.isinf(temperature):
            beta = 0.0
        else:
            beta = 1.0 / temperature
        return cls.from_beta(eig, beta)

    def density_matrix(self, eig: EigenSystem) -> np.ndarray:
        """F_ij = <c_i^dag c_j>."""
        V = eig.eigenvectors
        return (V * self.occupation) @ V.T


def _check_site(site: int, n_sites: int) -> int:
    if not 0 <= site < n_sites:
        raise ValidationError(f"site {site} outside 0..{n_sites - 1}", index=site)
    return int(site)


def zz_correlation(
    eig: EigenSystem,
    state: ThermalState,
    j: int,
    k: int,
    times: Sequence[float],
) -> CorrelationSeries:
    """<S_j^z(t) S_k^z(0)> from Wick's theorem.

    <n_j(t) n_k> = <n_j><n_k> + <c_j^dag(t) c_k><c_j(t) c_k^dag>, with
    <c_j^dag(t) c_k> = [exp(iH1 t) F]_jk and <c_j(t) c_k^dag> = [exp(-iH1 t)(1 - F)]_jk.
    """
    n = eig.n_sites
    j, k = _check_site(j, n), _check_site(k, n)
    t = np.asarray(times, dtype=float).reshape(-1)
    V = eig.eigenvectors
    f = state.occupation
    w = V[j] * V[k]
    phase = np.exp(1j * np.outer(t, eig.eigenvalues))
    particle = phase @ (w * f)
    hole = phase.conj() @ (w * (1.0 - f))
    nj = float(np.sum(V[j] ** 2 * f))
    nk = float(np.sum(V[k] ** 2 * f))
    values = nj * nk + particle * hole - 0.5 * nj - 0.5 * nk + 0.25
    return CorrelationSeries("zz", (j, k), state.temperature, t, values)


def periodicity_check(series: CorrelationSeries, period: float, rtol: float = 1e-9) -> float:
    """max |C(t + period) - C(t)| over grid points that have a partner one period later."""
    t = series.times
    if t.size == 0:
        raise ValidationError("empty series")
    scale = max(1.0, float(np.abs(t).max()))
    idx = np.searchsorted(t, t + period - rtol * scale)
    ok = idx < t.size
    ok[ok] &= np.abs(t[idx[ok]] - (t[ok] + period)) <= rtol * scale
    if not ok.any():
        raise ValidationError(f"no pairs of grid points separated by {period!r}")
    return float(np.abs(series.values[idx[ok]] - series.values[ok]).max())
