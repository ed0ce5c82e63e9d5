"""Brute-force exact diagonalization of the XX spin chain.

The full 2^(N+1) dimensional Hilbert space is used, with no Jordan-Wigner
mapping anywhere, so results here are an independent check of the fermionic
routines. Basis states are integers whose bit l is 1 when spin l points up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .jacobi_core import SymmetricChainSpec
from .series import CorrelationSeries

MAX_SITES = 12
GROUND_RTOL = 1e-10


@dataclass(frozen=True)
class DenseSpinModel:
    n_sites: int
    hamiltonian: np.ndarray
    energies: np.ndarray
    states: np.ndarray
    _eigenbasis_ops: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return 1 << self.n_sites

    def magnetization(self) -> np.ndarray:
        """Total S^z of every basis state."""
        idx = np.arange(self.dimension)
        ups = np.array([bin(s).count("1") for s in idx])
        return ups - 0.5 * self.n_sites

    def in_eigenbasis(self, component: str, site: int) -> np.ndarray:
        """W^dag S^component_site W, cached per model."""
        key = (component, site)
        if key not in self._eigenbasis_ops:
            W = self.states
            self._eigenbasis_ops[key] = W.conj().T @ spin_operator(self.n_sites, site, component) @ W
        return self._eigenbasis_ops[key]


def build_spin_hamiltonian(spec: SymmetricChainSpec) -> DenseSpinModel:
    """Dense H = sum_i J_i (S+_i S-_{i-1} + h.c.) + sum_i h_i (S^z_i + 1/2)."""
    L = spec.n_sites
    if L > MAX_SITES:
        raise ValidationError(f"dense ED limited to {MAX_SITES} sites, got {L}")
    dim = 1 << L
    H = np.zeros((dim, dim))
    idx = np.arange(dim)
    for l in range(L):
        H[idx, idx] += spec.fields[l] * ((idx >> l) & 1)
    for i in range(1, L):
        J = spec.couplings[i - 1]
        differ = ((idx >> i) & 1) != ((idx >> (i - 1)) & 1)
        src = idx[differ]
        H[src ^ (0b11 << (i - 1)), src] += J
    energies, states = np.linalg.eigh(H)
    return DenseSpinModel(L, H, energies, states)


def spin_operator(n_sites: int, site: int, component: str) -> np.ndarray:
    """Dense matrix of S^component at ``site`` ('x', 'y', 'z', '+', '-')."""
    if not 0 <= site < n_sites:
        raise ValidationError(f"site {site} outside 0..{n_sites - 1}", index=site)
    dim = 1 << n_sites
    idx = np.arange(dim)
    up = (idx >> site) & 1
    if component == "z":
        return np.diag(up - 0.5)
    plus = np.zeros((dim, dim))
    down = idx[up == 0]
    plus[down | (1 << site), down] = 1.0
    if component == "+":
        return plus
    if component == "-":
        return plus.T.copy()
    if component == "x":
        return 0.5 * (plus + plus.T)
    if component == "y":
        return -0.5j * (plus - plus.T)
    raise ValidationError(f"unknown spin component {component!r}")


def thermal_weights(energies: np.ndarray, beta: float) -> np.ndarray:
    """Boltzmann weights; at beta = inf an equal mixture of the ground manifold."""
    E = np.asarray(energies)
    shifted = E - E.min()
    if math.isinf(beta):
        spread = shifted.max()
        w = (shifted <= GROUND_RTOL * spread).astype(float)
    else:
        w = np.exp(-beta * shifted)
    return w / w.sum()


def ed_correlation(
    model: DenseSpinModel,
    op_a: tuple[str, int] | np.ndarray,
    op_b: tuple[str, int] | np.ndarray,
    beta: float,
    times: Sequence[float],
) -> CorrelationSeries:
    """<A(t) B> = Z^-1 sum_{n,m} e^{-beta E_n} e^{i(E_n - E_m)t} <n|A|m><m|B|n>."""
    label = "ed"
    sites: tuple[int, ...] = ()
    W = model.states
    mats = []
    for op in (op_a, op_b):
        if isinstance(op, tuple):
            comp, site = op
            mats.append(model.in_eigenbasis(comp, site))
            sites += (site,)
        else:
            mats.append(W.conj().T @ np.asarray(op) @ W)
    if isinstance(op_a, tuple) and isinstance(op_b, tuple):
        label = op_a[0] + op_b[0]
    A, B = mats
    rho = thermal_weights(model.energies, beta)
    t = np.asarray(times, dtype=float).reshape(-1)
    E = model.energies
    keep = np.flatnonzero(rho > 0)
    # P_nm = <n|A|m><m|B|n>, only rows with nonzero thermal weight
    P = A[keep] * B[:, keep].T
    left = rho[keep, None] * np.exp(1j * np.outer(E[keep], t))
    right = np.exp(-1j * np.outer(E, t))
    values = np.einsum("nt,nt->t", left, P @ right) if t.size else np.empty(0, dtype=complex)
    if math.isinf(beta):
        T = 0.0
    else:
        T = math.inf if beta == 0 else 1.0 / beta
    return CorrelationSeries(label, sites, T, t, values)


def subset_sums(energies: Sequence[float]) -> np.ndarray:
    """All 2^L sums of subsets of single-particle energies, sorted."""
    sums = np.zeros(1)
    for e in energies:
        sums = np.concatenate([sums, sums + e])
    return np.sort(sums)


def sector_spectrum(model: DenseSpinModel, n_up: int) -> np.ndarray:
    """Eigenvalues of H restricted to states with ``n_up`` up spins."""
    idx = np.arange(model.dimension)
    mask = np.array([bin(s).count("1") == n_up for s in idx])
    block = model.hamiltonian[np.ix_(mask, mask)]
    return np.linalg.eigvalsh(block)
