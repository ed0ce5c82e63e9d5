"""Reconstruct a mirror-symmetric chain from its single-particle spectrum.

For a persymmetric Jacobi matrix the squared first components of the
eigenvectors are fixed by the eigenvalues alone,

    q_nu**2  ~  1 / prod_{mu != nu} |eps_nu - eps_mu|,

so running Lanczos on diag(eps) from the start vector q reproduces the
tridiagonal entries (h_0..h_N on the diagonal, J_1..J_N off it). A simulated
annealing fit of the couplings is provided as an independent route.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .jacobi_core import SymmetricChainSpec, eigenvalues_only
from .mirror_design import SpectrumSpec, cosine_distorted_spectrum, default_cosine_amplitude

log = logging.getLogger(__name__)

DEGENERACY_RTOL = 1e-10
ASYMMETRY_RTOL = 1e-6
ADAPT_EVERY = 5


@dataclass(frozen=True)
class ReconstructionReport:
    chain: SymmetricChainSpec
    spectral_residual: float
    method: str
    iterations: int
    converged: bool = True
    asymmetry: float = 0.0

    def to_dict(self) -> dict:
        return {
            "chain": self.chain.to_dict(),
            "spectral_residual": float(self.spectral_residual),
            "method": self.method,
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _target_energies(spectrum: SpectrumSpec | Sequence[float]) -> np.ndarray:
    eps = spectrum.energies if isinstance(spectrum, SpectrumSpec) else np.asarray(spectrum, dtype=float)
    eps = np.asarray(eps, dtype=float).reshape(-1)
    if eps.size < 2:
        raise ValidationError(f"need at least 2 levels, got {eps.size}")
    gaps = np.diff(eps)
    if np.any(gaps <= 0):
        raise ValidationError("energies must be strictly ascending", index=int(np.argmin(gaps)) + 1)
    spread = eps[-1] - eps[0]
    if gaps.min() < DEGENERACY_RTOL * spread:
        raise ValidationError(
            f"levels {int(np.argmin(gaps))} and {int(np.argmin(gaps)) + 1} are nearly degenerate "
            f"(gap {gaps.min():.3g}, spread {spread:.3g})",
            index=int(np.argmin(gaps)) + 1,
        )
    return eps


def spectral_weights(energies: Sequence[float]) -> np.ndarray:
    """Squared first eigenvector components of the persymmetric Jacobi matrix with this spectrum."""
    eps = np.asarray(energies, dtype=float)
    diff = np.abs(eps[:, None] - eps[None, :])
    np.fill_diagonal(diff, 1.0)
    logw = -np.log(diff).sum(axis=1)
    w = np.exp(logw - logw.max())
    return w / w.sum()


def lanczos_tridiagonal(eigenvalues: np.ndarray, start: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lanczos on diag(eigenvalues) with full (twice) re-orthogonalization.

    Returns the diagonal and the off-diagonal of the resulting Jacobi matrix.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    n = lam.size
    Q = np.zeros((n, n))
    Q[:, 0] = start / np.linalg.norm(start)
    alpha = np.zeros(n)
    beta = np.zeros(n - 1)
    for k in range(n):
        v = lam * Q[:, k]
        alpha[k] = Q[:, k] @ v
        if k == n - 1:
            break
        v -= alpha[k] * Q[:, k]
        if k > 0:
            v -= beta[k - 1] * Q[:, k - 1]
        basis = Q[:, : k + 1]
        for _ in range(2):
            v -= basis @ (basis.T @ v)
        beta[k] = np.linalg.norm(v)
        if not beta[k] > 0:
            raise RuntimeError(f"Lanczos broke down at step {k} (beta={beta[k]!r})")
        Q[:, k + 1] = v / beta[k]
    return alpha, beta


def _symmetrize(diag: np.ndarray, off: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    scale = max(np.abs(off).max(), np.abs(diag).max())
    asym = max(np.abs(diag - diag[::-1]).max(), np.abs(off - off[::-1]).max()) / scale
    return 0.5 * (diag + diag[::-1]), 0.5 * (off + off[::-1]), float(asym)


def reconstruct_direct(spectrum: SpectrumSpec | Sequence[float]) -> ReconstructionReport:
    """Unique positive-coupling mirror-symmetric chain with the given spectrum."""
    eps = _target_energies(spectrum)
    q = np.sqrt(spectral_weights(eps))
    diag, off = lanczos_tridiagonal(eps, q)
    if np.any(off <= 0):
        raise RuntimeError("Lanczos produced a nonpositive coupling")
    h, J, asym = _symmetrize(diag, off)
    if asym > ASYMMETRY_RTOL:
        warnings.warn(
            f"reconstructed chain was asymmetric by {asym:.3g} (relative) before averaging",
            RuntimeWarning,
            stacklevel=2,
        )
    chain = SymmetricChainSpec(J, h)
    achieved = eigenvalues_only(chain.fields, chain.couplings)
    residual = float(np.abs(achieved - eps).max())
    return ReconstructionReport(chain, residual, "direct", eps.size, True, asym)


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling schedule.

    ``t0=None`` starts at a tenth of the squared mean level spacing. Hotter
    starts melt the homogeneous initial guess and tend to freeze into
    spurious minima with staggered fields.
    """

    t0: float | None = None
    cooling: float = 0.995
    sweeps: int = 6000
    seed: int = 0

    def __post_init__(self):
        if self.t0 is not None and not self.t0 > 0:
            raise ValidationError(f"initial temperature must be positive, got {self.t0!r}")
        if not 0 < self.cooling < 1:
            raise ValidationError(f"cooling factor must lie in (0, 1), got {self.cooling!r}")
        if self.sweeps < 1:
            raise ValidationError(f"sweep budget must be positive, got {self.sweeps!r}")

    def to_dict(self) -> dict:
        return {"t0": self.t0, "cooling": self.cooling, "sweeps": self.sweeps, "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "AnnealSchedule":
        return cls(**{k: data[k] for k in ("t0", "cooling", "sweeps", "seed") if k in data})


@dataclass
class _MirrorParams:
    """Independent parameters of a mirror-symmetric chain, left half only."""

    n_sites: int
    j_index: np.ndarray = field(init=False)
    h_index: np.ndarray = field(init=False)

    def __post_init__(self):
        N = self.n_sites - 1
        self.j_index = np.minimum(np.arange(N), N - 1 - np.arange(N))
        self.h_index = np.minimum(np.arange(N + 1), N - np.arange(N + 1))

    @property
    def n_j(self) -> int:
        return int(self.j_index.max()) + 1

    def expand(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        J = x[: self.n_j][self.j_index]
        h = x[self.n_j :][self.h_index]
        return J, h


def reconstruct_annealing(
    spectrum: SpectrumSpec | Sequence[float],
    seed: int | None = None,
    schedule: AnnealSchedule | None = None,
    tol: float = 1e-6,
    restarts: int = 3,
) -> ReconstructionReport:
    """Fit a mirror-symmetric chain to ``spectrum`` by simulated annealing.

    Minimizes sum_nu (eps_nu(J, h) - target_nu)**2 with Metropolis moves on one
    symmetric coupling or field pair at a time, starting from the homogeneous
    chain that matches the spectral spread. Each parameter keeps its own
    proposal width, rescaled every few sweeps toward a 40-60 % acceptance
    rate, so the widths shrink along with the temperature. The best state
    visited is returned; ``converged`` is False when its worst level error
    exceeds ``tol``.

    Up to ``restarts`` independent anneals are run (seeds spawned from
    ``seed``) until one converges; the best one is reported.
    """
    target = _target_energies(spectrum)
    schedule = schedule or AnnealSchedule()
    root = np.random.SeedSequence(schedule.seed if seed is None else seed)
    best = None
    total = 0
    for child in root.spawn(max(1, restarts)):
        x, residual, evaluations = _anneal(target, schedule, np.random.default_rng(child))
        total += evaluations
        if best is None or residual < best[1]:
            best = (x, residual)
        if residual < tol:
            break
        log.info("anneal ended at residual %.3g, restarting", residual)
    params = _MirrorParams(target.size)
    J, h = params.expand(best[0])
    chain = SymmetricChainSpec(J, h)
    residual = float(np.abs(eigenvalues_only(chain.fields, chain.couplings) - target).max())
    return ReconstructionReport(chain, residual, "annealing", total, residual < tol)


def _anneal(target: np.ndarray, schedule: AnnealSchedule, rng: np.random.Generator) -> tuple[np.ndarray, float, int]:
    n = target.size
    N = n - 1
    params = _MirrorParams(n)
    n_j = params.n_j
    spread = float(target[-1] - target[0])
    spacing = spread / N

    J0 = spread / (4.0 * math.cos(math.pi / (N + 2)))
    n_h = int(params.h_index.max()) + 1
    x = np.concatenate([np.full(n_j, J0), np.full(n_h, target.mean())])

    def cost(vec: np.ndarray) -> float:
        J, h = params.expand(vec)
        d = eigenvalues_only(h, J) - target
        return float(d @ d)

    T0 = schedule.t0 if schedule.t0 is not None else 0.1 * spacing**2
    width = np.full(x.size, 0.1 * spacing)
    accepted = np.zeros(x.size)
    c = cost(x)
    best_x, best_c = x.copy(), c
    evaluations = 0
    for sweep in range(schedule.sweeps):
        T = T0 * schedule.cooling**sweep
        for k in rng.permutation(x.size):
            trial = x.copy()
            trial[k] += width[k] * rng.standard_normal()
            if k < n_j and trial[k] <= 0:
                continue
            ct = cost(trial)
            evaluations += 1
            if ct <= c or rng.random() < math.exp(-(ct - c) / T):
                x, c = trial, ct
                accepted[k] += 1
                if c < best_c:
                    best_x, best_c = x.copy(), c
        if sweep % ADAPT_EVERY == ADAPT_EVERY - 1:
            rate = accepted / ADAPT_EVERY
            width *= np.where(
                rate > 0.6, 1.0 + 2.0 * (rate - 0.6) / 0.4,
                np.where(rate < 0.4, 1.0 / (1.0 + 2.0 * (0.4 - rate) / 0.4), 1.0),
            )
            accepted[:] = 0

    J, h = params.expand(best_x)
    residual = float(np.abs(eigenvalues_only(h, J) - target).max())
    return best_x, residual, evaluations


def coupling_variation(chain: SymmetricChainSpec) -> tuple[float, float, float]:
    """(min J, max J, (max - min)/(max + min)); the last is the +/- fraction."""
    J = chain.couplings
    lo, hi = float(J.min()), float(J.max())
    return lo, hi, (hi - lo) / (hi + lo)


def tune_cosine_amplitude(
    n_levels: int,
    window: tuple[float, float] = (0.9, 1.2),
    samples: int = 301,
) -> tuple[SpectrumSpec, ReconstructionReport]:
    """Scan the cosine amplitude around its default and keep the most homogeneous chain.

    Rounding makes the coupling variation a jagged function of the amplitude;
    a 1-D scan over ``window`` (fractions of the default amplitude) picks the
    distorted-cosine spectrum whose reconstructed couplings vary least.
    """
    base = default_cosine_amplitude(n_levels)
    best = None
    seen = set()
    for A in np.linspace(window[0] * base, window[1] * base, samples):
        try:
            spec = cosine_distorted_spectrum(n_levels, A)
        except ValidationError:
            continue
        key = tuple(spec.energies)
        if key in seen:
            continue
        seen.add(key)
        report = reconstruct_direct(spec)
        var = coupling_variation(report.chain)[2]
        if best is None or var < best[0]:
            best = (var, spec, report)
    if best is None:
        raise ValidationError(f"no valid cosine spectrum for {n_levels} levels in the amplitude window")
    return best[1], best[2]
