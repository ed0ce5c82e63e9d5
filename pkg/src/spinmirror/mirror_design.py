"""Single-particle spectra that turn a mirror-symmetric chain into a state mirror.

A mirror-symmetric chain reflects every single-particle state at time tau
(up to one global phase) iff

    eps_nu * tau = (2 n(nu) + nu) pi + phi0

for some integers n(nu); equivalently, every consecutive gap
(eps_{nu+1} - eps_nu) tau / pi is an odd integer. Because the fermions do
not interact, the whole many-body state is then mirrored as well.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

DEFAULT_TOL = 1e-9


def _reduce_phase(phi: float) -> float:
    """Map an angle onto (-pi, pi]."""
    r = math.remainder(phi, 2 * math.pi)
    # rounding can leave an exact odd multiple of pi just above -pi
    if r <= -math.pi + 1e-12 * max(1.0, abs(phi)):
        r += 2 * math.pi
    return r


def _ascending(energies: Sequence[float]) -> np.ndarray:
    eps = np.asarray(energies, dtype=float).reshape(-1)
    if eps.size < 2:
        raise ValidationError(f"need at least 2 levels, got {eps.size}")
    if not np.all(np.isfinite(eps)):
        raise ValidationError("energies must be finite")
    bad = np.flatnonzero(np.diff(eps) <= 0)
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"energies must be strictly ascending: eps[{i}]={eps[i]!r} >= eps[{i + 1}]={eps[i + 1]!r}",
            index=i + 1,
        )
    return eps


@dataclass(frozen=True)
class MirrorCertificate:
    valid: bool
    tau: float
    phi0: float
    residuals: np.ndarray
    worst_residual: float
    n_assign: np.ndarray
    tol: float

    def summary(self) -> str:
        verdict = "valid" if self.valid else "INVALID"
        return (
            f"certificate: {verdict}, tau={_fmt_pi(self.tau)}, phi0={_fmt_pi(self.phi0)}, "
            f"worst residual={self.worst_residual:.3g}"
        )

    def to_dict(self) -> dict:
        return {
            "valid": bool(self.valid),
            "tau": float(self.tau),
            "phi0": float(self.phi0),
            "residuals": [float(r) for r in self.residuals],
            "worst_residual": float(self.worst_residual),
            "n_assign": [int(n) for n in self.n_assign],
            "tol": float(self.tol),
        }


def _fmt_pi(x: float) -> str:
    ratio = x / math.pi
    if abs(ratio - round(ratio)) < 1e-12:
        k = int(round(ratio))
        return {0: "0", 1: "pi", -1: "-pi"}.get(k, f"{k}*pi")
    return f"{ratio:.12g}*pi"


def certify_spectrum(energies: Sequence[float], tau: float, tol: float = DEFAULT_TOL) -> MirrorCertificate:
    """Check the perfect-mirror condition for ``energies`` at mirror time ``tau``.

    phi0 is eps_0 * tau reduced to (-pi, pi]. For each level the residual is
    the distance of (eps_nu tau - phi0)/pi - nu from the nearest even integer.
    """
    eps = _ascending(energies)
    if not (tau > 0 and math.isfinite(tau)):
        raise ValidationError(f"tau must be positive, got {tau!r}")
    phi0 = _reduce_phase(eps[0] * tau)
    x = (eps * tau - phi0) / math.pi - np.arange(eps.size)
    n_assign = np.rint(x / 2.0)
    residuals = np.abs(x - 2.0 * n_assign)
    worst = float(residuals.max())
    return MirrorCertificate(
        valid=worst < tol,
        tau=float(tau),
        phi0=phi0,
        residuals=residuals,
        worst_residual=worst,
        n_assign=n_assign.astype(int),
        tol=tol,
    )


def gap_criterion(energies: Sequence[float], tau: float, tol: float = DEFAULT_TOL) -> bool:
    """Every consecutive gap times tau/pi is an odd integer within ``tol``."""
    eps = _ascending(energies)
    g = np.diff(eps) * tau / math.pi
    odd = 2.0 * np.floor(g / 2.0) + 1.0
    return bool(np.all(np.abs(g - odd) < tol))


@dataclass(frozen=True)
class SpectrumSpec:
    """Target single-particle spectrum with its mirror time and phase bookkeeping."""

    energies: np.ndarray
    tau: float
    phi0: float
    n_assign: np.ndarray

    def __post_init__(self):
        eps = _ascending(self.energies)
        n = np.asarray(self.n_assign).reshape(-1)
        if n.size != eps.size:
            raise ValidationError(f"n_assign has {n.size} entries for {eps.size} levels")
        object.__setattr__(self, "energies", eps)
        object.__setattr__(self, "n_assign", n.astype(int))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "phi0", float(self.phi0))

    @property
    def n_levels(self) -> int:
        return self.energies.size

    def condition_residual(self) -> float:
        """Worst |eps tau - (2n + nu) pi - phi0| / pi using the stored n and phi0."""
        nu = np.arange(self.n_levels)
        lhs = self.energies * self.tau
        rhs = (2 * self.n_assign + nu) * math.pi + self.phi0
        return float(np.abs(lhs - rhs).max() / math.pi)

    def certify(self, tol: float = DEFAULT_TOL) -> MirrorCertificate:
        return certify_spectrum(self.energies, self.tau, tol)

    @classmethod
    def from_energies(cls, energies: Sequence[float], tau: float = math.pi) -> "SpectrumSpec":
        """Wrap bare energies, taking phi0 and n(nu) from the certificate convention."""
        cert = certify_spectrum(energies, tau, tol=math.inf)
        return cls(np.asarray(energies, dtype=float), tau, cert.phi0, cert.n_assign)

    def to_dict(self) -> dict:
        return {
            "energies": [float(e) for e in self.energies],
            "tau": float(self.tau),
            "phi0": float(self.phi0),
            "n_assign": [int(n) for n in self.n_assign],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectrumSpec":
        if "n_assign" not in data or "phi0" not in data:
            return cls.from_energies(data["energies"], data.get("tau", math.pi))
        return cls(data["energies"], data["tau"], data["phi0"], data["n_assign"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SpectrumSpec":
        return cls.from_dict(json.loads(text))


def linear_spectrum(n_levels: int, omega0: float, omega: float) -> SpectrumSpec:
    """eps_nu = omega0 + nu*omega, mirrored at tau = pi/omega with n(nu) = 0."""
    if n_levels < 2:
        raise ValidationError(f"n_levels must be >= 2, got {n_levels}")
    if not omega > 0:
        raise ValidationError(f"omega must be positive, got {omega!r}")
    nu = np.arange(n_levels)
    return SpectrumSpec(
        energies=omega0 + nu * omega,
        tau=math.pi / omega,
        phi0=math.pi * omega0 / omega,
        n_assign=np.zeros(n_levels, dtype=int),
    )


def quadratic_spectrum(n_levels: int, omega0: float, omega: float, p: int, q: int) -> SpectrumSpec:
    """eps_nu = omega0 + nu (nu + 1 + (2p+1)/q) omega, mirrored at tau = q pi/omega.

    The integer assignment is n(nu) = q nu (nu+1)/2 + p nu.
    """
    if n_levels < 2:
        raise ValidationError(f"n_levels must be >= 2, got {n_levels}")
    if not omega > 0:
        raise ValidationError(f"omega must be positive, got {omega!r}")
    if int(p) != p or int(q) != q or p < 1 or q < 1:
        raise ValidationError(f"p and q must be positive integers, got p={p!r}, q={q!r}")
    p, q = int(p), int(q)
    nu = np.arange(n_levels)
    return SpectrumSpec(
        energies=omega0 + nu * (nu + 1 + (2 * p + 1) / q) * omega,
        tau=q * math.pi / omega,
        phi0=q * math.pi * omega0 / omega,
        n_assign=q * nu * (nu + 1) // 2 + p * nu,
    )


def default_cosine_amplitude(n_levels: int, lowest_gap: float = 3.0) -> float:
    """Cosine amplitude whose two lowest raw levels are ``lowest_gap`` apart.

    For small k the raw gap is A * (3/2) (pi/(N+2))**2, so holding the gap
    fixed makes A (and the couplings) grow like N**2 at constant tau = pi.
    The default gap 3 gives A ~ 207.5 for 31 levels.
    """
    N = n_levels - 1
    return 2.0 * lowest_gap * (N + 2) ** 2 / (3.0 * math.pi**2)


def _round_to_class(x: float, residue: int, offset: float) -> float:
    """Nearest y with y - offset an integer of parity ``residue``; ties to larger |y|."""
    z = x - offset
    k = math.floor(z)
    best = None
    for c in (k - 2, k - 1, k, k + 1, k + 2):
        if c % 2 != residue:
            continue
        y = c + offset
        key = (abs(y - x), -abs(y))
        if best is None or key < best[0]:
            best = (key, y)
    return best[1]


def cosine_distorted_spectrum(n_levels: int, amplitude: float | None = None) -> SpectrumSpec:
    """Mirror spectrum obtained by snapping the open-chain cosine band onto a lattice.

    Raw levels -A cos(pi (nu+1)/(N+2)) are rounded to the nearest value of the
    parity class that makes all consecutive gaps odd (integers for an odd
    number of levels, half-integers for an even number) while keeping the
    spectrum antisymmetric, so the reconstructed chain needs no fields.
    Collisions are repaired by pushing the outer level outward by 2.
    The mirror time is always pi.
    """
    if n_levels < 2:
        raise ValidationError(f"n_levels must be >= 2, got {n_levels}")
    A = default_cosine_amplitude(n_levels) if amplitude is None else float(amplitude)
    if not A > 0:
        raise ValidationError(f"amplitude must be positive, got {amplitude!r}")
    N = n_levels - 1
    nu = np.arange(n_levels)
    raw = -A * np.cos(np.pi * (nu + 1) / (N + 2))
    upper = nu[nu > N / 2]  # strictly positive half
    if n_levels % 2:
        offset = 0.0
        # centre level (nu = N/2) must be even so it can sit at 0
        shifts = [(N // 2) % 2]
    else:
        offset = 0.5
        shifts = [0, 1]

    best = None
    for s in shifts:
        levels = {int(v): _round_to_class(raw[v], (v + s) % 2, offset) for v in upper}
        if n_levels % 2:
            levels[N // 2] = 0.0
        distortion = sum(abs(levels[v] - raw[v]) for v in upper)
        if best is None or distortion < best[0]:
            best = (distortion, levels)
    levels = best[1]

    # positive half must stay positive and strictly increasing
    floor = 0.0 if n_levels % 2 else None
    prev = floor
    moved = set()
    for v in upper:
        y = levels[int(v)]
        if y <= 0:
            y += 2.0 * math.ceil((1e-12 - y) / 2.0)
        if prev is not None and y <= prev:
            if int(v) - 1 in moved:
                raise ValidationError(
                    f"rounded cosine levels collide repeatedly at amplitude {A:g}; use a larger amplitude"
                )
            while y <= prev:
                y += 2.0
            moved.add(int(v))
        levels[int(v)] = y
        prev = y

    eps = np.empty(n_levels)
    for v in upper:
        eps[v] = levels[int(v)]
        eps[N - v] = -levels[int(v)]
    if n_levels % 2:
        eps[N // 2] = 0.0
    spec = SpectrumSpec.from_energies(eps, math.pi)
    if not spec.certify().valid:  # guards the parity bookkeeping above
        raise AssertionError("cosine construction produced a non-mirror spectrum")
    return spec
