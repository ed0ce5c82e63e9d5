"""Single-particle (Jacobi) matrix of an open XX chain.

The spin Hamiltonian

    H = 2 sum_i J_i (S^x_i S^x_{i-1} + S^y_i S^y_{i-1}) + sum_i h_i (S^z_i + 1/2)

maps under Jordan-Wigner onto free fermions hopping with amplitude J_i and
on-site energy h_i. All dynamics then follow from the symmetric tridiagonal
matrix with diagonal (h_0..h_N) and off-diagonal (J_1..J_N), which this
module builds and diagonalizes (implicit-shift QL, no dense Hamiltonian).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, ValidationError

SYMMETRY_RTOL = 1e-12
WEAK_COUPLING_RTOL = 1e-8
ZERO_COMPONENT_RTOL = 1e-12


@dataclass(frozen=True)
class SymmetricChainSpec:
    """Mirror-symmetric (N+1)-site chain.

    Attributes
    ----------
    couplings : ndarray, shape (N,)
        Exchange constants J_1..J_N, all strictly positive.
    fields : ndarray, shape (N+1,)
        Local fields h_0..h_N.
    """

    couplings: np.ndarray
    fields: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.couplings, dtype=float).reshape(-1)
        h = np.asarray(self.fields, dtype=float).reshape(-1)
        if h.size < 2:
            raise ValidationError(f"a chain needs at least 2 sites, got {h.size}")
        if J.size != h.size - 1:
            raise ValidationError(
                f"{h.size} fields require {h.size - 1} couplings, got {J.size}"
            )
        if not (np.all(np.isfinite(J)) and np.all(np.isfinite(h))):
            raise ValidationError("couplings and fields must be finite")
        bad = np.flatnonzero(J <= 0)
        if bad.size:
            i = int(bad[0]) + 1
            raise ValidationError(f"coupling J_{i} = {J[i - 1]!r} is not positive", index=i)
        if J.min() < WEAK_COUPLING_RTOL * J.max():
            warnings.warn(
                f"coupling J_{int(J.argmin()) + 1} is below {WEAK_COUPLING_RTOL:g} of the largest coupling",
                RuntimeWarning,
                stacklevel=3,
            )
        scale = max(J.max(), np.abs(h).max())
        asym = max(np.abs(J - J[::-1]).max(), np.abs(h - h[::-1]).max())
        if asym > SYMMETRY_RTOL * scale:
            raise ValidationError(f"chain is not mirror symmetric (max asymmetry {asym:.3g})")
        J.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "fields", h)

    @property
    def n_sites(self) -> int:
        return self.fields.size

    @classmethod
    def homogeneous(cls, n_sites: int, coupling: float = 1.0, field: float = 0.0) -> "SymmetricChainSpec":
        return cls(np.full(n_sites - 1, float(coupling)), np.full(n_sites, float(field)))

    @classmethod
    def from_halves(cls, couplings_half: Sequence[float], fields_half: Sequence[float], n_sites: int) -> "SymmetricChainSpec":
        """Mirror the left half of a chain onto the right half.

        ``couplings_half`` needs ceil(N/2) entries and ``fields_half`` needs
        ceil((N+1)/2) entries, both listed from the left end.
        """
        N = n_sites - 1
        jh = np.asarray(couplings_half, dtype=float)
        hh = np.asarray(fields_half, dtype=float)
        J = np.empty(N)
        h = np.empty(N + 1)
        for i in range(N):
            J[i] = jh[min(i, N - 1 - i)]
        for i in range(N + 1):
            h[i] = hh[min(i, N - i)]
        return cls(J, h)

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "couplings": [float(x) for x in self.couplings],
            "fields": [float(x) for x in self.fields],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SymmetricChainSpec":
        spec = cls(data["couplings"], data["fields"])
        if "n_sites" in data and int(data["n_sites"]) != spec.n_sites:
            raise ValidationError(
                f"n_sites={data['n_sites']} disagrees with {spec.n_sites} fields"
            )
        return spec

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SymmetricChainSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TridiagonalMatrix:
    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float).reshape(-1)
        e = np.asarray(self.offdiagonal, dtype=float).reshape(-1)
        if e.size != d.size - 1:
            raise ValidationError(f"off-diagonal length {e.size} does not match size {d.size}")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "offdiagonal", e)

    @property
    def size(self) -> int:
        return self.diagonal.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of H1."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    iterations: int = field(default=0, compare=False)

    @property
    def n_sites(self) -> int:
        return self.eigenvalues.size

    def orthonormality_error(self) -> float:
        V = self.eigenvectors
        return float(np.abs(V.T @ V - np.eye(V.shape[1])).max())

    def reassemble(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def build_single_particle_matrix(spec: SymmetricChainSpec) -> TridiagonalMatrix:
    J = np.asarray(spec.couplings, dtype=float)
    bad = np.flatnonzero(J <= 0)
    if bad.size:
        i = int(bad[0]) + 1
        raise ValidationError(f"coupling J_{i} is not positive", index=i)
    return TridiagonalMatrix(np.array(spec.fields, dtype=float), J.copy())


def _fix_signs(V: np.ndarray) -> None:
    for col in range(V.shape[1]):
        v = V[:, col]
        thresh = ZERO_COMPONENT_RTOL * np.abs(v).max()
        first = np.flatnonzero(np.abs(v) > thresh)[0]
        if v[first] < 0:
            V[:, col] = -v


def diagonalize(matrix: TridiagonalMatrix | SymmetricChainSpec, max_iter: int = 60) -> EigenSystem:
    """Diagonalize a symmetric tridiagonal matrix by implicit-shift QL.

    Givens rotations are accumulated into the eigenvector matrix, so the
    result is orthonormal to machine precision. Eigenvalues are returned in
    ascending order with each eigenvector's first nonzero entry positive.

    Raises
    ------
    ConvergenceError
        If an eigenvalue needs more than ``max_iter`` QL sweeps.
    """
    if isinstance(matrix, SymmetricChainSpec):
        matrix = build_single_particle_matrix(matrix)
    n = matrix.size
    d = matrix.diagonal.astype(float).copy()
    e = np.zeros(n)
    e[: n - 1] = matrix.offdiagonal
    # rows of Z^T are the eigenvectors; row access is contiguous
    Zt = np.eye(n)
    eps = np.finfo(float).eps
    total = 0

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            total += 1
            if it > max_iter:
                raise ConvergenceError(
                    f"QL failed to converge for eigenvalue {l} after {it - 1} iterations", total
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi1 = Zt[i + 1].copy()
                Zt[i + 1] = s * Zt[i] + c * zi1
                Zt[i] = c * Zt[i] - s * zi1
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    order = np.argsort(d, kind="stable")
    V = np.ascontiguousarray(Zt[order].T)
    _fix_signs(V)
    return EigenSystem(d[order], V, iterations=total)


@dataclass(frozen=True)
class SignChangeReport:
    """Sign changes per eigenvector (ascending eigenvalue order).

    With positive couplings the top eigenvector is nodeless, so the
    eigenvector of the j-th largest eigenvalue has exactly j sign changes,
    i.e. ascending column nu has N - nu of them.
    """

    counts: list[int]
    skipped: list[tuple[int, int]]

    @property
    def expected(self) -> list[int]:
        N = len(self.counts) - 1
        return [N - nu for nu in range(N + 1)]

    @property
    def passed(self) -> bool:
        return self.counts == self.expected


def count_sign_changes(vector: np.ndarray, rtol: float = ZERO_COMPONENT_RTOL) -> tuple[int, list[int]]:
    """Sign changes along ``vector``, bridging over numerically zero entries."""
    v = np.asarray(vector, dtype=float)
    thresh = rtol * np.abs(v).max()
    zero = np.abs(v) <= thresh
    signs = np.sign(v[~zero])
    return int(np.count_nonzero(signs[1:] != signs[:-1])), np.flatnonzero(zero).tolist()


def check_sign_changes(eig: EigenSystem) -> SignChangeReport:
    counts, skipped = [], []
    for nu in range(eig.n_sites):
        c, zeros = count_sign_changes(eig.eigenvectors[:, nu])
        counts.append(c)
        skipped.extend((nu, i) for i in zeros)
    return SignChangeReport(counts, skipped)


def parity_signs(n_sites: int) -> np.ndarray:
    """Parity (+1 even, -1 odd) of each ascending eigenvector: (-1)^(N - nu)."""
    N = n_sites - 1
    return (-1.0) ** (N - np.arange(n_sites))


def check_parity(eig: EigenSystem) -> float:
    """Largest violation of x_i = p_nu x_{N-i} over all eigenvectors."""
    V = eig.eigenvectors
    return float(np.abs(V - parity_signs(eig.n_sites) * V[::-1]).max())


def eigenvalues_only(diagonal: np.ndarray, offdiagonal: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a symmetric tridiagonal matrix (LAPACK dsterf).

    Used in inner loops (annealing, verification) where eigenvectors are not
    needed and call overhead dominates.
    """
    from scipy.linalg.lapack import dsterf

    w, info = dsterf(diagonal, offdiagonal)
    if info != 0:
        raise ConvergenceError(f"dsterf failed with info={info}", info)
    return w
