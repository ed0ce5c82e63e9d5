"""x-spin correlations through Pfaffians of Majorana contractions.

With A_l = c_l^dag + c_l and B_l = c_l^dag - c_l one has A_l B_l = 1 - 2 n_l,
so the Jordan-Wigner string gives

    S_k^x = 1/2 A_0 B_0 A_1 B_1 ... A_{k-1} B_{k-1} A_k.

A product of such linear operators in a Gaussian state is the Pfaffian of
the antisymmetric matrix of pair contractions <O_a O_b> (a < b).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import ThermalState, _check_site
from .errors import ValidationError
from .jacobi_core import EigenSystem
from .series import CorrelationSeries

ANTISYMMETRY_TOL = 1e-12


def pfaffian(matrix: np.ndarray, check: bool = False) -> complex:
    """Pfaffian of a skew-symmetric matrix by Parlett-Reid elimination with pivoting.

    The matrix is reduced to tridiagonal skew form by Gauss transformations;
    each row/column swap flips the sign. With ``check=True`` the result is
    compared against sqrt(det) (Pf^2 = det) and a mismatch raises.
    """
    A = np.array(matrix, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n % 2:
        raise ValidationError(f"Pfaffian needs even dimension, got {n}")
    if n == 0:
        return 1.0 + 0.0j
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A + A.T).max() > ANTISYMMETRY_TOL * scale:
        raise ValidationError("matrix is not antisymmetric")
    original = A.copy() if check else None

    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1 :, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0:
            pf = 0.0j
            break
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2 :] / A[k, k + 1]
            col = A[k + 2 :, k + 1].copy()
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)

    if check:
        det = np.linalg.det(original)
        if abs(pf * pf - det) > 1e-8 * max(abs(det), abs(pf) ** 2, 1e-300):
            raise ArithmeticError(f"Pf^2 = {pf * pf!r} disagrees with det = {det!r}")
    return complex(pf)


@dataclass(frozen=True)
class MajoranaContraction:
    """Antisymmetric matrix of contractions for an ordered operator list.

    ``labels`` records each operator as (kind, site, time) with kind "A" or "B".
    """

    antisym: np.ndarray
    labels: tuple[tuple[str, int, float], ...]

    def pfaffian(self, check: bool = False) -> complex:
        return pfaffian(self.antisym, check=check)


def string_operator_labels(site: int, time: float) -> list[tuple[str, int, float]]:
    """Majorana factors of 2 S_site^x in order: A_0 B_0 ... A_{site-1} B_{site-1} A_site."""
    labels = []
    for l in range(site):
        labels.append(("A", l, time))
        labels.append(("B", l, time))
    labels.append(("A", site, time))
    return labels


def majorana_contraction(
    eig: EigenSystem,
    state: ThermalState,
    labels: Sequence[tuple[str, int, float]],
) -> MajoranaContraction:
    """Contraction matrix K_ab = <O_a O_b> (a < b), K_ba = -K_ab, zero diagonal.

    Each operator is linear, O = sum_m (a_m c_m^dag + b_m c_m), hence
    <O O'> = a . F . b' + b . (1 - F) . a'.
    """
    V = eig.eigenvectors
    eps = eig.eigenvalues
    F = state.density_matrix(eig)
    G = np.eye(eig.n_sites) - F
    n_ops = len(labels)
    a = np.empty((n_ops, eig.n_sites), dtype=complex)
    b = np.empty((n_ops, eig.n_sites), dtype=complex)
    cache: dict[float, np.ndarray] = {}
    for r, (kind, site, t) in enumerate(labels):
        if t not in cache:
            cache[t] = (V * np.exp(-1j * eps * t)) @ V.T
        row = cache[t][site]
        a[r] = row.conj()
        b[r] = row if kind == "A" else -row
    M = a @ F @ b.T + b @ G @ a.T
    K = np.triu(M, 1)
    K = K - K.T
    return MajoranaContraction(K, tuple(labels))


def _xx_value(eig: EigenSystem, state: ThermalState, j: int, k: int, t: float, check: bool) -> complex:
    labels = string_operator_labels(j, t) + string_operator_labels(k, 0.0)
    return 0.25 * majorana_contraction(eig, state, labels).pfaffian(check=check)


def xx_cross_correlation(
    eig: EigenSystem,
    state: ThermalState,
    j: int,
    k: int,
    times: Sequence[float],
    check: bool = False,
) -> CorrelationSeries:
    """<S_j^x(t) S_k^x(0)>; cost O((2j + 2k + 2)^3) per time point."""
    n = eig.n_sites
    j, k = _check_site(j, n), _check_site(k, n)
    t = np.asarray(times, dtype=float).reshape(-1)
    values = np.array([_xx_value(eig, state, j, k, float(s), check) for s in t], dtype=complex)
    return CorrelationSeries("xx", (j, k), state.temperature, t, values)


def xx_correlation(
    eig: EigenSystem,
    state: ThermalState,
    site: int,
    times: Sequence[float],
    check: bool = False,
) -> CorrelationSeries:
    """Autocorrelation <S_k^x(t) S_k^x(0)>."""
    return xx_cross_correlation(eig, state, site, site, times, check=check)
