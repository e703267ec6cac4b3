"""Weight-vector and Laplacian algebra shared by every estimator.

A graph on p nodes is represented by a vector ``w`` of length p(p-1)/2
holding nonnegative edge weights in row-major pair order over (i, j),
i < j: (0,1), (0,2), ..., (0,p-1), (1,2), ...  This ordering is fixed
package-wide; ``pair_indices`` is the single source of truth for it.

The combinatorial Laplacian of a weight vector is L = D - W with
D = Diag(W 1).  L is symmetric positive semidefinite, has zero row sums,
non-positive off-diagonal entries, and the constant vector in its null
space; the multiplicity of its zero eigenvalue equals the number of graph
components.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DisconnectedGraphWarning",
    "SpectralSummary",
    "degrees_from_weights",
    "dual_to_pairs",
    "laplacian_adjoint",
    "laplacian_from_weights",
    "log_gdet",
    "node_count",
    "num_components",
    "pair_count",
    "pair_indices",
    "spectral_summary",
    "time_consistency",
    "validate_laplacian",
    "validate_weights",
    "weights_from_laplacian",
    "zero_eigenvalue_tolerance",
]


class DisconnectedGraphWarning(UserWarning):
    """Raised as a warning when an operation that assumes a connected graph
    encounters spectral nullity greater than one."""


def pair_count(p: int) -> int:
    """Number of unordered node pairs of a p-node graph."""
    if p < 2:
        raise ValueError(f"need at least 2 nodes, got p={p}")
    return p * (p - 1) // 2


def node_count(m: int) -> int:
    """Node count p such that a weight vector of length m fits p(p-1)/2."""
    p = int(round((1.0 + math.sqrt(1.0 + 8.0 * m)) / 2.0))
    if p < 2 or p * (p - 1) // 2 != m:
        raise ValueError(f"weight vector length {m} is not p(p-1)/2 for any integer p >= 2")
    return p


def pair_indices(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column indices of the upper triangle in package pair order."""
    return np.triu_indices(p, k=1)


def validate_weights(w: np.ndarray) -> int:
    """Check a weight vector (nonnegative, valid length); return p."""
    w = np.asarray(w)
    if w.ndim != 1:
        raise ValueError("weight vector must be one-dimensional")
    p = node_count(w.shape[0])
    if not np.all(np.isfinite(w)):
        raise ValueError("weight vector contains non-finite entries")
    if np.any(w < 0):
        raise ValueError("weight vector contains negative entries")
    return p


def laplacian_from_weights(w: np.ndarray, p: int | None = None) -> np.ndarray:
    """Map a weight vector to the combinatorial Laplacian L = D - W.

    Off-diagonal entries are -w for the corresponding pair; the diagonal
    carries the node degrees so that row sums vanish.  Symmetry is exact by
    construction; row sums vanish to machine precision.
    """
    w = np.asarray(w, dtype=float)
    if p is None:
        p = node_count(w.shape[0])
    elif w.shape[0] != pair_count(p):
        raise ValueError(f"weight vector length {w.shape[0]} does not match p={p}")
    L = np.zeros((p, p))
    iu = pair_indices(p)
    L[iu] = -w
    L += L.T
    np.fill_diagonal(L, -L.sum(axis=1))
    return L


def weights_from_laplacian(L: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Recover the weight vector from a Laplacian matrix.

    Rejects matrices whose symmetry or row sums deviate by more than ``tol``.
    Tiny positive off-diagonal entries (solver round-off, <= 1e-12) are
    clamped to zero weight.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("Laplacian must be a square matrix")
    asym = np.abs(L - L.T).max()
    if asym > tol:
        raise ValueError(f"matrix is not symmetric: max |L - L^T| = {asym:.3e} > {tol:.1e}")
    row = np.abs(L.sum(axis=1)).max()
    if row > tol:
        raise ValueError(f"matrix has nonzero row sums: max |L 1| = {row:.3e} > {tol:.1e}")
    w = -L[pair_indices(L.shape[0])]
    return np.maximum(w, 0.0)


def degrees_from_weights(w: np.ndarray, p: int | None = None) -> np.ndarray:
    """Node degrees d_i = sum of weights incident to node i."""
    w = np.asarray(w, dtype=float)
    if p is None:
        p = node_count(w.shape[0])
    iu, ju = pair_indices(p)
    d = np.zeros(p)
    np.add.at(d, iu, w)
    np.add.at(d, ju, w)
    return d


def dual_to_pairs(v: np.ndarray) -> np.ndarray:
    """Adjoint of the degree operator: (B^T v)_m = v_i + v_j for pair m=(i,j)."""
    v = np.asarray(v, dtype=float)
    iu, ju = pair_indices(v.shape[0])
    return v[iu] + v[ju]


def laplacian_adjoint(M: np.ndarray) -> np.ndarray:
    """Adjoint of ``laplacian_from_weights``.

    For each pair m = (i, j) returns M_ii + M_jj - M_ij - M_ji, so that
    <laplacian_from_weights(w), M> = <w, laplacian_adjoint(M)>.
    """
    M = np.asarray(M, dtype=float)
    d = np.diag(M)
    iu, ju = pair_indices(M.shape[0])
    return d[iu] + d[ju] - M[iu, ju] - M[ju, iu]


def zero_eigenvalue_tolerance(eigenvalues: np.ndarray) -> float:
    """Scale-invariant threshold below which an eigenvalue counts as zero."""
    lam_max = float(eigenvalues[-1]) if len(eigenvalues) else 0.0
    return 1e-8 * max(1.0, lam_max)


@dataclass(frozen=True)
class SpectralSummary:
    """Sorted spectrum of a Laplacian with the derived connectivity facts."""

    eigenvalues: np.ndarray
    nullity: int
    algebraic_connectivity: float
    spectral_radius: float


def spectral_summary(L: np.ndarray, zero_tol: float | None = None) -> SpectralSummary:
    """Eigenvalues (ascending) plus nullity, Fiedler value and spectral radius.

    ``zero_tol`` defaults to 1e-8 * max(1, lambda_max).  The algebraic
    connectivity is the second smallest eigenvalue regardless of nullity:
    it is zero exactly when the graph is disconnected.
    """
    L = np.asarray(L, dtype=float)
    lam = np.linalg.eigvalsh(L)
    if zero_tol is None:
        zero_tol = zero_eigenvalue_tolerance(lam)
    nullity = int(np.count_nonzero(lam <= zero_tol))
    return SpectralSummary(
        eigenvalues=lam,
        nullity=nullity,
        algebraic_connectivity=float(lam[1]),
        spectral_radius=float(lam[-1]),
    )


def num_components(L: np.ndarray, zero_tol: float | None = None) -> int:
    """Number of graph components = multiplicity of the zero eigenvalue."""
    return spectral_summary(L, zero_tol).nullity


def log_gdet(L: np.ndarray, zero_tol: float | None = None) -> float:
    """Log pseudo-determinant: sum of logs of the positive eigenvalues.

    For a connected graph this equals log det(L + (1/p) 11^T) because the
    rank-one correction fills exactly the constant-vector null direction
    and leaves all other eigenvalues untouched.  A disconnected input
    (nullity > 1) is signalled with :class:`DisconnectedGraphWarning`; the
    caller decides whether that is fatal.
    """
    L = np.asarray(L, dtype=float)
    lam = np.linalg.eigvalsh(L)
    if zero_tol is None:
        zero_tol = zero_eigenvalue_tolerance(lam)
    nullity = int(np.count_nonzero(lam <= zero_tol))
    if nullity > 1:
        warnings.warn(
            f"graph has {nullity} components; pseudo-determinant taken over "
            "positive eigenvalues only",
            DisconnectedGraphWarning,
            stacklevel=2,
        )
    positive = lam[lam > zero_tol]
    return float(np.sum(np.log(positive)))


def time_consistency(L_a: np.ndarray, L_b: np.ndarray) -> float:
    """Squared Frobenius distance between two Laplacians of equal size."""
    L_a = np.asarray(L_a, dtype=float)
    L_b = np.asarray(L_b, dtype=float)
    if L_a.shape != L_b.shape:
        raise ValueError(f"shape mismatch: {L_a.shape} vs {L_b.shape}")
    diff = L_a - L_b
    return float(np.sum(diff * diff))


def validate_laplacian(
    L: np.ndarray,
    row_sum_tol: float = 1e-9,
    sign_tol: float = 1e-12,
    psd_tol: float = 1e-9,
) -> None:
    """Assert the Laplacian invariants; raise ValueError on violation.

    Checks symmetry (exact), row sums within ``row_sum_tol``, off-diagonal
    entries <= ``sign_tol``, and smallest eigenvalue >= -``psd_tol``.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("Laplacian must be a square matrix")
    if not np.array_equal(L, L.T):
        raise ValueError("Laplacian is not exactly symmetric")
    row = np.abs(L.sum(axis=1)).max()
    if row > row_sum_tol:
        raise ValueError(f"row sums violate L1=0: max residual {row:.3e}")
    off = L[pair_indices(L.shape[0])]
    if off.size and off.max() > sign_tol:
        raise ValueError(f"positive off-diagonal entry {off.max():.3e}")
    lam_min = float(np.linalg.eigvalsh(L)[0])
    if lam_min < -psd_tol:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {lam_min:.3e}")
