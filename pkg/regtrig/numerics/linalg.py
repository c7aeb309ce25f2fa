"""Small dense symmetric linear algebra used by the parameter identifier.

The matrices handled here are l x l with l the number of unknown parameters, so
a cyclic Jacobi sweep is both accurate and fast enough.
"""

from dataclasses import dataclass

import numpy as np

_SYMMETRY_TOL = 1e-12
_MAX_SWEEPS = 100


class LinalgError(ValueError):
    """Base class for linear algebra failures."""


class DimensionError(LinalgError):
    """Raised when operand shapes are inconsistent."""


class SymmetryError(LinalgError):
    """Raised when a matrix expected to be symmetric is not."""


class NotPSDError(LinalgError):
    """Raised when a matrix expected to be positive semi-definite has a negative eigenvalue."""


class ParameterError(LinalgError):
    """Raised when a scalar parameter is out of range."""


@dataclass(frozen=True)
class SymEig:
    """
    Spectral factorization S = V diag(eigenvalues) V'.

    Attributes:
        eigenvalues: Eigenvalues sorted in descending order.
        eigenvectors: Orthonormal eigenvectors stored as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return V diag(lambda) V'."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def _as_square(matrix: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise LinalgError(f"{name} contains non-finite entries")
    return arr


def sym_eig(S: np.ndarray) -> SymEig:
    """
    Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Args:
        S: Square symmetric matrix.

    Returns:
        SymEig with eigenvalues sorted descending.

    Raises:
        DimensionError: If S is not square.
        SymmetryError: If S is not symmetric to 1e-12 relative tolerance.

    Example:
        >>> sym_eig(np.diag([1.0, 3.0])).eigenvalues
        array([3., 1.])
    """
    a = _as_square(S, "S").copy()
    d = a.shape[0]
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.max(np.abs(a - a.T), initial=0.0) > _SYMMETRY_TOL * scale:
        raise SymmetryError("S is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(d)

    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= np.finfo(float).eps * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(d)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return SymEig(eigenvalues=eigenvalues[order], eigenvectors=v[:, order])


def _check_system(G: np.ndarray, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    g = _as_square(G, "G")
    z = np.asarray(Z, dtype=float).reshape(-1)
    if z.shape[0] != g.shape[0]:
        raise DimensionError(f"Z has length {z.shape[0]}, expected {g.shape[0]}")
    return g, z


def min_norm_update(
    G: np.ndarray,
    Z: np.ndarray,
    theta_prev: np.ndarray,
    rank_tol: float = 1e-9,
) -> tuple[np.ndarray, int, float]:
    """
    Project theta_prev onto the affine set {theta : G theta = Z}.

    Eigenvalues below ``rank_tol * max(1, lambda_max)`` are treated as zero, and Z is
    projected onto the retained range of G so slightly inconsistent constraints
    produced by floating point still yield a solution.

    Args:
        G: Symmetric positive semi-definite l x l matrix.
        Z: Right-hand side of length l.
        theta_prev: Current estimate, the point being projected.
        rank_tol: Relative eigenvalue truncation threshold.

    Returns:
        Tuple ``(theta_new, rank, residual)`` where residual is
        ``||G theta_new - Z_ranged||``.

    Raises:
        DimensionError: On shape mismatch.
        NotPSDError: If G has an eigenvalue below ``-rank_tol * max(1, lambda_max)``.
    """
    g, z = _check_system(G, Z)
    theta_prev = np.asarray(theta_prev, dtype=float).reshape(-1)
    if theta_prev.shape[0] != g.shape[0]:
        raise DimensionError(
            f"theta_prev has length {theta_prev.shape[0]}, expected {g.shape[0]}"
        )

    eig = sym_eig(g)
    lam_max = float(eig.eigenvalues[0]) if eig.eigenvalues.size else 0.0
    threshold = rank_tol * max(1.0, lam_max)
    if eig.eigenvalues.size and eig.eigenvalues[-1] < -threshold:
        raise NotPSDError(f"G has eigenvalue {eig.eigenvalues[-1]:.3e} below -{threshold:.3e}")

    keep = eig.eigenvalues >= threshold
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        return theta_prev.copy(), 0, 0.0

    vk = eig.eigenvectors[:, keep]
    lk = eig.eigenvalues[keep]
    z_coords = vk.T @ z
    theta_new = theta_prev - vk @ (vk.T @ theta_prev) + vk @ (z_coords / lk)
    z_ranged = vk @ z_coords
    residual = float(np.linalg.norm(g @ theta_new - z_ranged))
    return theta_new, rank, residual


def tikhonov_update(G: np.ndarray, Z: np.ndarray, eta: float) -> np.ndarray:
    """
    Solve the regularized constraint (eta I + G) theta = Z.

    Raises:
        ParameterError: If eta is not strictly positive.
    """
    if not eta > 0.0:
        raise ParameterError(f"eta must be > 0, got {eta}")
    g, z = _check_system(G, Z)
    return np.linalg.solve(eta * np.eye(g.shape[0]) + g, z)
