"""Symmetric eigendecomposition and PSD matrix square root.

Self-contained cyclic Jacobi implementation so the distribution-distance
metric does not depend on LAPACK behavior; numerically this converges
quadratically for the small covariance matrices used here.
"""

from __future__ import annotations

import numpy as np

_MAX_SWEEPS = 100
_REL_TOL = 1e-12


def _off_diag_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return np.sqrt((off * off).sum())


def jacobi_eigh(a: np.ndarray):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) sorted ascending, with
    a = V @ diag(w) @ V.T. Raises if the input is not symmetric or the
    sweep loop fails to converge.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, atol=1e-10 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix must be symmetric")

    n = a.shape[0]
    A = (a + a.T) / 2.0
    V = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), V

    norm = np.sqrt((A * A).sum())
    if norm == 0.0:
        return np.zeros(n), V
    tol = _REL_TOL * norm

    for _ in range(_MAX_SWEEPS):
        if _off_diag_norm(A) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= tol / (n * n):
                    continue
                # rotation angle zeroing A[p, q]
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                rot_p = c * A[:, p] - s * A[:, q]
                rot_q = s * A[:, p] + c * A[:, q]
                A[:, p], A[:, q] = rot_p, rot_q
                rot_p = c * A[p, :] - s * A[q, :]
                rot_q = s * A[p, :] + c * A[q, :]
                A[p, :], A[q, :] = rot_p, rot_q
                A[p, q] = A[q, p] = 0.0

                rot_p = c * V[:, p] - s * V[:, q]
                rot_q = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = rot_p, rot_q
    else:
        raise RuntimeError("Jacobi sweep did not converge")

    w = A.diagonal().copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def sqrtm_psd(a: np.ndarray, neg_tol: float = 1e-10) -> np.ndarray:
    """Symmetric square root of a positive semi-definite matrix.

    Eigenvalues slightly below zero (roundoff) are clipped; anything
    below -neg_tol relative to the largest eigenvalue is an error.
    """
    w, V = jacobi_eigh(a)
    scale = max(1.0, abs(w).max()) if w.size else 1.0
    if w.size and w.min() < -neg_tol * scale:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w.min():g}")
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.T
