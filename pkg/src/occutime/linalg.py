"""Dense real linear algebra behind the determinant formulas.

Determinants and inverses delegate to LAPACK (LU with partial pivoting, via
numpy); the matrices handled here are small (n <= ~50) and diagonally
dominant, so partial pivoting is fully adequate. Cholesky is hand-rolled so
failures can report the offending pivot. The test suite keeps an independent
cofactor-expansion oracle for determinants.
"""

from __future__ import annotations

import numpy as np

from .errors import NotPositiveDefinite, SingularMatrix


def as_square(m, name: str = "matrix") -> np.ndarray:
    """Validate and return a float64 C-contiguous square copy of ``m``."""
    a = np.array(m, dtype=np.float64, copy=True, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if a.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def det(m) -> float:
    """Determinant via LU with partial pivoting.

    A numerically singular matrix simply returns ~0; callers that need a
    hard failure should test against :func:`singular_tol`.
    """
    return float(np.linalg.det(as_square(m)))


def singular_tol(m) -> float:
    """Scale-aware singularity threshold: 1e-12 times the max row norm."""
    a = np.asarray(m, dtype=np.float64)
    norm = float(np.max(np.sum(np.abs(a), axis=1)))
    return 1e-12 * max(norm, 1e-300)


def inverse(m) -> np.ndarray:
    """Matrix inverse; raises :class:`SingularMatrix` below tolerance.

    Postcondition (tested): ``m @ inverse(m)`` is the identity to 1e-9
    entrywise for well-conditioned input.
    """
    a = as_square(m)
    d = float(np.linalg.det(a))
    if abs(d) <= singular_tol(a):
        raise SingularMatrix(f"|det| = {abs(d):g} <= tolerance {singular_tol(a):g}")
    return np.linalg.inv(a)


def signed_minor(m, x: int, y: int) -> float:
    """Signed first minor: (-1)**(x+y) * det of ``m`` without row y, column x.

    This is the cofactor that satisfies
    ``inverse(m)[x, y] == signed_minor(m, x, y) / det(m)``.
    """
    a = as_square(m)
    n = a.shape[0]
    if not (0 <= x < n and 0 <= y < n):
        raise IndexError(f"minor index ({x}, {y}) out of range for n = {n}")
    if n == 1:
        return 1.0
    sub = np.delete(np.delete(a, y, axis=0), x, axis=1)
    return float((-1.0) ** (x + y) * np.linalg.det(sub))


def cholesky(s, sym_tol: float = 1e-10) -> np.ndarray:
    """Lower-triangular L with L @ L.T == s, for symmetric positive definite s.

    Raises
    ------
    ValueError
        If ``s`` is not symmetric within ``sym_tol`` (relative to its scale).
    NotPositiveDefinite
        On the first non-positive pivot; the exception carries its index.
    """
    a = as_square(s)
    scale = max(float(np.max(np.abs(a))), 1.0)
    if np.max(np.abs(a - a.T)) > sym_tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    n = a.shape[0]
    L = np.zeros_like(a)
    for k in range(n):
        pivot = a[k, k] - L[k, :k] @ L[k, :k]
        if pivot <= 0.0:
            raise NotPositiveDefinite(k)
        L[k, k] = np.sqrt(pivot)
        if k + 1 < n:
            L[k + 1:, k] = (a[k + 1:, k] - L[k + 1:, :k] @ L[k, :k]) / L[k, k]
    return L
