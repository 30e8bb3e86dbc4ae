"""Gaussian representation of occupation times and signed-measure identities.

For a tridiagonal (birth-death) block, the occupation-time vector has the
law of (eta**2 + eta_tilde**2) / 2 with eta, eta_tilde i.i.d. mean-zero
multivariate normal whose precision matrix is the symmetrized negated
generator. For general matrices with nonzero determinant, det(A)/det(D+A)
is still the transform of a (possibly signed) measure on C^n; its total
mass and the split-determinant identity behind it are implemented here, with
a brute-force midpoint quadrature oracle for n <= 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, rng
from .errors import NonPositiveDeterminant, SingularMatrix
from .generators import GeneratorMatrix, symmetrize
from .transforms import green, validate_killing


@dataclass(frozen=True)
class GaussianSpec:
    """Covariance (and its Cholesky factor) of the representing normals.

    ``sigma`` is the inverse of the symmetrized negated generator; its
    diagonal coincides with the Green matrix diagonal of the source chain.
    """

    sigma: np.ndarray
    chol: np.ndarray

    @property
    def n(self) -> int:
        return self.sigma.shape[0]


@dataclass(frozen=True)
class SplitMatrix:
    """A = C + B with C the symmetric part (positive definite) and B skew."""

    a: np.ndarray
    c: np.ndarray
    b: np.ndarray

    @property
    def n(self) -> int:
        return self.a.shape[0]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def gaussian_spec(g: GeneratorMatrix) -> GaussianSpec:
    """Build the Gaussian representation of a tridiagonal generator.

    Raises NotTridiagonal / ZeroBackRate if the generator cannot be
    symmetrized, NotPositiveDefinite if the resulting covariance is not one
    (cannot happen for valid inputs).
    """
    sym = symmetrize(g)
    sigma = linalg.inverse(-sym.qstar)
    sigma = 0.5 * (sigma + sigma.T)
    chol = linalg.cholesky(sigma)
    gdiag = np.diag(green(g))
    if np.max(np.abs(np.diag(sigma) - gdiag)) > 1e-10 * max(1.0, float(np.max(gdiag))):
        raise AssertionError("covariance diagonal disagrees with the Green "
                             "matrix diagonal; numerical failure")
    return GaussianSpec(sigma=_frozen(sigma), chol=_frozen(chol))


def _stream_normals(stream: rng.Stream, count: int) -> np.ndarray:
    out = np.empty(count)
    for i in range(count):
        u1 = stream.next_uniform()
        u2 = stream.next_uniform()
        out[i] = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    return out


def sample_occupation_gaussian(spec: GaussianSpec, rng_stream) -> np.ndarray:
    """One occupation-vector sample: componentwise (eta^2 + eta_tilde^2)/2."""
    stream = rng_stream if isinstance(rng_stream, rng.Stream) else rng.Stream(int(rng_stream))
    z = _stream_normals(stream, 2 * spec.n)
    eta = spec.chol @ z[:spec.n]
    eta_t = spec.chol @ z[spec.n:]
    return 0.5 * (eta ** 2 + eta_t ** 2)


def sample_occupation_gaussian_batch(spec: GaussianSpec, num_samples: int,
                                     seed: int) -> np.ndarray:
    """Vectorized sampling: one row per sample, deterministic under seed.

    Sample s consumes the stream with key derive_key(seed, s); Box-Muller
    uses counter pairs (2i, 2i+1), matching the scalar sampler draw-for-draw.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    n = spec.n
    keys = rng.bulk_derive_keys(int(seed), np.arange(num_samples))
    even = np.arange(0, 4 * n, 2, dtype=np.uint64)
    u1 = rng.bulk_uniforms(keys[:, None], even[None, :])
    u2 = rng.bulk_uniforms(keys[:, None], (even + np.uint64(1))[None, :])
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    eta = z[:, :n] @ spec.chol.T
    eta_t = z[:, n:] @ spec.chol.T
    return 0.5 * (eta ** 2 + eta_t ** 2)


def split_matrix(a) -> SplitMatrix:
    """Split A into symmetric + skew parts, requiring the symmetric part PD.

    Positive definiteness is checked by Cholesky, whose failure pinpoints
    the offending pivot.
    """
    a = linalg.as_square(a)
    c = 0.5 * (a + a.T)
    b = a - c
    linalg.cholesky(c)
    return SplitMatrix(a=_frozen(a), c=_frozen(c), b=_frozen(b))


def phi(a, d) -> float:
    """Transform value det(A) / det(D + A) for non-negative d.

    Accepts a SplitMatrix or any square matrix with nonzero determinant (the
    value is invariant under diagonal similarity, which need not preserve a
    definite symmetric part).
    """
    m = a.a if isinstance(a, SplitMatrix) else linalg.as_square(a)
    d = validate_killing(d, m.shape[0])
    num = linalg.det(m)
    if abs(num) <= linalg.singular_tol(m):
        raise SingularMatrix("det(A) is numerically zero")
    return num / linalg.det(np.diag(d) + m)


def mass_identity_residual(s: SplitMatrix) -> float:
    """Relative defect of |C| * |C + B C^-1 B^T| == |A|^2.

    This scalar identity is what collapses the 2n-dimensional mass integral
    to a determinant; it should sit at round-off level for any valid split.
    """
    det_a = linalg.det(s.a)
    lhs = linalg.det(s.c) * linalg.det(s.c + s.b @ linalg.inverse(s.c) @ s.b.T)
    return abs(lhs - det_a ** 2) / det_a ** 2


def mu_total_mass(s: SplitMatrix) -> float:
    """Unnormalized total mass of the complex Gaussian measure: 2 (2 pi)^n / det(A)."""
    det_a = linalg.det(s.a)
    if det_a <= linalg.singular_tol(s.a):
        raise NonPositiveDeterminant(f"det(A) = {det_a:g} must be positive")
    return 2.0 * (2.0 * np.pi) ** s.n / det_a


def mu_mass_quadrature(s: SplitMatrix, half_width: float = 8.0,
                       points: int | None = None) -> float:
    """Brute-force total mass by tensor midpoint quadrature (n <= 2 only).

    Integrates the real integrand 2 exp(-(x'Cx + y'Cy)/2) cos(x'By) over the
    box [-half_width, half_width]^(2n); defaults to 400 points per axis at
    n = 1 and 60 at n = 2. Intended as the independent oracle for
    :func:`mu_total_mass` on unit-scale fixtures.
    """
    n = s.n
    if n > 2:
        raise ValueError("quadrature oracle only supports n <= 2")
    if points is None:
        points = 400 if n == 1 else 60
    cell = 2.0 * half_width / points
    axis = -half_width + (np.arange(points) + 0.5) * cell

    if n == 1:
        c = s.c[0, 0]
        w = np.exp(-0.5 * c * axis ** 2)
        # B is 1x1 skew, hence zero: the double integral separates
        return 2.0 * (w.sum() * cell) ** 2

    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    grid = np.column_stack([xx.ravel(), yy.ravel()])
    quad = np.einsum("ki,ij,kj->k", grid, s.c, grid)
    w = np.exp(-0.5 * quad)
    cross = grid @ s.b @ grid.T
    total = w @ np.cos(cross) @ w
    return 2.0 * total * cell ** 4
