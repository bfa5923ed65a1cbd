"""Subspace geometry on the complex Grassmannian manifold G(n, d).

Provides orthonormal bases, the squared chordal distance, the ball-volume
constant that normalizes the small-ball CDF of the squared chordal distance
to a uniformly random subspace, the resulting metric CDF, the random-codebook
quantization distortion bound, and Haar-uniform subspace sampling.

The squared chordal distance between subspaces with orthonormal bases A and B
is d_c^2(A, B) = (1/2) * ||A A^H - B B^H||_F^2 = d - ||A^H B||_F^2.
For a fixed subspace and a Haar-uniform one, the CDF of d_c^2 behaves like
F(x) = c_{n,d} * x^{d(n-d)} for small x (exact on [0, 1], and everywhere for
d = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateChannel, ShapeMismatch

# Relative singular-value cutoff below which a matrix is treated as rank
# deficient. Such draws are measure-zero under the channel law and are
# redrawn by the caller, never repaired.
RANK_RTOL = 1e-12

_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class Subspace:
    """A d-dimensional subspace of complex n-space, stored as an
    orthonormal basis.

    Attributes
    ----------
    basis : ndarray, shape (n, d)
        Complex matrix with orthonormal columns spanning the subspace.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        object.__setattr__(self, "basis", b)
        n, d = b.shape
        if not 1 <= d <= n:
            raise ShapeMismatch(f"need 1 <= d <= n, got shape ({n}, {d})")
        gram = b.conj().T @ b
        if np.linalg.norm(gram - np.eye(d)) > _ORTHO_TOL:
            raise ShapeMismatch("basis columns are not orthonormal")

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def d(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class ManifoldParams:
    """Constants of G(n, d) used by the metric-CDF model.

    Attributes
    ----------
    n : int
        Ambient dimension (receive antennas for selection metrics,
        nr * nt for vectorized-channel quantization).
    d : int
        Subspace dimension.
    c : float
        Ball-volume constant c_{n,d}.
    exponent : int
        d * (n - d), the small-ball CDF exponent.
    """

    n: int
    d: int
    c: float = field(default=0.0)
    exponent: int = field(default=0)

    def __post_init__(self):
        if self.c == 0.0:
            object.__setattr__(self, "c", ball_volume(self.n, self.d))
        if self.exponent == 0:
            object.__setattr__(self, "exponent", self.d * (self.n - self.d))
        if self.c <= 0 or self.exponent < 1:
            raise ShapeMismatch("invalid manifold constants")
        if self.x_max > self.d + 1e-12:
            raise ShapeMismatch("CDF support edge exceeds the metric range d")

    @property
    def x_max(self) -> float:
        """Support edge of the CDF model, the x with c * x^exponent = 1."""
        return (1.0 / self.c) ** (1.0 / self.exponent)


def ball_volume(n: int, d: int) -> float:
    """Ball-volume constant c_{n,d} of the complex Grassmannian G(n, d).

    c_{n,d} = [1/Gamma(d(n-d)+1)] * prod_{i=1..d} Gamma(n-i+1)/Gamma(d-i+1).

    Parameters
    ----------
    n, d : int
        Ambient and subspace dimensions, 1 <= d <= n/2.
    """
    if not 1 <= d <= n // 2:
        raise ShapeMismatch(f"ball_volume requires 1 <= d <= n/2, got ({n}, {d})")
    log_c = -gammaln(d * (n - d) + 1)
    for i in range(1, d + 1):
        log_c += gammaln(n - i + 1) - gammaln(d - i + 1)
    return float(np.exp(log_c))


def orthonormal_basis(M: np.ndarray) -> Subspace:
    """Orthonormal basis of the column space of M.

    Parameters
    ----------
    M : ndarray, shape (n, d)
        Full-column-rank complex matrix.

    Raises
    ------
    DegenerateChannel
        If the smallest singular value is below RANK_RTOL times the largest.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M[:, None]
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= RANK_RTOL * sv[0]:
        raise DegenerateChannel("rank-deficient channel matrix")
    q, _ = np.linalg.qr(M)
    return Subspace(q)


def chordal_distance_sq(A: Subspace, B: Subspace) -> float:
    """Squared chordal distance d_c^2(A, B) = d - ||A^H B||_F^2.

    Equals (1/2) * ||A A^H - B B^H||_F^2; returns a value in [0, d].
    """
    if A.n != B.n or A.d != B.d:
        raise ShapeMismatch(
            f"subspaces on different manifolds: ({A.n},{A.d}) vs ({B.n},{B.d})"
        )
    inner = A.basis.conj().T @ B.basis
    val = A.d - np.linalg.norm(inner) ** 2
    return float(min(max(val, 0.0), A.d))


def metric_cdf(x: float, p: ManifoldParams) -> float:
    """Model CDF of the squared chordal distance to a Haar-uniform subspace.

    F(x) = c * x^exponent clipped to [0, 1]. Exact for d = 1 and on [0, 1]
    for d > 1; above x = 1 it is the model the analysis uses, not the true
    law.
    """
    if x <= 0.0:
        return 0.0
    return float(min(p.c * x**p.exponent, 1.0))


def quantization_bound(K: int, p: ManifoldParams) -> float:
    """Upper bound on E[min over K random subspaces of d_c^2].

    Q(K) <= (Gamma(1/D)/D) * (K c)^(-1/D) with D = d(n-d), the random-codebook
    distortion bound on G(n, d).
    """
    if K < 1:
        raise ShapeMismatch("K must be at least 1")
    D = p.exponent
    log_gamma = gammaln(1.0 / D)
    return float(np.exp(log_gamma - np.log(D) - np.log(K * p.c) / D))


def sample_uniform_subspace(rng: np.random.Generator, n: int, d: int) -> Subspace:
    """Draw a Haar-uniform subspace by orthonormalizing an i.i.d. complex
    Gaussian n-by-d matrix."""
    while True:
        g = (rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))) / np.sqrt(2)
        try:
            return orthonormal_basis(g)
        except DegenerateChannel:
            continue
