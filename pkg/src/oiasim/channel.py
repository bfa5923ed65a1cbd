"""3-cell MIMO interference channel: generation, selection metric,
postfilter, and achievable rate.

Receiver cell i (0-based) is interfered by transmitters p = (i+1) mod 3 and
q = (i+2) mod 3. Every user sees i.i.d. unit-variance circularly-symmetric
complex Gaussian channel matrices of shape (nr, nt), noise variance is 1,
so the linear SNR equals the transmit power P. The configuration is pinned
to nr = 2d and nt = d, the smallest antenna setup that supports d streams
per transmitter with full degrees of freedom.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannel, ShapeMismatch
from .grassmann import RANK_RTOL, Subspace, chordal_distance_sq, orthonormal_basis

_LOG2 = np.log(2.0)


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and power of one simulation point.

    d streams per transmitter, nr = 2d receive and nt = d transmit antennas,
    K candidate users per cell, transmit power P (linear SNR).
    """

    d: int
    nr: int
    nt: int
    K: int
    P: float
    cells: int = 3

    def __post_init__(self):
        if self.nr != 2 * self.d or self.nt != self.d:
            raise ShapeMismatch("configuration requires nr = 2d and nt = d")
        if self.K < 1 or self.P <= 0 or self.cells != 3:
            raise ShapeMismatch("need K >= 1, P > 0, cells = 3")


@dataclass(frozen=True)
class ChannelSet:
    """All channel matrices of one Monte Carlo drop.

    h[i, j, k] is the (nr, nt) matrix from transmitter j to user k of cell i.
    """

    h: np.ndarray
    cfg: SystemConfig

    def __post_init__(self):
        expected = (3, 3, self.cfg.K, self.cfg.nr, self.cfg.nt)
        if self.h.shape != expected:
            raise ShapeMismatch(f"channel array shape {self.h.shape}, expected {expected}")


@dataclass(frozen=True)
class RateRecord:
    """Selected-user rate decomposition for one cell of one drop."""

    cell: int
    user: int
    rate: float
    rate_gain: float
    rate_loss: float
    metric: float
    outage: bool = False


def interferer_indices(i: int) -> tuple[int, int]:
    """The two transmitters interfering with receiver cell i (0-based)."""
    return (i + 1) % 3, (i + 2) % 3


def generate_channels(rng: np.random.Generator, cfg: SystemConfig) -> ChannelSet:
    """Draw all 9 K channel matrices of one drop, i.i.d. CN(0, 1) entries."""
    shape = (3, 3, cfg.K, cfg.nr, cfg.nt)
    h = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return ChannelSet(h=h, cfg=cfg)


def user_metric(ch: ChannelSet, i: int, k: int) -> float:
    """Selection metric of user k in cell i: squared chordal distance
    between the column spaces of its two interference channels."""
    p, q = interferer_indices(i)
    Qp = orthonormal_basis(ch.h[i, p, k])
    Qq = orthonormal_basis(ch.h[i, q, k])
    return chordal_distance_sq(Qp, Qq)


def cell_metrics(ch: ChannelSet, i: int) -> np.ndarray:
    """Selection metrics of all K users of cell i at once.

    Vectorized equivalent of user_metric over k; the harness hot path.
    """
    p, q = interferer_indices(i)
    Hp = ch.h[i, p]
    Hq = ch.h[i, q]
    d = ch.cfg.d
    if d == 1:
        np_sq = np.sum(np.abs(Hp[:, :, 0]) ** 2, axis=1)
        nq_sq = np.sum(np.abs(Hq[:, :, 0]) ** 2, axis=1)
        if np.any(np_sq <= 0) or np.any(nq_sq <= 0):
            raise DegenerateChannel("zero interference channel draw")
        cross = np.abs(np.sum(Hp[:, :, 0].conj() * Hq[:, :, 0], axis=1)) ** 2
        m = 1.0 - cross / (np_sq * nq_sq)
    else:
        Qp = _batched_basis(Hp)
        Qq = _batched_basis(Hq)
        inner = np.einsum("kab,kac->kbc", Qp.conj(), Qq)
        m = d - np.sum(np.abs(inner) ** 2, axis=(1, 2))
    return np.clip(m, 0.0, float(d))


def _batched_basis(H: np.ndarray) -> np.ndarray:
    """QR-orthonormalize a stack of (nr, nt) matrices, rejecting
    rank-deficient draws."""
    q, r = np.linalg.qr(H)
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    if np.any(diag.min(axis=-1) <= RANK_RTOL * diag.max(axis=-1)):
        raise DegenerateChannel("rank-deficient channel draw in batch")
    return q


def interference_covariance(ch: ChannelSet, i: int, k: int) -> np.ndarray:
    """Received interference covariance R = H_ip H_ip^H + H_iq H_iq^H."""
    p, q = interferer_indices(i)
    Hp = ch.h[i, p, k]
    Hq = ch.h[i, q, k]
    return Hp @ Hp.conj().T + Hq @ Hq.conj().T


def postfilter(R: np.ndarray, d: int) -> np.ndarray:
    """Receive filter spanning the invariant subspace of the d smallest
    eigenvalues of the Hermitian PSD matrix R."""
    w, v = np.linalg.eigh(R)
    return v[:, :d]


def user_rate(ch: ChannelSet, i: int, k: int, U: np.ndarray, cfg: SystemConfig,
              metric: float = np.nan, outage: bool = False) -> RateRecord:
    """Achievable rate of user k in cell i behind postfilter U.

    rate = log2 det(I + (P/d) U^H H_ii H_ii^H U (B + I)^{-1}) with
    B = (P/d) sum_{j != i} U^H H_ij H_ij^H U, computed through the exact
    decomposition rate = rate_gain - rate_loss where rate_gain uses the
    desired-plus-interference covariance and rate_loss the interference-only
    one.
    """
    p, q = interferer_indices(i)
    scale = cfg.P / cfg.d
    Gs = U.conj().T @ ch.h[i, i, k]
    A = scale * (Gs @ Gs.conj().T)
    Gp = U.conj().T @ ch.h[i, p, k]
    Gq = U.conj().T @ ch.h[i, q, k]
    B = scale * (Gp @ Gp.conj().T + Gq @ Gq.conj().T)
    eye = np.eye(cfg.d)
    gain = np.linalg.slogdet(eye + A + B)[1] / _LOG2
    loss = np.linalg.slogdet(eye + B)[1] / _LOG2
    return RateRecord(cell=i, user=k, rate=gain - loss, rate_gain=gain,
                      rate_loss=loss, metric=metric, outage=outage)
