"""Schauder basis b^(k) of the W-domains, coordinates and partial-sum
reconstruction."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import BandParams, LambdaSeq, Membership, NotConvergentError, RealSeq, Tolerances
from .spaces import SpaceTag, classify_base
from .transform import as_seq, forward
from .triangles import inverse_coefficients

__all__ = [
    "BasisVector",
    "basis_vector",
    "basis_matrix",
    "coefficients",
    "reconstruct",
    "reconstruction_error",
    "error_table",
    "CRepresentation",
    "c_space_representation",
    "unit_transform_sequence",
]


@dataclass(frozen=True)
class BasisVector:
    k: int
    seq: RealSeq

    def prefix(self, N: int) -> np.ndarray:
        return self.seq.prefix(N)


def _column_weights(lam: LambdaSeq, k):
    """(lambda_k / dl_k, lambda_k / dl_{k+1}) with dl_j = lambda_j - lambda_{j-1}."""
    k = np.asarray(k)
    lam_k = lam.values_at(k)
    lo = lam_k - lam.values_at(k - 1)
    hi = lam.values_at(k + 1) - lam_k
    return lam_k / lo, lam_k / hi


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def basis_vector(p: BandParams, lam: LambdaSeq, k: int) -> BasisVector:
    """b^(k)_n = d_{n-k} lambda_k/dl_k - d_{n-k-1} lambda_k/dl_{k+1}, zero for n < k.

    At n = k the second term drops (d_{-1} = 0), leaving (1/r) lambda_k/dl_k.
    """
    if k < 0:
        raise ValueError("basis index must be non-negative")
    key = (p.as_tuple(), id(lam), k)
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
        if hit is not None and hit[0] is lam:
            return hit[1]
    w_lo, w_hi = (float(v) for v in _column_weights(lam, k))

    def gen(n):
        out = np.zeros(n.shape)
        m = n - k
        live = m >= 0
        if np.any(live):
            d = inverse_coefficients(p, int(m.max()) + 1)
            mm = m[live]
            prev = np.where(mm >= 1, d[np.maximum(mm - 1, 0)], 0.0)
            with np.errstate(over="ignore", invalid="ignore"):
                out[live] = d[mm] * w_lo - prev * w_hi
        return out

    vec = BasisVector(k, RealSeq(gen, provenance="recurrence", label=f"b({k})"))
    with _CACHE_LOCK:
        _CACHE.setdefault(key, (lam, vec))
    return vec


def basis_matrix(p: BandParams, lam: LambdaSeq, N: int) -> np.ndarray:
    """Dense N x N array whose column k is b^(k) on 0..N-1 (equal to D P)."""
    d = inverse_coefficients(p, N)
    idx = np.subtract.outer(np.arange(N), np.arange(N))
    D = np.where(idx >= 0, d[np.clip(idx, 0, None)], 0.0)
    w_lo, w_hi = _column_weights(lam, np.arange(N))
    shifted = np.zeros_like(D)
    shifted[:, :-1] = D[:, 1:]
    with np.errstate(over="ignore", invalid="ignore"):
        return D * w_lo[None, :] - shifted * w_hi[None, :]


def coefficients(p: BandParams, lam: LambdaSeq, x, N: int) -> np.ndarray:
    """alpha_k = (W x)_k."""
    return forward(p, lam, x, N)


def reconstruct(p: BandParams, lam: LambdaSeq, alphas, m: int, N: int) -> np.ndarray:
    """S_m = sum_{k<=m} alpha_k b^(k) on 0..N-1."""
    if not 0 <= m < N:
        raise ValueError("need 0 <= m < N")
    a = np.asarray(alphas, dtype=float)[: m + 1]
    if len(a) < m + 1:
        a = np.concatenate([a, np.zeros(m + 1 - len(a))])
    return basis_matrix(p, lam, N)[:, : m + 1] @ a


def reconstruction_error(p: BandParams, lam: LambdaSeq, x, m: int, N: int) -> float:
    """Domain sup-norm of x - S_m, measured as sup |W(x - S_m)| on 0..N-1."""
    xv = as_seq(x).prefix(N)
    s = reconstruct(p, lam, coefficients(p, lam, xv, N), m, N)
    return float(np.max(np.abs(forward(p, lam, xv - s, N))))


def error_table(p: BandParams, lam: LambdaSeq, x, N: int, ms: Optional[Sequence[int]] = None) -> list[tuple[int, float]]:
    """(m, domain-norm error of S_m) rows.

    Computed in y-coordinates: W S_m keeps alpha_0..alpha_m and zeroes the
    rest, so the error is sup_{n>m} |alpha_n|.
    """
    alphas = coefficients(p, lam, x, N)
    tails = np.abs(alphas)[::-1]
    tail_sup = np.maximum.accumulate(tails)[::-1]  # tail_sup[j] = max_{n>=j} |alpha_n|
    if ms is None:
        ms = range(N)
    rows = []
    for m in ms:
        if not 0 <= m < N:
            raise ValueError("need 0 <= m < N")
        rows.append((int(m), float(tail_sup[m + 1]) if m + 1 < N else 0.0))
    return rows


def unit_transform_sequence(p: BandParams) -> RealSeq:
    """b_k = sum_{j<=k} d_{kj}, the sequence with W b = e for every lambda."""

    def gen(k):
        d = inverse_coefficients(p, int(k.max()) + 1)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.cumsum(d)[k]

    return RealSeq(gen, provenance="recurrence", label="De")


@dataclass(frozen=True)
class CRepresentation:
    limit: float
    residuals: np.ndarray  # alpha_k - l
    params: BandParams
    lam: LambdaSeq

    def partial(self, m: int, N: int) -> np.ndarray:
        """l * De + sum_{k<=m} (alpha_k - l) b^(k) on 0..N-1."""
        base = self.limit * unit_transform_sequence(self.params).prefix(N)
        return base + reconstruct(self.params, self.lam, self.residuals, m, N)

    def error(self, x, m: int, N: int) -> float:
        xv = as_seq(x).prefix(N)
        return float(np.max(np.abs(forward(self.params, self.lam, xv - self.partial(m, N), N))))


def c_space_representation(p: BandParams, lam: LambdaSeq, x, N: int,
                           tol: Optional[Tolerances] = None) -> CRepresentation:
    """Split x in the c-domain as l * De plus a c0-domain expansion.

    Raises NotConvergentError unless W x is classified as convergent.
    """
    tol = tol or Tolerances()
    y = forward(p, lam, x, N)
    diag = classify_base(y, SpaceTag("c"), N, tol)
    if diag.status is not Membership.MEMBER:
        raise NotConvergentError(f"W x is not convergent at N = {N} (verdict {diag.status.value})",
                                 diag.to_dict())
    limit = float(diag.limit_estimate)
    if abs(limit) < tol.eps_exact:
        limit = 0.0
    return CRepresentation(limit, y - limit, p, lam)

