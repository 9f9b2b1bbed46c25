"""Coordinate change x <-> y = W x between a sequence and its W-transform."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import BandParams, LambdaSeq, RealSeq
from .triangles import inverse_coefficients

__all__ = [
    "TransformPair",
    "band_apply",
    "band_solve",
    "forward",
    "inverse",
    "inverse_literal",
    "roundtrip_error",
    "norms",
    "as_seq",
]


def as_seq(x) -> RealSeq:
    if isinstance(x, RealSeq):
        return x
    return RealSeq.from_values(np.asarray(x, dtype=float))


def band_apply(p: BandParams, x: np.ndarray) -> np.ndarray:
    """(Bx)_k = r x_k + s x_{k-1} + t x_{k-2} on a finite prefix."""
    out = p.r * x
    out[1:] += p.s * x[:-1]
    out[2:] += p.t * x[:-2]
    return out


def band_solve(p: BandParams, z: np.ndarray) -> np.ndarray:
    """x = B^{-1} z by forward substitution (equal to D z on prefixes)."""
    if p.r == 0.0:
        raise ZeroDivisionError("B(r, s, t) is not invertible when r = 0")
    r, s, t = p.r, p.s, p.t
    z = np.asarray(z, dtype=float)
    x = np.empty_like(z)
    x1 = x2 = 0.0  # x_{k-1}, x_{k-2}
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(len(z)):
            xk = (z[k] - s * x1 - t * x2) / r
            x[k] = xk
            x2, x1 = x1, xk
    return x


def forward(p: BandParams, lam: LambdaSeq, x, N: int) -> np.ndarray:
    """y_n = (1/lambda_n) sum_{k<=n} (lambda_k - lambda_{k-1})(r x_k + s x_{k-1} + t x_{k-2})."""
    xv = as_seq(x).prefix(N)
    weighted = lam.diffs(N) * band_apply(p, xv)
    return np.cumsum(weighted) / lam.prefix(N)


def inverse(p: BandParams, lam: LambdaSeq, y, N: int) -> np.ndarray:
    """x = D (P y), the unique x with W x = y on the first N terms."""
    yv = as_seq(y).prefix(N)
    lam_v = lam.prefix(N)
    steps = lam.diffs(N)
    z = lam_v * yv
    z[1:] -= lam_v[:-1] * yv[:-1]
    return band_solve(p, z / steps)


def inverse_literal(p: BandParams, lam: LambdaSeq, y, N: int) -> np.ndarray:
    """Inverse map written as the explicit quadruple sum over d_{k-j} and the
    two-term lambda factor.  O(N^2); used as an independent check."""
    yv = as_seq(y).prefix(N)
    lam_at = lambda i: lam.at(i) if i >= 0 else 0.0
    d = inverse_coefficients(p, N)
    inner = np.empty(N)
    for j in range(N):
        acc = 0.0
        for i in (j - 1, j):
            if i < 0:
                continue
            acc += (-1.0) ** (j - i) * lam_at(i) / (lam_at(j) - lam_at(j - 1)) * yv[i]
        inner[j] = acc
    x = np.empty(N)
    for k in range(N):
        x[k] = sum(d[k - j] * inner[j] for j in range(k + 1))
    return x


def roundtrip_error(p: BandParams, lam: LambdaSeq, x, N: int) -> float:
    """max_{n<N} |x_n - inverse(forward(x))_n|."""
    xv = as_seq(x).prefix(N)
    back = inverse(p, lam, forward(p, lam, xv, N), N)
    return float(np.max(np.abs(back - xv))) if N else 0.0


def norms(y: np.ndarray, ps: Sequence[float] = (1.0, 2.0)) -> dict:
    """Sup norm and p-norms of a transformed prefix."""
    y = np.asarray(y, dtype=float)
    out = {"sup_abs": float(np.max(np.abs(y))) if len(y) else 0.0}
    out["p_norms"] = {repr(float(p)): float(np.sum(np.abs(y) ** p) ** (1.0 / p)) for p in ps}
    return out


@dataclass(frozen=True)
class TransformPair:
    x: np.ndarray
    y: np.ndarray
    params: BandParams
    lam: LambdaSeq

    @classmethod
    def from_x(cls, p: BandParams, lam: LambdaSeq, x, N: int) -> "TransformPair":
        xv = as_seq(x).prefix(N)
        return cls(xv, forward(p, lam, xv, N), p, lam)

    @classmethod
    def from_y(cls, p: BandParams, lam: LambdaSeq, y, N: int) -> "TransformPair":
        yv = as_seq(y).prefix(N)
        return cls(inverse(p, lam, yv, N), yv, p, lam)

    def residual(self, N: Optional[int] = None) -> float:
        N = len(self.x) if N is None else N
        return float(np.max(np.abs(forward(self.params, self.lam, self.x, N) - self.y[:N])))
