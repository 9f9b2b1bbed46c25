"""Infinite lower-triangular matrices evaluated lazily, row by row.

Concrete kinds: the lambda-mean matrix, the triple band B(r, s, t), its
inverse D, the two-band inverse P of the lambda-mean, the composite
W = Lambda-mean * B, and a catalog of classical summation matrices.
"""

from __future__ import annotations

import csv
import io
import json
import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import BandParams, LambdaSeq, RealSeq

__all__ = [
    "Triangle",
    "DenseTruncation",
    "identity",
    "lambda_mean",
    "triple_band",
    "band_inverse",
    "inverse_coefficients",
    "inverse_closed_form",
    "lambda_mean_inverse",
    "what_matrix",
    "compose",
    "apply",
    "catalog",
    "CATALOG_KINDS",
]

RowFn = Callable[[int], np.ndarray]


class Triangle:
    """Lower-triangular infinite matrix defined by a row function.

    ``row_fn(n)`` returns the n-th row restricted to columns 0..n.  Rows are
    memoized; the cache is guarded by a lock so concurrent readers see each
    row computed once.  ``band`` is the lower bandwidth when the matrix is
    banded (entries with n - k > band vanish).
    """

    def __init__(self, row_fn: RowFn, kind: str, params: Optional[dict] = None,
                 band: Optional[int] = None, block_fn: Optional[Callable[[int], np.ndarray]] = None):
        self._row_fn = row_fn
        self._block_fn = block_fn
        self.kind = kind
        self.params = dict(params or {})
        self.band = band
        self._rows: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def row(self, n: int) -> np.ndarray:
        if n < 0:
            raise IndexError("row index must be non-negative")
        cached = self._rows.get(n)
        if cached is not None:
            return cached
        values = np.asarray(self._row_fn(n), dtype=float)
        if values.shape != (n + 1,):
            raise ValueError(f"{self.kind}: row {n} has shape {values.shape}, expected ({n + 1},)")
        values.setflags(write=False)
        with self._lock:
            return self._rows.setdefault(n, values)

    def entry(self, n: int, k: int) -> float:
        if k > n or k < 0:
            return 0.0
        return float(self.row(n)[k])

    def diagonal(self, N: int) -> np.ndarray:
        return np.array([self.row(n)[n] for n in range(N)])

    def dense(self, N: int) -> np.ndarray:
        """The N x N leading block as a fresh array."""
        if self._block_fn is not None:
            return np.tril(np.asarray(self._block_fn(N), dtype=float))
        out = np.zeros((N, N))
        for n in range(N):
            out[n, : n + 1] = self.row(n)
        return out

    def truncate(self, N: int) -> "DenseTruncation":
        return DenseTruncation(N, self.dense(N), kind=self.kind, params=self.params)

    def is_triangle(self, N: int, eps: float = 0.0) -> bool:
        """Nonzero diagonal on 0..N-1."""
        return bool(np.all(np.abs(self.diagonal(N)) > eps))

    def __repr__(self):
        return f"Triangle({self.kind}, {self.params})"


@dataclass(frozen=True)
class DenseTruncation:
    N: int
    values: np.ndarray
    kind: str = ""
    params: Optional[dict] = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.N, self.N):
            raise ValueError(f"expected {self.N}x{self.N} values, got {vals.shape}")
        if np.any(np.triu(vals, 1) != 0):
            raise ValueError("truncation is not lower triangular")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.values:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "params": self.params or {},
            "N": self.N,
            "rows": [[float(v) for v in row] for row in self.values],
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DenseTruncation":
        obj = json.loads(text)
        return cls(int(obj["N"]), np.array(obj["rows"], dtype=float), obj.get("kind", ""), obj.get("params"))

    @classmethod
    def from_csv(cls, text: str, kind: str = "file") -> "DenseTruncation":
        rows = [[float(v) for v in r] for r in csv.reader(io.StringIO(text)) if r]
        return cls(len(rows), np.array(rows, dtype=float), kind=kind)


# ---------------------------------------------------------------------------
# concrete matrices


def _banded(diags: list[float], kind: str, params: dict) -> Triangle:
    """Toeplitz band: entry(n, n - i) = diags[i]."""
    coeffs = np.asarray(diags, dtype=float)
    band = len(coeffs) - 1

    def row(n):
        out = np.zeros(n + 1)
        m = min(band, n)
        out[n - m: n + 1] = coeffs[: m + 1][::-1]
        return out

    return Triangle(row, kind, params, band=band)


def identity() -> Triangle:
    return _banded([1.0], "identity", {})


def triple_band(p: BandParams) -> Triangle:
    """B(r, s, t): r on the diagonal, s and t on the two subdiagonals."""
    return _banded([p.r, p.s, p.t], "band", {"r": p.r, "s": p.s, "t": p.t})


def lambda_mean(lam: LambdaSeq) -> Triangle:
    """entry(n, k) = (lambda_k - lambda_{k-1}) / lambda_n for k <= n."""

    def row(n):
        return lam.diffs(n + 1) / lam.at(n)

    def block(N):
        return lam.diffs(N)[None, :] / lam.prefix(N)[:, None]

    return Triangle(row, "lambda-mean", {"lambda": lam.label}, block_fn=block)


def lambda_mean_inverse(lam: LambdaSeq) -> Triangle:
    """Two-band inverse P of the lambda-mean matrix:
    P[j, j] = lambda_j / (lambda_j - lambda_{j-1}),
    P[j, j-1] = -lambda_{j-1} / (lambda_j - lambda_{j-1})."""

    def row(n):
        out = np.zeros(n + 1)
        lam_n, lam_prev = lam.at(n), lam.at(n - 1)
        step = lam_n - lam_prev
        out[n] = lam_n / step
        if n >= 1:
            out[n - 1] = -lam_prev / step
        return out

    return Triangle(row, "lambda-mean-inverse", {"lambda": lam.label}, band=1)


class _InverseCoefficients:
    """d_0, d_1, ... of B(r, s, t)^{-1}, extended on demand by the recurrence
    r d_m + s d_{m-1} + t d_{m-2} = delta_{m0}.  Overflow to +-inf is kept."""

    def __init__(self, p: BandParams):
        if p.r == 0.0:
            raise ZeroDivisionError("B(r, s, t) has no triangle inverse when r = 0")
        self.p = p
        self._d = np.array([1.0 / p.r])
        self._lock = threading.Lock()

    def get(self, n: int) -> np.ndarray:
        """d_0..d_{n-1} (read-only view)."""
        d = self._d
        if len(d) >= n:
            return d[:n]
        with self._lock:
            d = self._d
            if len(d) < n:
                r, s, t = self.p.r, self.p.s, self.p.t
                out = np.empty(n)
                out[: len(d)] = d
                with np.errstate(over="ignore", invalid="ignore"):
                    for m in range(len(d), n):
                        acc = s * out[m - 1]
                        if m >= 2:
                            acc += t * out[m - 2]
                        out[m] = -acc / r
                out.setflags(write=False)
                self._d = out
                d = out
        return d[:n]


_INVERSE_CACHE: dict[tuple, _InverseCoefficients] = {}
_INVERSE_CACHE_LOCK = threading.Lock()


def _coefficients(p: BandParams) -> _InverseCoefficients:
    key = p.as_tuple()
    with _INVERSE_CACHE_LOCK:
        coeffs = _INVERSE_CACHE.get(key)
        if coeffs is None:
            coeffs = _INVERSE_CACHE[key] = _InverseCoefficients(p)
    return coeffs


def inverse_coefficients(p: BandParams, n: int) -> np.ndarray:
    """d_0..d_{n-1}, where entry (j, k) of B^{-1} is d_{j-k}."""
    return _coefficients(p).get(n)


def inverse_closed_form(p: BandParams, m: int) -> tuple[float, float]:
    """d_m from the root-power sum (1/r) * sum_v alpha^(m-v) beta^v.

    Evaluated in complex arithmetic; returns (real part, |imaginary part|).
    0**0 is taken as 1, which is what makes the t = 0 case (beta = 0)
    reduce to (-s/r)^m / r.
    """
    alpha, beta = p.roots
    total = 0j
    for v in range(m + 1):
        total += alpha ** (m - v) * beta ** v
    total /= p.r
    return total.real, abs(total.imag)


def band_inverse(p: BandParams) -> Triangle:
    """D = B(r, s, t)^{-1}, entry(n, k) = d_{n-k}."""
    coeffs = _coefficients(p)

    def row(n):
        return coeffs.get(n + 1)[::-1].copy()

    def block(N):
        d = coeffs.get(N)
        idx = np.subtract.outer(np.arange(N), np.arange(N))
        return np.where(idx >= 0, d[np.clip(idx, 0, None)], 0.0)

    return Triangle(row, "band-inverse", {"r": p.r, "s": p.s, "t": p.t}, block_fn=block)


def what_matrix(p: BandParams, lam: LambdaSeq) -> Triangle:
    """W = (lambda-mean) * B(r, s, t), written out entrywise."""
    r, s, t = p.r, p.s, p.t

    def row(n):
        lam_v = lam.values_at(np.arange(-2, n + 3))  # lam_v[i] = lambda_{i-2}
        k = np.arange(n + 1)
        step = lambda j: lam_v[j + 2] - lam_v[j + 1]  # lambda_j - lambda_{j-1}
        out = (r * step(k) + s * step(k + 1) + t * step(k + 2))
        if n >= 1:
            out[n - 1] = r * step(n - 1) + s * step(n)
        out[n] = r * step(n)
        return out / lam_v[n + 2]

    return Triangle(row, "what", {"r": r, "s": s, "t": t, "lambda": lam.label}, block_fn=None)


def compose(a: Triangle, b: Triangle) -> Triangle:
    """(AB)(n, k) = sum_{j=k..n} a(n, j) b(j, k)."""

    def row(n):
        arow = a.row(n)
        lo = 0 if a.band is None else max(0, n - a.band)
        out = np.zeros(n + 1)
        for j in range(lo, n + 1):
            coef = arow[j]
            if coef != 0.0:
                out[: j + 1] += coef * b.row(j)
        return out

    band = None if a.band is None or b.band is None else a.band + b.band
    return Triangle(row, f"({a.kind})*({b.kind})", {"left": a.params, "right": b.params}, band=band)


def apply(a: Triangle, x: RealSeq, N: int) -> np.ndarray:
    """(Ax)_n = sum_{k<=n} a(n, k) x_k for n < N."""
    xv = x.prefix(N)
    out = np.empty(N)
    for n in range(N):
        arow = a.row(n)
        if a.band is None:
            out[n] = arow @ xv[: n + 1]
        else:
            lo = max(0, n - a.band)
            out[n] = arow[lo:] @ xv[lo: n + 1]
    return out


# ---------------------------------------------------------------------------
# classical catalog


def _elementwise(fn: Callable[[int, int], float], kind: str, params: dict, band=None) -> Triangle:
    def row(n):
        return np.array([fn(n, k) for k in range(n + 1)], dtype=float)

    return Triangle(row, kind, params, band=band)


def _euler_entry(r: float):
    def entry(n, k):
        try:
            return float(math.comb(n, k)) * (1 - r) ** (n - k) * r ** k
        except OverflowError:
            log = (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                   + (n - k) * math.log1p(-r) + k * math.log(r))
            return math.exp(log)
    return entry


def _require_nonzero(seq: RealSeq, name: str, N: int = 256):
    if np.any(seq.prefix(N) == 0.0):
        raise ValueError(f"{name} must have no zero terms")


def catalog(name: str, **params) -> Triangle:
    """Classical triangles by name.

    ``cesaro``; ``riesz`` (q: RealSeq, q_k > 0); ``euler`` (r in (0, 1));
    ``summation``; ``diff1``; ``diffm`` (m >= 1); ``factorable`` (u, v);
    ``a_r_u`` (r, u); ``band`` (r, s, t); ``band2`` (r, s).
    """
    if name == "cesaro":
        return Triangle(lambda n: np.full(n + 1, 1.0 / (n + 1)), "cesaro", {})
    if name == "riesz":
        q: RealSeq = params["q"]
        if np.any(q.prefix(256) <= 0):
            raise ValueError("riesz weights must be positive")

        def row(n):
            qs = q.prefix(n + 1)
            return qs / qs.sum()

        return Triangle(row, "riesz", {"q": q.label})
    if name == "euler":
        r = float(params["r"])
        if not 0.0 < r < 1.0:
            raise ValueError("euler mean needs 0 < r < 1")
        return _elementwise(_euler_entry(r), "euler", {"r": r})
    if name == "summation":
        return Triangle(lambda n: np.ones(n + 1), "summation", {})
    if name == "diff1":
        return _banded([1.0, -1.0], "diff1", {})
    if name == "diffm":
        m = params["m"]
        if int(m) != m or m < 1:
            raise ValueError("diffm needs an integer m >= 1")
        m = int(m)
        return _banded([(-1.0) ** i * math.comb(m, i) for i in range(m + 1)], "diffm", {"m": m})
    if name == "factorable":
        u: RealSeq = params["u"]
        v: RealSeq = params["v"]
        _require_nonzero(u, "u")
        _require_nonzero(v, "v")
        return Triangle(lambda n: u.at(n) * v.prefix(n + 1), "factorable", {"u": u.label, "v": v.label})
    if name == "a_r_u":
        r = float(params["r"])
        u: RealSeq = params["u"]
        _require_nonzero(u, "u")
        if r == -1.0:
            raise ValueError("a_r_u with r = -1 has zero diagonal entries")

        def row(n):
            k = np.arange(n + 1)
            return (1.0 + np.power(r, k)) / (n + 1) * u.prefix(n + 1)

        return Triangle(row, "a_r_u", {"r": r, "u": u.label})
    if name == "band":
        p = BandParams(params["r"], params["s"], params["t"])
        if p.r == 0.0:
            raise ValueError("band needs r != 0")
        return triple_band(p)
    if name == "band2":
        r, s = float(params["r"]), float(params["s"])
        if r == 0.0 or s == 0.0:
            raise ValueError("band2 needs nonzero r and s")
        return _banded([r, s], "band2", {"r": r, "s": s})
    raise ValueError(f"unknown catalog matrix {name!r}")


CATALOG_KINDS = ("cesaro", "riesz", "euler", "summation", "diff1", "diffm",
                 "factorable", "a_r_u", "band", "band2")
