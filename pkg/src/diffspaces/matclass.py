"""Matrix classes (X : Y) with X a W-domain.

A matrix A maps the W-domain of X into Y exactly when a list of
conditions holds on the kernel

    ghat_nk(m) = lambda_k * ( sum_{j=k..m} d_{j-k} a_nj / dl_k
                              - sum_{j=k+1..m} d_{j-k-1} a_nj / dl_{k+1} ),

its limit ghat_nk (m -> inf) and the row limits
a_n = lim_k (1/r) lambda_k / dl_k a_nk, where dl_k = lambda_k - lambda_{k-1}.
Conditions on A itself (the classical lemmas) are available too.

Everything is evaluated on truncations: rows and columns below the
largest schedule point N, inner series up to M = 2N.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .basis import basis_matrix
from .core import BandParams, LambdaSeq, Membership, NotConvergentError, RealSeq, Tolerances
from .duals import DEFAULT_SCHEDULE, _lq_bounds
from .spaces import SpaceTag, classify_base
from .transform import as_seq, forward
from .trend import ConditionRecord, bounded_verdict, combine, limit_verdict, zero_verdict
from .triangles import Triangle, inverse_coefficients

__all__ = [
    "InfiniteMatrix",
    "MatrixEvaluator",
    "ClassReport",
    "THEOREMS",
    "CONDITION_IDS",
    "ghat_nk_m",
    "ghat_nk",
    "condition",
    "class_verdict",
    "transform_identity_check",
    "partial_sum_identity",
]


class InfiniteMatrix:
    """A real matrix indexed by n, k >= 0, evaluated on demand in blocks.

    ``support`` is an optional hint: every row vanishes for k >= support.
    """

    def __init__(self, block_fn: Callable[[int, int], np.ndarray], label: str = "",
                 support: Optional[int] = None):
        self._block_fn = block_fn
        self.label = label
        self.support = support
        self._cache: Optional[np.ndarray] = None
        self._lock = threading.Lock()

    def block(self, nrows: int, ncols: int) -> np.ndarray:
        cached = self._cache
        if cached is None or cached.shape[0] < nrows or cached.shape[1] < ncols:
            with self._lock:
                cached = self._cache
                if cached is None or cached.shape[0] < nrows or cached.shape[1] < ncols:
                    shape = (nrows, ncols) if cached is None else (max(nrows, cached.shape[0]),
                                                                    max(ncols, cached.shape[1]))
                    values = np.asarray(self._block_fn(*shape), dtype=float)
                    if values.shape != shape:
                        raise ValueError(f"matrix block has shape {values.shape}, expected {shape}")
                    values.setflags(write=False)
                    self._cache = cached = values
        return cached[:nrows, :ncols]

    def entry(self, n: int, k: int) -> float:
        return float(self.block(n + 1, k + 1)[n, k])

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray, np.ndarray], np.ndarray], label: str = "",
                      support: Optional[int] = None) -> "InfiniteMatrix":
        """``fn(n, k)`` is called on broadcast index grids."""

        def block(nr, nc):
            n = np.arange(nr, dtype=float)[:, None]
            k = np.arange(nc, dtype=float)[None, :]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return np.broadcast_to(np.asarray(fn(n, k), dtype=float), (nr, nc)).copy()

        return cls(block, label, support)

    @classmethod
    def from_dense(cls, values, label: str = "dense") -> "InfiniteMatrix":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 2:
            raise ValueError("dense matrix must be 2-D")

        def block(nr, nc):
            out = np.zeros((nr, nc))
            r, c = min(nr, arr.shape[0]), min(nc, arr.shape[1])
            out[:r, :c] = arr[:r, :c]
            return out

        return cls(block, label, support=arr.shape[1])

    @classmethod
    def from_triangle(cls, tri: Triangle) -> "InfiniteMatrix":
        def block(nr, nc):
            size = max(nr, nc)
            return tri.dense(size)[:nr, :nc]

        return cls(block, tri.kind)

    @classmethod
    def zero(cls) -> "InfiniteMatrix":
        return cls(lambda nr, nc: np.zeros((nr, nc)), "zero", support=0)

    @classmethod
    def single_row(cls, a) -> "InfiniteMatrix":
        """Row 0 is the sequence a; all other rows vanish."""
        seq = a if isinstance(a, RealSeq) else as_seq(a)

        def block(nr, nc):
            out = np.zeros((nr, nc))
            if nr:
                out[0] = seq.prefix(nc)
            return out

        return cls(block, f"row({seq.label})")

    @classmethod
    def diagonal(cls, diag) -> "InfiniteMatrix":
        seq = diag if isinstance(diag, RealSeq) else as_seq(diag)

        def block(nr, nc):
            out = np.zeros((nr, nc))
            m = min(nr, nc)
            out[np.arange(m), np.arange(m)] = seq.prefix(m)
            return out

        return cls(block, f"diag({seq.label})")

    def __repr__(self):
        return f"InfiniteMatrix({self.label})"


# ---------------------------------------------------------------------------
# kernel


def _weights(lam: LambdaSeq, k: int) -> tuple[float, float]:
    lk = lam.at(k)
    return lk / (lk - lam.at(k - 1)), lk / (lam.at(k + 1) - lk)


def _inner_sums(A: InfiniteMatrix, p: BandParams, n: int, k: int, m: int) -> tuple[float, float]:
    d = inverse_coefficients(p, m + 1)
    row = A.block(n + 1, m + 1)[n]
    first = math.fsum(d[j - k] * row[j] for j in range(k, m + 1))
    second = math.fsum(d[j - k - 1] * row[j] for j in range(k + 1, m + 1))
    return first, second


def ghat_nk_m(A: InfiniteMatrix, p: BandParams, lam: LambdaSeq, n: int, k: int, m: int) -> float:
    """ghat_nk(m) by direct summation (needs k < m)."""
    if not 0 <= k < m:
        raise ValueError("ghat_nk(m) needs 0 <= k < m")
    first, second = _inner_sums(A, p, n, k, m)
    w_lo, w_hi = _weights(lam, k)
    return w_lo * first - w_hi * second


def ghat_nk(A: InfiniteMatrix, p: BandParams, lam: LambdaSeq, n: int, k: int,
            tol: Optional[Tolerances] = None, schedule: Sequence[int] = DEFAULT_SCHEDULE) -> tuple[float, bool]:
    """(ghat_nk at the last inner truncation, converged).

    Converged means the last two iterates of ghat_nk(m), and of both inner
    series, agree within eps_tail (relative to max(1, |value|)).
    """
    tol = tol or Tolerances()
    ms = [k + int(s) for s in schedule]
    if A.support is not None and A.support <= ms[-1]:
        ms.append(max(A.support, k + 1))
        ms.sort()
    values, firsts, seconds = [], [], []
    w_lo, w_hi = _weights(lam, k)
    for m in ms:
        first, second = _inner_sums(A, p, n, k, m)
        firsts.append(first)
        seconds.append(second)
        values.append(w_lo * first - w_hi * second)
    close = lambda seq: abs(seq[-1] - seq[-2]) <= tol.eps_tail * max(1.0, abs(seq[-1]))
    converged = all(np.isfinite(values)) and close(values) and close(firsts) and close(seconds)
    return float(values[-1]), bool(converged)


# ---------------------------------------------------------------------------
# evaluator


_DESCRIPTIONS = {
    "(23)": "lim_n a_nk exists for each k",
    "(24)": "sup_n sum_k |a_nk| is finite",
    "(25)": "lim_n sum_k a_nk exists",
    "(26)": "sup_n sum_k |a_nk|^q is finite",
    "(32)": "sup over finite F of sum_n |sum_{k in F} a_nk|^p is finite",
    "(33)": "lim_n a_nk = 0 for each k",
    "(34)": "sup over finite F of sum_n |sum_{k in F} ghat_nk|^p is finite",
    "(35)": "sum_{j>=k} d_jk a_nj converges for all n, k",
    "(36)": "sup_m sum_{k<m} |ghat_nk(m)| is finite for each n",
    "(37)": "row limit a_n = lim_k (1/r) lambda_k / dl_k a_nk exists for each n",
    "(38)": "the sequence k -> sum_{j>=k} d_jk a_nj is summable for each n",
    "(39)": "row limits a_n form an l_p sequence",
    "(44)": "sup_n sum_k |ghat_nk| is finite",
    "(45)": "row limits a_n are bounded",
    "(46)": "sup_k |(1/r) lambda_k / dl_k a_nk| is finite for each n",
    "(47)": "lim_n a_n exists",
    "(47z)": "lim_n a_n = 0",
    "(48)": "lim_n ghat_nk exists for each k",
    "(48z)": "lim_n ghat_nk = 0 for each k",
    "(49)": "lim_n sum_k ghat_nk exists",
    "(49z)": "lim_n sum_k ghat_nk = 0",
    "(51)": "sup_n sum_k |ghat_nk|^q is finite",
    "L1": "lim_n sum_k |a_nk| = 0",
    "L2": "sup over finite K of sum_n |sum_{k in K} a_nk| is finite",
    "L2ii": "sup over finite N of sum_k |sum_{n in N} a_nk|^q is finite",
    "L3": "(23) and (24)",
    "L4": "(23), (24) and (25)",
    "L5": "(23) and lim_n sum_k |a_nk| = sum_k |lim_n a_nk|",
    "L5b": "lim_n sum_k |a_nk| = sum_k |lim_n a_nk|",
    "L6": "(23) and (26)",
    "L7": "(24)",
    "L8": "(26)",
    "L10": "(32)",
    "L11": "(24), (33) and lim_n sum_k a_nk = 0",
    "L11b": "lim_n sum_k a_nk = 0",
    "L12": "(24) and (33)",
}

_COMPOSITES = {
    "L3": ["(23)", "(24)"],
    "L4": ["(23)", "(24)", "(25)"],
    "L5": ["(23)", "L5b"],
    "L6": ["(23)", "(26)"],
    "L7": ["(24)"],
    "L8": ["(26)"],
    "L10": ["(32)"],
    "L11": ["(24)", "(33)", "L11b"],
    "L12": ["(24)", "(33)"],
}

# conditions that read ghat_nk (need the inner series) or the row limits a_n
_NEEDS_INNER = {"(34)", "(38)", "(44)", "(48)", "(48z)", "(49)", "(49z)", "(51)"}
_NEEDS_ROW_LIMIT = {"(39)", "(45)", "(47)", "(47z)"}

CONDITION_IDS = tuple(_DESCRIPTIONS)


def _normalize(cid) -> str:
    text = str(cid).strip()
    if text.upper().startswith("L"):
        return "L" + text[1:]
    text = text.strip("()")
    return f"({text})"


class MatrixEvaluator:
    """Shared truncated blocks and a condition cache for one (A, p, lambda).

    Rows n and columns k of ghat_nk run below M = 2 * max(schedule); the
    inner series run to j = M.  Conditions stated "for each fixed n" (or k)
    are checked on the first ``fixed`` rows (columns).
    """

    def __init__(self, A: InfiniteMatrix, p: BandParams, lam: LambdaSeq,
                 schedule: Sequence[int] = DEFAULT_SCHEDULE, tol: Optional[Tolerances] = None,
                 fixed: int = 16):
        self.A, self.p, self.lam = A, p, lam
        self.tol = tol or Tolerances()
        self.schedule = [int(v) for v in schedule]
        if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])) or self.schedule[0] < 2:
            raise ValueError("schedule must be increasing with entries >= 2")
        self.N = self.schedule[-1]
        self.M = 2 * self.N
        if self.M <= self.tol.window:
            raise ValueError("2 * max(schedule) must exceed the tail window")
        self.fixed = min(fixed, self.N)
        self._cache: dict = {}
        self._lock = threading.RLock()

    # ---- shared blocks -------------------------------------------------

    def _memo(self, key, fn):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = fn()
            return self._cache[key]

    @property
    def a(self) -> np.ndarray:
        """A on rows < M, columns <= M."""
        return self._memo("a", lambda: self.A.block(self.M, self.M + 1))

    @property
    def Bb(self) -> np.ndarray:
        return self._memo("Bb", lambda: basis_matrix(self.p, self.lam, self.M + 1))

    @property
    def ghat(self) -> np.ndarray:
        """ghat_nk(M) for n < M, k < N."""
        def build():
            with np.errstate(over="ignore", invalid="ignore"):
                return self.a @ self.Bb[:, : self.N]
        return self._memo("ghat", build)

    def inner(self, m: int) -> np.ndarray:
        """sum_{j=k..m} d_{j-k} a_nj for n < N, k <= N."""
        def build():
            d = inverse_coefficients(self.p, self.M + 1)
            lag = np.subtract.outer(np.arange(m + 1), np.arange(self.N + 1))
            D = np.where(lag >= 0, d[np.clip(lag, 0, None)], 0.0)
            with np.errstate(over="ignore", invalid="ignore"):
                return self.a[: self.N, : m + 1] @ D
        return self._memo(("inner", m), build)

    @property
    def weighted(self) -> np.ndarray:
        """c_nk = (1/r) lambda_k / dl_k a_nk for n < M, k <= M."""
        def build():
            ks = np.arange(self.M + 1)
            lk = self.lam.values_at(ks)
            w = lk / (lk - self.lam.values_at(ks - 1)) / self.p.r
            return self.a * w[None, :]
        return self._memo("weighted", build)

    @property
    def row_limits(self) -> np.ndarray:
        """Estimates of a_n: the last column of c_nk."""
        return self.weighted[:, self.M - 1]

    def ghat_partial_table(self, n: int) -> np.ndarray:
        """Entry (m, k): sum_{j<=m} a_nj b^(k)_j; ghat_nk(m) below the diagonal."""
        N = self.N
        with np.errstate(over="ignore", invalid="ignore"):
            return np.cumsum(self.a[n, :N, None] * self.Bb[:N, :N], axis=0)

    # ---- conditions ----------------------------------------------------

    def condition(self, cid, q: Optional[float] = None, p_exp: float = 2.0) -> ConditionRecord:
        key = _normalize(cid)
        if key not in _DESCRIPTIONS:
            raise ValueError(f"unknown condition {cid!r}")
        if q is None:
            q = p_exp / (p_exp - 1.0) if p_exp > 1.0 else 1.0
        return self._memo(("cond", key, q, p_exp), lambda: self._compute(key, q, p_exp))

    def _record(self, key, values, verdict, evidence=None, note=None) -> ConditionRecord:
        return ConditionRecord(key, _DESCRIPTIONS[key], list(self.schedule), [float(v) for v in values],
                               verdict, dict(evidence or {}), note)

    def _pointwise(self, key, columns: np.ndarray, space: str, values) -> ConditionRecord:
        """Limit (space 'c') or null limit ('c0') of each column over n < M."""
        verdicts, limits = [], []
        for j in range(columns.shape[1]):
            diag = classify_base(columns[:, j], SpaceTag(space), columns.shape[0], self.tol)
            verdicts.append(diag.status)
            limits.append(diag.limit_estimate if diag.limit_estimate is not None else float(columns[-1, j]))
        status = Membership.conjunction(verdicts)
        ev = {"indices_checked": columns.shape[1], "limits": limits,
              "index_verdicts": [v.value for v in verdicts]}
        return self._record(key, values, status, ev)

    def _per_row_bounded(self, key, table: Callable[[int, int], float]) -> ConditionRecord:
        verdicts, rows = [], []
        for n in range(self.fixed):
            vals = [table(n, N) for N in self.schedule]
            verdicts.append(bounded_verdict(vals, self.tol)[0])
            rows.append(vals)
        values = np.max(np.abs(np.array(rows)), axis=0)
        ev = {"rows_checked": self.fixed, "row_verdicts": [v.value for v in verdicts]}
        return self._record(key, values, Membership.conjunction(verdicts), ev)

    def _compute(self, key: str, q: float, p_exp: float) -> ConditionRecord:
        if key in _COMPOSITES:
            parts = [self.condition(c, q, p_exp) for c in _COMPOSITES[key]]
            rec = combine(key, _DESCRIPTIONS[key], parts)
            return rec
        dep = None
        if key in _NEEDS_INNER:
            dep = self.condition("(35)")
        elif key in _NEEDS_ROW_LIMIT:
            dep = self.condition("(37)")
        rec = self._raw(key, q, p_exp)
        if dep is not None and dep.verdict is not Membership.MEMBER:
            rec.note = f"depends on {dep.id}, which is {dep.verdict.value}"
            rec.evidence["raw_verdict"] = rec.verdict.value
            rec.verdict = Membership.INCONCLUSIVE
        return rec

    def _raw(self, key: str, q: float, p_exp: float) -> ConditionRecord:
        S, tol, N, M = self.schedule, self.tol, self.N, self.M
        with np.errstate(over="ignore", invalid="ignore"):
            if key in ("(23)", "(33)"):
                cols = self.a[:, : self.fixed]
                values = [float(np.max(np.abs(cols[s - 1]))) for s in S]
                return self._pointwise(key, cols, "c" if key == "(23)" else "c0", values)

            if key in ("(24)", "(26)", "(44)", "(51)"):
                power = 1.0 if key in ("(24)", "(44)") else q
                src = self.a if key in ("(24)", "(26)") else self.ghat
                values = [float(np.max(np.sum(np.abs(src[:s, :s]) ** power, axis=1))) for s in S]
                status, ev = bounded_verdict(values, tol)
                if key in ("(26)", "(51)"):
                    ev["q"] = q
                return self._record(key, values, status, ev)

            if key in ("(25)", "L11b", "(49)", "(49z)"):
                # rows n < N only: a triangular row n has n + 1 entries, and ghat keeps k < N
                src = self.a[:N] if key in ("(25)", "L11b") else self.ghat[:N]
                sums = np.sum(src, axis=1)
                space = "c0" if key in ("L11b", "(49z)") else "c"
                values = [float(sums[s - 1]) for s in S]
                diag = classify_base(sums, SpaceTag(space), len(sums), tol)
                return self._record(key, values, diag.status, diag.to_dict()["evidence"])

            if key in ("(32)", "(34)"):
                src = self.a if key == "(32)" else self.ghat
                lows, highs = [], []
                for s in S:
                    lo, hi = _lq_bounds(src[:s, :s].T, p_exp)
                    lows.append(lo)
                    highs.append(hi)
                return self._sandwich(key, lows, highs, p_exp)

            if key == "L2ii":
                lows, highs = [], []
                for s in S:
                    lo, hi = _lq_bounds(self.a[:s, :s], q)
                    lows.append(lo)
                    highs.append(hi)
                return self._sandwich(key, lows, highs, q)

            if key == "L2":
                values = [math.fsum(np.abs(self.a[:s, :s]).ravel()) for s in S]
                status, ev = bounded_verdict(values, tol)
                ev["note"] = "absolute-sum surrogate; within a factor 4 of the subset sup"
                return self._record(key, values, status, ev)

            if key == "L1":
                rows = np.sum(np.abs(self.a[:, :M]), axis=1)
                values = [float(rows[s - 1]) for s in S]
                status, ev = zero_verdict(values, tol)
                return self._record(key, values, status, ev)

            if key == "L5b":
                alpha = self.a[M - 1, :M]
                target = math.fsum(np.abs(alpha))
                rows = np.sum(np.abs(self.a[:, :M]), axis=1)
                values = [abs(float(rows[s - 1]) - target) for s in S]
                status, ev = zero_verdict(values, tol)
                ev["sum_abs_limits"] = target
                return self._record(key, values, status, ev)

            if key == "(35)":
                return self._inner_convergence()

            if key == "(36)":
                tables = {}

                def table(n, s):
                    if n not in tables:
                        T = np.abs(np.tril(self.ghat_partial_table(n), -1))
                        tables[n] = np.maximum.accumulate(np.sum(T, axis=1))
                    return float(tables[n][s - 1])

                return self._per_row_bounded(key, table)

            if key == "(37)":
                verdicts, limits = [], []
                for n in range(self.fixed):
                    diag = classify_base(self.weighted[n, :M], SpaceTag("c"), M, tol)
                    verdicts.append(diag.status)
                    limits.append(float(self.weighted[n, M - 1]))
                gaps = []
                for s in S:
                    block = self.weighted[: self.fixed, s // 2: s]
                    gaps.append(float(np.max(np.max(block, axis=1) - np.min(block, axis=1))))
                ev = {"rows_checked": self.fixed, "row_limits": limits,
                      "row_verdicts": [v.value for v in verdicts]}
                return self._record(key, gaps, Membership.conjunction(verdicts), ev)

            if key == "(38)":
                T = self.inner(M)[: self.fixed, :N]
                partial = np.cumsum(T, axis=1)
                verdicts = [limit_verdict([partial[n, s - 1] for s in S], tol)[0] for n in range(self.fixed)]
                values = [float(np.max(np.abs(partial[:, s - 1]))) for s in S]
                ev = {"rows_checked": self.fixed, "row_verdicts": [v.value for v in verdicts]}
                return self._record(key, values, Membership.conjunction(verdicts), ev)

            if key in ("(39)", "(45)"):
                lim = self.row_limits
                if key == "(39)":
                    values = [math.fsum(np.abs(lim[:s]) ** p_exp) for s in S]
                else:
                    values = [float(np.max(np.abs(lim[:s]))) for s in S]
                status, ev = bounded_verdict(values, tol)
                return self._record(key, values, status, ev)

            if key == "(46)":
                absw = np.abs(self.weighted)
                return self._per_row_bounded(key, lambda n, s: float(np.max(absw[n, :s])))

            if key in ("(47)", "(47z)"):
                lim = self.row_limits
                values = [float(lim[s - 1]) for s in S]
                diag = classify_base(lim, SpaceTag("c" if key == "(47)" else "c0"), len(lim), tol)
                return self._record(key, values, diag.status, diag.to_dict()["evidence"])

            if key in ("(48)", "(48z)"):
                cols = self.ghat[:, : self.fixed]
                values = [float(np.max(np.abs(cols[s - 1]))) for s in S]
                return self._pointwise(key, cols, "c" if key == "(48)" else "c0", values)

        raise ValueError(f"unknown condition {key!r}")

    def _sandwich(self, key, lows, highs, power) -> ConditionRecord:
        up, ev = bounded_verdict(highs, self.tol)
        down, _ = bounded_verdict(lows, self.tol)
        if up is Membership.MEMBER:
            status = Membership.MEMBER
        elif down is Membership.NON_MEMBER:
            status = Membership.NON_MEMBER
        else:
            status = Membership.INCONCLUSIVE
        ev.update({"lower_bounds": lows, "upper_bounds": highs, "power": power})
        return self._record(key, highs, status, ev)

    def _inner_convergence(self) -> ConditionRecord:
        """Cauchy test of both inner series on the inner schedule M/8 .. M."""
        tol, M = self.tol, self.M
        ms = [M // 8, M // 4, M // 2, M]
        if self.A.support is not None and self.A.support <= M // 2:
            ms = [max(self.A.support, 1), M // 2, M]
        stack = np.array([self.inner(m) for m in ms])  # (len(ms), N, N + 1)
        values = [float(np.max(np.abs(stack[i] - stack[i - 1]))) for i in range(1, len(ms))]
        if not np.all(np.isfinite(stack)):
            return self._record("(35)", values, Membership.INCONCLUSIVE, {"reason": "non-finite partial sums"})
        last, prev = stack[-1], stack[-2]
        scale = np.maximum(1.0, np.abs(last))
        settled = np.abs(last - prev) <= tol.eps_tail * scale
        gaps = np.abs(np.diff(stack, axis=0))
        growing = np.all(gaps > tol.escape, axis=0) & np.all(gaps[1:] >= gaps[:-1] * (1 - 1e-9), axis=0)
        mags = np.abs(stack)
        geometric = (mags[-1] > tol.escape) & np.all(mags[1:] >= tol.growth_ratio * mags[:-1], axis=0)
        diverging = (growing | geometric) & (len(ms) >= 3)
        if np.any(diverging):
            status = Membership.NON_MEMBER
        elif np.all(settled):
            status = Membership.MEMBER
        else:
            status = Membership.INCONCLUSIVE
        n_bad, k_bad = np.unravel_index(int(np.argmax(np.abs(last - prev) / scale)), last.shape)
        ev = {"inner_truncations": ms, "entries_checked": int(last.size),
              "unsettled": int(np.sum(~settled)), "diverging": int(np.sum(diverging)),
              "worst_entry": [int(n_bad), int(k_bad)]}
        return ConditionRecord("(35)", _DESCRIPTIONS["(35)"], ms[1:], values, status, ev)


def condition(cid, A: InfiniteMatrix, p: BandParams, lam: LambdaSeq,
              schedule: Sequence[int] = DEFAULT_SCHEDULE, q: Optional[float] = None,
              p_exp: float = 2.0, tol: Optional[Tolerances] = None) -> ConditionRecord:
    return MatrixEvaluator(A, p, lam, schedule, tol).condition(cid, q, p_exp)


# ---------------------------------------------------------------------------
# theorems

THEOREMS = {
    "11": ("c", "lp", ["(34)", "(35)", "(36)", "(37)", "(38)", "(39)"]),
    "12": ("c", "linf", ["(37)", "(38)", "(44)", "(45)"]),
    "13": ("c0", "lp", ["(34)", "(35)", "(36)", "(46)"]),
    "13ii": ("c0", "linf", ["(36)", "(44)", "(46)"]),
    "14": ("c", "c", ["(37)", "(38)", "(44)", "(47)", "(48)", "(49)"]),
    "15": ("c", "c0", ["(37)", "(38)", "(44)", "(47z)", "(48z)", "(49z)"]),
    "16": ("c0", "c", ["(35)", "(44)", "(46)", "(48)"]),
    "17": ("c0", "c0", ["(35)", "(44)", "(48)"]),
    "18": ("lp", "linf", ["(36)", "(46)", "(51)"]),
    "19": ("lp", "c", ["(36)", "(46)", "(48)", "(51)"]),
    "20": ("lp", "c0", ["(36)", "(46)", "(51)", "(48z)"]),
}
_NEEDS_P = {"11", "13", "18", "19", "20"}


@dataclass
class ClassReport:
    theorem: str
    source: str
    target: str
    conditions: list = field(default_factory=list)
    verdict: Membership = Membership.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "source": self.source, "target": self.target,
                "verdict": self.verdict.value, "conditions": [c.to_dict() for c in self.conditions]}


def class_verdict(theorem, A: InfiniteMatrix, p: BandParams, lam: LambdaSeq,
                  schedule: Sequence[int] = DEFAULT_SCHEDULE, p_exp: float = 2.0,
                  tol: Optional[Tolerances] = None, evaluator: Optional[MatrixEvaluator] = None,
                  conditions: Optional[Sequence[str]] = None) -> ClassReport:
    """Conjunction of the conditions characterizing the class.

    ``theorem`` is one of 11..20 or "13ii"; ``conditions`` overrides the list.
    """
    key = str(theorem).strip()
    if key not in THEOREMS and conditions is None:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {sorted(THEOREMS)}")
    source, target, ids = THEOREMS.get(key, ("?", "?", []))
    if key in _NEEDS_P and not p_exp > 1.0:
        raise ValueError(f"theorem {key} needs p > 1")
    if conditions is not None:
        ids = [_normalize(c) for c in conditions]
    ev = evaluator or MatrixEvaluator(A, p, lam, schedule, tol)
    records = [ev.condition(c, None, p_exp) for c in ids]
    verdict = Membership.conjunction(r.verdict for r in records)

    def name(base):
        return f"{base}:{p_exp:g}" if base == "lp" else base

    return ClassReport(key, f"domain:{name(source)}", name(target), records, verdict)


# ---------------------------------------------------------------------------
# identities


def partial_sum_identity(A: InfiniteMatrix, p: BandParams, lam: LambdaSeq, x, N: int,
                         rows: Optional[int] = None) -> float:
    """max over n < rows, m < N of the gap between sum_{k<=m} a_nk x_k and
    sum_{k<m} ghat_nk(m) y_k + (1/r) lambda_m / dl_m a_nm y_m, y = W x."""
    rows = N if rows is None else rows
    xv = as_seq(x).prefix(N)
    y = forward(p, lam, xv, N)
    a = A.block(rows, N)
    Bb = basis_matrix(p, lam, N)
    worst = 0.0
    for n in range(rows):
        lhs = np.cumsum(a[n] * xv)
        T = np.tril(np.cumsum(a[n][:, None] * Bb, axis=0))  # (m, k); diagonal is the last term
        rhs = T @ y
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def transform_identity_check(A: InfiniteMatrix, p: BandParams, lam: LambdaSeq, x, N: int,
                             tol: Optional[Tolerances] = None, inner: Optional[int] = None) -> float:
    """max_{n<N} |A_n(x) - (sum_k ghat_nk y_k + l a_n)| with y = W x and l = lim y.

    Both outer series are cut at ``inner`` terms (default 1024); ghat_nk and
    the row limits a_n use twice as many, so the two sides are independent
    approximations.  Raises NotConvergentError when y or a row limit does
    not converge.
    """
    tol = tol or Tolerances()
    K = inner or 1024
    L = 2 * K
    xv = as_seq(x).prefix(K)
    y = forward(p, lam, xv, K)
    diag = classify_base(y, SpaceTag("c"), K, tol)
    if diag.status is not Membership.MEMBER:
        raise NotConvergentError("W x is not convergent at the inner truncation", diag.to_dict())
    l = float(diag.limit_estimate)
    a = A.block(N, L)
    ks = np.arange(L)
    lk = lam.values_at(ks)
    weighted = a * (lk / (lk - lam.values_at(ks - 1)) / p.r)[None, :]
    for n in range(N):
        rd = classify_base(weighted[n], SpaceTag("c"), L, tol)
        if rd.status is not Membership.MEMBER:
            raise NotConvergentError(f"row limit a_{n} does not converge", rd.to_dict())
    row_limits = weighted[:, L - 1]
    Bb = basis_matrix(p, lam, L)
    with np.errstate(over="ignore", invalid="ignore"):
        ghat = a @ Bb[:, :K]
        lhs = a[:, :K] @ xv
        rhs = ghat @ y + l * row_limits
    return float(np.max(np.abs(lhs - rhs)))
