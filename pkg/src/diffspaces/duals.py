"""Alpha, beta and gamma duals of the W-domains.

The seven candidate sets f1..f7 are tested at finite truncation along a
doubling schedule.  Each dual is the conjunction of some of them:

    alpha: f1 for c0, c, linf;  f6 for lp
    beta:  f2, f3, f4 for c0 and lp;  plus f5 for c;  f2, f4, f7 for linf
    gamma: f3, f4 for every space

with q = 1 in f3 except for lp, where q = p / (p - 1).

Sup-over-finite-subset functionals (f1, f6) are exponential to evaluate
exactly.  ``subset_sup_l1`` / ``subset_sup_lq`` enumerate subsets of a small
index window as an oracle; verdicts use the absolute-sum surrogate, which
bounds the exact functional within a factor of 4 for f1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .basis import basis_matrix
from .core import BandParams, LambdaSeq, Membership, RealSeq, Tolerances
from .spaces import SpaceTag
from .transform import as_seq, forward
from .trend import ConditionRecord, bounded_verdict, limit_verdict, zero_verdict
from .triangles import Triangle, inverse_coefficients

__all__ = [
    "DEFAULT_SCHEDULE",
    "MAX_SUBSET_INDEX",
    "GHatKernel",
    "DualReport",
    "build_F",
    "build_V",
    "subset_sup_l1",
    "subset_sup_lq",
    "subset_objectives",
    "f_condition",
    "dual_check",
    "dual_conditions",
    "pairing_test",
    "product_identity_test",
]

DEFAULT_SCHEDULE = (64, 128, 256, 512)
MAX_SUBSET_INDEX = 16
_POINTWISE_COLUMNS = 16

_DESCRIPTIONS = {
    1: "sup over finite K of sum_n |sum_{k in K} f_nk| is finite",
    2: "sum_{j>=k} d_jk a_j converges for each k",
    3: "sup_n sum_{k<n} |ghat_k(n)|^q is finite",
    4: "sup_n |(1/r) lambda_n / (lambda_n - lambda_{n-1}) a_n| is finite",
    5: "sum_k (sum_{j<=k} d_kj) a_k converges",
    6: "sup over finite N of sum_k |sum_{n in N} f_nk|^q is finite",
    7: "lim_n sum_k |v_nk| equals sum_k |lim_n v_nk|",
}


# ---------------------------------------------------------------------------
# F, V and the kernel ghat_k(n)


def _seq(a) -> RealSeq:
    return a if isinstance(a, RealSeq) else as_seq(a)


def build_F(p: BandParams, lam: LambdaSeq, a) -> Triangle:
    """f_nk = a_n b^(k)_n: row n of the basis matrix scaled by a_n."""
    a = _seq(a)

    def row(n):
        return a.at(n) * basis_matrix(p, lam, n + 1)[n]

    def block(N):
        return a.prefix(N)[:, None] * basis_matrix(p, lam, N)

    return Triangle(row, "F", {"r": p.r, "s": p.s, "t": p.t, "lambda": lam.label, "a": a.label},
                    block_fn=block)


def build_V(p: BandParams, lam: LambdaSeq, a) -> Triangle:
    """v_nk = sum_{j<=n} f_jk: ghat_k(n) below the diagonal, f_nn on it."""
    a = _seq(a)

    def block(N):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.cumsum(a.prefix(N)[:, None] * basis_matrix(p, lam, N), axis=0)

    def row(n):
        return block(n + 1)[n]

    return Triangle(row, "V", {"r": p.r, "s": p.s, "t": p.t, "lambda": lam.label, "a": a.label},
                    block_fn=block)


@dataclass(frozen=True)
class GHatKernel:
    """(k, n) -> ghat_k(n) for a fixed sequence a."""

    p: BandParams
    lam: LambdaSeq
    a: RealSeq

    def __call__(self, k: int, n: int) -> float:
        """Direct two-sum evaluation; the oracle for :meth:`table`."""
        if not 0 <= k < n:
            raise ValueError("ghat_k(n) is defined for 0 <= k < n")
        d = inverse_coefficients(self.p, n + 1)
        lam_at = self.lam.at
        first = math.fsum(d[j - k] * self.a.at(j) for j in range(k, n + 1))
        second = math.fsum(d[j - k - 1] * self.a.at(j) for j in range(k + 1, n + 1))
        lk = lam_at(k)
        return lk * (first / (lk - lam_at(k - 1)) - second / (lam_at(k + 1) - lk))

    def table(self, N: int) -> np.ndarray:
        """N x N block of V: entry (n, k) is ghat_k(n) for k < n."""
        return build_V(self.p, self.lam, self.a).dense(N)


# ---------------------------------------------------------------------------
# subset sups


def subset_objectives(vectors: np.ndarray, power: float = 1.0, method: str = "incremental") -> np.ndarray:
    """Objective sum_i |sum_{j in S} vectors[j, i]|^power for every subset S.

    Subsets are indexed by bitmask (bit j set when j is in S).  Partial sums
    are formed in ascending index order in both methods, so ``incremental``
    (shared prefix sums) and ``brute`` (one fold per subset) agree exactly.
    """
    vecs = np.asarray(vectors, dtype=float)
    if vecs.ndim != 2:
        raise ValueError("vectors must be a 2-D array (items x length)")
    count, length = vecs.shape
    if count > MAX_SUBSET_INDEX + 1:
        raise ValueError(f"subset enumeration is limited to {MAX_SUBSET_INDEX + 1} items")
    objective = lambda v: math.fsum(np.abs(v) ** power)
    out = np.empty(1 << count)
    if method == "brute":
        for mask in range(1 << count):
            acc = np.zeros(length)
            for j in range(count):
                if mask >> j & 1:
                    acc = acc + vecs[j]
            out[mask] = objective(acc)
        return out
    if method != "incremental":
        raise ValueError(f"unknown method {method!r}")
    low = min(count, 12)
    table = np.zeros((1 << low, length))
    for j in range(low):
        table[1 << j: 2 << j] = table[: 1 << j] + vecs[j]
    for high in range(1 << (count - low)):
        block = table
        for j in range(count - low):
            if high >> j & 1:
                block = block + vecs[low + j]
        base = high << low
        for i in range(1 << low):
            out[base + i] = objective(block[i])
    return out


def _dense(M, nrows: int, ncols: int) -> np.ndarray:
    if isinstance(M, np.ndarray):
        out = np.zeros((nrows, ncols))
        r, c = min(nrows, M.shape[0]), min(ncols, M.shape[1])
        out[:r, :c] = M[:r, :c]
        return out
    if hasattr(M, "block"):
        return np.asarray(M.block(nrows, ncols), dtype=float)
    size = max(nrows, ncols)
    return M.dense(size)[:nrows, :ncols]


def subset_sup_l1(M, Kmax: int, Nrows: int, method: str = "incremental") -> tuple[float, float]:
    """(exact, surrogate) for the column-subset functional on rows 0..Nrows-1.

    exact = max over K in {0..Kmax} of sum_n |sum_{k in K} M(n, k)|;
    surrogate = sum_n sum_{k<=Kmax} |M(n, k)|.
    """
    if Kmax > MAX_SUBSET_INDEX:
        raise ValueError(f"Kmax = {Kmax} exceeds the enumeration guard {MAX_SUBSET_INDEX}")
    block = _dense(M, Nrows, Kmax + 1)
    exact = float(np.max(subset_objectives(block.T, 1.0, method)))
    surrogate = math.fsum(np.abs(block).ravel())
    return exact, surrogate


def subset_sup_lq(M, q: float, Nmax: int, Kcols: int, method: str = "incremental") -> float:
    """max over N in {0..Nmax} of sum_{k<Kcols} |sum_{n in N} M(n, k)|^q."""
    if Nmax > MAX_SUBSET_INDEX:
        raise ValueError(f"Nmax = {Nmax} exceeds the enumeration guard {MAX_SUBSET_INDEX}")
    block = _dense(M, Nmax + 1, Kcols)
    return float(np.max(subset_objectives(block, q, method)))


def _lq_bounds(block: np.ndarray, q: float) -> tuple[float, float]:
    """Cheap (lower, upper) bounds for the row-subset functional of ``block``."""
    absb = np.abs(block)
    upper = float(np.sum(np.sum(absb, axis=0) ** q))
    lower = max(float(np.sum(np.abs(np.sum(block, axis=0)) ** q)),
                float(np.max(np.sum(absb ** q, axis=1))) if block.size else 0.0)
    return lower, upper


# ---------------------------------------------------------------------------
# conditions


class _Context:
    """Dense F and V blocks shared by all conditions for one (p, lambda, a)."""

    def __init__(self, p: BandParams, lam: LambdaSeq, a, schedule: Sequence[int], tol: Tolerances):
        schedule = [int(v) for v in schedule]
        if not schedule or any(b <= a_ for a_, b in zip(schedule, schedule[1:])) or schedule[0] < 2:
            raise ValueError("schedule must be an increasing list of truncations >= 2")
        self.p, self.lam, self.a, self.tol = p, lam, _seq(a), tol
        self.schedule = schedule
        self.M = 2 * schedule[-1]
        with np.errstate(over="ignore", invalid="ignore"):
            self.av = self.a.prefix(self.M)
            self.F = self.av[:, None] * basis_matrix(p, lam, self.M)
            self.V = np.cumsum(self.F, axis=0)
        self.d = inverse_coefficients(p, self.M)


def _finite(values) -> bool:
    return bool(np.all(np.isfinite(np.asarray(values, dtype=float))))


def _record(idx: int, ctx: _Context, values, verdict, evidence, q=None) -> ConditionRecord:
    ev = dict(evidence)
    if q is not None:
        ev["q"] = q
    return ConditionRecord(f"f{idx}", _DESCRIPTIONS[idx], list(ctx.schedule), [float(v) for v in values],
                           verdict, ev)


def _evaluate(idx: int, ctx: _Context, q: float) -> ConditionRecord:
    tol, S = ctx.tol, ctx.schedule
    F, V = ctx.F, ctx.V
    with np.errstate(over="ignore", invalid="ignore"):
        if idx == 1:
            values = [math.fsum(np.abs(np.tril(F[:N, :N])).ravel()) if _finite(F[:N, :N]) else float("inf")
                      for N in S]
            status, ev = bounded_verdict(values, tol)
            K = min(10, S[0] - 1)
            exact, surrogate = subset_sup_l1(F, K, S[0])
            ev.update({"oracle_kmax": K, "oracle_rows": S[0], "oracle_exact": exact, "oracle_surrogate": surrogate})
            return _record(1, ctx, values, status, ev)

        if idx == 2:
            K0 = min(_POINTWISE_COLUMNS, S[0])
            idx_j = np.arange(ctx.M)
            lag = np.subtract.outer(idx_j, np.arange(K0))
            D = np.where(lag >= 0, ctx.d[np.clip(lag, 0, None)], 0.0)
            partial = np.array([ctx.av[:N] @ D[:N] for N in S])  # (len(S), K0)
            verdicts = [limit_verdict(partial[:, k], tol)[0] for k in range(K0)]
            status = Membership.conjunction(verdicts)
            values = [float(np.max(np.abs(row))) for row in partial]
            ev = {"columns_checked": K0,
                  "column_verdicts": {m.value: sum(v is m for v in verdicts) for m in Membership},
                  "last_gaps": [float(g) for g in np.abs(partial[-1] - partial[-2])]}
            return _record(2, ctx, values, status, ev)

        if idx == 3:
            values = []
            for N in S:
                strict = np.abs(np.tril(V[:N, :N], -1)) ** q
                values.append(float(np.max(np.sum(strict, axis=1))))
            status, ev = bounded_verdict(values, tol)
            return _record(3, ctx, values, status, ev, q)

        if idx == 4:
            diag = np.abs(np.diag(F))
            values = [float(np.max(diag[:N])) for N in S]
            status, ev = bounded_verdict(values, tol)
            return _record(4, ctx, values, status, ev)

        if idx == 5:
            b = np.cumsum(ctx.d)
            series = np.cumsum(b * ctx.av)
            values = [float(series[N - 1]) for N in S]
            status, ev = limit_verdict(values, tol)
            return _record(5, ctx, values, status, ev)

        if idx == 6:
            lows, highs = [], []
            for N in S:
                lo, hi = _lq_bounds(F[:N, :N], q)
                lows.append(lo)
                highs.append(hi)
            up, ev = bounded_verdict(highs, tol)
            down, _ = bounded_verdict(lows, tol)
            if up is Membership.MEMBER:
                status = Membership.MEMBER
            elif down is Membership.NON_MEMBER:
                status = Membership.NON_MEMBER
            else:
                status = Membership.INCONCLUSIVE
            ev.update({"lower_bounds": lows, "upper_bounds": highs})
            return _record(6, ctx, highs, status, ev, q)

        if idx == 7:
            limits = V[ctx.M - 1]
            target = math.fsum(np.abs(limits))
            gaps = [abs(math.fsum(np.abs(V[N - 1])) - target) for N in S]
            status, ev = zero_verdict(gaps, tol)
            ev.update({"limit_rows": ctx.M, "sum_abs_limits": target})
            return _record(7, ctx, gaps, status, ev)

    raise ValueError("condition index must be in 1..7")


def f_condition(idx: int, p: BandParams, lam: LambdaSeq, a, schedule: Sequence[int] = DEFAULT_SCHEDULE,
                q: float = 1.0, tol: Optional[Tolerances] = None) -> ConditionRecord:
    """Evaluate the idx-th dual-set condition along ``schedule``."""
    tol = tol or Tolerances()
    return _evaluate(idx, _Context(p, lam, a, schedule, tol), q)


def dual_conditions(dual: str, space: SpaceTag) -> list[tuple[int, float]]:
    """(condition index, q) pairs whose conjunction is the requested dual."""
    if isinstance(space, str):
        space = SpaceTag.parse(space)
    if space.base == "lp":
        if space.p is None or space.p <= 1.0:
            raise ValueError("duals of lp need 1 < p < inf")
        q = space.p / (space.p - 1.0)
    else:
        q = 1.0
    table = {
        "alpha": {"c0": [(1, 1.0)], "c": [(1, 1.0)], "linf": [(1, 1.0)], "lp": [(6, q)]},
        "beta": {"c0": [(2, 1.0), (3, 1.0), (4, 1.0)],
                 "c": [(2, 1.0), (3, 1.0), (4, 1.0), (5, 1.0)],
                 "linf": [(2, 1.0), (4, 1.0), (7, 1.0)],
                 "lp": [(2, 1.0), (3, q), (4, 1.0)]},
        "gamma": {"c0": [(3, 1.0), (4, 1.0)], "c": [(3, 1.0), (4, 1.0)],
                  "linf": [(3, 1.0), (4, 1.0)], "lp": [(3, q), (4, 1.0)]},
    }
    if dual not in table:
        raise ValueError(f"dual must be alpha, beta or gamma, got {dual!r}")
    return table[dual][space.base]


@dataclass
class DualReport:
    dual: str
    space: str
    conditions: list = field(default_factory=list)
    verdict: Membership = Membership.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {"dual": self.dual, "space": self.space, "verdict": self.verdict.value,
                "conditions": [c.to_dict() for c in self.conditions]}


def dual_check(dual: str, space, p: BandParams, lam: LambdaSeq, a,
               schedule: Sequence[int] = DEFAULT_SCHEDULE, tol: Optional[Tolerances] = None) -> DualReport:
    """Decide whether a lies in the requested dual of the W-domain of ``space``."""
    tol = tol or Tolerances()
    tag = SpaceTag.parse(space) if isinstance(space, str) else space
    ctx = _Context(p, lam, a, schedule, tol)
    records = [_evaluate(idx, ctx, q) for idx, q in dual_conditions(dual, tag)]
    verdict = Membership.conjunction(r.verdict for r in records)
    return DualReport(dual, str(tag.unwrapped()), records, verdict)


# ---------------------------------------------------------------------------
# identities


def pairing_test(p: BandParams, lam: LambdaSeq, a, x, N: int) -> float:
    """max_n |sum_{k<=n} a_k x_k - (V y)_n| with y = W x."""
    a = _seq(a)
    xv = as_seq(x).prefix(N)
    y = forward(p, lam, xv, N)
    lhs = np.cumsum(a.prefix(N) * xv)
    rhs = build_V(p, lam, a).dense(N) @ y
    return float(np.max(np.abs(lhs - rhs)))


def product_identity_test(p: BandParams, lam: LambdaSeq, a, x, N: int) -> float:
    """max_n |a_n x_n - (F y)_n| with y = W x."""
    a = _seq(a)
    xv = as_seq(x).prefix(N)
    y = forward(p, lam, xv, N)
    rhs = build_F(p, lam, a).dense(N) @ y
    return float(np.max(np.abs(a.prefix(N) * xv - rhs)))
