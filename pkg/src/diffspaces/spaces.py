"""Membership diagnostics for c0, c, l_inf, l_p and their W-domains, plus
the witness sequences used to separate the spaces."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import BandParams, LambdaSeq, Membership, RealSeq, Tolerances, Verdict
from .transform import as_seq, forward, inverse
from .triangles import inverse_coefficients

__all__ = [
    "SpaceTag",
    "Diagnostic",
    "classify_base",
    "classify_domain",
    "witness",
    "thm6_z",
    "domain_norm",
    "inclusion_check",
    "InclusionReport",
]

_SLACK = 1e-9


@dataclass(frozen=True)
class SpaceTag:
    base: str
    wrapped: bool = False
    p: Optional[float] = None

    def __post_init__(self):
        if self.base not in ("c0", "c", "linf", "lp"):
            raise ValueError(f"unknown space {self.base!r}")
        if (self.base == "lp") != (self.p is not None):
            raise ValueError("p must be given exactly when base is lp")
        if self.p is not None and not 1.0 <= self.p < np.inf:
            raise ValueError("lp needs 1 <= p < inf")

    @classmethod
    def parse(cls, text: str, wrapped: Optional[bool] = None) -> "SpaceTag":
        """``c0``, ``c``, ``linf``, ``lp:2``; a ``domain:`` prefix marks the
        W-domain variant."""
        text = text.strip()
        is_domain = text.startswith("domain:")
        if is_domain:
            text = text[len("domain:"):]
        if wrapped is not None:
            is_domain = wrapped
        if text.startswith("lp"):
            m = re.fullmatch(r"lp[:(]?\s*([0-9.eE+-]+)\)?", text)
            if not m:
                raise ValueError(f"cannot parse space {text!r}; use lp:P")
            return cls("lp", is_domain, float(m.group(1)))
        return cls(text, is_domain)

    def unwrapped(self) -> "SpaceTag":
        return SpaceTag(self.base, False, self.p)

    def __str__(self):
        name = f"lp:{self.p:g}" if self.base == "lp" else self.base
        return f"domain:{name}" if self.wrapped else name


@dataclass(frozen=True)
class Diagnostic:
    verdict: Verdict
    N: int
    tail_sup: Optional[float] = None
    cauchy_gap: Optional[float] = None
    psum_tail_increment: Optional[float] = None
    limit_estimate: Optional[float] = None
    space: str = ""

    @property
    def status(self) -> Membership:
        return self.verdict.status

    def to_dict(self) -> dict:
        out = {"space": self.space, "verdict": self.verdict.status.value, "N": self.N,
               "evidence": dict(self.verdict.evidence)}
        for name in ("tail_sup", "cauchy_gap", "psum_tail_increment", "limit_estimate"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


def _windows(values: np.ndarray, w: int, count: int = 3) -> list[np.ndarray]:
    """The last ``count`` tail windows, oldest first.

    The newest window has length max(w, N // 2) and each older one is half
    as long, so for large N they are the dyadic blocks [N/8, N/4),
    [N/4, N/2), [N/2, N).  Fixed-length windows cannot see slowly varying
    divergence such as ln(k): its gap over 64 terms at N = 1e5 is 6e-4.
    """
    N = len(values)
    out = []
    hi = N
    length = min(max(w, N // 2), N)
    for _ in range(count):
        lo = hi - length
        if lo < 0 or length < 1:
            break
        out.append(values[lo:hi])
        hi, length = lo, length // 2
    return out[::-1]


def _escaping(stats: list[float], escape: float) -> bool:
    if len(stats) < 3 or min(stats) <= escape:
        return False
    return all(b >= a * (1.0 - _SLACK) for a, b in zip(stats, stats[1:]))


def classify_base(x, tag: SpaceTag, N: int, tol: Optional[Tolerances] = None) -> Diagnostic:
    """Windowed tail diagnostics for x in c0, c, l_inf or l_p."""
    tol = tol or Tolerances()
    if tag.wrapped:
        raise ValueError("classify_base takes an unwrapped tag; use classify_domain")
    if N <= tol.window:
        raise ValueError(f"N = {N} must exceed the window length {tol.window}")
    xv = np.asarray(x.prefix(N) if isinstance(x, RealSeq) else x[:N], dtype=float)
    if len(xv) < N:
        raise ValueError(f"need {N} terms, got {len(xv)}")
    w = tol.window
    wins = _windows(xv, w)
    name = str(tag)

    if not np.all(np.isfinite(xv)):
        ev = {"reason": "non-finite terms", "first_bad": int(np.flatnonzero(~np.isfinite(xv))[0])}
        return Diagnostic(Verdict(Membership.INCONCLUSIVE, ev, N), N, space=name)

    sups = [float(np.max(np.abs(v))) for v in wins]
    null_member = sups[-1] < tol.eps_tail

    if tag.base == "c0":
        status = (Membership.MEMBER if null_member
                  else Membership.NON_MEMBER if _escaping(sups, tol.escape)
                  else Membership.INCONCLUSIVE)
        ev = {"window_sups": sups}
        return Diagnostic(Verdict(status, ev, N), N, tail_sup=sups[-1], space=name)

    if tag.base == "c":
        gaps = [float(np.max(v) - np.min(v)) for v in wins]
        if null_member or gaps[-1] < tol.eps_tail:
            status = Membership.MEMBER
        elif _escaping(gaps, tol.escape):
            status = Membership.NON_MEMBER
        else:
            status = Membership.INCONCLUSIVE
        ev = {"window_gaps": gaps, "window_sups": sups}
        limit = float(xv[-1]) if status is Membership.MEMBER else None
        if limit is not None:
            ev["limit_estimate"] = limit
        return Diagnostic(Verdict(status, ev, N), N, tail_sup=sups[-1], cauchy_gap=gaps[-1],
                          limit_estimate=limit, space=name)

    if tag.base == "linf":
        absx = np.abs(xv)
        before = float(np.max(absx[: N - len(wins[-1])])) if len(wins[-1]) < N else 0.0
        running = float(np.max(absx))
        doublings = [float(np.max(absx[: max(N // 4, 1)])), float(np.max(absx[: max(N // 2, 1)])), running]
        if running <= before + tol.eps_tail:
            status = Membership.MEMBER
        elif (running > tol.escape and all(a > 0 and b >= tol.growth_ratio * a
                                            for a, b in zip(doublings, doublings[1:]))):
            status = Membership.NON_MEMBER
        else:
            status = Membership.INCONCLUSIVE
        ev = {"running_sup": running, "sup_before_last_window": before, "doubling_sups": doublings}
        return Diagnostic(Verdict(status, ev, N), N, tail_sup=sups[-1], space=name)

    # lp
    incs = [float(np.sum(np.abs(v) ** tag.p)) for v in wins]
    if incs[-1] < tol.eps_tail:
        status = Membership.MEMBER
    elif _escaping(incs, tol.escape):
        status = Membership.NON_MEMBER
    else:
        status = Membership.INCONCLUSIVE
    total = float(np.sum(np.abs(xv) ** tag.p))
    ev = {"window_increments": incs, "partial_sum": total}
    return Diagnostic(Verdict(status, ev, N), N, tail_sup=sups[-1], psum_tail_increment=incs[-1], space=name)


def classify_domain(x, tag: SpaceTag, p: BandParams, lam: LambdaSeq, N: int,
                    tol: Optional[Tolerances] = None) -> Diagnostic:
    """Classify x in the W-domain of ``tag`` by classifying W x."""
    y = forward(p, lam, as_seq(x), N)
    diag = classify_base(y, tag.unwrapped(), N, tol)
    return Diagnostic(diag.verdict, diag.N, diag.tail_sup, diag.cauchy_gap, diag.psum_tail_increment,
                      diag.limit_estimate, space=str(SpaceTag(tag.base, True, tag.p)))


def domain_norm(p: BandParams, lam: LambdaSeq, x, N: int, q: Optional[float] = None) -> float:
    """Prefix norm of x in the domain space: sup |W x| or the q-norm of W x."""
    y = forward(p, lam, as_seq(x), N)
    if q is None:
        return float(np.max(np.abs(y)))
    return float(np.sum(np.abs(y) ** q) ** (1.0 / q))


# ---------------------------------------------------------------------------
# witnesses


def _thm4_seq(p: BandParams) -> RealSeq:
    def gen(k):
        d = inverse_coefficients(p, int(k.max()) + 1)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.cumsum(d)[k]
    return RealSeq(gen, provenance="recurrence", label="thm4")


def witness(name: str, p: Optional[BandParams] = None) -> RealSeq:
    """Named separating sequences.

    ``thm4``: x_k = sum_j d_kj (needs band parameters), whose transform is e.
    ``thm5``: ln(k + 3).  ``thm7`` and ``e``: all ones.
    ``e_k(j)`` / ``unit:j``: the j-th unit sequence.
    """
    key = name.strip()
    if key == "thm4":
        if p is None:
            raise ValueError("witness thm4 needs band parameters")
        return _thm4_seq(p)
    if key == "thm5":
        return RealSeq(lambda k: np.log(k + 3.0), label="thm5")
    if key in ("thm7", "e"):
        return RealSeq(lambda k: np.ones(k.shape), label=key)
    m = re.fullmatch(r"(?:e_k\((\d+)\)|unit:(\d+)|e\^?\((\d+)\))", key)
    if m:
        j = int(next(g for g in m.groups() if g is not None))
        return RealSeq.unit(j)
    raise ValueError(f"unknown witness {name!r}")


def thm6_z(p: BandParams, lam: LambdaSeq) -> RealSeq:
    """z_k = |r dl_k + s dl_{k+1} + t dl_{k+2}| / dl_k with dl_k = lambda_k - lambda_{k-1}."""

    def gen(k):
        step = lambda j: lam.values_at(j) - lam.values_at(j - 1)
        dl = step(k)
        return np.abs(p.r * dl + p.s * step(k + 1) + p.t * step(k + 2)) / dl

    return RealSeq(gen, label="thm6_z")


# ---------------------------------------------------------------------------
# inclusion harness


@dataclass
class InclusionReport:
    theorem: int
    hypotheses: dict
    hypothesis_ok: bool
    checks: list = field(default_factory=list)

    @property
    def confirmed(self) -> bool:
        return self.hypothesis_ok and all(c["ok"] for c in self.checks)

    def add(self, name: str, expected: str, observed, ok: bool):
        self.checks.append({"name": name, "expected": expected, "observed": observed, "ok": bool(ok)})

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "hypotheses": self.hypotheses, "hypothesis_ok": self.hypothesis_ok,
                "checks": self.checks, "confirmed": self.confirmed}


def _random_null(rng, N: int) -> np.ndarray:
    return rng.uniform(-1, 1, N) / (np.arange(N) + 1.0)


def inclusion_check(theorem: int, p: BandParams, lam: LambdaSeq, N: Optional[int] = None,
                    tol: Optional[Tolerances] = None, seed: int = 0, p_exp: float = 2.0,
                    samples: int = 5) -> InclusionReport:
    """Reproduce the strict-inclusion evidence for theorem 4, 5, 6 or 7.

    The contained direction is sampled on random members built from random
    transforms; strictness is shown with the named witness.  Violated
    hypotheses are reported in the result rather than raised.
    """
    tol = tol or Tolerances()
    N = N or tol.N_default
    rng = np.random.default_rng(seed)
    scale = abs(p.r) + abs(p.s) + abs(p.t)

    if theorem == 4:
        rep = InclusionReport(4, {}, True)
        x = witness("thm4", p)
        y = forward(p, lam, x, N)
        rep.add("W(thm4 witness) = e", "max |W x - 1| small",
                float(np.max(np.abs(y - 1.0))), np.max(np.abs(y - 1.0)) < 1e-8)
        dc = classify_domain(x, SpaceTag("c", True), p, lam, N, tol)
        d0 = classify_domain(x, SpaceTag("c0", True), p, lam, N, tol)
        rep.add("witness in c-domain", "Member", dc.status.value, dc.status is Membership.MEMBER)
        rep.add("witness not in c0-domain", "NonMember", d0.status.value, d0.status is Membership.NON_MEMBER)
        for i in range(samples):
            xs = inverse(p, lam, _random_null(rng, N), N)
            v = classify_domain(xs, SpaceTag("c", True), p, lam, N, tol).status
            rep.add(f"random c0-domain member {i} in c-domain", "Member", v.value, v is Membership.MEMBER)
        return rep

    if theorem == 5:
        ok = abs(p.total) <= tol.eps_exact * max(scale, 1.0)
        rep = InclusionReport(5, {"r+s+t": p.total, "required": 0.0}, ok)
        if not ok:
            return rep
        x = witness("thm5")
        d = classify_domain(x, SpaceTag("c0", True), p, lam, N, tol)
        b = classify_base(x, SpaceTag("c"), N, tol)
        rep.add("ln(k+3) in c0-domain", "Member", d.status.value, d.status is Membership.MEMBER)
        rep.add("ln(k+3) not in c", "NonMember or Inconclusive", b.status.value, b.status is not Membership.MEMBER)
        for i in range(samples):
            n = np.arange(N) + 1.0
            xs = rng.uniform(-2, 2) + rng.uniform(-1, 1, N) / n ** 2
            v = classify_domain(xs, SpaceTag("c0", True), p, lam, N, tol).status
            rep.add(f"random convergent sequence {i} in c0-domain", "Member", v.value, v is Membership.MEMBER)
        return rep

    if theorem == 6:
        z = thm6_z(p, lam)
        zbar = lambda_mean_transform(lam, z, N)
        zv = classify_base(zbar, SpaceTag("c0"), N, tol)
        holds = zv.status is Membership.MEMBER
        rep = InclusionReport(6, {"z_in_c0_lambda": zv.status.value}, zv.status is not Membership.INCONCLUSIVE)
        rep.add("z in c0^lambda", "Member or NonMember", zv.status.value, rep.hypothesis_ok)
        if holds:
            for i in range(samples):
                xs = rng.uniform(-1, 1, N)
                v = classify_domain(xs, SpaceTag("c0", True), p, lam, N, tol).status
                rep.add(f"random bounded sequence {i} in c0-domain", "Member", v.value, v is Membership.MEMBER)
            w = classify_domain(witness("thm5"), SpaceTag("c0", True), p, lam, N, tol).status
            u = classify_base(witness("thm5"), SpaceTag("linf"), N, tol).status
            rep.add("ln(k+3) in c0-domain", "Member", w.value, w is Membership.MEMBER)
            rep.add("ln(k+3) not bounded", "not Member", u.value, u is not Membership.MEMBER)
        else:
            alt = RealSeq(lambda k: (-1.0) ** k, label="alternating")
            found = []
            for cand in (witness("e"), alt):
                v = classify_domain(cand, SpaceTag("c0", True), p, lam, N, tol).status
                found.append(v.value)
            rep.add("bounded sequence outside c0-domain", "some NonMember", found, "NonMember" in found)
        rep.hypotheses["inclusion_holds"] = holds
        return rep

    if theorem == 7:
        ok = abs(p.total - 1.0) <= tol.eps_exact * max(scale, 1.0)
        rep = InclusionReport(7, {"r+s+t": p.total, "required": 1.0, "p": p_exp}, ok)
        for i in range(samples):
            xs = rng.uniform(-1, 1, N)
            bound = float(np.max(np.abs(forward(p, lam, xs, N))))
            rep.add(f"sup |W x| <= |r|+|s|+|t| for random bounded x {i}", f"<= {scale}", bound,
                    bound <= scale * (1 + 1e-12))
        for i in range(samples):
            y = rng.uniform(-1, 1, N) / (np.arange(N) + 1.0)
            xs = inverse(p, lam, y, N)
            v = classify_domain(xs, SpaceTag("linf", True), p, lam, N, tol).status
            rep.add(f"random l_p-domain member {i} in l_inf-domain", "Member", v.value, v is Membership.MEMBER)
        if ok:
            e = witness("thm7")
            dinf = classify_domain(e, SpaceTag("linf", True), p, lam, N, tol)
            dp = classify_domain(e, SpaceTag("lp", True, p_exp), p, lam, N, tol)
            rep.add("e in l_inf-domain", "Member", dinf.status.value, dinf.status is Membership.MEMBER)
            rep.add(f"e not in l_{p_exp:g}-domain", "NonMember", dp.status.value,
                    dp.status is Membership.NON_MEMBER)
        return rep

    raise ValueError("inclusion_check covers theorems 4, 5, 6 and 7")


def lambda_mean_transform(lam: LambdaSeq, x, N: int) -> np.ndarray:
    """(1/lambda_n) sum_{k<=n} (lambda_k - lambda_{k-1}) x_k for n < N."""
    xv = as_seq(x).prefix(N)
    return np.cumsum(lam.diffs(N) * xv) / lam.prefix(N)
