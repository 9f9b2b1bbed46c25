"""Three-valued verdicts from a functional evaluated along a doubling
schedule of truncations.

Three shapes of claim are supported:

* ``bounded``: sup-type functional stays finite.
* ``limit``: a sequence (partial sums, row entries, ...) converges.
* ``zero``: a sequence converges to 0.

Member needs the last doubling to change the value by less than
``eps_tail`` (relative).  NonMember needs sustained growth: either a
factor of ``growth_ratio`` on every doubling, or increments that stay
above the escape bound and do not shrink (log-type divergence).
Everything else is Inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import Membership, Tolerances

__all__ = ["bounded_verdict", "limit_verdict", "zero_verdict", "sustained", "ConditionRecord", "combine", "jsonable"]

_SLACK = 1e-9


def sustained(increments: Sequence[float], floor: float) -> bool:
    """At least three increments, all above ``floor`` and non-shrinking."""
    inc = [abs(v) for v in increments]
    if len(inc) < 3:
        return False
    inc = inc[-3:]
    if min(inc) <= floor:
        return False
    return all(b >= a * (1.0 - _SLACK) for a, b in zip(inc, inc[1:]))


def _geometric(values: Sequence[float], ratio: float, floor: float) -> bool:
    mags = [abs(v) for v in values]
    if len(mags) < 2 or mags[-1] <= floor:
        return False
    return all(a > 0 and b >= ratio * a for a, b in zip(mags, mags[1:]))


def _evidence(values, extra=None):
    out = {"values": [float(v) for v in values]}
    if extra:
        out.update(extra)
    return out


def bounded_verdict(values: Sequence[float], tol: Tolerances) -> tuple[Membership, dict]:
    vals = list(map(float, values))
    if len(vals) < 2:
        return Membership.INCONCLUSIVE, _evidence(vals, {"reason": "schedule too short"})
    if not np.all(np.isfinite(vals)):
        return Membership.INCONCLUSIVE, _evidence(vals, {"reason": "non-finite functional"})
    prev, last = abs(vals[-2]), abs(vals[-1])
    rel = abs(last - prev) / max(prev, last) if max(prev, last) > 0 else 0.0
    ev = _evidence(vals, {"last_relative_increase": rel})
    if abs(last - prev) <= tol.eps_tail * max(prev, last) + tol.eps_exact:
        return Membership.MEMBER, ev
    increments = np.diff(vals)
    if _geometric(vals, tol.growth_ratio, tol.escape) or sustained(increments, tol.escape):
        return Membership.NON_MEMBER, ev
    return Membership.INCONCLUSIVE, ev


def limit_verdict(values: Sequence[float], tol: Tolerances) -> tuple[Membership, dict]:
    vals = list(map(float, values))
    if len(vals) < 2:
        return Membership.INCONCLUSIVE, _evidence(vals, {"reason": "schedule too short"})
    if not np.all(np.isfinite(vals)):
        return Membership.INCONCLUSIVE, _evidence(vals, {"reason": "non-finite functional"})
    gaps = np.abs(np.diff(vals))
    ev = _evidence(vals, {"cauchy_gap": float(gaps[-1]), "limit_estimate": vals[-1]})
    if gaps[-1] <= tol.eps_tail * max(1.0, abs(vals[-1])):
        return Membership.MEMBER, ev
    if _geometric(vals, tol.growth_ratio, tol.escape) or sustained(gaps, tol.escape):
        return Membership.NON_MEMBER, ev
    return Membership.INCONCLUSIVE, ev


def zero_verdict(values: Sequence[float], tol: Tolerances) -> tuple[Membership, dict]:
    vals = list(map(float, values))
    if not vals:
        return Membership.INCONCLUSIVE, _evidence(vals, {"reason": "schedule too short"})
    if not np.all(np.isfinite(vals)):
        return Membership.INCONCLUSIVE, _evidence(vals, {"reason": "non-finite functional"})
    mags = [abs(v) for v in vals]
    ev = _evidence(vals, {"last_abs": mags[-1]})
    if mags[-1] < tol.eps_tail:
        return Membership.MEMBER, ev
    if len(mags) >= 3 and min(mags[-3:]) > tol.escape:
        tail = mags[-3:]
        rising = all(b >= a * (1.0 - _SLACK) for a, b in zip(tail, tail[1:]))
        settled = abs(vals[-1] - vals[-2]) <= tol.eps_tail * mags[-1]
        if rising or settled:
            return Membership.NON_MEMBER, ev
    return Membership.INCONCLUSIVE, ev


@dataclass
class ConditionRecord:
    """One evaluated condition: functional values along the schedule and the
    verdict drawn from them.  ``parts`` holds sub-conditions of a composite."""

    id: str
    description: str
    schedule: list
    values: list
    verdict: Membership
    evidence: dict = field(default_factory=dict)
    note: Optional[str] = None
    parts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "description": self.description,
            "schedule": [int(v) for v in self.schedule],
            "values": [jsonable(v) for v in self.values],
            "verdict": self.verdict.value,
            "evidence": {k: jsonable(v) for k, v in self.evidence.items()},
        }
        if self.note:
            out["note"] = self.note
        if self.parts:
            out["parts"] = [p.to_dict() for p in self.parts]
        return out


def combine(id: str, description: str, parts: list) -> ConditionRecord:
    """Conjunction of several records."""
    verdict = Membership.conjunction(p.verdict for p in parts)
    return ConditionRecord(id, description, [], [], verdict, parts=list(parts))


def jsonable(v):
    """JSON-friendly copy of numpy scalars and containers."""
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if np.isfinite(f) else repr(f)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, Membership):
        return v.value
    return v
