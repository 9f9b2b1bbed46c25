import math

import numpy as np

from diffspaces import Membership, Tolerances
from diffspaces.trend import ConditionRecord, bounded_verdict, combine, jsonable, limit_verdict, sustained, zero_verdict

TOL = Tolerances()
M, N, I = Membership.MEMBER, Membership.NON_MEMBER, Membership.INCONCLUSIVE


def test_bounded():
    assert bounded_verdict([2.0, 2.0, 2.0, 2.0], TOL)[0] is M
    assert bounded_verdict([1.0, 2.0, 4.0, 8.0], TOL)[0] is N
    # log growth: constant increments above the escape bound
    assert bounded_verdict([math.log(n) for n in (64, 128, 256, 512)], TOL)[0] is N
    assert bounded_verdict([1.0, 1.5, 1.7, 1.75], TOL)[0] is I
    assert bounded_verdict([1.0], TOL)[0] is I


def test_limit_and_zero():
    assert limit_verdict([0.5, 0.5, 0.5, 0.5], TOL)[0] is M
    assert limit_verdict([1.0, -1.0, 1.0, -1.0], TOL)[0] is not M
    assert zero_verdict([1e-3, 1e-6, 1e-12, 0.0], TOL)[0] is M
    assert zero_verdict([1.0, 1.0, 1.0, 1.0], TOL)[0] is N


def test_sustained():
    assert sustained([0.7, 0.7, 0.7], 0.01)
    assert not sustained([0.7, 0.3, 0.1], 0.01)
    assert not sustained([0.7, 0.7], 0.01)


def test_combine_and_record():
    a = ConditionRecord("a", "x", [1], [1.0], M, {})
    b = ConditionRecord("b", "y", [1], [1.0], I, {})
    rec = combine("c", "both", [a, b])
    assert rec.verdict is I
    d = rec.to_dict()
    assert [p["id"] for p in d["parts"]] == ["a", "b"]


def test_jsonable():
    out = jsonable({"a": np.float64(1.5), "b": np.arange(2), "c": float("inf"), "d": M, "e": np.bool_(True)})
    assert out == {"a": 1.5, "b": [0, 1], "c": "inf", "d": "Member", "e": True}
