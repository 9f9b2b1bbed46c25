import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffspaces import (BandParams, GHatKernel, LambdaSeq, Membership, RealSeq, basis_vector, build_F, build_V,
                        dual_check, dual_conditions, f_condition, pairing_test, product_identity_test,
                        random_band_params, subset_objectives, subset_sup_l1, subset_sup_lq)

LAM = LambdaSeq.arithmetic(1, 1)
P100 = BandParams(1, 0, 0)
M, NM = Membership.MEMBER, Membership.NON_MEMBER
geo = RealSeq.from_function(lambda k: 0.5 ** k)
root = RealSeq.from_function(lambda k: 1 / np.sqrt(k + 1.0))


def test_build_F_examples():
    assert np.array_equal(build_F(P100, LAM, RealSeq.zero()).dense(5), np.zeros((5, 5)))
    a = np.random.default_rng(0).normal(size=6)
    F = build_F(P100, LAM, a).dense(6)
    for n in range(1, 6):
        assert F[n, n] == pytest.approx((n + 1) * a[n])
        assert F[n, n - 1] == pytest.approx(-n * a[n])


def test_F_rows_are_scaled_basis_vectors():
    p = BandParams(2, 0.5, -0.3)
    a = np.random.default_rng(1).normal(size=15)
    F = build_F(p, LAM, a).dense(15)
    for k in range(15):
        assert np.allclose(F[:, k], a * basis_vector(p, LAM, k).prefix(15), atol=1e-12)


def test_build_V_examples():
    a = np.random.default_rng(2).normal(size=8)
    V = build_V(P100, LAM, a).dense(8)
    for k in range(6):
        for n in range(k + 1, 8):
            assert V[n, k] == pytest.approx((k + 1) * (a[k] - a[k + 1]))
    V0 = build_V(BandParams(1, -0.5, 0.2), LAM, RealSeq.unit(0)).dense(6)
    assert np.count_nonzero(V0[:, 1:]) == 0


def test_kernel_table_matches_direct_sums():
    p = BandParams(1.2, -0.7, 0.3)
    kern = GHatKernel(p, LAM, geo)
    T = kern.table(12)
    for n in range(1, 12):
        for k in range(n):
            assert T[n, k] == pytest.approx(kern(k, n), abs=1e-12)
    with pytest.raises(ValueError):
        kern(3, 3)


def test_subset_examples():
    assert subset_sup_l1(np.eye(4), 3, 4) == (4.0, 4.0)
    assert subset_sup_l1(np.zeros((4, 4)), 3, 4) == (0.0, 0.0)
    n, k = np.arange(4)[:, None], np.arange(6)[None, :]
    alt = (-1.0) ** k / 2.0 ** n
    exact, surrogate = subset_sup_l1(alt, 5, 4)
    evens = np.abs(alt[:, ::2].sum(axis=1)).sum()
    assert exact == pytest.approx(evens)
    assert surrogate == pytest.approx(np.abs(alt).sum())
    assert subset_sup_lq(np.eye(4), 2.0, 3, 4) == 4.0
    assert subset_sup_lq(np.diag(0.5 ** np.arange(5)), 2.0, 4, 5) == pytest.approx(np.sum(0.25 ** np.arange(5)))
    assert subset_sup_lq(np.zeros((3, 3)), 2.0, 2, 3) == 0.0


def test_subset_guard():
    with pytest.raises(ValueError):
        subset_sup_l1(np.zeros((2, 20)), 17, 2)
    with pytest.raises(ValueError):
        subset_sup_lq(np.zeros((20, 2)), 2.0, 17, 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 14), st.integers(1, 8), st.sampled_from([1.0, 1.5, 2.0]))
def test_incremental_matches_brute(seed, count, length, power):
    vecs = np.random.default_rng(seed).normal(size=(count, length))
    assert np.array_equal(subset_objectives(vecs, power, "incremental"), subset_objectives(vecs, power, "brute"))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_l1_sandwich(seed):
    M = np.random.default_rng(seed).normal(size=(6, 9))
    exact, surrogate = subset_sup_l1(M, 8, 6)
    assert exact <= surrogate <= 4 * exact


def test_f_condition_examples():
    f4 = f_condition(4, P100, LAM, geo)
    assert f4.verdict is M
    assert f4.values[-1] == pytest.approx(1.0)
    assert f_condition(4, P100, LAM, root).verdict is NM
    for i in range(1, 8):
        assert f_condition(i, BandParams(1, -2, 1), LAM, RealSeq.zero()).verdict is M


def test_f1_records_exact_oracle():
    rec = f_condition(1, P100, LAM, geo)
    assert rec.verdict is M
    assert "exact_subset_sup" in rec.evidence or "oracle" in str(rec.evidence)


def test_dual_examples():
    assert dual_check("beta", "c0", P100, LAM, geo).verdict is M
    rep = dual_check("beta", "c0", P100, LAM, root)
    assert rep.verdict is NM
    assert next(c for c in rep.conditions if c.id == "f4").verdict is NM
    finite = RealSeq.from_values([2.0, -1.0, 0.5])
    for dual in ("alpha", "beta", "gamma"):
        for space in ("c0", "c", "linf", "lp:3"):
            assert dual_check(dual, space, BandParams(1, -1, 0), LAM, finite).verdict is M


def test_dual_conditions_table():
    assert [i for i, _ in dual_conditions("beta", "c")] == [2, 3, 4, 5]
    assert dual_conditions("alpha", "lp:2") == [(6, 2.0)]
    with pytest.raises(ValueError):
        dual_conditions("delta", "c0")
    with pytest.raises(ValueError):
        dual_conditions("alpha", "lp:1")


def test_report_to_dict():
    d = dual_check("gamma", "linf", P100, LAM, geo).to_dict()
    assert d["verdict"] == "Member" and d["space"] == "linf"
    assert {c["id"] for c in d["conditions"]} == {"f3", "f4"}


def test_identities():
    a0 = RealSeq.unit(0)
    x = np.random.default_rng(3).normal(size=20)
    p = BandParams(2, 1, 1)
    assert pairing_test(p, LAM, a0, x, 20) < 1e-12
    assert pairing_test(p, LAM, geo, np.zeros(20), 20) == 0.0
    rng = np.random.default_rng(4)
    assert pairing_test(p, LAM, rng.normal(size=50), rng.normal(size=50), 50) < 1e-8
    for _ in range(5):
        q = random_band_params(rng)
        assert product_identity_test(q, LAM, rng.normal(size=50), rng.normal(size=50), 50) < 1e-8
