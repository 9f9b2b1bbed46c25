import threading

import numpy as np
import pytest

from diffspaces import (BandParams, InfiniteMatrix, LambdaSeq, Membership, NotConvergentError, RealSeq,
                        class_verdict, condition, ghat_nk, ghat_nk_m, lambda_mean, partial_sum_identity,
                        transform_identity_check, THEOREMS, CONDITION_IDS)
from diffspaces.matclass import MatrixEvaluator

LAM = LambdaSeq.arithmetic(1, 1)
P100 = BandParams(1, 0, 0)
M, NM, I = Membership.MEMBER, Membership.NON_MEMBER, Membership.INCONCLUSIVE
SCHED = (64, 128, 256, 512)


def test_infinite_matrix_constructors():
    A = InfiniteMatrix.from_function(lambda n, k: n + 10 * k)
    assert A.entry(2, 3) == 32
    assert A.block(2, 2).shape == (2, 2)
    D = InfiniteMatrix.from_dense([[1, 2], [3, 4]])
    assert np.array_equal(D.block(3, 3), [[1, 2, 0], [3, 4, 0], [0, 0, 0]])
    R = InfiniteMatrix.single_row([1.0, 2.0])
    assert np.array_equal(R.block(2, 3), [[1, 2, 0], [0, 0, 0]])
    assert InfiniteMatrix.diagonal(RealSeq.constant(2.0)).entry(3, 3) == 2.0
    with pytest.raises(ValueError):
        InfiniteMatrix.from_dense([1, 2])


def test_block_cache_concurrent():
    calls = []

    def fn(nr, nc):
        calls.append((nr, nc))
        return np.add.outer(np.arange(nr), np.arange(nc)).astype(float)

    A = InfiniteMatrix(fn)
    out = []
    threads = [threading.Thread(target=lambda s=s: out.append(A.block(s, s))) for s in (10, 20, 30, 40) * 4]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for b in out:
        assert np.array_equal(b, np.add.outer(np.arange(len(b)), np.arange(len(b))))
    assert len(calls) <= 4


def test_ghat_nk_m_examples():
    ident = InfiniteMatrix.diagonal(RealSeq.constant(1.0))
    for n in range(4):
        for k in range(3):
            expected = (k + 1) * ((n == k) - (n == k + 1))
            assert ghat_nk_m(ident, P100, LAM, n, k, 6) == pytest.approx(expected)
    assert ghat_nk_m(InfiniteMatrix.zero(), P100, LAM, 2, 1, 5) == 0.0
    with pytest.raises(ValueError):
        ghat_nk_m(ident, P100, LAM, 0, 3, 3)


def test_ghat_nk_m_increment_is_two_terms():
    p = BandParams(1.3, -0.4, 0.2)
    A = InfiniteMatrix.from_function(lambda n, k: np.cos(n + k) / (k + 1))
    from diffspaces import inverse_coefficients
    d = inverse_coefficients(p, 30)
    n, k, m = 2, 3, 12
    w_lo, w_hi = (k + 1) / 1.0, (k + 1) / 1.0
    step = ghat_nk_m(A, p, LAM, n, k, m + 1) - ghat_nk_m(A, p, LAM, n, k, m)
    a = A.entry(n, m + 1)
    assert step == pytest.approx(w_lo * d[m + 1 - k] * a - w_hi * d[m - k] * a)


def test_ghat_nk_convergence():
    value, ok = ghat_nk(InfiniteMatrix.from_function(lambda n, k: 0.5 ** k), P100, LAM, 0, 3)
    assert ok and value == pytest.approx(4 * 0.5 ** 4)
    value, ok = ghat_nk(InfiniteMatrix.from_dense([[1.0, 2.0, 3.0]]), BandParams(1, -1, 0), LAM, 0, 1)
    assert ok
    _, ok = ghat_nk(InfiniteMatrix.from_function(lambda n, k: 1.0 + 0 * k), BandParams(1, -1, 0), LAM, 0, 0)
    assert not ok


def test_zero_matrix_every_condition_member():
    ev = MatrixEvaluator(InfiniteMatrix.zero(), BandParams(1, -2, 1), LAM, SCHED)
    for cid in CONDITION_IDS:
        assert ev.condition(cid).verdict is M, cid


def test_zero_matrix_every_theorem_member():
    ev = MatrixEvaluator(InfiniteMatrix.zero(), P100, LAM, SCHED)
    for t in THEOREMS:
        assert class_verdict(t, InfiniteMatrix.zero(), P100, LAM, SCHED, evaluator=ev).verdict is M


def test_diagonal_example():
    A = InfiniteMatrix.diagonal(RealSeq.from_function(lambda n: 0.5 ** n))
    rec = condition("46", A, P100, LAM, SCHED)
    assert rec.verdict is M
    rep = class_verdict(17, A, P100, LAM, SCHED)
    assert rep.verdict is M
    r44 = next(c for c in rep.conditions if c.id == "(44)")
    assert max(r44.values) == pytest.approx(1.5)


def test_log_divergent_example():
    A = InfiniteMatrix.from_function(lambda n, k: 1.0 / (k + 1.0) + 0 * n)
    rec = condition("(44)", A, P100, LAM, SCHED)
    assert rec.verdict is NM
    assert all(b > a for a, b in zip(rec.values, rec.values[1:]))
    assert class_verdict("17", A, P100, LAM, SCHED).verdict is NM


def test_lemma_one_on_lambda_mean():
    rec = condition("L1", InfiniteMatrix.from_triangle(lambda_mean(LAM)), P100, LAM, SCHED)
    assert rec.verdict is NM
    assert np.allclose(rec.values, 1.0, atol=1e-12)


def test_composite_conditions():
    A = InfiniteMatrix.from_triangle(lambda_mean(LAM))
    rec = condition("L4", A, P100, LAM, SCHED)
    assert [p.id for p in rec.parts] == ["(23)", "(24)", "(25)"]
    assert rec.verdict is M
    # columns of the Cesaro mean decay like 1/n: too slow to certify c0 at n < 1024
    assert condition("L12", A, P100, LAM, SCHED).verdict is I
    fast = InfiniteMatrix.from_function(lambda n, k: 2.0 ** (-n - k))
    assert condition("L12", fast, P100, LAM, SCHED).verdict is M
    assert condition("L11", A, P100, LAM, SCHED).verdict is NM


def test_dependency_downgrade():
    # divergent inner series: conditions built on ghat cannot be Member
    A = InfiniteMatrix.from_function(lambda n, k: 1.0 + 0 * n * k)
    rec = condition("(44)", A, BandParams(1, -1, 0), LAM, SCHED)
    assert rec.verdict is not M


def test_bad_inputs():
    with pytest.raises(ValueError):
        condition("(99)", InfiniteMatrix.zero(), P100, LAM)
    with pytest.raises(ValueError):
        class_verdict("21", InfiniteMatrix.zero(), P100, LAM)
    with pytest.raises(ValueError):
        class_verdict("11", InfiniteMatrix.zero(), P100, LAM, p_exp=1.0)


def test_dual_consistency_single_rows():
    rng = np.random.default_rng(12)
    from diffspaces import dual_check
    for rho in rng.uniform(0.2, 0.8, 3):
        a = RealSeq.from_function(lambda k, rho=rho: rho ** k)
        dv = dual_check("gamma", "c0", BandParams(1, -0.5, 0), LAM, a, SCHED).verdict
        mv = class_verdict("13ii", InfiniteMatrix.single_row(a), BandParams(1, -0.5, 0), LAM, SCHED).verdict
        assert dv is mv is M


def test_partial_sum_identity_random():
    rng = np.random.default_rng(7)
    A = InfiniteMatrix.from_dense(rng.normal(size=(6, 40)))
    assert partial_sum_identity(A, BandParams(1.5, 0.5, -0.2), LAM, rng.normal(size=40), 40, 6) < 1e-9


def test_transform_identity():
    A = InfiniteMatrix.from_function(lambda n, k: 2.0 ** (-n - k))
    rng = np.random.default_rng(8)
    y = RealSeq.from_values(np.concatenate([rng.uniform(-1, 1, 40), np.full(2000, 0.3)]))
    from diffspaces import inverse
    x = inverse(P100, LAM, y, 4000)
    y_limit = RealSeq.from_function(lambda k: np.where(k < 40, y.values_at(k), 0.3))
    x = RealSeq.from_values(inverse(P100, LAM, y_limit, 4096))
    assert transform_identity_check(A, P100, LAM, x, 40) < 1e-6
    assert transform_identity_check(InfiniteMatrix.zero(), P100, LAM, x, 10) == 0.0


def test_transform_identity_requires_convergence():
    with pytest.raises(NotConvergentError):
        transform_identity_check(InfiniteMatrix.zero(), P100, LAM, RealSeq.from_function(lambda k: (k + 1.0) ** 2), 10)
