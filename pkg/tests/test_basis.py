import threading

import numpy as np
import pytest

from diffspaces import (BandParams, LambdaSeq, NotConvergentError, RealSeq, basis_matrix, basis_vector,
                        c_space_representation, coefficients, forward, inverse, random_band_params, reconstruct,
                        reconstruction_error, error_table, unit_transform_sequence, witness)

LAM = LambdaSeq.arithmetic(1, 1)


def test_identity_band_basis():
    p = BandParams(1, 0, 0)
    for k in range(4):
        expected = np.zeros(8)
        expected[k], expected[k + 1] = k + 1, -(k + 1)
        assert np.allclose(basis_vector(p, LAM, k).prefix(8), expected)


def test_first_entry_is_one_over_r():
    assert basis_vector(BandParams(4, 1, 1), LAM, 0).prefix(1)[0] == pytest.approx(0.25)


def test_matrix_columns_match_vectors():
    p = BandParams(1.5, -0.4, 0.2)
    lam = LambdaSeq.from_function(lambda k: np.sqrt(k + 1.0))
    Bb = basis_matrix(p, lam, 20)
    for k in range(20):
        assert np.allclose(Bb[:, k], basis_vector(p, lam, k).prefix(20))


def test_dual_system():
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = random_band_params(rng, 1.0)
        Bb = basis_matrix(p, LAM, 40)
        Y = np.column_stack([forward(p, LAM, Bb[:, k], 40) for k in range(40)])
        assert np.allclose(Y, np.eye(40), atol=1e-10)


def test_coefficients_examples():
    p = BandParams(1, -2, 1)
    assert np.allclose(coefficients(p, LAM, basis_vector(p, LAM, 3).prefix(10), 10), np.eye(10)[3])
    assert np.allclose(coefficients(p, LAM, witness("thm4", p), 10), 1.0)
    assert np.allclose(coefficients(p, LAM, np.zeros(5), 5), 0.0)


def test_reconstruct_examples():
    p = BandParams(2, 1, -0.5)
    assert np.allclose(reconstruct(p, LAM, np.eye(10)[2], 5, 10), basis_vector(p, LAM, 2).prefix(10))
    y = np.random.default_rng(0).normal(size=30)
    x = inverse(p, LAM, y, 30)
    assert np.allclose(reconstruct(p, LAM, y, 29, 30), x, atol=1e-10)
    with pytest.raises(ValueError):
        reconstruct(p, LAM, y, 30, 30)


def test_reconstruction_error_equals_tail_sup():
    rng = np.random.default_rng(1)
    p = random_band_params(rng, 1.0)
    y = rng.uniform(-1, 1, 60) / np.arange(1, 61)
    x = inverse(p, LAM, y, 60)
    table = dict(error_table(p, LAM, x, 60))
    for m in (0, 10, 30, 58):
        expected = np.max(np.abs(y[m + 1:]))
        assert reconstruction_error(p, LAM, x, m, 60) == pytest.approx(expected, abs=1e-10)
        assert table[m] == pytest.approx(expected, abs=1e-10)
    assert table[59] == 0.0


def test_c_representation():
    p = BandParams(1, -2, 1)
    de = witness("thm4", p)
    rep = c_space_representation(p, LAM, de, 4096)
    assert rep.limit == pytest.approx(1.0)
    assert np.allclose(rep.residuals, 0.0, atol=1e-9)
    rep0 = c_space_representation(p, LAM, basis_vector(p, LAM, 0).seq, 4096)
    assert rep0.limit == 0.0
    assert np.allclose(rep0.residuals[:5], [1, 0, 0, 0, 0])
    rep2 = c_space_representation(p, LAM, de + basis_vector(p, LAM, 2).seq, 4096)
    assert rep2.limit == pytest.approx(1.0)
    assert np.allclose(rep2.residuals[:5], [0, 0, 1, 0, 0], atol=1e-9)
    assert rep2.error(de + basis_vector(p, LAM, 2).seq, 10, 64) < 1e-9


def test_c_representation_requires_convergence():
    p = BandParams(1, 0, 0)
    with pytest.raises(NotConvergentError) as info:
        c_space_representation(p, LAM, RealSeq.from_function(lambda k: (k + 1.0) ** 2), 4096)
    assert info.value.diagnostic["verdict"] == "NonMember"


def test_unit_transform_sequence():
    p = BandParams(1, -1, 0)
    assert np.allclose(unit_transform_sequence(p).prefix(5), [1, 2, 3, 4, 5])


def test_cache_is_thread_safe():
    p = BandParams(1, -0.5, 0.1)
    lam = LambdaSeq.arithmetic(2, 1)
    results = []

    def worker():
        results.append([basis_vector(p, lam, k).prefix(30) for k in range(20)])

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results:
        for a, b in zip(r, results[0]):
            assert np.array_equal(a, b)
