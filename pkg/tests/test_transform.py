import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffspaces import (BandParams, LambdaSeq, RealSeq, TransformPair, forward, inverse, inverse_literal, norms,
                        random_band_params, roundtrip_error, what_matrix, witness)

LAM = LambdaSeq.arithmetic(1, 1)


def test_forward_matches_dense_matrix():
    p = BandParams(2, -0.5, 0.3)
    x = np.random.default_rng(0).normal(size=40)
    assert np.allclose(forward(p, LAM, x, 40), what_matrix(p, LAM).dense(40) @ x, atol=1e-13)


def test_forward_of_inverse_witness_is_e():
    p = BandParams(1, -2, 1)
    assert np.allclose(forward(p, LAM, witness("thm4", p), 500), 1.0, atol=1e-10)


def test_forward_of_e():
    r, s, t = 2.0, 0.7, -0.4
    lam = LambdaSeq.from_function(lambda k: (k + 1.0) ** 1.5)
    y = forward(BandParams(r, s, t), lam, RealSeq.constant(1.0), 50)
    n = np.arange(1, 50)
    expected = (r + s + t) - (s * lam.at(0) + t * lam.at(1)) / lam.prefix(50)[1:]
    assert np.allclose(y[1:], expected)


def test_forward_identity_band():
    y = forward(BandParams(1, 0, 0), LAM, RealSeq.unit(0), 6)
    assert np.allclose(y, 1 / np.arange(1, 7))


def test_inverse_examples():
    assert np.allclose(inverse(BandParams(1, 0, 0), LAM, RealSeq.unit(0), 4), [1, -1, 0, 0])
    p = BandParams(1, -2, 1)
    assert np.allclose(inverse(p, LAM, RealSeq.constant(1.0), 30), witness("thm4", p).prefix(30))


def test_inverse_literal_agrees():
    p = BandParams(1.5, 0.3, -0.2)
    y = np.random.default_rng(1).normal(size=30)
    assert np.allclose(inverse(p, LAM, y, 30), inverse_literal(p, LAM, y, 30), atol=1e-10)


def test_roundtrip_examples():
    rng = np.random.default_rng(2)
    assert roundtrip_error(BandParams(1, 0, 0), LAM, rng.normal(size=50), 50) < 1e-12
    assert roundtrip_error(BandParams(1, -2, 1), LAM, np.zeros(20), 20) == 0.0
    assert roundtrip_error(BandParams(2, 3, 1), LAM, rng.uniform(-1, 1, 200), 200) < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    p = random_band_params(rng, 1.0)
    x, z = rng.normal(size=60), rng.normal(size=60)
    lhs = forward(p, LAM, a * x + b * z, 60)
    rhs = a * forward(p, LAM, x, 60) + b * forward(p, LAM, z, 60)
    assert np.allclose(lhs, rhs, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_roundtrip_well_conditioned(seed):
    rng = np.random.default_rng(seed)
    p = random_band_params(rng, 1.0)
    assert roundtrip_error(p, LAM, rng.uniform(-1, 1, 200), 200) < 1e-8


def test_norms_and_pair():
    out = norms(np.array([3.0, -4.0]))
    assert out["sup_abs"] == 4.0
    assert out["p_norms"]["2.0"] == pytest.approx(5.0)
    pair = TransformPair.from_x(BandParams(1, -1, 0), LAM, RealSeq.constant(1.0), 20)
    assert pair.residual() < 1e-12
    pair = TransformPair.from_y(BandParams(1, -1, 0), LAM, RealSeq.constant(1.0), 20)
    assert pair.residual() < 1e-12
