import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from planar_calc.calculus import opnorm
from planar_calc.errors import InvalidInputError
from planar_calc.realops import (decompose_real, isometry_check, kappa_conjugate, real_embed, rotate_pair)


def rand_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_decompose_examples(rng):
    p = decompose_real(np.eye(3))
    assert np.array_equal(p.x0, np.eye(3)) and not np.any(p.x1)
    p = decompose_real(1j * np.eye(3))
    assert not np.any(p.x0) and np.array_equal(p.x1, np.eye(3))
    x = rand_matrix(rng, 5)
    p = decompose_real(x)
    assert p.x0.dtype == float and np.array_equal(p.combine(), x)


def test_embed_examples(rng):
    assert np.array_equal(real_embed(np.array([[1j]])), [[0, 1], [-1, 0]])
    a = rng.standard_normal((3, 3))
    z = np.zeros((3, 3))
    assert np.array_equal(real_embed(a), np.block([[a, z], [z, a]]))
    x = rand_matrix(rng, 4)
    # singular values on both sides
    s_x = np.linalg.svd(x, compute_uv=False)[0]
    s_e = np.linalg.svd(real_embed(x), compute_uv=False)[0]
    assert abs(s_e - s_x) <= 1e-9 * s_x


def test_kappa_examples(rng):
    x = rand_matrix(rng, 3)
    x0, x1 = x.real, x.imag
    y = np.block([[x0, 1j * x1], [1j * x1, x0]])
    assert np.allclose(kappa_conjugate(y), real_embed(x), atol=1e-15)
    assert np.array_equal(kappa_conjugate(np.eye(6)), np.eye(6))
    a = rng.standard_normal((3, 3))
    chain = kappa_conjugate(rotate_pair(a))
    assert np.allclose(chain, np.block([[a, 0 * a], [0 * a, a]]), atol=1e-14)


def test_rotation_chain_reproduces_embedding(rng):
    x = rand_matrix(rng, 4)
    assert np.allclose(kappa_conjugate(rotate_pair(x)), real_embed(x), atol=1e-14)


def test_kappa_rejects_bad_shapes():
    with pytest.raises(InvalidInputError):
        kappa_conjugate(np.eye(3))
    with pytest.raises(InvalidInputError):
        kappa_conjugate(np.ones((2, 4)))


def test_isometry_check_examples(rng):
    assert isometry_check(rand_matrix(rng, 4), level=1, rng=rng).max_defect <= 1e-9
    for _ in range(20):
        assert isometry_check(rand_matrix(rng, 3), level=2, rng=rng).max_defect <= 1e-8
    assert isometry_check(np.zeros((3, 3)), level=2, rng=rng).max_defect == 0.0


def test_isometry_check_guards():
    with pytest.raises(InvalidInputError):
        isometry_check(np.eye(2), level=5)
    with pytest.raises(InvalidInputError):
        isometry_check(np.eye(10), level=4)


# --------------------------------------------------------------------------
# properties


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_level_one_isometry(seed, n):
    x = rand_matrix(np.random.default_rng(seed), n)
    assert abs(opnorm(real_embed(x)) - opnorm(x)) <= 1e-9 * opnorm(x)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_adjoint_goes_to_transpose(seed, n):
    x = rand_matrix(np.random.default_rng(seed), n)
    assert np.array_equal(real_embed(x.conj().T), real_embed(x).T)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6),
       st.floats(-1e3, 1e3, allow_nan=False), st.floats(-1e3, 1e3, allow_nan=False))
def test_real_linearity(seed, n, a, b):
    rng = np.random.default_rng(seed)
    x, y = rand_matrix(rng, n), rand_matrix(rng, n)
    lhs = real_embed(a * x + b * y)
    # the blocks are entrywise copies of real and imaginary parts, so the
    # identity holds bit for bit when both sides round the same products
    rhs = real_embed(a * x) + real_embed(b * y)
    assert np.array_equal(lhs, rhs)
    assert np.allclose(lhs, a * real_embed(x) + b * real_embed(y), rtol=1e-13, atol=1e-12 * (abs(a) + abs(b)))
