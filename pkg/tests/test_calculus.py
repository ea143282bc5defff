import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from planar_calc.calculus import (CalcContour, default_contour, hausdorff, holo_calc, is_star_normal, opnorm,
                                  resolvent, spectral_radius, spectrum, sqrt_superpositive, superpositive_check)
from planar_calc.errors import InvalidInputError, NearSingularError, PreconditionError, QuadratureError
from planar_calc.verify import polyfun, random_normal, random_poly

SP_X = np.array([[3, 1], [-1, 1]], float)
SP_ROOT = np.array([[5, 1], [-1, 3]]) / (2 * math.sqrt(2))
E = np.array([[1, 1], [-1, -1]], float)


def rand_matrix(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2 * n)


# --------------------------------------------------------------------------
# spectrum


def test_spectrum_examples():
    assert np.allclose(spectrum(np.diag([1.0, 2.0])).points, [1, 2], atol=1e-14)
    sp = spectrum(E)
    assert len(sp) == 2 and hausdorff(sp.points, [0, 0]) <= 1e-10
    assert sp.clusters == [(sp.points[0], 2)]


def test_spectrum_matches_companion_oracle(rng):
    for _ in range(5):
        x = rand_matrix(rng, 6)
        roots = np.linalg.eigvals(sla.companion(np.poly(x)))
        assert hausdorff(spectrum(x).points, roots) <= 1e-6


def test_spectrum_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        spectrum(np.array([[1.0, np.inf], [0, 1]]))
    with pytest.raises(InvalidInputError):
        spectrum(np.ones((2, 3)))


def test_spectral_radius_examples(rng):
    assert spectral_radius(np.diag([1.0, -3.0])) == pytest.approx(3.0)
    assert spectral_radius(E) <= 1e-7
    assert opnorm(E) == pytest.approx(np.linalg.svd(E, compute_uv=False)[0], abs=1e-14) == pytest.approx(2.0)
    q, _ = np.linalg.qr(rand_matrix(rng, 5))
    assert spectral_radius(q) == pytest.approx(1.0, abs=1e-12)


# --------------------------------------------------------------------------
# resolvent


def test_resolvent_examples(rng):
    assert np.allclose(resolvent(np.zeros((3, 3)), 1.0), np.eye(3), atol=1e-15)
    assert np.allclose(resolvent(np.diag([1.0, 2.0]), 3.0), np.diag([0.5, 1.0]), atol=1e-15)
    x = rand_matrix(rng, 6)
    z = complex(rng.standard_normal(), rng.standard_normal())
    R = resolvent(x, z)
    assert opnorm((z * np.eye(6) - x) @ R - np.eye(6)) <= 1e-10


def test_resolvent_refuses_spectrum():
    with pytest.raises(NearSingularError) as err:
        resolvent(np.diag([1.0, 2.0]), 2.0)
    assert err.value.distance == 0.0


# --------------------------------------------------------------------------
# holomorphic calculus


@pytest.mark.parametrize("x", [SP_X, E, np.diag([1.0, -2.0, 3j])])
def test_unital_and_identity(x):
    n = x.shape[0]
    assert np.max(np.abs(holo_calc(x, lambda z: np.ones_like(z)) - np.eye(n))) <= 1e-11
    assert np.max(np.abs(holo_calc(x, lambda z: z) - x)) <= 1e-11


def test_worked_square_root_by_contour():
    got = holo_calc(SP_X, np.sqrt, singular_distance=lambda c: abs(c))
    assert np.max(np.abs(got - SP_ROOT)) <= 1e-10


def test_default_contour_encloses_spectrum(rng):
    x = rand_matrix(rng, 7, 3.0)
    C = default_contour(x)
    eig = np.linalg.eigvals(x)
    assert np.all(C.encloses(eig, margin=1e-6 * max(opnorm(x), 1)))
    for i, (c1, r1) in enumerate(C.circles):
        for c2, r2 in C.circles[i + 1:]:
            assert abs(c1 - c2) > r1 + r2


def test_explicit_contour_and_quadrature_failure():
    x = np.eye(2)
    got = holo_calc(x, np.exp, contour=CalcContour(((1 + 0j, 0.5),)))
    assert np.allclose(got, np.e * np.eye(2), atol=1e-12)
    # sqrt is discontinuous across the circle's crossing of its cut
    with pytest.raises(QuadratureError):
        holo_calc(x, np.sqrt, contour=CalcContour(((0j, 2.0),)))


def test_exp_matches_taylor_and_expm(rng):
    for _ in range(5):
        x = rand_matrix(rng, 5)
        x *= 2.0 / opnorm(x) * rng.uniform(0.2, 1.0)
        taylor, term = np.zeros_like(x), np.eye(5, dtype=complex)
        for k in range(50):
            taylor += term
            term = term @ x / (k + 1)
        got = holo_calc(x, np.exp)
        assert np.max(np.abs(got - taylor)) <= 1e-9
        assert np.max(np.abs(got - sla.expm(x))) <= 1e-9


# --------------------------------------------------------------------------
# square roots


def test_sqrt_examples():
    assert np.max(np.abs(sqrt_superpositive(np.eye(3)) - np.eye(3))) <= 1e-12
    y = sqrt_superpositive(SP_X)
    assert np.max(np.abs(y - SP_ROOT)) <= 1e-10
    assert opnorm(y @ y - SP_X) <= 1e-10


def test_sqrt_matches_eigh_oracle(rng):
    for n in (2, 4, 6):
        a = rand_matrix(rng, n)
        x = a @ a.conj().T + 0.1 * np.eye(n)
        w, V = np.linalg.eigh(x)
        want = (V * np.sqrt(w)) @ V.conj().T
        y = sqrt_superpositive(x)
        assert np.max(np.abs(y - want)) <= 1e-9
        assert superpositive_check(y)


def test_sqrt_with_zero_eigenvalue():
    x = np.diag([0.0, 1.0, 4.0])
    y, info = sqrt_superpositive(x, return_info=True)
    assert np.max(np.abs(y - np.diag([0.0, 1.0, 2.0]))) <= 1e-7
    assert opnorm(y @ y - x) <= 1e-8 * 4
    assert info["eps"] > 0


def test_sqrt_rejects_non_superpositive():
    with pytest.raises(PreconditionError):
        sqrt_superpositive(-np.eye(2))
    with pytest.raises(PreconditionError):
        sqrt_superpositive(np.diag([1.0, 1 + 2j]))


# --------------------------------------------------------------------------
# predicates


def test_normality_examples(rng):
    h = rand_matrix(rng, 4)
    assert is_star_normal(h + h.conj().T).normal
    q, _ = np.linalg.qr(rand_matrix(rng, 4))
    assert is_star_normal(q).normal
    rep = is_star_normal(E)
    assert not rep.normal
    comm = np.array([[2, -2], [-2, 2]]) - np.array([[2, 2], [2, 2]])
    assert rep.defect == pytest.approx(opnorm(comm) / 4, rel=1e-12)


def test_superpositive_examples():
    assert superpositive_check(SP_X)
    assert not superpositive_check(-np.eye(2))
    assert superpositive_check(np.eye(2))
    assert superpositive_check(np.diag([1 + 1j, 2 - 2j]))
    assert not superpositive_check(np.diag([1 + 1.01j]))


# --------------------------------------------------------------------------
# properties


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 8), st.integers(0, 8), st.integers(0, 8))
def test_homomorphism_and_spectral_mapping(seed, n, d1, d2):
    rng = np.random.default_rng(seed)
    x = rand_matrix(rng, n)
    p, q = random_poly(rng, d1), random_poly(rng, d2)
    fx, gx = holo_calc(x, polyfun(p)), holo_calc(x, polyfun(q))
    fgx = holo_calc(x, polyfun(np.polynomial.polynomial.polymul(p, q)))
    scale = max(1.0, opnorm(fx) * opnorm(gx))
    assert opnorm(fgx - fx @ gx) <= 1e-8 * scale
    # the polynomial itself is the independent route for f(x)
    horner = sum(c * np.linalg.matrix_power(x, k) for k, c in enumerate(p))
    assert opnorm(fx - horner) <= 1e-8 * max(1.0, opnorm(horner))
    want = polyfun(p)(np.linalg.eigvals(x))
    assert hausdorff(np.linalg.eigvals(fx), want) <= 1e-7 * max(1.0, np.max(np.abs(want)))


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 8))
def test_contractive_on_normal_matrices(seed, n):
    rng = np.random.default_rng(seed)
    x, _, lam = random_normal(rng, n)
    p = random_poly(rng, 5)
    f = polyfun(p)
    assert opnorm(holo_calc(x, f)) <= np.max(np.abs(f(lam))) + 1e-8


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_spectrum_invariant_under_unitary_conjugation(seed, n):
    rng = np.random.default_rng(seed)
    x = rand_matrix(rng, n)
    q, _ = np.linalg.qr(rand_matrix(rng, n))
    assert hausdorff(spectrum(x).points, spectrum(q @ x @ q.conj().T).points) <= 1e-8
