import cmath
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from planar_calc.errors import InvalidInputError, PreconditionError
from planar_calc.triholo import (ONE, S, X, Y, Z, complex_evaluate, field, field_from_json, field_to_json,
                                 homogeneous_basis, laplacian_report, nullity_oracle, pscale, triholo_basis,
                                 triholo_check, triholo_product)

XYZ = field(f=X, g=pscale(Y, -1), h=Z)


def mono(c, ex, ey, ez):
    return {(ex, ey, ez): Fraction(c)}


def test_s_is_the_sixth_root():
    assert S == pytest.approx(cmath.exp(1j * cmath.pi / 3))
    assert abs(S ** 3 + 1) <= 1e-15 and abs(1 - S + S * S) <= 1e-15


def test_check_examples():
    assert triholo_check(field()).residual == 0
    assert triholo_check(XYZ).residual == 0
    assert triholo_check(field(f=X, g=Y, h=Z)).residual > 0


def test_basis_dimensions():
    assert len(triholo_basis(0)) == 3
    assert len(homogeneous_basis(1)) == 3
    for m in range(0, 5):
        assert len(homogeneous_basis(m)) == nullity_oracle(m)
    assert len(triholo_basis(2)) == sum(nullity_oracle(m) for m in range(3))


def test_xyz_is_in_the_linear_span():
    # hand solve: with (f, g, h) linear, the nine relations leave three free slopes
    lin = homogeneous_basis(1)
    M = np.array([[float(t.f.get(e, 0)) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
                  + [float(t.g.get(e, 0)) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
                  + [float(t.h.get(e, 0)) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))] for t in lin])
    target = np.array([1, 0, 0, 0, -1, 0, 0, 0, 1], float)
    coef, *_ = np.linalg.lstsq(M.T, target, rcond=None)
    assert np.max(np.abs(M.T @ coef - target)) <= 1e-12


def test_basis_elements_are_exactly_valid():
    for t in triholo_basis(3):
        assert t.exact and triholo_check(t).residual == 0
    for t in triholo_basis(2, exact=False):
        assert not t.exact and t.valid


def test_basis_degree_guard():
    for d in (-1, 13, 2.0):
        with pytest.raises(InvalidInputError):
            triholo_basis(d)


def test_product_examples():
    sq = triholo_product(XYZ, XYZ)
    want = field(f={(2, 0, 0): Fraction(1), (0, 1, 1): Fraction(2)},
                 g={(1, 1, 0): Fraction(-2), (0, 0, 2): Fraction(-1)},
                 h={(1, 0, 1): Fraction(2), (0, 2, 0): Fraction(1)})
    assert sq == want
    assert triholo_check(sq).residual == 0
    b = triholo_basis(2)[7]
    assert triholo_product(field(f=ONE), b) == b


def test_products_of_degree_two_basis_close():
    basis = triholo_basis(2)
    for a, b in itertools.product(basis, repeat=2):
        p = triholo_product(a, b)
        assert triholo_check(p).residual == 0
        rep = laplacian_report(p)
        assert rep.combination_vanishes and rep.component_identity


def test_evaluate_examples(rng):
    p = tuple(rng.standard_normal(3))
    assert complex_evaluate(field(f=ONE), p) == 1
    assert abs(complex_evaluate(XYZ, (1, 1, 1))) <= 1e-15
    assert complex_evaluate(field(g=ONE), p) == pytest.approx(S, abs=1e-15)


def test_laplacian_examples():
    rep = laplacian_report(XYZ)
    assert not rep.df and not rep.dg and not rep.dh and rep.combination_vanishes
    rep = laplacian_report(triholo_product(XYZ, XYZ))
    assert rep.df == {(0, 0, 0): 2} and rep.dg == {(0, 0, 0): -2} and rep.dh == {(0, 0, 0): 2}
    # 2 - 2 s + 2 s^2 as a complex number
    assert abs(2 - 2 * S + 2 * S * S) <= 1e-15 and rep.combination_vanishes
    rep = laplacian_report(field(f=ONE, g=mono(3, 0, 0, 0), h=mono(-1, 0, 0, 0)))
    assert not rep.df and not rep.dg and not rep.dh and not rep.dx
    with pytest.raises(PreconditionError):
        laplacian_report(field(f=X, g=Y, h=Z))


def test_json_round_trip():
    t = triholo_basis(2)[-1].scaled(Fraction(1, 3))
    obj = field_to_json(t)
    assert field_from_json(obj) == t
    assert field_from_json({"f": [["1/2", 1, 0, 0]]}).f == {(1, 0, 0): Fraction(1, 2)}
    for bad in ([1, 2], {"f": [[1, 0, 0]]}, {"f": [["x", 0, 0, 0]]}, {"f": [[1, -1, 0, 0]]}):
        with pytest.raises(InvalidInputError):
            field_from_json(bad)


# --------------------------------------------------------------------------
# properties

BASIS2 = triholo_basis(2)
coefs = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=len(BASIS2),
                 max_size=len(BASIS2))


def combo(cs):
    t = field()
    for c, b in zip(cs, BASIS2):
        t = t + b.scaled(c)
    return t


@given(coefs, coefs)
def test_random_rational_products_close(c1, c2):
    a, b = combo(c1), combo(c2)
    p = triholo_product(a, b)
    assert triholo_check(p).residual == 0
    rep = laplacian_report(p)
    assert rep.combination_vanishes and rep.component_identity


@given(coefs, coefs, st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_evaluation_is_multiplicative(c1, c2, pt):
    a, b = combo(c1), combo(c2)
    lhs = complex_evaluate(triholo_product(a, b), pt)
    rhs = complex_evaluate(a, pt) * complex_evaluate(b, pt)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))
    fa, fb = a.to_float(), b.to_float()
    assert abs(complex_evaluate(triholo_product(fa, fb), pt) - rhs) <= 1e-10 * max(1.0, abs(rhs))


@given(st.integers(0, 2 ** 32 - 1))
def test_float_mode_within_tolerance(seed):
    rng = np.random.default_rng(seed)
    a = combo(rng.standard_normal(len(BASIS2)).tolist())
    assert not a.exact
    assert triholo_check(triholo_product(a, a)).residual <= 1e-10
