"""Polynomial solutions of a first-order system in three real variables.

A field is a triple ``(f, g, h)`` of real polynomials in ``x, y, z`` standing
for ``f + s g + s^2 h`` with ``s = e^{i pi/3}`` (so ``s^3 = -1``).  The
constraints are

    f_x = -g_y = h_z,    f_y = -g_z = h_x,    f_z = -g_x = h_y.

These say exactly that the triple is a differentiable function of
``w = x - s y + s^2 z`` in the algebra ``R[s]/(s^3 + 1)``, which is why
products of solutions are solutions again.

Polynomials are dicts ``{(ex, ey, ez): coefficient}`` with coefficients
:class:`fractions.Fraction` by default, so residuals are exact zeros.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, PreconditionError

S = cmath.exp(1j * cmath.pi / 3)
MAX_DEGREE = 12
FLOAT_TOL = 1e-10


# --------------------------------------------------------------------------
# polynomial arithmetic


def _clean(p):
    return {e: c for e, c in p.items() if c != 0}


def padd(*ps):
    out = {}
    for p in ps:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return _clean(out)


def pscale(p, a):
    return _clean({e: a * c for e, c in p.items()})


def pmul(p, q):
    out = {}
    for (e1, c1), (e2, c2) in product(p.items(), q.items()):
        e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
        out[e] = out.get(e, 0) + c1 * c2
    return _clean(out)


def pderiv(p, var):
    out = {}
    for e, c in p.items():
        if e[var]:
            e2 = list(e)
            e2[var] -= 1
            out[tuple(e2)] = out.get(tuple(e2), 0) + c * e[var]
    return _clean(out)


def plaplace(p):
    return padd(*(pderiv(pderiv(p, v), v) for v in range(3)))


def peval(p, pt):
    x, y, z = pt
    return sum(c * x ** e[0] * y ** e[1] * z ** e[2] for e, c in p.items())


def pmaxabs(p):
    return max((abs(c) for c in p.values()), default=0)


X, Y, Z = {(1, 0, 0): Fraction(1)}, {(0, 1, 0): Fraction(1)}, {(0, 0, 1): Fraction(1)}
ONE = {(0, 0, 0): Fraction(1)}


# --------------------------------------------------------------------------
# fields


@dataclass(frozen=True, eq=False)
class TriField:
    f: dict
    g: dict
    h: dict

    @property
    def degree(self):
        return max((sum(e) for p in (self.f, self.g, self.h) for e in p), default=0)

    @property
    def exact(self):
        return all(isinstance(c, (int, Fraction)) for p in (self.f, self.g, self.h) for c in p.values())

    @property
    def valid(self):
        return triholo_check(self).residual <= (0 if self.exact else FLOAT_TOL)

    def components(self):
        return self.f, self.g, self.h

    def __eq__(self, other):
        return all(_clean(a) == _clean(b) for a, b in zip(self.components(), other.components()))

    def __add__(self, other):
        return TriField(*(padd(a, b) for a, b in zip(self.components(), other.components())))

    def scaled(self, a):
        return TriField(*(pscale(p, a) for p in self.components()))

    def to_float(self):
        return TriField(*({e: float(c) for e, c in p.items()} for p in self.components()))


def field(f=None, g=None, h=None) -> TriField:
    return TriField(dict(f or {}), dict(g or {}), dict(h or {}))


class CheckReport(NamedTuple):
    residual: float
    residuals: tuple


def _relations(t: TriField):
    f, g, h = t.components()
    d = lambda p, v: pderiv(p, v)
    neg = lambda p: pscale(p, -1)
    # each group lists three quantities that must coincide
    return (
        (d(f, 0), neg(d(g, 1)), d(h, 2)),
        (d(f, 1), neg(d(g, 2)), d(h, 0)),
        (d(f, 2), neg(d(g, 0)), d(h, 1)),
    )


def triholo_check(t: TriField) -> CheckReport:
    """The nine pairwise differences inside the three relation groups."""
    res = []
    for a, b, c in _relations(t):
        for p, q in ((a, b), (b, c), (a, c)):
            res.append(padd(p, pscale(q, -1)))
    worst = max(pmaxabs(r) for r in res)
    return CheckReport(worst, tuple(res))


def triholo_product(a: TriField, b: TriField) -> TriField:
    """Product in the basis ``1, s, s^2`` reduced with ``s^3 = -1``."""
    f1, g1, h1 = a.components()
    f2, g2, h2 = b.components()
    F = padd(pmul(f1, f2), pscale(padd(pmul(g1, h2), pmul(h1, g2)), -1))
    G = padd(pmul(f1, g2), pmul(g1, f2), pscale(pmul(h1, h2), -1))
    H = padd(pmul(f1, h2), pmul(h1, f2), pmul(g1, g2))
    return TriField(F, G, H)


def complex_evaluate(t: TriField, p) -> complex:
    """``f(p) + s g(p) + s^2 h(p)``.  Distinct triples may give the same function."""
    return complex(peval(t.f, p)) + S * complex(peval(t.g, p)) + S * S * complex(peval(t.h, p))


class LaplacianReport(NamedTuple):
    df: dict
    dg: dict
    dh: dict
    # Δ of the combination, written as a + b s (using s^2 = s - 1): {exp: (a, b)}
    dx: dict

    @property
    def combination_vanishes(self):
        return not self.dx

    @property
    def component_identity(self):
        return _clean(self.df) == _clean(self.dh) == _clean(pscale(self.dg, -1))


def laplacian_report(t: TriField) -> LaplacianReport:
    if not t.valid:
        raise PreconditionError("field does not satisfy the first-order system")
    df, dg, dh = plaplace(t.f), plaplace(t.g), plaplace(t.h)
    # f + s g + s^2 h = (f - h) + s (g + h) because s^2 = s - 1
    re = padd(df, pscale(dh, -1))
    im = padd(dg, dh)
    dx = {e: (re.get(e, 0), im.get(e, 0)) for e in set(re) | set(im)}
    return LaplacianReport(df, dg, dh, dx)


# --------------------------------------------------------------------------
# nullspace basis


def monomials(m):
    """Exponent triples of total degree ``m`` in a fixed order."""
    return [(a, b, m - a - b) for a in range(m, -1, -1) for b in range(m - a, -1, -1)]


def constraint_matrix(m):
    """Rows: the six independent relations, one per monomial of degree ``m - 1``.

    Columns: coefficients of ``f``, then ``g``, then ``h`` on degree-``m``
    monomials.  Entries are integers.
    """
    mons = monomials(m)
    col = {(k, e): k * len(mons) + i for k in range(3) for i, e in enumerate(mons)}
    targets = monomials(m - 1) if m >= 1 else []
    row_of = {e: i for i, e in enumerate(targets)}
    # relations as (component, variable, sign) pairs whose sum must vanish
    pairs = [
        ((0, 0, 1), (1, 1, 1)), ((1, 1, -1), (2, 2, -1)),
        ((0, 1, 1), (1, 2, 1)), ((1, 2, -1), (2, 0, -1)),
        ((0, 2, 1), (1, 0, 1)), ((1, 0, -1), (2, 1, -1)),
    ]
    A = np.zeros((len(pairs) * len(targets), 3 * len(mons)), dtype=object)
    A[:] = 0
    for r, rel in enumerate(pairs):
        for comp, var, sign in rel:
            for e in mons:
                if e[var]:
                    t = list(e)
                    t[var] -= 1
                    A[r * len(targets) + row_of[tuple(t)], col[(comp, e)]] += sign * e[var]
    return A, mons


def rational_nullspace(A):
    """Basis of ``{v : A v = 0}`` by exact row reduction over the rationals."""
    rows, cols = A.shape
    M = [[Fraction(int(v)) for v in row] for row in A]
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        M[r] = [v / piv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                fac = M[i][c]
                M[i] = [a - fac * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fc]
        basis.append(v)
    return basis


def homogeneous_basis(m) -> list:
    if m == 0:
        return [field(f=ONE), field(g=ONE), field(h=ONE)]
    A, mons = constraint_matrix(m)
    out = []
    n = len(mons)
    for v in rational_nullspace(A):
        comps = [{e: v[k * n + i] for i, e in enumerate(mons) if v[k * n + i] != 0} for k in range(3)]
        out.append(TriField(*comps))
    return out


def triholo_basis(d: int, exact: bool = True) -> list:
    """Basis of all solutions of total degree at most ``d``, degree by degree."""
    if not isinstance(d, (int, np.integer)) or not 0 <= d <= MAX_DEGREE:
        raise InvalidInputError(f"degree must be an integer in [0, {MAX_DEGREE}]")
    basis = [t for m in range(d + 1) for t in homogeneous_basis(m)]
    return basis if exact else [t.to_float() for t in basis]


def nullity_oracle(m) -> int:
    """Nullspace dimension of the degree-``m`` constraint matrix from a floating SVD."""
    if m == 0:
        return 3
    A, _ = constraint_matrix(m)
    A = A.astype(float)
    s = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(s > max(A.shape) * np.finfo(float).eps * (s[0] if s.size else 0)))
    return A.shape[1] - rank


# --------------------------------------------------------------------------
# JSON form: {"f": [[coef, ex, ey, ez], ...], "g": [...], "h": [...]}


def _coef_out(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return float(c)


def _coef_in(c):
    if isinstance(c, bool):
        raise InvalidInputError("coefficient must be a number or a 'p/q' string")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        try:
            return Fraction(c)
        except (ValueError, ZeroDivisionError):
            raise InvalidInputError(f"bad rational coefficient {c!r}") from None
    if isinstance(c, float):
        return c
    raise InvalidInputError(f"bad coefficient {c!r}")


def field_to_json(t: TriField) -> dict:
    return {k: [[_coef_out(c), *e] for e, c in sorted(p.items())] for k, p in zip("fgh", t.components())}


def field_from_json(obj) -> TriField:
    if not isinstance(obj, dict):
        raise InvalidInputError("field must be a JSON object with keys f, g, h")
    comps = []
    for k in "fgh":
        terms = obj.get(k, [])
        if not isinstance(terms, list):
            raise InvalidInputError(f"field component {k!r} must be a list of [coef, ex, ey, ez]")
        p = {}
        for term in terms:
            if not isinstance(term, list) or len(term) != 4:
                raise InvalidInputError(f"term {term!r} in {k!r} is not [coef, ex, ey, ez]")
            c, *e = term
            if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in e):
                raise InvalidInputError(f"exponents in {term!r} must be non-negative integers")
            p[tuple(e)] = p.get(tuple(e), 0) + _coef_in(c)
        comps.append(_clean(p))
    unknown = set(obj) - set("fgh")
    if unknown:
        raise InvalidInputError(f"unknown field keys {sorted(unknown)}")
    return TriField(*comps)
