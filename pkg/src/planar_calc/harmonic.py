"""Harmonic calculus on disk spectra: ``u = f + conj(g)`` on a circle maps to ``f(x) + g(x)*``.

A boundary symbol ``u`` on the circle ``|z| = r`` is sampled, split by FFT
into its holomorphic and antiholomorphic halves, and both power series are
evaluated at ``x / r``.  For a normal ``x`` with spectrum inside the disk this
is the same as applying the harmonic extension of ``u`` to the eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import as_cmatrix, is_star_normal, opnorm, spectral_radius, superpositive_check
from .disk import BoundarySamples, FourierSplit, fourier_split
from .errors import PreconditionError, SymbolDomainError, TruncationError
from .geometry import Disk

TAIL_TOL = 1e-11
# unresolved-tail estimate above which the series is declared divergent
TAIL_FAIL = 1e-4
SUPER_ABS_MODES = 1 << 20
DEFAULT_MODES = 4096

__all__ = [
    "GradedMatrix",
    "HarmonicSymbol",
    "harmonic_calc",
    "graded_parts",
    "super_abs_symbol",
    "super_abs_values",
    "superpositive_abs",
    "ordinary_abs",
    "superpositive_check",
    "symbol_from_function",
]


@dataclass(frozen=True, eq=False)
class HarmonicSymbol:
    """Boundary function on ``|z| = radius`` together with its Fourier split."""

    radius: float
    boundary: BoundarySamples
    split: FourierSplit
    name: str = "custom"

    @property
    def modes(self):
        return self.boundary.M


def symbol_from_function(fn, radius: float, M: int = DEFAULT_MODES, name: str = "custom") -> HarmonicSymbol:
    """Sample ``fn`` (a function of the boundary point) on ``|z| = radius``."""
    if not radius > 0:
        raise SymbolDomainError("symbol radius must be positive")
    bd = BoundarySamples.from_function(fn, Disk(0j, float(radius)), M)
    return HarmonicSymbol(float(radius), bd, fourier_split(bd), name)


def super_abs_values(theta, radius=1.0):
    """``r (max(|cos|, |sin|) + i sign(sin) min(|cos|, |sin|))`` at angle ``theta``."""
    c, s = np.abs(np.cos(theta)), np.abs(np.sin(theta))
    return radius * (np.maximum(c, s) + 1j * np.sign(np.sin(theta)) * np.minimum(c, s))


def super_abs_symbol(radius: float, M: int = SUPER_ABS_MODES) -> HarmonicSymbol:
    if not radius > 0:
        raise SymbolDomainError("symbol radius must be positive")
    theta = 2.0 * np.pi * np.arange(M) / M
    vals = super_abs_values(theta, radius)
    # sin(pi) is not exactly 0 in floating point; the real-axis nodes must be real
    vals[0] = radius
    vals[M // 2] = radius
    bd = BoundarySamples(Disk(0j, float(radius)), vals)
    return HarmonicSymbol(float(radius), bd, fourier_split(bd), "super_abs")


# --------------------------------------------------------------------------
# series evaluation


def _poly_matrix(coeffs, y):
    """``sum_n coeffs[n] y^n`` by Paterson–Stockmeyer (about ``2 sqrt(K)`` products)."""
    K = coeffs.size
    n = y.shape[0]
    if K == 0:
        return np.zeros_like(y)
    s = max(1, int(np.ceil(np.sqrt(K))))
    blocks = -(-K // s)
    c = np.zeros(blocks * s, complex)
    c[:K] = coeffs
    powers = np.empty((s, n, n), complex)
    powers[0] = np.eye(n)
    for i in range(1, s):
        powers[i] = powers[i - 1] @ y
    Ys = powers[s - 1] @ y
    B = np.tensordot(c.reshape(blocks, s), powers, axes=(1, 0))
    out = B[-1]
    for j in range(blocks - 2, -1, -1):
        out = out @ Ys + B[j]
    return out


def _truncation(split: FourierSplit, q: float):
    """Number of modes to keep and the bound on what is dropped."""
    a = np.abs(split.holo)
    b = np.zeros_like(a)
    b[1: split.antiholo.size + 1] = np.abs(split.antiholo)
    n = np.arange(a.size)
    with np.errstate(under="ignore"):
        w = (a + b) * q ** n
    tail = np.cumsum(w[::-1])[::-1]  # tail[k] = sum_{n >= k} w_n
    ok = np.flatnonzero(tail < TAIL_TOL)
    if ok.size:
        K = int(ok[0])
        return max(K, 1), float(tail[K])
    # every mode is needed; judge the unseen part by the last octave
    last = float(np.sum(w[a.size // 2:]))
    return a.size, last


def harmonic_calc(x, u: HarmonicSymbol, waive_normal: bool = False, return_info: bool = False):
    """Apply the harmonic extension of the symbol ``u`` to ``x``.

    Parameters
    ----------
    x : (n, n) array_like
        Normal matrix with spectral radius at most ``u.radius``.
    u : HarmonicSymbol
    waive_normal : bool
        Skip the normality certificate.  For non-normal ``x`` the result is
        still ``f(x) + g(x)*`` but no longer a positive map of ``u``.
    """
    x = as_cmatrix(x)
    if not waive_normal:
        rep = is_star_normal(x)
        if not rep.normal:
            raise PreconditionError(f"matrix is not normal (commutator defect {rep.defect:.3e})")
    r = u.radius
    rad = spectral_radius(x)
    if rad > r * (1 + 1e-9):
        raise SymbolDomainError(f"spectral radius {rad:.6g} exceeds the symbol circle r = {r:.6g}")
    y = x / r
    q = opnorm(y) if not waive_normal else max(opnorm(y), 1.0)
    K, tail = _truncation(u.split, min(q, 1.0) if not waive_normal else q)
    if tail > TAIL_FAIL:
        raise TruncationError(f"series tail not resolved by {u.modes} samples: estimated {tail:.3e}",
                              bound=tail)
    f = _poly_matrix(u.split.holo[:K], y)
    g_coef = np.concatenate([[0.0], u.split.antiholo])[:K]
    g = _poly_matrix(g_coef, y)
    out = f + g.conj().T
    if return_info:
        return out, {"symbol": u.name, "radius": r, "modes": u.modes,
                     "truncation": {"terms": K, "tail_bound": tail}}
    return out


# --------------------------------------------------------------------------
# absolute values and gradings


def superpositive_abs(x, radius: float | None = None, M: int = SUPER_ABS_MODES, return_info=False):
    x = as_cmatrix(x)
    r = opnorm(x) if radius is None else float(radius)
    if r == 0.0:
        return (np.zeros_like(x), {"symbol": "super_abs", "radius": 0.0}) if return_info else np.zeros_like(x)
    return harmonic_calc(x, super_abs_symbol(r, M), return_info=return_info)


def ordinary_abs(x, radius: float | None = None, return_info=False):
    """Harmonic calculus of ``|z|`` on the circle, which is the constant ``r``.

    The harmonic extension of a constant is that constant, so the result is
    ``r I`` whatever the interior spectrum; it agrees with the usual absolute
    value only when every eigenvalue has modulus ``r``.
    """
    x = as_cmatrix(x)
    r = opnorm(x) if radius is None else float(radius)
    if r == 0.0:
        return (np.zeros_like(x), {"symbol": "abs", "radius": 0.0}) if return_info else np.zeros_like(x)
    return harmonic_calc(x, symbol_from_function(np.abs, r, 64, "abs"), return_info=return_info)


@dataclass(frozen=True, eq=False)
class GradedMatrix:
    x: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        x = as_cmatrix(self.x)
        g = as_cmatrix(self.gamma)
        if g.shape != x.shape:
            raise PreconditionError("grading and matrix shapes differ")
        eye = np.eye(g.shape[0])
        if np.max(np.abs(g @ g - eye)) > 1e-12 or np.max(np.abs(g.conj().T @ g - eye)) > 1e-12:
            raise PreconditionError("grading must be a unitary involution")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "gamma", g)


def graded_parts(gx: GradedMatrix):
    """Even and odd parts ``((x + g x g)/2, x - even)``."""
    x, g = gx.x, gx.gamma
    x0 = 0.5 * (x + g @ x @ g)
    return x0, x - x0
