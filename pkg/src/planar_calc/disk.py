"""Harmonic functions on a single disk from equispaced boundary samples.

Interior values come from a normalized trapezoidal Poisson sum

    u(z) = sum_j P(z, t_j) u_j / sum_j P(z, t_j),

which is a convex combination of the samples.  The mean value property at the
center and the maximum principle therefore hold to rounding, and the aliasing
error for a trigonometric polynomial of degree n decays like rho**(M - n) with
rho = |z - c| / r.

Close to the circle the kernel is narrower than the node spacing.  There the
samples are first refined by periodic linear interpolation, which keeps the
operator convex, and the same normalized sum is taken over the finer grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, InvalidInputError, ReflectionError
from .geometry import Arc, Contour, Disk, TWO_PI

# aliasing target for the trapezoidal sum: rho**nodes <= exp(-_ALIAS_EXP)
_ALIAS_EXP = 37.0
_MAX_REFINE = 4096
_CHUNK = 1 << 22


def _is_pow2(m):
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True, eq=False)
class BoundarySamples:
    """Values at ``M`` equispaced angles ``2 pi j / M`` on a circle."""

    disk: Disk
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1:
            raise InvalidInputError("boundary samples must be a 1-d array")
        if not _is_pow2(v.size) or v.size < 4:
            raise InvalidInputError(f"sample count must be a power of two >= 4, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("boundary samples must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, fn, disk: Disk = Disk(0j, 1.0), M: int = 1024):
        theta = TWO_PI * np.arange(M) / M
        z = disk.center + disk.radius * np.exp(1j * theta)
        return cls(disk, np.asarray(fn(z)))

    @property
    def M(self):
        return self.values.size

    @property
    def theta(self):
        return TWO_PI * np.arange(self.M) / self.M

    @property
    def points(self):
        return self.disk.center + self.disk.radius * np.exp(1j * self.theta)

    @property
    def contour(self):
        return Contour((Arc(self.disk.center, self.disk.radius, 0.0, TWO_PI),))

    @property
    def is_real(self):
        return not np.iscomplexobj(self.values) or not np.any(self.values.imag)

    def with_values(self, values):
        return BoundarySamples(self.disk, values)


@dataclass(frozen=True)
class FourierSplit:
    """``u(t) = sum_n holo[n] e^{int} + sum_n conj(antiholo[n]) e^{-int}``.

    ``holo`` has ``M/2 + 1`` entries (n = 0..M/2, Nyquist included) and
    ``antiholo`` has ``M/2`` entries indexed from n = 1 (``antiholo[0]`` is
    the n = 1 coefficient).  On a circle of radius r the holomorphic part is
    ``sum holo[n] ((z - c)/r)**n``.
    """

    holo: np.ndarray
    antiholo: np.ndarray

    def reconstruct(self, theta):
        theta = np.asarray(theta, float)
        n = np.arange(self.holo.size)
        m = np.arange(1, self.antiholo.size + 1)
        pos = np.exp(1j * np.multiply.outer(theta, n)) @ self.holo
        neg = np.exp(-1j * np.multiply.outer(theta, m)) @ np.conj(self.antiholo)
        return pos + neg

    def extend(self, z, disk: Disk = Disk(0j, 1.0)):
        """Harmonic extension ``f(w) + conj(g(w))`` at ``w = (z - c)/r``."""
        w = (np.asarray(z, complex) - disk.center) / disk.radius
        return np.polynomial.polynomial.polyval(w, self.holo) + np.conj(
            w * np.polynomial.polynomial.polyval(w, self.antiholo))


# --------------------------------------------------------------------------
# Poisson extension


def _kernel_block(w, M):
    """Normalized Poisson weights of shape ``(len(w), M)`` for unit-circle nodes."""
    nodes = np.exp(1j * TWO_PI * np.arange(M) / M)
    num = 1.0 - np.abs(w) ** 2
    ker = num[:, None] / np.abs(nodes[None, :] - w[:, None]) ** 2
    return ker / ker.sum(axis=1, keepdims=True)


def _fold(weights, k):
    """Map weights on a k-times refined grid back to coarse nodes.

    Refined node ``j`` sits between coarse nodes ``j // k`` and ``j // k + 1``
    at fraction ``t = (j % k) / k``; linear interpolation distributes its
    weight as ``1 - t`` and ``t``.
    """
    P, Mk = weights.shape
    M = Mk // k
    w = weights.reshape(P, M, k)
    t = np.arange(k) / k
    left = w @ (1.0 - t)
    right = w @ t
    return left + np.roll(right, 1, axis=1)


def _refine_level(rho, M):
    """Smallest power-of-two refinement with ``rho**(M k)`` below the target."""
    with np.errstate(divide="ignore"):
        need = _ALIAS_EXP / (-np.log(np.maximum(rho, 1e-300)) * M)
    # on the circle itself (allowed for closed disks) there is no kernel at all
    need[rho >= 1.0] = np.inf
    need = np.minimum(need, 2 * _MAX_REFINE)
    k = np.ones(rho.shape, int)
    big = need > 1
    k[big] = 2 ** np.ceil(np.log2(need[big])).astype(int)
    return k


def poisson_weights(disk: Disk, M: int, z, closed: bool = False):
    """Dense matrix ``W`` with ``W @ samples`` the harmonic extension at ``z``.

    ``closed=True`` admits points on the circle (within ``1e-12 r``), where the
    row reduces to linear interpolation of the samples.
    """
    z = np.atleast_1d(np.asarray(z, complex))
    w = (z - disk.center) / disk.radius
    rho = np.abs(w)
    limit = 1.0 + 1e-12 if closed else 1.0
    if np.any(rho >= limit) or not np.all(np.isfinite(rho)):
        raise DomainError("evaluation point not inside the disk")
    W = np.zeros((z.size, M))
    k = _refine_level(rho, M)
    edge = k > _MAX_REFINE
    for level in np.unique(k[~edge]):
        idx = np.flatnonzero(k == level)
        step = max(1, _CHUNK // (M * level))
        for s in range(0, idx.size, step):
            block = idx[s:s + step]
            ker = _kernel_block(w[block], M * level)
            W[block] = ker if level == 1 else _fold(ker, level)
    if np.any(edge):
        # within ~1e-5 r of the circle: interpolate the trace directly
        idx = np.flatnonzero(edge)
        pos = (np.angle(w[idx]) % TWO_PI) * M / TWO_PI
        i0 = np.floor(pos).astype(int) % M
        t = pos - np.floor(pos)
        W[idx, i0] += 1.0 - t
        W[idx, (i0 + 1) % M] += t
    return W


def poisson_eval(bd: BoundarySamples, z, closed: bool = False):
    """Harmonic extension of ``bd`` at interior point(s) ``z``."""
    z = np.asarray(z, complex)
    flat = np.atleast_1d(z).ravel()
    out = np.empty(flat.size, complex if np.iscomplexobj(bd.values) else float)
    step = max(1, _CHUNK // (bd.M * 8))
    for s in range(0, flat.size, step):
        out[s:s + step] = poisson_weights(bd.disk, bd.M, flat[s:s + step], closed) @ bd.values
    return out.reshape(z.shape) if z.ndim else out[0]


# --------------------------------------------------------------------------
# Fourier machinery


def fourier_split(bd: BoundarySamples) -> FourierSplit:
    M = bd.M
    c = np.fft.fft(bd.values) / M
    holo = c[: M // 2 + 1].astype(complex)
    # c_{-n} for n = 1..M/2-1; the Nyquist mode already went to holo
    anti = np.zeros(M // 2, complex)
    anti[: M // 2 - 1] = np.conj(c[M - 1: M // 2: -1])
    return FourierSplit(holo, anti)


def conjugate_harmonic(bd: BoundarySamples) -> BoundarySamples:
    """Boundary values of the conjugate function normalized to vanish at the center."""
    if not bd.is_real:
        raise InvalidInputError("conjugate_harmonic needs real boundary data")
    M = bd.M
    c = np.fft.fft(np.real(bd.values))
    n = np.fft.fftfreq(M, 1.0 / M)
    c = -1j * np.sign(n) * c
    c[M // 2] = 0.0  # Nyquist has no well-defined conjugate
    return bd.with_values(np.fft.ifft(c).real)


def schwarz_reflect(upper, disk: Disk = Disk(0j, 1.0), tol: float = 1e-9) -> BoundarySamples:
    """Complete upper half-circle samples by ``u(conj z) = conj(u(z))``.

    ``upper`` holds ``M/2 + 1`` values at angles ``2 pi j / M`` for
    ``j = 0..M/2``, so both real-axis endpoints are included.  The disk is
    assumed centered on the real axis.
    """
    upper = np.asarray(upper, complex)
    M = 2 * (upper.size - 1)
    if not _is_pow2(M) or M < 4:
        raise InvalidInputError("upper samples must number M/2 + 1 with M a power of two >= 4")
    if abs(disk.center.imag) > 0:
        raise InvalidInputError("reflection needs a disk centered on the real axis")
    scale = max(1.0, float(np.max(np.abs(upper))))
    for name, v in (("theta = 0", upper[0]), ("theta = pi", upper[-1])):
        if abs(v.imag) > tol * scale:
            raise ReflectionError(f"data not real at {name}: imaginary part {v.imag:.3e}")
    full = np.empty(M, complex)
    full[: M // 2 + 1] = upper
    full[0] = upper[0].real
    full[M // 2] = upper[-1].real
    full[M // 2 + 1:] = np.conj(upper[M // 2 - 1: 0: -1])
    return BoundarySamples(disk, full)


def trace_interpolant(bd: BoundarySamples):
    """Periodic cubic spline of the samples as a function of the angle."""
    th = np.append(bd.theta, TWO_PI)
    vals = np.append(bd.values, bd.values[0])
    spline = CubicSpline(th, vals, bc_type="periodic")
    return lambda t: spline(np.mod(t, TWO_PI))


# --------------------------------------------------------------------------
# named boundary data, as functions of the boundary point


def _super_abs_values(z):
    r = np.abs(z)
    th = np.angle(z)
    c, s = np.abs(np.cos(th)), np.abs(np.sin(th))
    return r * (np.maximum(c, s) + 1j * np.sign(np.sin(th)) * np.minimum(c, s))


GENERATORS = {
    "const": lambda z: np.ones(np.shape(z)),
    "cos": lambda z: np.real(z),
    "sin": lambda z: np.imag(z),
    "abs_z": np.abs,
    "super_abs": _super_abs_values,
    "re_z2": lambda z: np.real(np.asarray(z) ** 2),
}


def generator(name):
    try:
        return GENERATORS[name]
    except KeyError:
        raise InvalidInputError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}") from None


def random_trig_data(rng, degree=4, decay=2.0, M=1024, disk: Disk = Disk(0j, 1.0)):
    """Random real band-limited samples with coefficients shrinking like ``n**-decay``."""
    n = np.arange(1, degree + 1)
    a = rng.standard_normal(degree) / n ** decay
    b = rng.standard_normal(degree) / n ** decay
    a0 = rng.standard_normal()
    theta = TWO_PI * np.arange(M) / M
    vals = a0 + np.cos(np.outer(theta, n)) @ a + np.sin(np.outer(theta, n)) @ b
    return BoundarySamples(disk, vals)


__all__ = [
    "BoundarySamples",
    "FourierSplit",
    "poisson_weights",
    "poisson_eval",
    "fourier_split",
    "conjugate_harmonic",
    "schwarz_reflect",
    "trace_interpolant",
    "generator",
    "GENERATORS",
    "random_trig_data",
]
